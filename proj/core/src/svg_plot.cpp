#include "holonet/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

#include "holonet/error.hpp"

namespace holonet {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr std::array<const char*, 6> kColours{"#1b6ca8", "#d1495b", "#2e933c", "#edae49", "#6b4c9a", "#444444"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_loglog_svg(std::ostream& out, const std::string& title, const std::string& x_label,
                      const std::vector<double>& x, const std::vector<PlotSeries>& series) {
  for (const auto& s : series) {
    if (s.y.size() != x.size()) throw ShapeMismatch("plot series '" + s.label + "' does not match x grid");
  }
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] <= 0.0) continue;
    xmin = std::min(xmin, std::log10(x[k]));
    xmax = std::max(xmax, std::log10(x[k]));
    for (const auto& s : series) {
      if (s.y[k] > 0.0) {
        ymin = std::min(ymin, std::log10(s.y[k]));
        ymax = std::max(ymax, std::log10(s.y[k]));
      }
    }
  }
  if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0;
  if (!std::isfinite(ymin)) ymin = 0.0, ymax = 1.0;
  xmin = std::floor(xmin), xmax = std::max(std::ceil(xmax), xmin + 1.0);
  ymin = std::floor(ymin), ymax = std::max(std::ceil(ymax), ymin + 1.0);

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double lx) { return kLeft + (lx - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double ly) { return kTop + (ymax - ly) / (ymax - ymin) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"15\">" << escape(title) << "</text>\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double e = xmin; e <= xmax; e += 1.0) {
    out << "<line x1=\"" << px(e) << "\" y1=\"" << kTop << "\" x2=\"" << px(e) << "\" y2=\"" << kTop + ph
        << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << px(e) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">1e" << e
        << "</text>\n";
  }
  for (double e = ymin; e <= ymax; e += 1.0) {
    out << "<line x1=\"" << kLeft << "\" y1=\"" << py(e) << "\" x2=\"" << kLeft + pw << "\" y2=\"" << py(e)
        << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(e) + 4 << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = kColours[s % kColours.size()];
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (x[k] > 0.0 && series[s].y[k] > 0.0) {
        out << px(std::log10(x[k])) << ',' << py(std::log10(series[s].y[k])) << ' ';
      }
    }
    out << "\"/>\n";
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(s);
    out << "<line x1=\"" << kLeft + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + pw + 32 << "\" y2=\"" << ly
        << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kLeft + pw + 38 << "\" y=\"" << ly + 4 << "\">" << escape(series[s].label) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace holonet
