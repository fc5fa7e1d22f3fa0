#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace holonet {

struct PlotSeries {
  std::string label;
  std::vector<double> y;
};

// Log-log line plot of several series over a shared positive x grid.
// Non-positive values are dropped from their series.
void write_loglog_svg(std::ostream& out, const std::string& title, const std::string& x_label,
                      const std::vector<double>& x, const std::vector<PlotSeries>& series);

}  // namespace holonet
