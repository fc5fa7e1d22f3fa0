#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "holonet/error.hpp"
#include "holonet/holocalc.hpp"

namespace holonet {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw InputError("bank config: '" + key + "' expects a finite number, got '" + v + "'");
  }
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw InputError("bank config: '" + key + "' expects an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InputError("bank config: '" + key + "' expects true/false, got '" + v + "'");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string to_config_text(const FilterBankSpec& spec) {
  std::ostringstream os;
  if (const auto* f = std::get_if<FaberBank>(&spec.kind)) {
    os << "kind = faber\n"
       << "K = " << f->max_order << "\n"
       << "gamma = " << fmt(f->gamma) << "\n"
       << "include_order_zero = " << (f->include_order_zero ? "true" : "false") << "\n";
  } else {
    const auto& r = std::get<ResolventBank>(spec.kind);
    os << "kind = resolvent\n"
       << "K = " << r.max_power << "\n"
       << "y_real = " << fmt(r.pole.real()) << "\n"
       << "y_imag = " << fmt(r.pole.imag()) << "\n";
  }
  return os.str();
}

FilterBankSpec parse_bank_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("bank config: expected 'key = value', got '" + line + "'");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  const auto kind_it = kv.find("kind");
  if (kind_it == kv.end()) throw InputError("bank config: missing 'kind'");

  FilterBankSpec spec;
  if (kind_it->second == "faber") {
    FaberBank f;
    for (const auto& [k, v] : kv) {
      if (k == "kind") continue;
      if (k == "K") f.max_order = to_int(k, v);
      else if (k == "gamma") f.gamma = to_double(k, v);
      else if (k == "include_order_zero") f.include_order_zero = to_bool(k, v);
      else throw InputError("bank config: unknown key '" + k + "' for a faber bank");
    }
    spec.kind = f;
  } else if (kind_it->second == "resolvent") {
    ResolventBank r;
    double re = r.pole.real(), im = r.pole.imag();
    for (const auto& [k, v] : kv) {
      if (k == "kind") continue;
      if (k == "K") r.max_power = to_int(k, v);
      else if (k == "y_real") re = to_double(k, v);
      else if (k == "y_imag") im = to_double(k, v);
      else throw InputError("bank config: unknown key '" + k + "' for a resolvent bank");
    }
    r.pole = cplx(re, im);
    spec.kind = r;
  } else {
    throw InputError("bank config: unknown kind '" + kind_it->second + "'");
  }
  spec.validate();
  return spec;
}

FilterBankSpec parse_bank_config(const std::string& text) {
  std::istringstream in(text);
  return parse_bank_config(in);
}

}  // namespace holonet
