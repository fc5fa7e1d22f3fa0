#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "holonet/error.hpp"

namespace holonet::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string dotted(const std::string& section, const std::string& key) { return section + "." + key; }

const std::vector<std::string> kCommands{"filter-apply", "reaches", "coarsen", "converge",
                                         "train", "eval", "gradcheck", "oracle-check"};

}  // namespace

const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema{
      {"run", "command", "oracle-check", "subcommand"},
      {"run", "seed", "0", "seed for every random draw"},
      {"run", "threads", "1", "worker threads for contour quadrature"},
      {"run", "output", "holonet-out", "output directory"},
      {"graph", "path", "", "edge-list file"},
      {"graph", "weights", "", "node-weight file (default: <stem>.weights.tsv if present)"},
      {"graph", "scale", "1", "high-tier scale c for two-scale graphs"},
      {"filter", "operator", "adjacency", "adjacency | laplacian | fabernet"},
      {"filter", "function", "polynomial", "polynomial | resolvent | exp"},
      {"filter", "coefficients", "0, 0, 0, 1", "polynomial coefficients, constant term first"},
      {"filter", "pole_real", "-1", "resolvent pole, real part"},
      {"filter", "pole_imag", "0", "resolvent pole, imaginary part"},
      {"filter", "power", "1", "resolvent power"},
      {"filter", "quadrature", "256", "trapezoidal nodes on the contour"},
      {"filter", "radius", "0", "contour radius (0: 1.1 min(||T||_1, ||T||_inf))"},
      {"bank", "kind", "faber", "faber | resolvent"},
      {"bank", "K", "2", "highest power"},
      {"bank", "gamma", "0.5", "Faber discount"},
      {"bank", "include_order_zero", "true", "Faber identity atom"},
      {"bank", "y_real", "-1", "resolvent pole, real part"},
      {"bank", "y_imag", "0", "resolvent pole, imaginary part"},
      {"model", "operator", "fabernet", "adjacency | laplacian | fabernet"},
      {"model", "widths", "1, 16, 16", "F_0 .. F_L"},
      {"model", "alpha", "0.5", "forward/backward mixing"},
      {"model", "rho", "split_relu", "split_relu | split_abs"},
      {"model", "field", "real", "real | complex"},
      {"model", "output_dim", "2", "readout outputs"},
      {"train", "task", "direction", "direction | two_scale"},
      {"train", "loss", "auto", "auto | cross_entropy | mae | mse"},
      {"train", "optimizer", "adam", "sgd | adam"},
      {"train", "learning_rate", "0.01", "step size"},
      {"train", "epochs", "200", "full-batch epochs"},
      {"train", "weight_decay", "0", "L2 penalty"},
      {"train", "checkpoint", "", "checkpoint read by eval"},
      {"data", "n_nodes", "200", "direction task graph size"},
      {"data", "n_graphs", "120", "two-scale training graphs"},
      {"data", "n_test", "40", "two-scale test graphs"},
      {"data", "noise", "0", "feature noise (direction) / target noise (two_scale)"},
      {"data", "cycles", "1", "direction task Hamiltonian cycles"},
      {"data", "symmetrize", "false", "replace W by (W + W^T)/2"},
      {"data", "c_min", "100", "two-scale training scales, lower end"},
      {"data", "c_max", "10000", "two-scale training scales, upper end"},
      {"converge", "c_grid", "1, 10, 100, 1000, 10000, 100000, 1000000", "scales"},
      {"converge", "y_real", "-1", "resolvent pole, real part"},
      {"converge", "y_imag", "0", "resolvent pole, imaginary part"},
      {"converge", "filter_order", "3", "resolvent powers in the filter gap"},
      {"converge", "assert", "true", "exit 1 unless every gap column decays"},
      {"converge", "max_ratio", "0.001", "required final/initial gap ratio"},
      {"check", "tolerance", "1e-5", "gradcheck relative tolerance"},
      {"check", "trials", "50", "random matrices in oracle-check"},
      {"check", "max_nodes", "20", "largest random matrix in oracle-check"},
      {"check", "nodes", "8", "random graph size in gradcheck"},
  };
  return schema;
}

RunConfig::RunConfig() {
  for (const auto& k : config_schema()) values_[dotted(k.section, k.key)] = k.default_value;
}

void RunConfig::set(const std::string& section, const std::string& key, const std::string& value) {
  const auto it = values_.find(dotted(section, key));
  if (it == values_.end()) throw InputError("unknown config key '" + dotted(section, key) + "'");
  it->second = value;
}

void RunConfig::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw InputError("expected section.key=value, got '" + assignment + "'");
  }
  set(trim(assignment.substr(0, dot)), trim(assignment.substr(dot + 1, eq - dot - 1)),
      trim(assignment.substr(eq + 1)));
}

void RunConfig::merge(std::istream& in, const std::string& source_name) {
  std::string section;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    const std::string ctx = source_name + ":" + std::to_string(line_no) + ": ";
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw InputError(ctx + "malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      bool known = false;
      for (const auto& k : config_schema()) known = known || k.section == section;
      if (!known) throw InputError(ctx + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError(ctx + "expected 'key = value', got '" + line + "'");
    if (section.empty()) throw InputError(ctx + "key outside of a [section]");
    try {
      set(section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const InputError& e) {
      throw InputError(ctx + e.what());
    }
  }
}

void RunConfig::merge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  merge(in, path);
}

const std::string& RunConfig::text(const std::string& section, const std::string& key) const {
  const auto it = values_.find(dotted(section, key));
  if (it == values_.end()) throw InputError("unknown config key '" + dotted(section, key) + "'");
  return it->second;
}

double RunConfig::number(const std::string& section, const std::string& key) const {
  const std::string& v = text(section, key);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw InputError("config key '" + dotted(section, key) + "' expects a number, got '" + v + "'");
  }
  return out;
}

long RunConfig::integer(const std::string& section, const std::string& key) const {
  const std::string& v = text(section, key);
  long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw InputError("config key '" + dotted(section, key) + "' expects an integer, got '" + v + "'");
  }
  return out;
}

bool RunConfig::flag(const std::string& section, const std::string& key) const {
  const std::string& v = text(section, key);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw InputError("config key '" + dotted(section, key) + "' expects true or false, got '" + v + "'");
}

std::vector<double> RunConfig::numbers(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(text(section, key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size() || !std::isfinite(v)) {
      throw InputError("config key '" + dotted(section, key) + "' expects a comma-separated list of numbers");
    }
    out.push_back(v);
  }
  return out;
}

FilterBankSpec RunConfig::bank() const {
  const std::string& kind = text("bank", "kind");
  FilterBankSpec spec;
  if (kind == "faber") {
    spec = FilterBankSpec::faber(static_cast<int>(integer("bank", "K")), number("bank", "gamma"),
                                 flag("bank", "include_order_zero"));
  } else if (kind == "resolvent") {
    spec = FilterBankSpec::resolvent(static_cast<int>(integer("bank", "K")),
                                     {number("bank", "y_real"), number("bank", "y_imag")});
  } else {
    throw InputError("bank.kind must be faber or resolvent, got '" + kind + "'");
  }
  spec.validate();
  return spec;
}

ModelSpec RunConfig::model() const {
  ModelSpec s;
  s.op = operator_kind_from_string(text("model", "operator"));
  s.fwd_bank = bank();
  s.bwd_bank = s.fwd_bank;
  s.widths.clear();
  for (double w : numbers("model", "widths")) {
    if (w < 1.0 || w != std::floor(w)) throw InputError("model.widths must be positive integers");
    s.widths.push_back(static_cast<Eigen::Index>(w));
  }
  s.alpha = number("model", "alpha");
  s.rho = nonlinearity_from_string(text("model", "rho"));
  s.field = scalar_field_from_string(text("model", "field"));
  s.output_dim = integer("model", "output_dim");
  s.validate();
  return s;
}

OptimizerConfig RunConfig::optimizer() const {
  OptimizerConfig o;
  o.kind = optimizer_from_string(text("train", "optimizer"));
  o.learning_rate = number("train", "learning_rate");
  o.epochs = static_cast<int>(integer("train", "epochs"));
  o.weight_decay = number("train", "weight_decay");
  if (o.learning_rate < 0.0) throw InputError("train.learning_rate must be non-negative");
  if (o.epochs < 0) throw InputError("train.epochs must be non-negative");
  return o;
}

void RunConfig::validate() const {
  const std::string& command = text("run", "command");
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
    throw InputError("unknown command '" + command + "'");
  }
  if (integer("run", "seed") < 0) throw InputError("run.seed must be non-negative");
  if (integer("run", "threads") < 1) throw InputError("run.threads must be >= 1");
  if (text("run", "output").empty()) throw InputError("run.output must not be empty");
  if (!(number("graph", "scale") > 0.0)) throw InputError("graph.scale must be positive");

  operator_kind_from_string(text("filter", "operator"));
  const std::string& fn = text("filter", "function");
  if (fn != "polynomial" && fn != "resolvent" && fn != "exp") {
    throw InputError("filter.function must be polynomial, resolvent or exp");
  }
  numbers("filter", "coefficients");
  number("filter", "pole_real");
  number("filter", "pole_imag");
  if (integer("filter", "power") < 1) throw InputError("filter.power must be >= 1");
  if (integer("filter", "quadrature") < 16) throw InputError("filter.quadrature must be >= 16");
  if (number("filter", "radius") < 0.0) throw InputError("filter.radius must be non-negative");

  const ModelSpec spec = model();
  optimizer();
  const std::string& task = text("train", "task");
  if (task != "direction" && task != "two_scale") throw InputError("train.task must be direction or two_scale");
  const std::string& loss = text("train", "loss");
  if (loss != "auto") loss_from_string(loss);
  if (task == "two_scale" && spec.widths.front() != kChargeClasses) {
    throw InputError("two_scale task has " + std::to_string(kChargeClasses) +
                     " one-hot input features; set model.widths to start with " + std::to_string(kChargeClasses));
  }
  if (task == "direction" && loss != "auto" && loss != "cross_entropy") {
    throw InputError("direction task is a classification task; use train.loss = cross_entropy");
  }
  if (task == "direction" && spec.output_dim < 2) throw InputError("direction task needs model.output_dim >= 2");

  if (integer("data", "n_nodes") < 2 || integer("data", "n_nodes") % 2 != 0) {
    throw InputError("data.n_nodes must be even and >= 2");
  }
  if (integer("data", "n_graphs") < 1 || integer("data", "n_test") < 1) {
    throw InputError("data.n_graphs and data.n_test must be positive");
  }
  if (number("data", "noise") < 0.0) throw InputError("data.noise must be non-negative");
  if (integer("data", "cycles") < 0) throw InputError("data.cycles must be non-negative");
  flag("data", "symmetrize");
  if (!(number("data", "c_min") > 0.0 && number("data", "c_max") >= number("data", "c_min"))) {
    throw InputError("data.c_min and data.c_max must satisfy 0 < c_min <= c_max");
  }

  const auto grid = numbers("converge", "c_grid");
  if (grid.empty()) throw InputError("converge.c_grid must not be empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0) || (k > 0 && !(grid[k] > grid[k - 1]))) {
      throw InputError("converge.c_grid must be positive and strictly increasing");
    }
  }
  number("converge", "y_real");
  number("converge", "y_imag");
  if (integer("converge", "filter_order") < 1) throw InputError("converge.filter_order must be >= 1");
  flag("converge", "assert");
  if (!(number("converge", "max_ratio") > 0.0)) throw InputError("converge.max_ratio must be positive");

  if (!(number("check", "tolerance") > 0.0)) throw InputError("check.tolerance must be positive");
  if (integer("check", "trials") < 1) throw InputError("check.trials must be >= 1");
  if (integer("check", "max_nodes") < 1) throw InputError("check.max_nodes must be >= 1");
  if (integer("check", "nodes") < 2) throw InputError("check.nodes must be >= 2");

  if (command == "eval" && text("train", "checkpoint").empty()) {
    throw InputError("eval needs train.checkpoint");
  }
  if ((command == "filter-apply" || command == "reaches" || command == "coarsen") &&
      text("graph", "path").empty()) {
    throw InputError(command + " needs graph.path (or --graph)");
  }
}

void RunConfig::write(std::ostream& out) const {
  std::string section;
  for (const auto& k : config_schema()) {
    if (k.section != section) {
      if (!section.empty()) out << '\n';
      section = k.section;
      out << '[' << section << "]\n";
    }
    out << k.key << " = " << values_.at(dotted(k.section, k.key)) << '\n';
  }
}

}  // namespace holonet::cli
