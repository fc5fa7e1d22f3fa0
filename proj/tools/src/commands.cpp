#include "commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "holonet/checkpoint.hpp"
#include "holonet/coarse.hpp"
#include "holonet/error.hpp"
#include "holonet/experiments.hpp"
#include "holonet/graph_io.hpp"
#include "holonet/svg_plot.hpp"

namespace holonet::cli {

namespace fs = std::filesystem;

namespace {

fs::path output_dir(const RunConfig& c) {
  fs::path dir = c.text("run", "output");
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

std::optional<fs::path> weights_path(const RunConfig& c) {
  const std::string& w = c.text("graph", "weights");
  if (w.empty()) return std::nullopt;
  return fs::path(w);
}

std::uint64_t seed_of(const RunConfig& c) { return static_cast<std::uint64_t>(c.integer("run", "seed")); }
int threads_of(const RunConfig& c) { return static_cast<int>(c.integer("run", "threads")); }

std::string format_set(const std::vector<std::size_t>& members, std::size_t base) {
  std::ostringstream os;
  os << '{';
  for (std::size_t k = 0; k < members.size(); ++k) os << (k ? ", " : "") << members[k] + base;
  os << '}';
  return os.str();
}

void write_matrix_csv(std::ostream& out, const CMat& m) {
  out.precision(17);
  out << "row,col,re,im\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << i << ',' << j << ',' << m(i, j).real() << ',' << m(i, j).imag() << '\n';
    }
  }
}

// Circle around the eigenvalues' bounding box with radius the geometric mean
// of the spectral extent and the pole distance.
Contour separating_contour(const CMat& t, cplx pole, int quadrature) {
  const CVec ev = Eigen::ComplexEigenSolver<CMat>(t, false).eigenvalues();
  const cplx lo{ev.real().minCoeff(), ev.imag().minCoeff()};
  const cplx hi{ev.real().maxCoeff(), ev.imag().maxCoeff()};
  const cplx centre = 0.5 * (lo + hi);
  const double inner = (ev.array() - centre).abs().maxCoeff();
  const double outer = std::abs(pole - centre);
  if (!(outer > inner)) throw PoleOnSpectrum("the resolvent pole is not separated from the spectrum by a circle");
  return {centre, inner > 0.0 ? std::sqrt(inner * outer) : 0.5 * outer, quadrature};
}

int cmd_filter_apply(const RunConfig& c, std::ostream& out) {
  const DiGraph g = read_graph(c.text("graph", "path"), weights_path(c));
  const OperatorKind kind = operator_kind_from_string(c.text("filter", "operator"));
  const CMat t = characteristic_operator(g, kind).matrix.cast<cplx>();
  const std::string& fn = c.text("filter", "function");
  const cplx pole{c.number("filter", "pole_real"), c.number("filter", "pole_imag")};
  const int power = static_cast<int>(c.integer("filter", "power"));

  HoloFunction g_fn;
  std::optional<CMat> reference;
  if (fn == "polynomial") {
    std::vector<cplx> coeffs;
    for (double v : c.numbers("filter", "coefficients")) coeffs.emplace_back(v, 0.0);
    g_fn = HoloFunction::polynomial(coeffs);
    reference = matrix_polynomial(t, coeffs);
  } else if (fn == "resolvent") {
    g_fn = HoloFunction::resolvent_power(pole, power);
    const CMat r = resolvent(t, pole);
    CMat p = r;
    for (int k = 1; k < power; ++k) p = p * r;
    reference = p;
  } else {
    g_fn = HoloFunction::exponential();
    if (t.rows() <= SpectralResponseOracle::kMaxDim) reference = spectral_response(t, g_fn);
  }

  const int quadrature = static_cast<int>(c.integer("filter", "quadrature"));
  Contour contour = fn == "resolvent" ? separating_contour(t, pole, quadrature) : default_contour(t, quadrature);
  if (c.number("filter", "radius") > 0.0) contour.radius = c.number("filter", "radius");
  if (fn == "resolvent" && !(std::abs(pole - contour.center) > contour.radius)) {
    throw InputError("filter.radius: the resolvent pole must lie outside the contour");
  }
  const CMat result = contour_apply(g_fn, t, contour, threads_of(c));

  const fs::path dir = output_dir(c);
  auto csv = open_output(dir / "filter.csv");
  write_matrix_csv(csv, result);
  out << "operator " << to_string(kind) << ", " << g.n_nodes() << " nodes, " << g_fn.name << "\n";
  out << "contour radius " << contour.radius << ", " << contour.n_quadrature << " nodes\n";
  if (reference) out << "relative deviation from closed form " << rel_or_abs(result, *reference) << "\n";
  out << "wrote " << (dir / "filter.csv").string() << "\n";
  return kExitOk;
}

int cmd_reaches(const RunConfig& c, std::ostream& out) {
  const EdgeListFile file = read_edge_list(c.text("graph", "path"), weights_path(c));
  std::vector<Edge> edges;
  for (const auto& r : file.records) edges.push_back(r.edge);
  const DiGraph g = build_graph(file.n_nodes, edges, file.node_weights);
  const ReachPartition part = reaches(g.adjacency());

  std::ostringstream report;
  report << "reaches " << part.size() << "\n";
  for (std::size_t r = 0; r < part.size(); ++r) {
    report << "R" << r + 1 << " = " << format_set(part.reaches[r], file.index_base) << "\n";
  }
  report << "partition " << (part.is_partition ? "yes" : "no (reaches overlap)") << "\n";
  out << report.str();
  auto f = open_output(output_dir(c) / "reaches.txt");
  f << report.str();
  return kExitOk;
}

int cmd_coarsen(const RunConfig& c, std::ostream& out) {
  const TwoScaleGraph g = read_two_scale_graph(c.text("graph", "path"), c.number("graph", "scale"), weights_path(c));
  const LimitGraph lg = build_limit_graph(g);
  const fs::path dir = output_dir(c);
  auto edges = open_output(dir / "limit.tsv");
  auto weights = open_output(dir / "limit.weights.tsv");
  write_graph(edges, weights, lg.graph);
  auto part = open_output(dir / "partition.tsv");
  part << "# node\treach\n";
  for (std::size_t i = 0; i < lg.partition.assignment.size(); ++i) part << i << '\t' << lg.partition.assignment[i] << '\n';
  out << "fine graph " << g.n_nodes() << " nodes -> limit graph " << lg.n_nodes() << " nodes\n";
  out << "wrote limit.tsv, limit.weights.tsv, partition.tsv under " << dir.string() << "\n";
  return kExitOk;
}

int cmd_converge(const RunConfig& c, std::ostream& out) {
  const std::vector<double> grid = c.numbers("converge", "c_grid");
  TheoremSuiteConfig suite;
  suite.pole = {c.number("converge", "y_real"), c.number("converge", "y_imag")};
  suite.filter_order = static_cast<int>(c.integer("converge", "filter_order"));
  // Only resolvent banks on the Laplacian converge, so [model] contributes
  // shape and nonlinearity but not the operator or bank.
  const ModelSpec shape = c.model();
  suite.model = dir_resolvnet_spec(shape.widths, shape.output_dim, suite.filter_order, suite.pole, shape.alpha,
                                   shape.rho, shape.field);
  suite.seed = seed_of(c);

  const std::string& path = c.text("graph", "path");
  const TwoScaleGraph g = path.empty() ? default_deflection_family(suite.seed).base
                                       : read_two_scale_graph(path, 1.0, weights_path(c));
  const std::vector<TheoremRow> rows = theorem_gaps(g, grid, suite);

  const fs::path dir = output_dir(c);
  auto csv = open_output(dir / "convergence.csv");
  write_theorem_csv(csv, rows);
  std::vector<PlotSeries> series(4);
  series[0].label = "resolvent";
  series[1].label = "filter";
  series[2].label = "node features";
  series[3].label = "graph features";
  for (const auto& r : rows) {
    series[0].y.push_back(r.resolvent_gap);
    series[1].y.push_back(r.filter_gap);
    series[2].y.push_back(r.node_gap);
    series[3].y.push_back(r.graph_gap);
  }
  auto svg = open_output(dir / "convergence.svg");
  write_loglog_svg(svg, "gap to the limit graph", "scale c", grid, series);

  out << std::setprecision(6);
  out << "c, resolvent_gap, filter_gap, node_gap, graph_gap\n";
  for (const auto& r : rows) {
    out << r.scale << ", " << r.resolvent_gap << ", " << r.filter_gap << ", " << r.node_gap << ", " << r.graph_gap << "\n";
  }
  if (!c.flag("converge", "assert")) return kExitOk;

  const double max_ratio = c.number("converge", "max_ratio");
  bool ok = true;
  for (const auto& s : series) {
    const bool decreasing = strictly_decreasing(s.y);
    const bool decayed = s.y.front() == 0.0 ? s.y.back() == 0.0 : s.y.back() <= max_ratio * s.y.front();
    const bool all_zero = s.y.front() == 0.0 && s.y.back() == 0.0;
    const bool pass = all_zero || (decreasing && decayed);
    out << (pass ? "PASS " : "FAIL ") << s.label << " gap" << (decreasing ? "" : " not strictly decreasing")
        << (decayed ? "" : " final/initial ratio too large") << "\n";
    ok = ok && pass;
  }
  return ok ? kExitOk : kExitCheckFailed;
}

Loss resolved_loss(const RunConfig& c) {
  const std::string& loss = c.text("train", "loss");
  if (loss != "auto") return loss_from_string(loss);
  return c.text("train", "task") == "direction" ? Loss::CrossEntropy : Loss::MeanAbsoluteError;
}

struct DirectionSetup {
  DirectionDataset data;
  NodeTask task;
};

DirectionSetup direction_setup(const RunConfig& c, const ModelSpec& spec) {
  SyntheticTaskSpec task;
  task.kind = TaskKind::DirectionParity;
  task.n_nodes = static_cast<std::size_t>(c.integer("data", "n_nodes"));
  task.feature_dim = static_cast<std::size_t>(spec.widths.front());
  task.noise = c.number("data", "noise");
  task.seed = seed_of(c);
  task.cycles = static_cast<int>(c.integer("data", "cycles"));
  DirectionDataset d = gen_direction_task(task);
  const DiGraph g = c.flag("data", "symmetrize") ? symmetrized(d.graph) : d.graph;
  NodeTask nt{prepare_banks(g, spec), d.features.cast<cplx>(), d.labels, {}, {}};
  return {std::move(d), std::move(nt)};
}

TwoScaleSplit two_scale_setup(const RunConfig& c) {
  SyntheticTaskSpec task;
  task.kind = TaskKind::TwoScaleRegression;
  task.n_graphs = static_cast<std::size_t>(c.integer("data", "n_graphs"));
  task.noise = c.number("data", "noise");
  task.seed = seed_of(c);
  return make_two_scale_split(task, static_cast<std::size_t>(c.integer("data", "n_test")), c.number("data", "c_min"),
                              c.number("data", "c_max"));
}

void write_metrics(const fs::path& path, const std::vector<std::pair<std::string, double>>& metrics,
                   std::ostream& out) {
  auto f = open_output(path);
  f.precision(17);
  for (const auto& [k, v] : metrics) {
    f << k << " = " << v << '\n';
    out << k << " = " << v << '\n';
  }
}

std::vector<std::pair<std::string, double>> evaluate(const RunConfig& c, const HoloNetModel& m) {
  if (c.text("train", "task") == "direction") {
    const DirectionSetup s = direction_setup(c, m.spec);
    return {{"train_accuracy", accuracy(m, s.task)},
            {"symmetrized_probe_accuracy", s.data.symmetrized_probe_accuracy},
            {"directed_probe_accuracy", s.data.directed_probe_accuracy}};
  }
  const TwoScaleSplit split = two_scale_setup(c);
  const CoarseInferenceReport r = run_coarse_inference(m, split.test);
  return {{"fine_test_mae", r.fine_mae}, {"coarse_test_mae", r.coarse_mae}, {"coarse_fine_ratio", r.ratio()}};
}

int cmd_train(const RunConfig& c, std::ostream& out) {
  const ModelSpec spec = c.model();
  std::mt19937_64 rng(seed_of(c));
  HoloNetModel m = init_model(spec, rng);
  const Loss loss = resolved_loss(c);
  const OptimizerConfig opt = c.optimizer();
  TrainResult result;
  if (c.text("train", "task") == "direction") {
    const DirectionSetup s = direction_setup(c, spec);
    result = train(m, s.task, loss, opt);
  } else {
    const TwoScaleSplit split = two_scale_setup(c);
    std::vector<GraphSample> data;
    for (const auto& s : split.train) data.push_back(fine_sample(s, spec));
    result = train(m, data, loss, opt);
  }
  const fs::path dir = output_dir(c);
  save_checkpoint(m, dir / "model.cbor");
  auto curve = open_output(dir / "loss_curve.csv");
  curve.precision(17);
  curve << "epoch,loss\n";
  for (std::size_t k = 0; k < result.loss_curve.size(); ++k) curve << k << ',' << result.loss_curve[k] << '\n';
  auto metrics = evaluate(c, m);
  metrics.insert(metrics.begin(), {{"initial_loss", result.loss_curve.front()}, {"final_loss", result.loss_curve.back()}});
  write_metrics(dir / "metrics.txt", metrics, out);
  out << "wrote model.cbor, loss_curve.csv, metrics.txt under " << dir.string() << "\n";
  return kExitOk;
}

int cmd_eval(const RunConfig& c, std::ostream& out) {
  const HoloNetModel m = load_checkpoint(c.text("train", "checkpoint"));
  const fs::path dir = output_dir(c);
  write_metrics(dir / "metrics.txt", evaluate(c, m), out);
  return kExitOk;
}

int cmd_gradcheck(const RunConfig& c, std::ostream& out) {
  const ModelSpec spec = c.model();
  std::mt19937_64 rng(seed_of(c));
  const std::string& path = c.text("graph", "path");
  const DiGraph g = path.empty() ? random_two_scale_graph(static_cast<std::size_t>(c.integer("check", "nodes")), rng).graph()
                                 : read_graph(path, weights_path(c));
  const HoloNetModel m = init_model(spec, rng);
  const GraphBanks banks = prepare_banks(g, spec);
  const auto n = static_cast<Eigen::Index>(g.n_nodes());
  std::normal_distribution<double> normal(0.0, 1.0);
  CMat x(n, spec.widths.front());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    x.data()[k] = {normal(rng), spec.field == ScalarField::Complex ? normal(rng) : 0.0};
  }
  x = jitter_inputs(m, banks, x, rng);

  NodeTask node{banks, x, {}, Mat(n, spec.output_dim), {}};
  for (Eigen::Index k = 0; k < node.targets.size(); ++k) node.targets.data()[k] = normal(rng);
  Vec target(spec.output_dim);
  for (Eigen::Index k = 0; k < target.size(); ++k) target(k) = normal(rng);
  const std::vector<GraphSample> graph{{banks, x, target}};

  const double tol = c.number("check", "tolerance");
  const GradcheckReport node_report = gradcheck(m, node, Loss::MeanSquaredError);
  const GradcheckReport graph_report = gradcheck(m, graph, Loss::MeanSquaredError);
  const fs::path dir = output_dir(c);
  auto csv = open_output(dir / "gradcheck.csv");
  csv.precision(17);
  csv << "objective,tensor,error\n";
  for (const auto& [name, err] : node_report.per_tensor) csv << "node_mse," << name << ',' << err << '\n';
  for (const auto& [name, err] : graph_report.per_tensor) csv << "graph_mse," << name << ',' << err << '\n';
  const double worst = std::max(node_report.max_error, graph_report.max_error);
  const bool ok = worst <= tol;
  out << (ok ? "PASS" : "FAIL") << " max relative gradient error " << worst << " (tolerance " << tol << ")\n";
  return ok ? kExitOk : kExitCheckFailed;
}

CMat random_matrix(Eigen::Index n, double target_norm, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMat t(n, n);
  for (Eigen::Index k = 0; k < t.size(); ++k) t.data()[k] = {normal(rng), normal(rng)};
  return t * (target_norm / spectral_norm(t));
}

int cmd_oracle_check(const RunConfig& c, std::ostream& out) {
  std::mt19937_64 rng(seed_of(c));
  const int trials = static_cast<int>(c.integer("check", "trials"));
  const auto max_nodes = static_cast<Eigen::Index>(c.integer("check", "max_nodes"));
  const int quadrature = static_cast<int>(c.integer("filter", "quadrature"));
  const int threads = threads_of(c);
  std::uniform_int_distribution<Eigen::Index> size(2, std::max<Eigen::Index>(2, max_nodes));
  std::uniform_real_distribution<double> norm(0.1, 2.0);
  std::uniform_int_distribution<int> degree(0, 6);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::ostringstream report;
  report << std::setprecision(3);
  bool all_ok = true;
  auto record = [&](const std::string& name, double value, double tol) {
    const bool ok = value <= tol;
    all_ok = all_ok && ok;
    report << (ok ? "PASS " : "FAIL ") << name << ": " << value << " (tolerance " << tol << ")\n";
  };

  double worst_poly = 0.0;
  double worst_mapping = 0.0;
  for (int k = 0; k < trials; ++k) {
    const CMat t = random_matrix(size(rng), norm(rng), rng);
    std::vector<cplx> coeffs(static_cast<std::size_t>(degree(rng)) + 1);
    for (auto& a : coeffs) a = {normal(rng), normal(rng)};
    const CMat via_contour = contour_apply(HoloFunction::polynomial(coeffs), t, default_contour(t, quadrature), threads);
    worst_poly = std::max(worst_poly, rel_or_abs(via_contour, matrix_polynomial(t, coeffs)));
    worst_mapping = std::max(worst_mapping, spectral_mapping_distance(t, coeffs));
  }
  record("contour vs Horner on random polynomials", worst_poly, 1e-7);
  record("spectral mapping sigma(p(T)) = p(sigma(T))", worst_mapping, 1e-6);

  double worst_oracle = 0.0;
  for (int k = 0; k < std::min(trials, 10); ++k) {
    const CMat t = random_matrix(std::min<Eigen::Index>(size(rng), 10), norm(rng), rng);
    const HoloFunction g = HoloFunction::exponential();
    worst_oracle = std::max(worst_oracle, rel_or_abs(contour_apply(g, t, default_contour(t, quadrature), threads),
                                                     spectral_response(t, g)));
  }
  record("contour vs eigenspace oracle on exp", worst_oracle, 1e-8);

  const DiGraph path = build_graph(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  const CMat w = path.adjacency().cast<cplx>();
  const double cube = (w * w * w).cwiseAbs().maxCoeff();
  const double cubed_response = spectral_response(w, HoloFunction::monomial(3)).cwiseAbs().maxCoeff();
  record("path graph W^3 = 0", cube, 0.0);
  record("path graph spectral response of z^3", cubed_response, 1e-12);

  const CMat lap = characteristic_operator(path, OperatorKind::InDegreeLaplacian).matrix.cast<cplx>();
  const HoloFunction e = HoloFunction::exponential();
  record("defective Laplacian: contour vs oracle on exp",
         rel_or_abs(contour_apply(e, lap, default_contour(lap, quadrature), threads), spectral_response(lap, e)), 1e-8);

  std::mt19937_64 graph_rng(seed_of(c) + 1);
  const DiGraph g = random_two_scale_graph(12, graph_rng).graph();
  const CMat adj = characteristic_operator(g, OperatorKind::FaberNetNormalized).matrix.cast<cplx>();
  record("Faber bank vs contour",
         bank_matches_contour(build_bank(adj, FilterBankSpec::faber(3)), default_contour(adj, quadrature), threads),
         1e-8);
  // Rescaled so every Gershgorin disc of L lies in |z - 1| <= 1; the contour
  // then separates the spectrum from the pole at -1 with margin on both sides.
  const double c0 = (g.in_degrees().array() / g.node_weights().array()).maxCoeff();
  const DiGraph unit(g.adjacency() / (c0 > 0.0 ? c0 : 1.0), g.node_weights());
  const CMat l = characteristic_operator(unit, OperatorKind::InDegreeLaplacian).matrix.cast<cplx>();
  const Contour around{{1.0, 0.0}, std::sqrt(2.0), quadrature};
  record("resolvent bank vs contour",
         bank_matches_contour(build_bank(l, FilterBankSpec::resolvent(3, {-1.0, 0.0})), around, threads), 1e-8);
  const cplx y{-1.0, 0.0};
  const CMat inv = contour_apply(HoloFunction::resolvent_power(y, 1), l, around, threads);
  const CMat id = CMat::Identity(l.rows(), l.cols());
  record("inversion (contour resolvent) (L - y) = Id", (inv * (l - y * id) - id).norm(), 1e-7);

  double worst_product = 0.0;
  double worst_convergence = 0.0;
  for (int k = 0; k < std::min(trials, 10); ++k) {
    const CMat t = random_matrix(size(rng), norm(rng), rng);
    std::vector<cplx> a(3), b(4);
    for (auto& v : a) v = {normal(rng), normal(rng)};
    for (auto& v : b) v = {normal(rng), normal(rng)};
    const HoloFunction ga = HoloFunction::polynomial(a);
    const HoloFunction gb = HoloFunction::polynomial(b);
    const Contour ct = default_contour(t, quadrature);
    worst_product = std::max(worst_product, rel_or_abs(contour_apply(HoloFunction::product(ga, gb), t, ct, threads),
                                                       contour_apply(ga, t, ct, threads) * contour_apply(gb, t, ct, threads)));

    const double spectral_radius = Eigen::ComplexEigenSolver<CMat>(t, false).eigenvalues().cwiseAbs().maxCoeff();
    const HoloFunction e = HoloFunction::exponential();
    const CMat exact = spectral_response(t, e);
    const auto deviation = [&](int m) {
      return rel_or_abs(contour_apply(e, t, {{0.0, 0.0}, 1.2 * spectral_radius, m}, threads), exact);
    };
    worst_convergence = std::max(worst_convergence, deviation(256) / deviation(32));
  }
  record("multiplicativity (gh)(T) = g(T) h(T)", worst_product, 1e-7);
  record("quadrature convergence, deviation ratio M = 256 vs 32", worst_convergence, 1e-3);

  const PrecomputedBank ladder = build_bank(w, FilterBankSpec::faber(4, 1.0, false));
  double ladder_violation = 0.0;
  for (int k = 1; k <= 4; ++k) {
    const double size_k = ladder.atoms[static_cast<std::size_t>(k - 1)].cwiseAbs().maxCoeff();
    if (k <= 2 && size_k == 0.0) ladder_violation = 1.0;
    if (k >= 3) ladder_violation = std::max(ladder_violation, size_k);
  }
  record("nilpotency ladder W^k != 0 for k <= 2, = 0 for k >= 3", ladder_violation, 0.0);

  out << report.str();
  auto f = open_output(output_dir(c) / "oracle_check.txt");
  f << report.str();
  return all_ok ? kExitOk : kExitCheckFailed;
}

const std::map<std::string, std::function<int(const RunConfig&, std::ostream&)>>& commands() {
  static const std::map<std::string, std::function<int(const RunConfig&, std::ostream&)>> table{
      {"filter-apply", cmd_filter_apply}, {"reaches", cmd_reaches},   {"coarsen", cmd_coarsen},
      {"converge", cmd_converge},         {"train", cmd_train},       {"eval", cmd_eval},
      {"gradcheck", cmd_gradcheck},       {"oracle-check", cmd_oracle_check},
  };
  return table;
}

const std::map<std::string, std::string>& descriptions() {
  static const std::map<std::string, std::string> table{
      {"filter-apply", "evaluate g(T) by contour quadrature and compare with its closed form"},
      {"reaches", "list the maximal reaches of a graph"},
      {"coarsen", "collapse the high-weight tier of a two-scale graph into its limit graph"},
      {"converge", "gaps between a two-scale graph and its limit across scales"},
      {"train", "train a model on a synthetic task"},
      {"eval", "evaluate a checkpoint on a synthetic task"},
      {"gradcheck", "compare analytic gradients with finite differences"},
      {"oracle-check", "functional-calculus consistency suite"},
  };
  return table;
}

}  // namespace

int run_command(const RunConfig& config, std::ostream& out) {
  config.validate();
  const fs::path dir = output_dir(config);
  {
    auto echo = open_output(dir / "config.ini");
    config.write(echo);
  }
  return commands().at(config.text("run", "command"))(config, out);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Holomorphic graph filters and networks on directed graphs"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::vector<std::string> overrides;
  std::string graph_path;
  std::string out_dir;
  for (const auto& [name, desc] : descriptions()) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("-c,--config", config_path, "configuration file");
    sub->add_option("-s,--set", overrides, "override, section.key=value")->take_all();
    sub->add_option("-g,--graph", graph_path, "graph file (graph.path)");
    sub->add_option("-o,--out", out_dir, "output directory (run.output)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) config.merge_file(config_path);
    config.set("run", "command", app.get_subcommands().front()->get_name());
    for (const auto& s : overrides) config.set(s);
    if (!graph_path.empty()) config.set("graph", "path", graph_path);
    if (const char* env = std::getenv("HOLONET_OUT_DIR"); env != nullptr && *env != '\0') {
      config.set("run", "output", env);
    }
    if (!out_dir.empty()) config.set("run", "output", out_dir);
    return run_command(config, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace holonet::cli
