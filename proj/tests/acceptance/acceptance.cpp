// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances and time budgets are fixed below.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>

#include "holonet/coarse.hpp"
#include "holonet/experiments.hpp"
#include "holonet/holocalc.hpp"
#include "holonet/network.hpp"
#include "holonet/train.hpp"

namespace {

using namespace holonet;

namespace tol {
constexpr double kPolynomial = 1e-7;
constexpr double kNilpotentResponse = 1e-12;
constexpr double kNilpotentSpectrum = 1e-12;
constexpr double kTranslationIdentity = 1e-12;
constexpr double kKernelProjection = 1e-8;
constexpr double kDecayRatio = 1e-3;
constexpr double kExpansion = 1e-10;
constexpr double kGradient = 1e-5;
constexpr double kDirectedAccuracy = 0.90;
constexpr double kSymmetrizedAccuracy = 0.65;
constexpr double kCoarseRatio = 3.0;
}  // namespace tol

struct Outcome {
  bool pass = false;
  std::string detail;
};

CMat random_complex(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMat m(rows, cols);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = {normal(rng), normal(rng)};
  return m;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

Outcome polynomial_oracle() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<Eigen::Index> size(1, 20);
  std::uniform_int_distribution<int> degree(0, 6);
  std::uniform_real_distribution<double> norm(0.0, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = size(rng);
    CMat t = random_complex(n, n, rng);
    t *= norm(rng) / spectral_norm(t);
    std::vector<cplx> coeffs(static_cast<std::size_t>(degree(rng)) + 1);
    for (auto& a : coeffs) a = random_complex(1, 1, rng)(0, 0);
    const CMat via_contour = contour_apply(HoloFunction::polynomial(coeffs), t, default_contour(t, 256));
    worst = std::max(worst, rel_frobenius(via_contour, matrix_polynomial(t, coeffs)));
  }
  return {worst <= tol::kPolynomial, "max relative Frobenius error " + fmt(worst)};
}

Outcome nilpotent_path() {
  const DiGraph g = build_graph(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  const CMat w = g.adjacency().cast<cplx>();
  const SpectralResponseOracle oracle(w);
  bool spectrum_zero = true;
  for (const cplx& l : oracle.eigenvalues()) spectrum_zero = spectrum_zero && std::abs(l) <= tol::kNilpotentSpectrum;
  const bool square_nonzero = (w * w).cwiseAbs().maxCoeff() > 0.0;
  const bool cube_zero = (w * w * w).cwiseAbs().maxCoeff() == 0.0;
  const double response = spectral_response(w, HoloFunction::monomial(3)).cwiseAbs().maxCoeff();
  const bool pass = spectrum_zero && square_nonzero && cube_zero && response <= tol::kNilpotentResponse;
  return {pass, std::string("sigma(W) = {0}: ") + (spectrum_zero ? "yes" : "no") + ", W^2 != 0: " +
                    (square_nonzero ? "yes" : "no") + ", W^3 = 0: " + (cube_zero ? "yes" : "no") +
                    ", |response| " + fmt(response)};
}

Outcome fig1_reaches() {
  // 1-based edges of the figure: 1>2 2>3 3>2 4>5 5>6 6>4 6>3.
  const DiGraph g = build_graph(6, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 1, 1.0}, {3, 4, 1.0}, {4, 5, 1.0},
                                    {5, 3, 1.0}, {5, 2, 1.0}});
  const ReachPartition p = reaches(g.adjacency());
  const bool pass = p.size() == 2 && p.reaches[0] == std::vector<std::size_t>{0, 1, 2} &&
                    p.reaches[1] == std::vector<std::size_t>{1, 2, 3, 4, 5};
  std::string found;
  for (const auto& r : p.reaches) {
    found += "{";
    for (std::size_t k = 0; k < r.size(); ++k) found += (k ? "," : "") + std::to_string(r[k] + 1);
    found += "} ";
  }
  return {pass, "reaches " + found};
}

Outcome translation_operators() {
  std::mt19937_64 rng(104);
  double identity = 0.0, idempotent = 0.0, projection = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const TwoScaleGraph g = random_two_scale_graph(40, rng);
    const LimitGraph lg = build_limit_graph(g);
    const Vec& mu = g.node_weights();
    const Mat down = lg.down_matrix(mu);
    const Mat up = lg.up_matrix();
    const Mat p = up * down;
    identity = std::max(identity, (down * up - Mat::Identity(down.rows(), down.rows())).cwiseAbs().maxCoeff());
    idempotent = std::max(idempotent, (p * p - p).cwiseAbs().maxCoeff());

    const Mat l_high = mu.cwiseInverse().asDiagonal() * (Mat(g.w_high().rowwise().sum().asDiagonal()) - g.w_high());
    const Eigen::FullPivLU<Mat> lu(l_high);
    const Mat k = lu.kernel();
    const Mat p0 = k * (k.transpose() * mu.asDiagonal() * k).inverse() * k.transpose() * mu.asDiagonal();
    projection = std::max(projection, (p - p0).cwiseAbs().maxCoeff());
  }
  const bool pass = identity <= tol::kTranslationIdentity && idempotent <= tol::kTranslationIdentity &&
                    projection <= tol::kKernelProjection;
  return {pass, "|JdJu - Id| " + fmt(identity) + ", |P^2 - P| " + fmt(idempotent) + ", |P - P0| " + fmt(projection)};
}

std::vector<TwoScaleGraph> theorem_graphs() {
  std::mt19937_64 rng(105);
  std::vector<TwoScaleGraph> graphs;
  for (int k = 0; k < 10; ++k) graphs.push_back(random_two_scale_graph(40, rng));
  return graphs;
}

// Strictly decreasing over the grid and gap(1e6) <= ratio * gap(1e2).
bool decays(const std::vector<double>& grid, const std::vector<double>& gaps, double& worst_ratio) {
  const auto at = [&](double c) {
    return gaps[static_cast<std::size_t>(std::find(grid.begin(), grid.end(), c) - grid.begin())];
  };
  const double ratio = at(1e6) / at(1e2);
  worst_ratio = std::max(worst_ratio, ratio);
  return strictly_decreasing(gaps) && ratio <= tol::kDecayRatio;
}

Outcome resolvent_convergence() {
  const std::vector<double> grid = default_scale_grid();
  double worst = 0.0;
  int failures = 0;
  for (const auto& g : theorem_graphs()) {
    std::vector<double> gaps;
    for (const auto& s : resolvent_convergence_gap(g, {-1.0, 0.0}, grid)) gaps.push_back(s.gap);
    failures += decays(grid, gaps, worst) ? 0 : 1;
  }
  return {failures == 0, "worst gap(1e6)/gap(1e2) " + fmt(worst) + ", failing graphs " + std::to_string(failures)};
}

Outcome network_convergence() {
  const std::vector<double> grid = default_scale_grid();
  double worst_filter = 0.0, worst_graph = 0.0, worst_node = 0.0;
  int filter_failures = 0, graph_failures = 0;
  std::uint64_t seed = 106;
  for (const auto& g : theorem_graphs()) {
    TheoremSuiteConfig config;
    config.model = dir_resolvnet_spec({3, 8, 8}, 1, 3);
    config.seed = seed++;
    std::vector<double> filter, graph, node;
    for (const auto& r : theorem_gaps(g, grid, config)) {
      filter.push_back(r.filter_gap);
      graph.push_back(r.graph_gap);
      node.push_back(r.node_gap);
    }
    filter_failures += decays(grid, filter, worst_filter) ? 0 : 1;
    graph_failures += decays(grid, graph, worst_graph) ? 0 : 1;
    decays(grid, node, worst_node);
  }
  return {filter_failures == 0 && graph_failures == 0,
          "worst gap(1e6)/gap(1e2): filter " + fmt(worst_filter) + ", graph features " + fmt(worst_graph) +
              ", node features " + fmt(worst_node) + "; failing graphs: filter " + std::to_string(filter_failures) +
              ", graph features " + std::to_string(graph_failures)};
}

HoloNetModel randomise(HoloNetModel m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (auto& layer : m.layers) {
    for (Eigen::Index k = 0; k < layer.bias.size(); ++k) {
      layer.bias(k) = {u(rng), m.spec.field == ScalarField::Complex ? u(rng) : 0.0};
    }
  }
  for (Eigen::Index k = 0; k < m.readout.bias.size(); ++k) m.readout.bias(k) = u(rng);
  return m;
}

DiGraph random_graph(Eigen::Index n, std::mt19937_64& rng) {
  std::bernoulli_distribution edge(0.3);
  std::uniform_real_distribution<double> w(0.1, 2.0);
  Mat a = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && edge(rng)) a(i, j) = w(rng);
    }
  }
  Vec mu(n);
  for (Eigen::Index i = 0; i < n; ++i) mu(i) = w(rng);
  return DiGraph(a, mu);
}

double relative(const Mat& got, const Mat& want) {
  const double scale = want.norm();
  return scale > 0.0 ? (got - want).norm() / scale : (got - want).norm();
}

Outcome complex_expansion() {
  std::mt19937_64 rng(107);
  std::uniform_int_distribution<Eigen::Index> nodes(2, 12);
  std::uniform_int_distribution<int> depth(1, 3);
  std::uniform_int_distribution<Eigen::Index> width(1, 4);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Eigen::Index> widths{width(rng)};
    for (int l = depth(rng); l > 0; --l) widths.push_back(width(rng));
    const Nonlinearity rho = trial % 2 ? Nonlinearity::SplitAbs : Nonlinearity::SplitReLU;
    const double alpha = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const ModelSpec spec = trial % 4 < 2
                               ? fabernet_spec(widths, 2, 2, true, alpha, rho, ScalarField::Complex)
                               : dir_resolvnet_spec(widths, 2, 2, {-1.0, 0.0}, alpha, rho, ScalarField::Complex);
    const HoloNetModel m = randomise(init_model(spec, rng), rng);
    const DiGraph g = random_graph(nodes(rng), rng);
    const GraphBanks banks = prepare_banks(g, spec);
    const HoloNetModel e = expand_complex_to_real(m, banks);
    const CMat x = random_complex(g.adjacency().rows(), widths.front(), rng);
    CMat stacked(x.rows(), 2 * x.cols());
    stacked << x.real().cast<cplx>(), x.imag().cast<cplx>();
    const ModelOutput a = model_forward(x, m, banks);
    const ModelOutput b = model_forward(stacked, e, prepare_banks(g, e.spec));
    worst = std::max({worst, relative(b.features.real(), stack_real_imag(a.features)),
                      relative(b.node_outputs, a.node_outputs), relative(b.graph_output, a.graph_output)});
  }
  return {worst <= tol::kExpansion, "max relative deviation " + fmt(worst)};
}

Outcome gradients() {
  std::mt19937_64 rng(108);
  double worst = 0.0;
  std::size_t tensors = 0;
  for (const ScalarField field : {ScalarField::Real, ScalarField::Complex}) {
    for (const bool resolvent : {false, true}) {
      const ModelSpec spec = resolvent ? dir_resolvnet_spec({3, 5, 4}, 2, 2, {-1.0, 0.0}, 0.6,
                                                            Nonlinearity::SplitReLU, field)
                                       : fabernet_spec({3, 5, 4}, 2, 2, true, 0.4, Nonlinearity::SplitAbs, field);
      const HoloNetModel m = randomise(init_model(spec, rng), rng);
      const TwoScaleGraph tg = random_two_scale_graph(12, rng);
      const GraphBanks banks = prepare_banks(tg.graph(), spec);
      const auto n = static_cast<Eigen::Index>(tg.n_nodes());
      CMat x = random_complex(n, 3, rng);
      if (field == ScalarField::Real) x = x.real().cast<cplx>();
      x = jitter_inputs(m, banks, x, rng);

      NodeTask node{banks, x, {}, random_complex(n, 2, rng).real(), {}};
      for (Eigen::Index i = 0; i < n; ++i) node.labels.push_back(static_cast<int>(i % 2));
      const std::vector<GraphSample> graph{{banks, x, Vec::Constant(2, 0.3)}};
      for (const GradcheckReport& r : {gradcheck(m, node, Loss::MeanSquaredError),
                                       gradcheck(m, node, Loss::CrossEntropy),
                                       gradcheck(m, graph, Loss::MeanAbsoluteError)}) {
        worst = std::max(worst, r.max_error);
        tensors += r.per_tensor.size();
      }
    }
  }
  return {worst <= tol::kGradient, "max error " + fmt(worst) + " over " + std::to_string(tensors) + " tensors"};
}

double direction_accuracy(std::uint64_t seed, bool symmetrize) {
  SyntheticTaskSpec task;
  task.n_nodes = 200;
  task.seed = seed;
  const DirectionDataset d = gen_direction_task(task);
  const ModelSpec spec = fabernet_spec({1, 16, 16}, 2);
  std::mt19937_64 rng(seed);
  HoloNetModel m = init_model(spec, rng);
  const DiGraph g = symmetrize ? symmetrized(d.graph) : d.graph;
  const NodeTask t{prepare_banks(g, spec), d.features.cast<cplx>(), d.labels, {}, {}};
  train(m, t, Loss::CrossEntropy, {OptimizerKind::Adam, 0.01, 500});
  return accuracy(m, t);
}

Outcome direction_sensitivity() {
  double directed = 0.0, symmetric = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    directed += direction_accuracy(seed, false) / 5.0;
    symmetric += direction_accuracy(seed, true) / 5.0;
  }
  const bool pass = directed >= tol::kDirectedAccuracy && symmetric <= tol::kSymmetrizedAccuracy;
  return {pass, "mean train accuracy directed " + fmt(directed) + ", symmetrized " + fmt(symmetric)};
}

Outcome coarse_inference() {
  bool pass = true;
  std::string detail = "coarse/fine MAE ratio per seed (Dir-ResolvNet vs FaberNet):";
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ScaleExperimentConfig config;
    config.task.seed = seed;
    const ScaleExperimentResult r = run_scale_experiment(config);
    const double a = r.resolvnet.ratio();
    const double b = r.fabernet.ratio();
    pass = pass && a <= tol::kCoarseRatio && a < b;
    detail += " " + fmt(a) + " vs " + fmt(b) + (seed < 4 ? ";" : "");
  }
  return {pass, detail};
}

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "contour quadrature matches Horner on random polynomials", 30.0, polynomial_oracle},
      {2, "3-node path is nilpotent of order 3", 1.0, nilpotent_path},
      {3, "Fig. 1 reaches", 1.0, fig1_reaches},
      {4, "translation operator identities", 5.0, translation_operators},
      {5, "resolvent convergence to the limit graph", 60.0, resolvent_convergence},
      {6, "filter and network feature convergence", 120.0, network_convergence},
      {7, "complex networks equal their real expansions", 30.0, complex_expansion},
      {8, "analytic gradients match finite differences", 60.0, gradients},
      {9, "directed operator separates DirectionParity", 300.0, direction_sensitivity},
      {10, "coarse inference of Dir-ResolvNet vs FaberNet", 600.0, coarse_inference},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("%s %2d %s: %s (%.2f s of %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(),
                seconds, c.budget_seconds);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
