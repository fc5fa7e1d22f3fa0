#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "holonet/coarse.hpp"
#include "holonet/network.hpp"
#include "holonet/train.hpp"

namespace holonet {

enum class TaskKind { DirectionParity, TwoScaleRegression };

struct SyntheticTaskSpec {
  TaskKind kind = TaskKind::DirectionParity;
  std::size_t n_nodes = 200;    // DirectionParity: graph size (even)
  std::size_t n_graphs = 80;    // TwoScaleRegression: number of molecules
  std::size_t feature_dim = 1;  // DirectionParity only; TwoScaleRegression uses one-hot charges
  double noise = 0.0;           // std of Gaussian noise added to input features
  std::uint64_t seed = 0;
  // DirectionParity: number of undirected Hamiltonian cycles laid over the
  // source-to-sink matching.
  int cycles = 1;
};

// DirectionParity: half the nodes are sources, each sending one unit-weight
// edge to a distinct sink, and `cycles` random Hamiltonian cycles add
// weight 1/2 in both directions. Every node then has the same symmetrised
// degree while sources have out-degree > in-degree. Label 1 = source.
struct DirectionDataset {
  DiGraph graph;
  Mat features;
  std::vector<int> labels;
  // Logistic-regression probes fitted at generation time.
  double symmetrized_probe_accuracy = 0.0;
  double directed_probe_accuracy = 0.0;
};

DirectionDataset gen_direction_task(const SyntheticTaskSpec& spec);

// Training accuracy of a logistic regression on standardised features.
double logistic_probe_accuracy(const Mat& features, const std::vector<int>& labels, int epochs = 500,
                               double learning_rate = 0.5);

// One molecule-like two-scale graph. Heavy nodes (node weight 6, 7 or 8)
// carry satellites (weight 1) joined to them and to each other by symmetric
// high-tier edges; all other pairs carry regular Coulomb-like weights
//   W(i <- j) = mu_i (mu_j - [j heavy]) / |x_i - x_j|,
// which is asymmetric between heavy and light nodes.
struct TwoScaleSample {
  TwoScaleGraph graph;
  Mat features;  // one-hot charge classes {1, 6, 7, 8}
  Vec target;
};

constexpr Eigen::Index kChargeClasses = 4;

Mat charge_one_hot(const Vec& charges);

// Random molecule with the given number of heavy nodes at scale c.
TwoScaleGraph random_molecule(std::size_t n_heavy, double scale, std::mt19937_64& rng);

// Random two-scale graph of at most max_nodes nodes whose high tier is a
// union of balanced clusters (directed cycles plus symmetric chords).
TwoScaleGraph random_two_scale_graph(std::size_t max_nodes, std::mt19937_64& rng);

// Fixed random Dir-ResolvNet evaluated on the limit graph with J_down
// features; its graph output is the regression target.
HoloNetModel teacher_model(std::uint64_t seed);

// Molecules with scales log-uniform in [c_min, c_max] and targets from the
// teacher on their limit graphs.
std::vector<TwoScaleSample> gen_two_scale_regression(const SyntheticTaskSpec& spec, const HoloNetModel& teacher,
                                                     double c_min = 1e2, double c_max = 1e4);

struct TwoScaleSplit {
  HoloNetModel teacher;
  std::vector<TwoScaleSample> train;
  std::vector<TwoScaleSample> test;
};

// Teacher drawn from the seed, then task.n_graphs training and n_test test
// molecules from the same stream.
TwoScaleSplit make_two_scale_split(const SyntheticTaskSpec& task, std::size_t n_test, double c_min = 1e2,
                                   double c_max = 1e4);

GraphSample fine_sample(const TwoScaleSample& s, const ModelSpec& spec);
GraphSample coarse_sample(const TwoScaleSample& s, const ModelSpec& spec);

// Deflecting light nodes towards their heavy node by d multiplies the
// high-tier weights by c = 1/d; the regular tier stays fixed.
struct DeflectionFamily {
  TwoScaleGraph base;
  std::vector<double> deflections;

  std::vector<double> scales() const;
  TwoScaleGraph at(std::size_t i) const;
};

DeflectionFamily default_deflection_family(std::uint64_t seed = 0);

struct TheoremRow {
  double scale = 0.0;
  double resolvent_gap = 0.0;
  double filter_gap = 0.0;
  double node_gap = 0.0;
  double graph_gap = 0.0;
};

struct TheoremSuiteConfig {
  ModelSpec model = dir_resolvnet_spec({3, 8, 8}, 1, 3);
  cplx pole{-1.0, 0.0};  // y for the resolvent and filter gaps
  int filter_order = 3;
  std::uint64_t seed = 0;
};

// Per scale of the family:
//   resolvent_gap = ||R_y(L) - J_up R_y(L_lim) J_down||
//   filter_gap    = same for g_theta(L) = sum_k theta_k (L - y)^{-k}
//   node_gap      = ||Phi(X) - J_up Phi_lim(J_down X)||_2
//   graph_gap     = ||Omega(Phi(X)) - Omega_lim(Phi_lim(J_down X))||_2
// Model parameters, theta and X are drawn once from the seed and shared
// across scales.
std::vector<TheoremRow> run_theorem_suite(const DeflectionFamily& family, const TheoremSuiteConfig& config);

// Gaps of a fixed model over an arbitrary two-scale graph and scale grid.
std::vector<TheoremRow> theorem_gaps(const TwoScaleGraph& g, const std::vector<double>& c_grid,
                                     const TheoremSuiteConfig& config);

void write_theorem_csv(std::ostream& out, const std::vector<TheoremRow>& rows);

bool strictly_decreasing(const std::vector<double>& v);

struct CoarseInferenceReport {
  double fine_mae = 0.0;
  double coarse_mae = 0.0;
  double ratio() const { return fine_mae > 0.0 ? coarse_mae / fine_mae : 0.0; }
};

// MAE of a model trained on fine graphs, evaluated on fine graphs and on
// their limit graphs (features J_down X).
CoarseInferenceReport run_coarse_inference(const HoloNetModel& m, const std::vector<TwoScaleSample>& test);

struct ScaleExperimentConfig {
  SyntheticTaskSpec task{TaskKind::TwoScaleRegression, 0, 120, 0, 0.0, 0, 0};
  std::size_t n_test = 40;
  double c_min = 1e2;
  double c_max = 1e4;
  std::vector<Eigen::Index> hidden{16, 16};
  OptimizerConfig optimizer{OptimizerKind::Adam, 0.01, 300};
};

struct ScaleExperimentResult {
  CoarseInferenceReport resolvnet;
  CoarseInferenceReport fabernet;
};

// Trains a Dir-ResolvNet and a FaberNet ablation on the same fine training
// set and reports coarse-inference MAEs for both.
ScaleExperimentResult run_scale_experiment(const ScaleExperimentConfig& config);

}  // namespace holonet
