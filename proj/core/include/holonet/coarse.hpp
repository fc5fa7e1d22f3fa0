#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "holonet/digraph.hpp"
#include "holonet/holocalc.hpp"

namespace holonet {

// Maximal reachable node sets of a weighted digraph.
//
// For every node i, R(i) is the set of nodes reachable from i along edges of
// non-zero weight (i included); the reaches are the inclusion-maximal distinct
// sets among them, ordered by smallest member. On Kirchhoff-balanced graphs
// these are the weakly connected components and partition the nodes. In
// general they may overlap; then `is_partition` is false and `assignment`
// holds -1 for nodes covered more than once.
struct ReachPartition {
  std::vector<std::vector<std::size_t>> reaches;
  std::vector<long> assignment;
  bool is_partition = false;

  std::size_t size() const { return reaches.size(); }
};

ReachPartition reaches(const Mat& adjacency);

// W = w_regular + c * w_high with disjoint supports and a balanced
// (in-degree == out-degree) high tier.
class TwoScaleGraph {
 public:
  // Throws ShapeMismatch, NegativeWeight, InputError (overlapping supports or
  // c <= 0) and KirchhoffViolation.
  TwoScaleGraph(Vec node_weights, Mat w_regular, Mat w_high, double scale);

  const Vec& node_weights() const { return node_weights_; }
  const Mat& w_regular() const { return w_regular_; }
  const Mat& w_high() const { return w_high_; }
  double scale() const { return scale_; }
  std::size_t n_nodes() const { return static_cast<std::size_t>(node_weights_.size()); }

  Mat effective_adjacency() const { return w_regular_ + scale_ * w_high_; }
  DiGraph graph() const { return DiGraph(effective_adjacency(), node_weights_); }
  DiGraph regular_graph() const { return DiGraph(w_regular_, node_weights_); }
  DiGraph high_graph() const { return DiGraph(w_high_, node_weights_); }

  TwoScaleGraph with_scale(double c) const;

 private:
  Vec node_weights_;
  Mat w_regular_;
  Mat w_high_;
  double scale_;
};

// Two-scale edge list: the tier column decides which matrix an edge joins.
// Edges without a tier are regular.
TwoScaleGraph read_two_scale_graph(const std::filesystem::path& path, double scale,
                                   const std::optional<std::filesystem::path>& node_weights_path = {});

// Collapsed graph: one node per reach R of the high tier with
//   mu_R = sum_{r in R} mu_r,   W_RP = sum_{r in R} sum_{p in P} W_rp,
// where W is the full effective adjacency (intra-reach weight stays as a
// self-loop W_RR).
struct LimitGraph {
  DiGraph graph;
  ReachPartition partition;

  std::size_t n_nodes() const { return graph.n_nodes(); }
  // Down-projection matrix (|reaches| x N): (J_down x)_R = sum_{r in R} mu_r x_r / mu_R.
  Mat down_matrix(const Vec& fine_weights) const;
  // Interpolation matrix (N x |reaches|): (J_up u)_r = u_{R(r)}.
  Mat up_matrix() const;
};

// Throws OverlappingReaches if the high tier's reaches do not partition the nodes.
LimitGraph build_limit_graph(const TwoScaleGraph& g);

FeatureMatrix project_down(const FeatureMatrix& x, const LimitGraph& lg, const Vec& fine_weights);
FeatureMatrix interpolate_up(const FeatureMatrix& u, const LimitGraph& lg);
CMat project_down(const CMat& x, const LimitGraph& lg, const Vec& fine_weights);
CMat interpolate_up(const CMat& u, const LimitGraph& lg);

struct ScaleGap {
  double scale;
  double gap;
};

std::vector<double> default_scale_grid();

// || R_y(L) - J_up R_y(L_lim) J_down || per scale, in the operator norm
// induced by the weighted inner product. Throws PoleOnSpectrum.
std::vector<ScaleGap> resolvent_convergence_gap(const TwoScaleGraph& g, cplx y,
                                                const std::vector<double>& c_grid);

// Same for g_theta(L) = sum_k theta_k (L - y)^{-k}, k = 1..theta.size().
std::vector<ScaleGap> filter_convergence_gap(const TwoScaleGraph& g, cplx y,
                                             const std::vector<cplx>& theta,
                                             const std::vector<double>& c_grid);

// R_y(T) for a dense operator; throws PoleOnSpectrum.
CMat resolvent(const CMat& t, cplx y);

// In-degree Laplacian of a graph as a complex matrix.
CMat laplacian(const DiGraph& g);

void write_gap_csv(std::ostream& out, const std::vector<ScaleGap>& gaps);

}  // namespace holonet
