#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "holonet/linalg.hpp"

namespace holonet {

// Node-weighted, edge-weighted directed graph.
//
// Orientation convention: adjacency(i, j) is the weight of the directed edge
// j -> i. With this convention the in-degree of node i is the i-th row sum and
// the out-degree of node j is the j-th column sum.
class DiGraph {
 public:
  // Validating constructor. Throws NonpositiveNodeWeight, NegativeWeight or
  // ShapeMismatch.
  DiGraph(Mat adjacency, Vec node_weights);

  std::size_t n_nodes() const { return static_cast<std::size_t>(adjacency_.rows()); }
  const Mat& adjacency() const { return adjacency_; }
  const Vec& node_weights() const { return node_weights_; }

  Vec in_degrees() const { return adjacency_.rowwise().sum(); }
  Vec out_degrees() const { return adjacency_.colwise().sum().transpose(); }
  double total_node_weight() const { return node_weights_.sum(); }

 private:
  Mat adjacency_;
  Vec node_weights_;
};

struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  double weight = 1.0;
};

// Assembles W with W(dst, src) += weight. Duplicate edges accumulate.
// Node weights default to 1.
DiGraph build_graph(std::size_t n_nodes, const std::vector<Edge>& edges,
                    std::optional<Vec> node_weights = std::nullopt);

// N x F feature matrix over C together with a flag that records whether the
// entries are known to be purely real.
struct FeatureMatrix {
  CMat values;
  bool purely_real = false;

  FeatureMatrix() = default;
  explicit FeatureMatrix(CMat v);
  static FeatureMatrix real(const Mat& v);

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

// <X, Y> = Tr(X^* M Y) = sum_ij conj(X_ij) Y_ij mu_i.
cplx weighted_inner(const FeatureMatrix& x, const FeatureMatrix& y, const DiGraph& g);
cplx weighted_inner(const CMat& x, const CMat& y, const Vec& mu);

// ||X||_2 = sqrt(sum_ij |X_ij|^2 mu_i).
double weighted_norm(const CMat& x, const Vec& mu);

enum class OperatorKind { Adjacency, InDegreeLaplacian, FaberNetNormalized };

std::string_view to_string(OperatorKind kind);
OperatorKind operator_kind_from_string(std::string_view name);

struct CharacteristicOperator {
  OperatorKind kind;
  Mat matrix;
  std::shared_ptr<const DiGraph> graph;
};

// Adjacency: T = W.
// InDegreeLaplacian: T = M^{-1} (D_in - W).
// FaberNetNormalized: T = D_in^{-1/4} W D_out^{-1/4}, with 0^{-1/4} := 0.
CharacteristicOperator characteristic_operator(std::shared_ptr<const DiGraph> g,
                                               OperatorKind kind);
CharacteristicOperator characteristic_operator(const DiGraph& g, OperatorKind kind);

// Adjoint of T with respect to the weighted inner product: T* = M^{-1} T^H M.
CMat weighted_adjoint(const CMat& t, const Vec& mu);

// Same node weights, adjacency replaced by (W + W^T) / 2.
DiGraph symmetrized(const DiGraph& g);

}  // namespace holonet
