#include "holonet/digraph.hpp"

#include <cmath>
#include <string>

#include "holonet/error.hpp"

namespace holonet {

DiGraph::DiGraph(Mat adjacency, Vec node_weights)
    : adjacency_(std::move(adjacency)), node_weights_(std::move(node_weights)) {
  if (adjacency_.rows() != adjacency_.cols()) {
    throw ShapeMismatch("adjacency must be square, got " + std::to_string(adjacency_.rows()) +
                        "x" + std::to_string(adjacency_.cols()));
  }
  if (node_weights_.size() != adjacency_.rows()) {
    throw ShapeMismatch("node weight vector has length " + std::to_string(node_weights_.size()) +
                        ", expected " + std::to_string(adjacency_.rows()));
  }
  for (Eigen::Index i = 0; i < node_weights_.size(); ++i) {
    if (!(node_weights_(i) > 0.0) || !std::isfinite(node_weights_(i))) {
      throw NonpositiveNodeWeight("node " + std::to_string(i) + " has weight " +
                                  std::to_string(node_weights_(i)));
    }
  }
  for (Eigen::Index j = 0; j < adjacency_.cols(); ++j) {
    for (Eigen::Index i = 0; i < adjacency_.rows(); ++i) {
      const double w = adjacency_(i, j);
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw NegativeWeight("edge " + std::to_string(j) + "->" + std::to_string(i) +
                             " has weight " + std::to_string(w));
      }
    }
  }
}

DiGraph build_graph(std::size_t n_nodes, const std::vector<Edge>& edges,
                    std::optional<Vec> node_weights) {
  const auto n = static_cast<Eigen::Index>(n_nodes);
  Mat w = Mat::Zero(n, n);
  for (const Edge& e : edges) {
    if (e.src >= n_nodes || e.dst >= n_nodes) {
      throw IndexOutOfRange("edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) +
                            " outside graph with " + std::to_string(n_nodes) + " nodes");
    }
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      throw NegativeWeight("edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) +
                           " has weight " + std::to_string(e.weight));
    }
    w(static_cast<Eigen::Index>(e.dst), static_cast<Eigen::Index>(e.src)) += e.weight;
  }
  Vec mu = node_weights ? std::move(*node_weights) : Vec::Ones(n);
  return DiGraph(std::move(w), std::move(mu));
}

FeatureMatrix::FeatureMatrix(CMat v) : values(std::move(v)), purely_real(is_purely_real(values)) {}

FeatureMatrix FeatureMatrix::real(const Mat& v) {
  FeatureMatrix f;
  f.values = v.cast<cplx>();
  f.purely_real = true;
  return f;
}

cplx weighted_inner(const CMat& x, const CMat& y, const Vec& mu) {
  if (x.rows() != y.rows() || x.cols() != y.cols() || x.rows() != mu.size()) {
    throw ShapeMismatch("weighted_inner: shapes " + std::to_string(x.rows()) + "x" +
                        std::to_string(x.cols()) + " and " + std::to_string(y.rows()) + "x" +
                        std::to_string(y.cols()) + " with " + std::to_string(mu.size()) +
                        " node weights");
  }
  cplx acc{0.0, 0.0};
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      acc += std::conj(x(i, j)) * y(i, j) * mu(i);
    }
  }
  return acc;
}

cplx weighted_inner(const FeatureMatrix& x, const FeatureMatrix& y, const DiGraph& g) {
  return weighted_inner(x.values, y.values, g.node_weights());
}

double weighted_norm(const CMat& x, const Vec& mu) {
  if (x.rows() != mu.size()) throw ShapeMismatch("weighted_norm: row count differs from node count");
  return std::sqrt((x.cwiseAbs2().rowwise().sum().array() * mu.array()).sum());
}

std::string_view to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::Adjacency: return "adjacency";
    case OperatorKind::InDegreeLaplacian: return "laplacian";
    case OperatorKind::FaberNetNormalized: return "fabernet";
  }
  return "unknown";
}

OperatorKind operator_kind_from_string(std::string_view name) {
  if (name == "adjacency") return OperatorKind::Adjacency;
  if (name == "laplacian") return OperatorKind::InDegreeLaplacian;
  if (name == "fabernet") return OperatorKind::FaberNetNormalized;
  throw InputError("unknown operator kind '" + std::string(name) +
                   "' (expected adjacency, laplacian or fabernet)");
}

namespace {

// x^{-1/4} with 0 mapped to 0.
Vec inverse_quartic_root(const Vec& d) {
  Vec out(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) out(i) = d(i) > 0.0 ? std::pow(d(i), -0.25) : 0.0;
  return out;
}

}  // namespace

CharacteristicOperator characteristic_operator(std::shared_ptr<const DiGraph> g,
                                               OperatorKind kind) {
  const Mat& w = g->adjacency();
  Mat t;
  switch (kind) {
    case OperatorKind::Adjacency:
      t = w;
      break;
    case OperatorKind::InDegreeLaplacian: {
      Mat lap = -w;
      lap.diagonal() += g->in_degrees();
      t = g->node_weights().cwiseInverse().asDiagonal() * lap;
      break;
    }
    case OperatorKind::FaberNetNormalized: {
      const Vec left = inverse_quartic_root(g->in_degrees());
      const Vec right = inverse_quartic_root(g->out_degrees());
      t = left.asDiagonal() * w * right.asDiagonal();
      break;
    }
  }
  return CharacteristicOperator{kind, std::move(t), std::move(g)};
}

CharacteristicOperator characteristic_operator(const DiGraph& g, OperatorKind kind) {
  return characteristic_operator(std::make_shared<const DiGraph>(g), kind);
}

CMat weighted_adjoint(const CMat& t, const Vec& mu) {
  if (t.rows() != mu.size() || t.cols() != mu.size()) {
    throw ShapeMismatch("weighted_adjoint: operator and node weights disagree in size");
  }
  return mu.cwiseInverse().cast<cplx>().asDiagonal() * t.adjoint() * mu.cast<cplx>().asDiagonal();
}

DiGraph symmetrized(const DiGraph& g) {
  Mat w = 0.5 * (g.adjacency() + g.adjacency().transpose());
  return DiGraph(std::move(w), g.node_weights());
}

}  // namespace holonet
