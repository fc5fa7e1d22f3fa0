#include "holonet/coarse.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "holonet/error.hpp"
#include "holonet/graph_io.hpp"

namespace holonet {

ReachPartition reaches(const Mat& adjacency) {
  if (adjacency.rows() != adjacency.cols()) throw ShapeMismatch("reaches: adjacency must be square");
  const auto n = static_cast<std::size_t>(adjacency.rows());

  // Out-neighbours of a: all c with W(c, a) > 0 (edge a -> c).
  std::vector<std::vector<std::size_t>> out(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t c = 0; c < n; ++c) {
      if (c != a && adjacency(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(a)) > 0.0) {
        out[a].push_back(c);
      }
    }
  }

  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    auto& seen = reach[s];
    seen[s] = true;
    stack.assign(1, s);
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t c : out[a]) {
        if (!seen[c]) {
          seen[c] = true;
          stack.push_back(c);
        }
      }
    }
  }

  auto contains = [](const std::vector<bool>& big, const std::vector<bool>& small) {
    for (std::size_t i = 0; i < big.size(); ++i) {
      if (small[i] && !big[i]) return false;
    }
    return true;
  };

  std::vector<std::vector<bool>> maximal;
  for (std::size_t s = 0; s < n; ++s) {
    bool dominated = false;
    for (std::size_t t = 0; t < n && !dominated; ++t) {
      if (t == s || reach[t] == reach[s]) continue;
      dominated = contains(reach[t], reach[s]);
    }
    if (dominated) continue;
    if (std::find(maximal.begin(), maximal.end(), reach[s]) == maximal.end()) {
      maximal.push_back(reach[s]);
    }
  }

  ReachPartition part;
  for (const auto& set : maximal) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (set[i]) members.push_back(i);
    }
    part.reaches.push_back(std::move(members));
  }
  std::sort(part.reaches.begin(), part.reaches.end());

  std::vector<int> cover(n, 0);
  part.assignment.assign(n, -1);
  for (std::size_t r = 0; r < part.reaches.size(); ++r) {
    for (std::size_t i : part.reaches[r]) {
      ++cover[i];
      part.assignment[i] = static_cast<long>(r);
    }
  }
  part.is_partition = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (cover[i] != 1) {
      part.assignment[i] = -1;
      part.is_partition = false;
    }
  }
  return part;
}

TwoScaleGraph::TwoScaleGraph(Vec node_weights, Mat w_regular, Mat w_high, double scale)
    : node_weights_(std::move(node_weights)),
      w_regular_(std::move(w_regular)),
      w_high_(std::move(w_high)),
      scale_(scale) {
  // Reuse DiGraph validation for shapes and signs.
  static_cast<void>(DiGraph(w_regular_, node_weights_));
  static_cast<void>(DiGraph(w_high_, node_weights_));
  if (!(scale_ > 0.0) || !std::isfinite(scale_)) throw InputError("two-scale graph: c must be positive");
  for (Eigen::Index j = 0; j < w_high_.cols(); ++j) {
    for (Eigen::Index i = 0; i < w_high_.rows(); ++i) {
      if (w_high_(i, j) > 0.0 && w_regular_(i, j) > 0.0) {
        throw InputError("two-scale graph: edge " + std::to_string(j) + "->" + std::to_string(i) +
                         " appears in both tiers");
      }
    }
  }
  const Vec in = w_high_.rowwise().sum();
  const Vec out = w_high_.colwise().sum().transpose();
  const double tol = 1e-12 * std::max(1.0, w_high_.sum());
  for (Eigen::Index j = 0; j < in.size(); ++j) {
    if (std::abs(in(j) - out(j)) > tol) {
      throw KirchhoffViolation("high tier is unbalanced at node " + std::to_string(j) +
                               ": in-degree " + std::to_string(in(j)) + ", out-degree " +
                               std::to_string(out(j)));
    }
  }
}

TwoScaleGraph TwoScaleGraph::with_scale(double c) const {
  return TwoScaleGraph(node_weights_, w_regular_, w_high_, c);
}

TwoScaleGraph read_two_scale_graph(const std::filesystem::path& path, double scale,
                                   const std::optional<std::filesystem::path>& node_weights_path) {
  const EdgeListFile file = read_edge_list(path, node_weights_path);
  const auto n = static_cast<Eigen::Index>(file.n_nodes);
  Mat reg = Mat::Zero(n, n);
  Mat high = Mat::Zero(n, n);
  for (const auto& r : file.records) {
    Mat& target = (r.tier && *r.tier == "high") ? high : reg;
    target(static_cast<Eigen::Index>(r.edge.dst), static_cast<Eigen::Index>(r.edge.src)) += r.edge.weight;
  }
  Vec mu = file.node_weights.value_or(Vec::Ones(n));
  return TwoScaleGraph(std::move(mu), std::move(reg), std::move(high), scale);
}

Mat LimitGraph::down_matrix(const Vec& fine_weights) const {
  const auto n = static_cast<Eigen::Index>(partition.assignment.size());
  if (fine_weights.size() != n) throw ShapeMismatch("J_down: node weight vector does not match graph");
  Mat d = Mat::Zero(static_cast<Eigen::Index>(partition.size()), n);
  for (std::size_t r = 0; r < partition.size(); ++r) {
    const double total = graph.node_weights()(static_cast<Eigen::Index>(r));
    for (std::size_t i : partition.reaches[r]) {
      d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) =
          fine_weights(static_cast<Eigen::Index>(i)) / total;
    }
  }
  return d;
}

Mat LimitGraph::up_matrix() const {
  const auto n = static_cast<Eigen::Index>(partition.assignment.size());
  Mat u = Mat::Zero(n, static_cast<Eigen::Index>(partition.size()));
  for (Eigen::Index i = 0; i < n; ++i) u(i, partition.assignment[static_cast<std::size_t>(i)]) = 1.0;
  return u;
}

LimitGraph build_limit_graph(const TwoScaleGraph& g) {
  ReachPartition part = reaches(g.w_high());
  if (!part.is_partition) {
    throw OverlappingReaches("reaches of the high tier overlap; the limit graph needs a partition");
  }
  const auto k = static_cast<Eigen::Index>(part.size());
  const Mat w = g.effective_adjacency();
  const Vec& mu = g.node_weights();
  Mat wl = Mat::Zero(k, k);
  Vec mul = Vec::Zero(k);
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    const auto rr = part.assignment[static_cast<std::size_t>(r)];
    mul(rr) += mu(r);
    for (Eigen::Index p = 0; p < w.cols(); ++p) {
      wl(rr, part.assignment[static_cast<std::size_t>(p)]) += w(r, p);
    }
  }
  return LimitGraph{DiGraph(std::move(wl), std::move(mul)), std::move(part)};
}

CMat project_down(const CMat& x, const LimitGraph& lg, const Vec& fine_weights) {
  if (x.rows() != fine_weights.size()) throw ShapeMismatch("project_down: feature rows do not match graph");
  return lg.down_matrix(fine_weights).cast<cplx>() * x;
}

CMat interpolate_up(const CMat& u, const LimitGraph& lg) {
  if (u.rows() != static_cast<Eigen::Index>(lg.n_nodes())) {
    throw ShapeMismatch("interpolate_up: feature rows do not match limit graph");
  }
  CMat out(static_cast<Eigen::Index>(lg.partition.assignment.size()), u.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    out.row(i) = u.row(lg.partition.assignment[static_cast<std::size_t>(i)]);
  }
  return out;
}

FeatureMatrix project_down(const FeatureMatrix& x, const LimitGraph& lg, const Vec& fine_weights) {
  FeatureMatrix out;
  out.values = project_down(x.values, lg, fine_weights);
  out.purely_real = x.purely_real;
  return out;
}

FeatureMatrix interpolate_up(const FeatureMatrix& u, const LimitGraph& lg) {
  FeatureMatrix out;
  out.values = interpolate_up(u.values, lg);
  out.purely_real = u.purely_real;
  return out;
}

std::vector<double> default_scale_grid() { return {1.0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6}; }

CMat laplacian(const DiGraph& g) {
  return characteristic_operator(g, OperatorKind::InDegreeLaplacian).matrix.cast<cplx>();
}

CMat resolvent(const CMat& t, cplx y) {
  const Eigen::Index n = t.rows();
  Eigen::PartialPivLU<CMat> lu(t - y * CMat::Identity(n, n));
  if (n > 0 && !(lu.rcond() > 1e-14)) {
    throw PoleOnSpectrum("y = (" + std::to_string(y.real()) + ", " + std::to_string(y.imag()) +
                         ") is numerically an eigenvalue");
  }
  return lu.inverse();
}

namespace {

template <class Filter>
std::vector<ScaleGap> gap_over_grid(const TwoScaleGraph& g, const std::vector<double>& c_grid,
                                    Filter filter) {
  std::vector<ScaleGap> out;
  out.reserve(c_grid.size());
  for (double c : c_grid) {
    const TwoScaleGraph scaled = g.with_scale(c);
    const LimitGraph lg = build_limit_graph(scaled);
    const CMat fine = filter(laplacian(scaled.graph()));
    const CMat coarse = filter(laplacian(lg.graph));
    const CMat lifted = lg.up_matrix().cast<cplx>() * coarse *
                        lg.down_matrix(scaled.node_weights()).cast<cplx>();
    out.push_back({c, weighted_operator_norm(fine - lifted, scaled.node_weights(),
                                             scaled.node_weights())});
  }
  return out;
}

}  // namespace

std::vector<ScaleGap> resolvent_convergence_gap(const TwoScaleGraph& g, cplx y,
                                                const std::vector<double>& c_grid) {
  return gap_over_grid(g, c_grid, [y](const CMat& l) { return resolvent(l, y); });
}

std::vector<ScaleGap> filter_convergence_gap(const TwoScaleGraph& g, cplx y,
                                             const std::vector<cplx>& theta,
                                             const std::vector<double>& c_grid) {
  return gap_over_grid(g, c_grid, [y, &theta](const CMat& l) {
    const CMat r = resolvent(l, y);
    CMat power = r;
    CMat acc = CMat::Zero(l.rows(), l.cols());
    for (std::size_t k = 0; k < theta.size(); ++k) {
      if (k > 0) power = power * r;
      acc += theta[k] * power;
    }
    return acc;
  });
}

void write_gap_csv(std::ostream& out, const std::vector<ScaleGap>& gaps) {
  const auto old = out.precision(17);
  out << "c,gap\n";
  for (const auto& g : gaps) out << g.scale << ',' << g.gap << '\n';
  out.precision(old);
}

}  // namespace holonet
