#pragma once

#include <filesystem>
#include <random>
#include <vector>

#include "holonet/digraph.hpp"
#include "holonet/linalg.hpp"

namespace holonet::testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(HOLONET_TEST_DATA_DIR) / name;
}

inline CMat random_complex(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMat m(rows, cols);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = {normal(rng), normal(rng)};
  return m;
}

inline Mat random_real(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat m(rows, cols);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = normal(rng);
  return m;
}

// Erdos-Renyi digraph with uniform(0.1, 2) edge weights and node weights.
inline DiGraph random_digraph(Eigen::Index n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution edge(p);
  std::uniform_real_distribution<double> weight(0.1, 2.0);
  Mat w = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && edge(rng)) w(i, j) = weight(rng);
    }
  }
  Vec mu(n);
  for (Eigen::Index i = 0; i < n; ++i) mu(i) = weight(rng);
  return DiGraph(w, mu);
}

inline Mat path_adjacency() {
  Mat w = Mat::Zero(3, 3);
  w(1, 0) = 1.0;
  w(2, 1) = 1.0;
  return w;
}

inline double max_abs(const CMat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace holonet::testing
