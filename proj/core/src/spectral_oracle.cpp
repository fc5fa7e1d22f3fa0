#include <algorithm>
#include <cmath>
#include <limits>

#include "holonet/error.hpp"
#include "holonet/holocalc.hpp"

namespace holonet {

namespace {

constexpr double kNullTolerance = 1e-8;
constexpr double kMaxBasisCondition = 1e10;

std::vector<cplx> dense_eigenvalues(const CMat& t) {
  Eigen::ComplexEigenSolver<CMat> es(t, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw IllConditionedSpectrum("dense eigensolve did not converge");
  std::vector<cplx> out(static_cast<std::size_t>(t.rows()));
  for (Eigen::Index i = 0; i < t.rows(); ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return out;
}

}  // namespace

SpectralResponseOracle::SpectralResponseOracle(const CMat& t, double cluster_tol) : t_(t) {
  const Eigen::Index n = t.rows();
  if (t.rows() != t.cols()) throw ShapeMismatch("spectral oracle: operator must be square");
  if (n > kMaxDim) {
    throw IllConditionedSpectrum("spectral oracle is restricted to N <= " + std::to_string(kMaxDim));
  }
  if (n == 0) return;

  // Greedy clustering against the running cluster mean.
  std::vector<std::vector<cplx>> clusters;
  for (cplx lam : dense_eigenvalues(t)) {
    bool placed = false;
    for (auto& c : clusters) {
      cplx mean{0.0, 0.0};
      for (cplx v : c) mean += v;
      mean /= static_cast<double>(c.size());
      if (std::abs(lam - mean) <= cluster_tol) {
        c.push_back(lam);
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({lam});
  }

  const CMat id = CMat::Identity(n, n);
  CMat basis(n, n);
  Eigen::Index col = 0;
  std::vector<Eigen::Index> offsets;
  for (const auto& c : clusters) {
    cplx lam{0.0, 0.0};
    for (cplx v : c) lam += v;
    lam /= static_cast<double>(c.size());
    const int m = static_cast<int>(c.size());

    CMat shifted_power = id;
    for (int k = 0; k < m; ++k) shifted_power = shifted_power * (t - lam * id);
    Eigen::JacobiSVD<CMat> svd(shifted_power, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double threshold = kNullTolerance * std::max(1.0, sv(0));
    Eigen::Index null_dim = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) <= threshold) ++null_dim;
    }
    if (null_dim != m) {
      throw IllConditionedSpectrum("eigenvalue cluster near (" + std::to_string(lam.real()) + ", " +
                                   std::to_string(lam.imag()) + ") has multiplicity " +
                                   std::to_string(m) + " but a generalised eigenspace of dimension " +
                                   std::to_string(null_dim));
    }
    basis.middleCols(col, m) = svd.matrixV().rightCols(m);
    offsets.push_back(col);
    col += m;
    eigenvalues_.push_back(lam);
    multiplicities_.push_back(m);
  }

  Eigen::JacobiSVD<CMat> basis_svd(basis);
  const auto& bsv = basis_svd.singularValues();
  if (!(bsv(bsv.size() - 1) > 0.0) || bsv(0) / bsv(bsv.size() - 1) > kMaxBasisCondition) {
    throw IllConditionedSpectrum("generalised eigenbasis is numerically singular");
  }
  const CMat inverse = basis.partialPivLu().inverse();
  for (std::size_t c = 0; c < eigenvalues_.size(); ++c) {
    const Eigen::Index m = multiplicities_[c];
    CMat p = basis.middleCols(offsets[c], m) * inverse.middleRows(offsets[c], m);
    nilpotents_.push_back((t - eigenvalues_[c] * id) * p);
    projections_.push_back(std::move(p));
  }
}

CMat SpectralResponseOracle::apply(const HoloFunction& g) const {
  const Eigen::Index n = t_.rows();
  const CMat id = CMat::Identity(n, n);
  CMat out = CMat::Zero(n, n);
  for (std::size_t c = 0; c < eigenvalues_.size(); ++c) {
    const cplx lam = eigenvalues_[c];
    CMat term = projections_[c];
    double factorial = 1.0;
    out += g.eval(lam, 0) * term;
    for (int k = 1; k < multiplicities_[c]; ++k) {
      term = (t_ - lam * id) * term;
      factorial *= k;
      out += (g.eval(lam, k) / factorial) * term;
    }
  }
  return out;
}

CMat spectral_response(const CMat& t, const HoloFunction& g, double cluster_tol) {
  return SpectralResponseOracle(t, cluster_tol).apply(g);
}

double spectral_mapping_distance(const CMat& t, const std::vector<cplx>& coeffs) {
  const HoloFunction g = HoloFunction::polynomial(coeffs);
  std::vector<cplx> mapped;
  for (cplx lam : dense_eigenvalues(t)) mapped.push_back(g(lam));
  const std::vector<cplx> direct = dense_eigenvalues(matrix_polynomial(t, coeffs));

  auto directed = [](const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double worst = 0.0;
    for (cplx x : a) {
      double best = std::numeric_limits<double>::infinity();
      for (cplx y : b) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(mapped, direct), directed(direct, mapped));
}

bool spectral_mapping_check(const CMat& t, const std::vector<cplx>& coeffs, double tol) {
  return spectral_mapping_distance(t, coeffs) <= tol;
}

}  // namespace holonet
