#pragma once

#include <complex>

#include <Eigen/Dense>

namespace holonet {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using RowCVec = Eigen::RowVectorXcd;

// Relative Frobenius distance ||a - b|| / max(||b||, floor).
inline double rel_frobenius(const CMat& a, const CMat& b, double floor = 1e-300) {
  const double denom = std::max(b.norm(), floor);
  return (a - b).norm() / denom;
}

// Relative distance that degrades to absolute when the reference is (near) zero.
inline double rel_or_abs(const CMat& a, const CMat& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

// Largest singular value.
inline double spectral_norm(const CMat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(a);
  return svd.singularValues()(0);
}

// Operator 2-norm of A : (C^n, <.,.>_{mu_in}) -> (C^m, <.,.>_{mu_out}) where
// <x, y>_mu = sum conj(x_i) y_i mu_i. Equals ||M_out^{1/2} A M_in^{-1/2}||_2.
inline double weighted_operator_norm(const CMat& a, const Vec& mu_out, const Vec& mu_in) {
  CMat scaled = mu_out.cwiseSqrt().asDiagonal() * a;
  scaled = scaled * mu_in.cwiseSqrt().cwiseInverse().asDiagonal();
  return spectral_norm(scaled);
}

inline bool is_purely_real(const CMat& a, double tol = 0.0) {
  if (a.size() == 0) return true;
  return a.imag().cwiseAbs().maxCoeff() <= tol;
}

}  // namespace holonet
