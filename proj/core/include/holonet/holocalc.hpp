#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "holonet/digraph.hpp"
#include "holonet/linalg.hpp"

namespace holonet {

// A scalar holomorphic function together with its complex derivatives.
// eval(z, n) returns g^{(n)}(z); derivatives are only requested by the
// spectral-response oracle.
struct HoloFunction {
  std::function<cplx(cplx, int)> eval;
  std::string name;

  cplx operator()(cplx z) const { return eval(z, 0); }

  // sum_k coeffs[k] z^k
  static HoloFunction polynomial(std::vector<cplx> coeffs);
  // scale * z^k
  static HoloFunction monomial(int k, cplx scale = 1.0);
  // (z - pole)^{-k}, k >= 1
  static HoloFunction resolvent_power(cplx pole, int k);
  static HoloFunction exponential();
  // Pointwise product; derivatives by the Leibniz rule.
  static HoloFunction product(HoloFunction a, HoloFunction b);
};

// Circle center + radius * e^{it} discretised by the trapezoidal rule with
// n_quadrature nodes.
struct Contour {
  cplx center{0.0, 0.0};
  double radius = 1.0;
  int n_quadrature = 256;
};

// Center 0, radius 1.1 * min(||T||_1, ||T||_inf), which always encloses the
// spectrum. A zero operator gets radius 1.
Contour default_contour(const CMat& t, int n_quadrature = 256);

// g(T) = -1/(2 pi i) \oint g(z) (T - z Id)^{-1} dz by the trapezoidal rule.
// The quadrature solves are independent; with threads > 1 they are spread
// over worker threads and summed in fixed node blocks, so results do not
// depend on the thread count. Throws SingularResolvent when a node lands on
// the spectrum and InputError for M < 16.
CMat contour_apply(const HoloFunction& g, const CMat& t, const Contour& contour,
                   int threads = 1);

struct FaberBank {
  int max_order = 3;
  double gamma = 0.5;
  bool include_order_zero = true;

  bool operator==(const FaberBank&) const = default;
};

struct ResolventBank {
  int max_power = 3;
  cplx pole{-1.0, 0.0};

  bool operator==(const ResolventBank&) const = default;
};

// Symbolic description of a filter bank {Psi_i}.
//   Faber:     Psi_k(z) = gamma^k z^k,  k = 0 (optional) .. K
//   Resolvent: Psi_k(z) = (z - y)^{-k}, k = 1 .. K
struct FilterBankSpec {
  std::variant<FaberBank, ResolventBank> kind;

  static FilterBankSpec faber(int max_order, double gamma = 0.5, bool include_order_zero = true);
  static FilterBankSpec resolvent(int max_power, cplx pole = {-1.0, 0.0});

  bool is_faber() const { return std::holds_alternative<FaberBank>(kind); }
  bool is_resolvent() const { return std::holds_alternative<ResolventBank>(kind); }
  int atom_count() const;
  // Power of z (Faber) or of the resolvent attached to atom i.
  int atom_order(int i) const;
  HoloFunction atom_function(int i) const;
  // True when every atom of a real operator is real.
  bool real_on_real_operators() const;
  // Throws InputError on K < 1, gamma outside (0, 1] or a non-finite pole.
  void validate() const;

  bool operator==(const FilterBankSpec&) const = default;
};

// Key-value text block:
//   kind = faber | resolvent
//   K = 3
//   gamma = 0.5
//   include_order_zero = true
//   y_real = -1
//   y_imag = 0
std::string to_config_text(const FilterBankSpec& spec);
FilterBankSpec parse_bank_config(std::istream& in);
FilterBankSpec parse_bank_config(const std::string& text);

struct PrecomputedBank {
  std::vector<CMat> atoms;
  FilterBankSpec spec;
  CMat source;  // operator the atoms were computed from
  bool purely_real = false;

  std::size_t size() const { return atoms.size(); }
  Eigen::Index dim() const { return source.rows(); }
};

// Closed-form atoms: gamma^k T^k by repeated multiplication, or powers of the
// LU-solved resolvent. Throws PoleOnSpectrum if T - y Id is numerically singular.
PrecomputedBank build_bank(const CMat& t, const FilterBankSpec& spec);
PrecomputedBank build_bank(const CharacteristicOperator& t, const FilterBankSpec& spec);

// Max over atoms of the relative Frobenius distance between the stored atom and
// contour_apply of its generating function. For atoms that vanish the
// distance is absolute.
double bank_matches_contour(const PrecomputedBank& bank, const Contour& contour, int threads = 1);

// Generalised-eigenspace decomposition of a small dense matrix, used as an
// independent check of the functional calculus:
//   g(T) = sum_l g(l) P_l + sum_l [sum_{n=1}^{m_l - 1} g^{(n)}(l)/n! (T - l Id)^n] P_l.
//
// Eigenvalues from a dense eigensolve are greedily clustered (absolute
// tolerance cluster_tol); each cluster's generalised eigenspace is the null
// space of (T - l Id)^{m_l}. Numerically recovering Jordan structure is
// unstable, so construction throws IllConditionedSpectrum for N > 50, when a
// null space does not have the expected dimension, or when the assembled
// eigenbasis is close to singular.
class SpectralResponseOracle {
 public:
  static constexpr Eigen::Index kMaxDim = 50;

  explicit SpectralResponseOracle(const CMat& t, double cluster_tol = 1e-6);

  const std::vector<cplx>& eigenvalues() const { return eigenvalues_; }
  const std::vector<int>& multiplicities() const { return multiplicities_; }
  const std::vector<CMat>& projections() const { return projections_; }
  // (T - l Id) P_l for each cluster.
  const std::vector<CMat>& nilpotents() const { return nilpotents_; }

  CMat apply(const HoloFunction& g) const;

 private:
  CMat t_;
  std::vector<cplx> eigenvalues_;
  std::vector<int> multiplicities_;
  std::vector<CMat> projections_;
  std::vector<CMat> nilpotents_;
};

CMat spectral_response(const CMat& t, const HoloFunction& g, double cluster_tol = 1e-6);

// Hausdorff distance between sigma(g(T)) and g(sigma(T)), both from dense
// eigensolves. g is a polynomial given by its coefficients.
double spectral_mapping_distance(const CMat& t, const std::vector<cplx>& coeffs);
bool spectral_mapping_check(const CMat& t, const std::vector<cplx>& coeffs, double tol = 1e-6);

// Horner evaluation of sum_k coeffs[k] T^k.
CMat matrix_polynomial(const CMat& t, const std::vector<cplx>& coeffs);

}  // namespace holonet
