#include "holonet/holocalc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

#include "holonet/error.hpp"

namespace holonet {

namespace {

cplx ipow(cplx z, int k) {
  cplx out{1.0, 0.0};
  for (int i = 0; i < k; ++i) out *= z;
  return out;
}

// k! / (k - n)!
double falling_factorial(int k, int n) {
  double out = 1.0;
  for (int i = 0; i < n; ++i) out *= static_cast<double>(k - i);
  return out;
}

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
  return out;
}

}  // namespace

HoloFunction HoloFunction::polynomial(std::vector<cplx> coeffs) {
  HoloFunction f;
  f.name = "polynomial(deg " + std::to_string(coeffs.empty() ? 0 : coeffs.size() - 1) + ")";
  f.eval = [c = std::move(coeffs)](cplx z, int n) {
    cplx acc{0.0, 0.0};
    for (int k = static_cast<int>(c.size()) - 1; k >= n; --k) {
      acc = acc * z + c[static_cast<std::size_t>(k)] * falling_factorial(k, n);
    }
    return acc;
  };
  return f;
}

HoloFunction HoloFunction::monomial(int k, cplx scale) {
  HoloFunction f;
  f.name = "z^" + std::to_string(k);
  f.eval = [k, scale](cplx z, int n) -> cplx {
    if (n > k) return {0.0, 0.0};
    return scale * falling_factorial(k, n) * ipow(z, k - n);
  };
  return f;
}

HoloFunction HoloFunction::resolvent_power(cplx pole, int k) {
  HoloFunction f;
  f.name = "(z - y)^-" + std::to_string(k);
  f.eval = [pole, k](cplx z, int n) -> cplx {
    // d^n/dz^n (z - y)^{-k} = (-1)^n k (k+1) ... (k+n-1) (z - y)^{-k-n}
    double coef = 1.0;
    for (int i = 0; i < n; ++i) coef *= -static_cast<double>(k + i);
    return coef / ipow(z - pole, k + n);
  };
  return f;
}

HoloFunction HoloFunction::exponential() {
  HoloFunction f;
  f.name = "exp";
  f.eval = [](cplx z, int) { return std::exp(z); };
  return f;
}

HoloFunction HoloFunction::product(HoloFunction a, HoloFunction b) {
  HoloFunction f;
  f.name = a.name + " * " + b.name;
  f.eval = [a = std::move(a), b = std::move(b)](cplx z, int n) {
    cplx acc{0.0, 0.0};
    for (int j = 0; j <= n; ++j) acc += binomial(n, j) * a.eval(z, j) * b.eval(z, n - j);
    return acc;
  };
  return f;
}

Contour default_contour(const CMat& t, int n_quadrature) {
  Contour c;
  c.n_quadrature = n_quadrature;
  if (t.size() == 0) return c;
  const double norm_1 = t.cwiseAbs().colwise().sum().maxCoeff();
  const double norm_inf = t.cwiseAbs().rowwise().sum().maxCoeff();
  const double bound = std::min(norm_1, norm_inf);
  c.radius = bound > 0.0 ? 1.1 * bound : 1.0;
  return c;
}

namespace {

// Sum of quadrature terms for nodes [begin, end), accumulated in node order.
CMat contour_partial_sum(const HoloFunction& g, const CMat& t, const Contour& contour,
                         int begin, int end) {
  const Eigen::Index n = t.rows();
  const CMat id = CMat::Identity(n, n);
  CMat acc = CMat::Zero(n, n);
  const double dtheta = 2.0 * std::numbers::pi / contour.n_quadrature;
  for (int k = begin; k < end; ++k) {
    const cplx phase = std::polar(1.0, dtheta * k);
    const cplx z = contour.center + contour.radius * phase;
    Eigen::PartialPivLU<CMat> lu(t - z * id);
    const double rc = lu.rcond();
    if (!(rc > 1e-14)) {
      throw SingularResolvent("quadrature node z = (" + std::to_string(z.real()) + ", " +
                              std::to_string(z.imag()) +
                              ") is numerically on the spectrum (rcond " + std::to_string(rc) +
                              "); the contour does not avoid sigma(T)");
    }
    acc += (g(z) * contour.radius * phase) * lu.inverse();
  }
  return acc;
}

}  // namespace

CMat contour_apply(const HoloFunction& g, const CMat& t, const Contour& contour, int threads) {
  if (t.rows() != t.cols()) throw ShapeMismatch("contour_apply: operator must be square");
  if (contour.n_quadrature < 16) throw InputError("contour_apply: need at least 16 quadrature nodes");
  if (!(contour.radius > 0.0)) throw InputError("contour_apply: radius must be positive");

  const int m = contour.n_quadrature;
  // Fixed node blocks summed in block order, so the result is the same for
  // every thread count.
  constexpr int kBlock = 8;
  const int blocks = (m + kBlock - 1) / kBlock;
  const int workers = std::clamp(threads, 1, blocks);
  std::vector<CMat> partial(static_cast<std::size_t>(blocks));
  const auto run_blocks = [&](int first, int last) {
    for (int b = first; b < last; ++b) {
      partial[static_cast<std::size_t>(b)] =
          contour_partial_sum(g, t, contour, b * kBlock, std::min(m, (b + 1) * kBlock));
    }
  };
  if (workers == 1) {
    run_blocks(0, blocks);
  } else {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      const int first = blocks * w / workers;
      const int last = blocks * (w + 1) / workers;
      pool.emplace_back([&, w, first, last] {
        try {
          run_blocks(first, last);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  CMat total = std::move(partial.front());
  for (std::size_t b = 1; b < partial.size(); ++b) total += partial[b];
  return total * cplx(-1.0 / m, 0.0);
}

FilterBankSpec FilterBankSpec::faber(int max_order, double gamma, bool include_order_zero) {
  return FilterBankSpec{FaberBank{max_order, gamma, include_order_zero}};
}

FilterBankSpec FilterBankSpec::resolvent(int max_power, cplx pole) {
  return FilterBankSpec{ResolventBank{max_power, pole}};
}

int FilterBankSpec::atom_count() const {
  if (const auto* f = std::get_if<FaberBank>(&kind)) {
    return f->max_order + (f->include_order_zero ? 1 : 0);
  }
  return std::get<ResolventBank>(kind).max_power;
}

int FilterBankSpec::atom_order(int i) const {
  if (const auto* f = std::get_if<FaberBank>(&kind)) return f->include_order_zero ? i : i + 1;
  return i + 1;
}

HoloFunction FilterBankSpec::atom_function(int i) const {
  const int k = atom_order(i);
  if (const auto* f = std::get_if<FaberBank>(&kind)) {
    return HoloFunction::monomial(k, std::pow(f->gamma, k));
  }
  return HoloFunction::resolvent_power(std::get<ResolventBank>(kind).pole, k);
}

bool FilterBankSpec::real_on_real_operators() const {
  if (is_faber()) return true;
  return std::get<ResolventBank>(kind).pole.imag() == 0.0;
}

void FilterBankSpec::validate() const {
  if (const auto* f = std::get_if<FaberBank>(&kind)) {
    if (f->max_order < 1) throw InputError("Faber bank needs K >= 1");
    if (!(f->gamma > 0.0 && f->gamma <= 1.0)) throw InputError("Faber discount gamma must lie in (0, 1]");
  } else {
    const auto& r = std::get<ResolventBank>(kind);
    if (r.max_power < 1) throw InputError("resolvent bank needs K >= 1");
    if (!std::isfinite(r.pole.real()) || !std::isfinite(r.pole.imag())) {
      throw InputError("resolvent pole must be finite");
    }
  }
}

PrecomputedBank build_bank(const CMat& t, const FilterBankSpec& spec) {
  spec.validate();
  if (t.rows() != t.cols()) throw ShapeMismatch("build_bank: operator must be square");
  const Eigen::Index n = t.rows();
  PrecomputedBank bank;
  bank.spec = spec;
  bank.source = t;
  bank.purely_real = is_purely_real(t) && spec.real_on_real_operators();

  if (const auto* f = std::get_if<FaberBank>(&spec.kind)) {
    CMat power = CMat::Identity(n, n);
    if (f->include_order_zero) bank.atoms.push_back(power);
    double scale = 1.0;
    for (int k = 1; k <= f->max_order; ++k) {
      power = power * t;
      scale *= f->gamma;
      bank.atoms.push_back(scale * power);
    }
  } else {
    const auto& r = std::get<ResolventBank>(spec.kind);
    Eigen::PartialPivLU<CMat> lu(t - r.pole * CMat::Identity(n, n));
    if (n > 0 && !(lu.rcond() > 1e-14)) {
      throw PoleOnSpectrum("resolvent pole (" + std::to_string(r.pole.real()) + ", " +
                           std::to_string(r.pole.imag()) + ") lies on the spectrum");
    }
    const CMat resolvent = n > 0 ? CMat(lu.inverse()) : CMat(0, 0);
    CMat power = resolvent;
    bank.atoms.push_back(power);
    for (int k = 2; k <= r.max_power; ++k) {
      power = power * resolvent;
      bank.atoms.push_back(power);
    }
  }
  return bank;
}

PrecomputedBank build_bank(const CharacteristicOperator& t, const FilterBankSpec& spec) {
  return build_bank(CMat(t.matrix.cast<cplx>()), spec);
}

double bank_matches_contour(const PrecomputedBank& bank, const Contour& contour, int threads) {
  if (const auto* r = std::get_if<ResolventBank>(&bank.spec.kind)) {
    if (!(std::abs(r->pole - contour.center) > contour.radius)) {
      throw InputError("bank_matches_contour: resolvent pole must lie outside the contour");
    }
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < bank.atoms.size(); ++i) {
    const CMat via_contour =
        contour_apply(bank.spec.atom_function(static_cast<int>(i)), bank.source, contour, threads);
    const CMat& atom = bank.atoms[i];
    const double scale = atom.norm();
    const double dev = scale > 0.0 ? (atom - via_contour).norm() / scale : via_contour.norm();
    worst = std::max(worst, dev);
  }
  return worst;
}

CMat matrix_polynomial(const CMat& t, const std::vector<cplx>& coeffs) {
  const Eigen::Index n = t.rows();
  const CMat id = CMat::Identity(n, n);
  if (coeffs.empty()) return CMat::Zero(n, n);
  CMat acc = coeffs.back() * id;
  for (auto it = coeffs.rbegin() + 1; it != coeffs.rend(); ++it) acc = acc * t + (*it) * id;
  return acc;
}

}  // namespace holonet
