#include <doctest.h>

#include <sstream>

#include "holonet/error.hpp"
#include "holonet/holocalc.hpp"
#include "support.hpp"

using namespace holonet;
using holonet::testing::max_abs;
using holonet::testing::path_adjacency;
using holonet::testing::random_complex;

namespace {

// Explicit power-series Horner oracle, independent of matrix_polynomial.
CMat naive_polynomial(const CMat& t, const std::vector<cplx>& coeffs) {
  CMat acc = CMat::Zero(t.rows(), t.cols());
  CMat power = CMat::Identity(t.rows(), t.cols());
  for (const cplx& a : coeffs) {
    acc += a * power;
    power = power * t;
  }
  return acc;
}

CMat scaled_random(Eigen::Index n, double norm, std::mt19937_64& rng) {
  const CMat t = random_complex(n, n, rng);
  return t * (norm / spectral_norm(t));
}

}  // namespace

TEST_CASE("contour_apply reproduces simple cases") {
  SUBCASE("identity function on Id") {
    const CMat id = CMat::Identity(2, 2);
    const CMat r = contour_apply(HoloFunction::polynomial({0.0, 1.0}), id, {{0.0, 0.0}, 3.0, 64});
    CHECK(max_abs(CMat(r - id)) < 1e-10);
  }
  SUBCASE("z^3 on the path adjacency vanishes") {
    const CMat w = path_adjacency().cast<cplx>();
    const CMat r = contour_apply(HoloFunction::monomial(3), w, {{0.0, 0.0}, 2.0, 256});
    CHECK(max_abs(r) < 1e-10);
  }
  SUBCASE("random degree-5 polynomial matches Horner") {
    std::mt19937_64 rng(1);
    const CMat t = scaled_random(8, 2.0, rng);
    const CMat c = random_complex(6, 1, rng);
    const std::vector<cplx> coeffs(c.data(), c.data() + c.size());
    const CMat r = contour_apply(HoloFunction::polynomial(coeffs), t, {{0.0, 0.0}, 3.0, 256});
    CHECK(rel_frobenius(r, naive_polynomial(t, coeffs)) < 1e-8);
    CHECK(rel_frobenius(matrix_polynomial(t, coeffs), naive_polynomial(t, coeffs)) < 1e-13);
  }
}

TEST_CASE("contour_apply validates its inputs") {
  const CMat id = CMat::Identity(2, 2);
  CHECK_THROWS_AS(contour_apply(HoloFunction::exponential(), id, {{0.0, 0.0}, 2.0, 8}), InputError);
  CHECK_THROWS_AS(contour_apply(HoloFunction::exponential(), id, {{0.0, 0.0}, 1.0, 64}), SingularResolvent);
}

TEST_CASE("contour_apply is independent of thread count") {
  std::mt19937_64 rng(2);
  const CMat t = scaled_random(10, 1.5, rng);
  const Contour c = default_contour(t);
  const CMat one = contour_apply(HoloFunction::exponential(), t, c, 1);
  const CMat four = contour_apply(HoloFunction::exponential(), t, c, 4);
  CHECK(one == four);
}

TEST_CASE("polynomial consistency on random matrices") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<Eigen::Index> size(1, 20);
  std::uniform_int_distribution<int> degree(0, 6);
  std::uniform_real_distribution<double> norm(0.05, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const CMat t = scaled_random(size(rng), norm(rng), rng);
    const CMat c = random_complex(degree(rng) + 1, 1, rng);
    const std::vector<cplx> coeffs(c.data(), c.data() + c.size());
    const CMat r = contour_apply(HoloFunction::polynomial(coeffs), t, default_contour(t));
    CHECK(rel_frobenius(r, naive_polynomial(t, coeffs)) < 1e-7);
  }
}

TEST_CASE("multiplicativity and inversion") {
  std::mt19937_64 rng(4);
  const CMat t = scaled_random(7, 1.0, rng);
  const HoloFunction g = HoloFunction::polynomial({1.0, 2.0, cplx(0.0, 1.0)});
  const HoloFunction h = HoloFunction::polynomial({-1.0, 0.5});
  const Contour c = default_contour(t);
  const CMat gh = contour_apply(HoloFunction::product(g, h), t, c);
  CHECK(rel_frobenius(gh, contour_apply(g, t, c) * contour_apply(h, t, c)) < 1e-7);

  const CMat l = t + 3.0 * CMat::Identity(7, 7);  // spectrum in |z - 3| <= 1
  const cplx y{-1.0, 0.0};
  const CMat r = contour_apply(HoloFunction::resolvent_power(y, 1), l, {{3.0, 0.0}, 2.0, 256});
  CHECK(max_abs(CMat(r * (l - y * CMat::Identity(7, 7)) - CMat::Identity(7, 7))) < 1e-7);
}

TEST_CASE("quadrature converges exponentially") {
  std::mt19937_64 rng(5);
  const CMat t = scaled_random(6, 1.0, rng);
  const CMat exact = spectral_response(t, HoloFunction::exponential());
  const double rho = Eigen::ComplexEigenSolver<CMat>(t, false).eigenvalues().cwiseAbs().maxCoeff();
  const auto dev = [&](int m) {
    return rel_frobenius(contour_apply(HoloFunction::exponential(), t, {{0.0, 0.0}, 1.5 * rho, m}), exact);
  };
  CHECK(dev(256) <= 1e-3 * dev(32));
}

TEST_CASE("default contour") {
  const CMat t = path_adjacency().cast<cplx>();
  const Contour c = default_contour(t);
  CHECK(c.center == cplx(0.0, 0.0));
  CHECK(c.radius == doctest::Approx(1.1));
  CHECK(default_contour(CMat::Zero(3, 3)).radius == 1.0);
}

TEST_CASE("Faber bank on the path adjacency") {
  const Mat w = path_adjacency();
  const PrecomputedBank bank = build_bank(w.cast<cplx>(), FilterBankSpec::faber(3, 0.5, true));
  REQUIRE(bank.size() == 4);
  CHECK(bank.atoms[0] == CMat::Identity(3, 3));
  CHECK(bank.atoms[1] == CMat(w.cast<cplx>() / 2.0));
  CHECK(bank.atoms[2] == CMat(w.cast<cplx>() * w.cast<cplx>() / 4.0));
  CHECK(bank.atoms[3] == CMat::Zero(3, 3));
  CHECK(bank.purely_real);
  CHECK(bank_matches_contour(bank, {{0.0, 0.0}, 2.0, 128}) <= 1e-9);
}

TEST_CASE("nilpotency ladder") {
  const PrecomputedBank bank = build_bank(path_adjacency().cast<cplx>(), FilterBankSpec::faber(5, 1.0, false));
  for (int k = 1; k <= 5; ++k) {
    const double size = max_abs(bank.atoms[static_cast<std::size_t>(k - 1)]);
    if (k <= 2) {
      CHECK(size > 0.0);
    } else {
      CHECK(size == 0.0);
    }
  }
}

TEST_CASE("resolvent banks") {
  SUBCASE("edgeless Laplacian gives Id") {
    const PrecomputedBank bank = build_bank(CMat::Zero(3, 3), FilterBankSpec::resolvent(1));
    CHECK(max_abs(CMat(bank.atoms[0] - CMat::Identity(3, 3))) < 1e-15);
    CHECK(bank_matches_contour(bank, {{0.0, 0.0}, 0.5, 64}) <= 1e-12);
  }
  SUBCASE("path Laplacian against the dense inverse") {
    Mat l(3, 3);
    l << 0, 0, 0, -1, 1, 0, 0, -1, 1;
    const CMat lc = l.cast<cplx>();
    const PrecomputedBank bank = build_bank(lc, FilterBankSpec::resolvent(2, {-1.0, 0.0}));
    const CMat inv = (lc + CMat::Identity(3, 3)).inverse();
    CHECK(max_abs(CMat(bank.atoms[1] - inv * inv)) < 1e-14);
    CHECK(max_abs(CMat((lc + CMat::Identity(3, 3)) * bank.atoms[0] - CMat::Identity(3, 3))) < 1e-14);
    CHECK(bank_matches_contour(bank, {{1.0, 0.0}, 1.5, 256}) <= 1e-8);
  }
  SUBCASE("pole on the spectrum") {
    CHECK_THROWS_AS(build_bank(CMat::Identity(2, 2), FilterBankSpec::resolvent(1, {1.0, 0.0})), PoleOnSpectrum);
  }
  SUBCASE("complex pole makes the bank complex") {
    const PrecomputedBank bank = build_bank(CMat::Identity(2, 2), FilterBankSpec::resolvent(1, {-1.0, 0.5}));
    CHECK_FALSE(bank.purely_real);
  }
}

TEST_CASE("bank spec validation and config text") {
  CHECK_THROWS_AS(FilterBankSpec::faber(0).validate(), InputError);
  CHECK_THROWS_AS(FilterBankSpec::faber(2, 1.5).validate(), InputError);
  CHECK_THROWS_AS(FilterBankSpec::resolvent(0).validate(), InputError);
  for (const FilterBankSpec& spec :
       {FilterBankSpec::faber(4, 0.25, false), FilterBankSpec::resolvent(3, {-2.0, 0.5})}) {
    CHECK(parse_bank_config(to_config_text(spec)) == spec);
  }
  CHECK_THROWS_AS(parse_bank_config("kind = faber\nbogus = 1\n"), InputError);
}

TEST_CASE("spectral response oracle") {
  SUBCASE("z^3 on the path adjacency") {
    const CMat r = spectral_response(path_adjacency().cast<cplx>(), HoloFunction::monomial(3));
    CHECK(r == CMat::Zero(3, 3));
  }
  SUBCASE("z^2 on diag(1, 2)") {
    CMat t = CMat::Zero(2, 2);
    t(0, 0) = 1.0;
    t(1, 1) = 2.0;
    const CMat r = spectral_response(t, HoloFunction::monomial(2));
    CHECK(std::abs(r(0, 0) - 1.0) < 1e-12);
    CHECK(std::abs(r(1, 1) - 4.0) < 1e-12);
    CHECK(std::abs(r(0, 1)) < 1e-12);
  }
  SUBCASE("exp on a random normal matrix matches the contour") {
    std::mt19937_64 rng(8);
    const Eigen::HouseholderQR<CMat> qr(random_complex(6, 6, rng));
    const CMat q = qr.householderQ();
    const CMat d = random_complex(6, 1, rng).asDiagonal();
    const CMat t = q * d * q.adjoint();
    const HoloFunction e = HoloFunction::exponential();
    CHECK(rel_frobenius(spectral_response(t, e), contour_apply(e, t, default_contour(t))) < 1e-7);
  }
  SUBCASE("projections resolve the identity") {
    std::mt19937_64 rng(9);
    const CMat t = random_complex(5, 5, rng);
    const SpectralResponseOracle oracle(t);
    CMat sum = CMat::Zero(5, 5);
    for (std::size_t k = 0; k < oracle.projections().size(); ++k) {
      const CMat& p = oracle.projections()[k];
      sum += p;
      CHECK(max_abs(CMat(p * p - p)) < 1e-8);
      CHECK(max_abs(CMat(p * t - t * p)) < 1e-8);
    }
    CHECK(max_abs(CMat(sum - CMat::Identity(5, 5))) < 1e-8);
  }
  SUBCASE("Jordan block: nilpotent part and derivative terms") {
    // T = 2 Id + N with N a single 3x3 Jordan shift; exp(T) = e^2 (Id + N + N^2 / 2).
    CMat n = CMat::Zero(3, 3);
    n(0, 1) = 1.0;
    n(1, 2) = 1.0;
    const CMat t = 2.0 * CMat::Identity(3, 3) + n;
    const SpectralResponseOracle oracle(t);
    REQUIRE(oracle.multiplicities().size() == 1);
    CHECK(oracle.multiplicities()[0] == 3);
    const CMat& nil = oracle.nilpotents()[0];
    CHECK(max_abs(CMat(nil * nil * nil)) < 1e-10);
    const CMat expected = std::exp(2.0) * (CMat::Identity(3, 3) + n + n * n / 2.0);
    CHECK(rel_frobenius(oracle.apply(HoloFunction::exponential()), expected) < 1e-10);
  }
  SUBCASE("oversized input is refused") {
    CHECK_THROWS_AS(SpectralResponseOracle(CMat::Identity(51, 51)), IllConditionedSpectrum);
  }
}

TEST_CASE("spectral mapping") {
  CMat t = CMat::Zero(3, 3);
  t.diagonal() << 1.0, 2.0, 3.0;
  CHECK(spectral_mapping_check(t, {0.0, 0.0, 1.0}));

  const CMat w = path_adjacency().cast<cplx>();
  const std::vector<cplx> p{cplx(0.7, -0.2), 3.0, -1.0, 2.0};
  const Eigen::ComplexEigenSolver<CMat> eig(matrix_polynomial(w, p), false);
  // A defective eigenvalue is only resolved to about eps^(1/3).
  for (const cplx& l : eig.eigenvalues()) CHECK(std::abs(l - p[0]) < 1e-6);
  CHECK(spectral_mapping_check(w, p));

  std::mt19937_64 rng(10);
  const CMat r = random_complex(10, 10, rng);
  const CMat c = random_complex(5, 1, rng);
  const std::vector<cplx> q(c.data(), c.data() + c.size());
  CHECK(spectral_mapping_distance(r, q) < 1e-6);
}
