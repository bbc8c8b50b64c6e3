#include <doctest.h>

#include <cmath>
#include <random>

#include "cmdnls/soliton.hpp"

using namespace cmdnls;

namespace {

const FrequencyGrid kGrid(200.0, 512);

SpectralData two_soliton_data(double gamma1 = 0.0, double gamma2 = 0.0) {
  return SpectralData{0.0, 1.0, {0.0, 1.0}, {gamma1, gamma2}};
}

}  // namespace

TEST_CASE("polynomial helpers") {
  const Poly p = poly_from_roots({1.0, -2.0, cplx(0.5, -1.0)});
  auto r = poly_roots(p);
  std::sort(r.begin(), r.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  CHECK(std::abs(r[0] - cplx(-2.0)) < 1e-12);
  CHECK(std::abs(r[1] - cplx(0.5, -1.0)) < 1e-12);
  CHECK(std::abs(r[2] - cplx(1.0)) < 1e-12);
  CHECK(std::abs(poly_eval(poly_derivative(p), 1.0) - cplx(3.0) * cplx(0.5, 1.0)) < 1e-12);
  CHECK(std::abs(poly_eval(poly_mul(p, p), cplx(0.3, 0.2)) - std::pow(poly_eval(p, cplx(0.3, 0.2)), 2)) < 1e-12);
}

TEST_CASE("one pole gives the ground state") {
  const RationalSoliton s = residues_from_poles({-kI});
  REQUIRE(s.N() == 1);
  CHECK(std::abs(s.residues()[0] - std::sqrt(2.0)) < 1e-12);
  CHECK(validate_multisoliton(s.P, s.Q) < 1e-12);
  const ChiralField R = to_field(s, kGrid);
  double e = 0.0;
  for (int k = 0; k < kGrid.K; ++k)
    e = std::max(e, std::abs(R.coeffs[k] + kTwoPi * kI * std::sqrt(2.0) * std::exp(-kGrid.xi(k))));
  CHECK(e < 1e-10);
}

TEST_CASE("multi-soliton constraint and mass") {
  for (const auto& z : std::vector<std::vector<cplx>>{{-kI, -2.0 * kI}, {cplx(-1, -1), cplx(1, -0.5), cplx(3, -2)}}) {
    const RationalSoliton s = residues_from_poles(z);
    CHECK(validate_multisoliton(s.P, s.Q) < 1e-10);
    CHECK(constraint_residual(s.poles, s.residues()) < 1e-10);
    const double N = static_cast<double>(z.size());
    CHECK(std::abs(mass(to_field(s, kGrid)) - kTwoPi * N) / (kTwoPi * N) < 1e-6);
  }
  CHECK_THROWS_AS(residues_from_poles({kI}), Error);
}

TEST_CASE("inverse formula for N = 1 is the ground state") {
  const SpectralData d{kPi, 1.0, {0.0}, {0.0}};
  for (double t : {0.0, 3.0})
    for (double x : {-5.0, 0.0, 1.5}) CHECK(std::abs(eval_soliton(d, t, x) - std::sqrt(2.0) / (x + kI)) < 1e-12);
  const ChiralField u = field_from_spectral(d, 0.0, kGrid);
  const ChiralField R = to_field(residues_from_poles({-kI}), kGrid);
  double e = 0.0;
  for (int k = 0; k < kGrid.K; ++k) e = std::max(e, std::abs(u.coeffs[k] - R.coeffs[k]));
  CHECK(e < 1e-10);
}

TEST_CASE("explicit two-soliton formula agrees with the general synthesis") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> T(0.0, 5.0), X(-10.0, 10.0);
  const double g1 = 0.3, g2 = -0.2, rho = 1.3, lam = -0.8, phi = 0.4;
  const SpectralData d{phi, rho, {0.0, lam}, {g1, g2}};
  double e = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double t = T(rng), x = X(rng);
    e = std::max(e, std::abs(two_soliton_explicit(g1, g2, rho, lam, phi, t, x) - eval_soliton(d, t, x)));
  }
  CHECK(e < 1e-10);
}

TEST_CASE("spectral round trip") {
  for (const auto& z : std::vector<std::vector<cplx>>{{-kI}, {-kI, -2.0 * kI}}) {
    const ChiralField u = to_field(residues_from_poles(z), kGrid);
    CHECK(potential_roundtrip(u) < 1e-5);
  }
}

TEST_CASE("poles approach the real axis like t^-2") {
  const SpectralData d = two_soliton_data();
  for (double t : {100.0, 1000.0}) {
    const auto z = poles_at_time(d, t);
    const cplx z2 = std::abs(z[0].imag()) < std::abs(z[1].imag()) ? z[0] : z[1];
    const double predicted = -d.rho / (4.0 * std::pow(d.lambda[1], 4) * t * t);
    CHECK(std::abs(z2.imag() / predicted - 1.0) < (t < 500 ? 0.1 : 0.01));
  }
  for (cplx p : poles_at_time(d, 0.0)) CHECK(p.imag() < 0);
}

TEST_CASE("Sobolev norm of pole sums") {
  // ||R||_{H^1}^2 = 3 pi, ||R||_{H^2}^2 = (1/2pi) int (1 + xi^2)^2 8 pi^2 e^{-2 xi} = 4 pi (1/2 + 1/2 + 3/4).
  CHECK(pole_sobolev_norm({-kI}, {std::sqrt(2.0)}, 1.0) == doctest::Approx(std::sqrt(3.0 * kPi)).epsilon(1e-10));
  CHECK(pole_sobolev_norm({-kI}, {std::sqrt(2.0)}, 2.0) == doctest::Approx(std::sqrt(7.0 * kPi)).epsilon(1e-10));
  const RationalSoliton s = residues_from_poles({-kI, cplx(1.0, -2.0)});
  const double grid = sobolev_norm(to_field(s, FrequencyGrid(400.0, 2048)), 0.5);
  CHECK(pole_sobolev_norm(s.poles, s.residues(), 0.5) == doctest::Approx(grid).epsilon(1e-8));
}

TEST_CASE("Sobolev growth exponents") {
  std::vector<double> ts;
  for (int i = 0; i < 16; ++i) ts.push_back(50.0 * std::pow(10.0, i / 15.0));
  const GrowthScan two = growth_scan(two_soliton_data(), {0.5, 1.0, 2.0}, ts);
  for (size_t j = 0; j < 3; ++j) {
    CHECK(two.skipped[j] == 0);
    CHECK(std::abs(two.slopes[j] - 2.0 * two.s_list[j]) < 0.05 * 2.0 * two.s_list[j]);
  }
  const GrowthScan one = growth_scan(SpectralData{0.0, 1.0, {0.0}, {0.0}}, {1.0}, ts);
  CHECK(std::abs(one.slopes[0]) < 0.05);
  CHECK_THROWS_AS(growth_scan(two_soliton_data(), {1.0}, {10.0, 5.0}), Error);
}

TEST_CASE("invalid spectral data") {
  CHECK_THROWS_AS(validate_spectral_data(SpectralData{0.0, 1.0, {0.0, 0.0}, {0.0, 0.0}}), Error);
  CHECK_THROWS_AS(validate_spectral_data(SpectralData{0.0, -1.0, {0.0}, {0.0}}), Error);
  CHECK_THROWS_AS(validate_spectral_data(SpectralData{0.0, 1.0, {0.5}, {0.0}}), Error);
}

TEST_CASE("pole CSV rows") {
  CsvWriter csv(pole_csv_header());
  append_pole_rows(csv, 0.5, {-kI}, {std::sqrt(2.0)}, false);
  const std::string text = csv.str();
  CHECK(text.rfind("t,j,re_z,im_z,re_a,im_a,collision_flag\n", 0) == 0);
  CHECK(text.find(",-1,1.4142135623730951,0,0\n") != std::string::npos);
}
