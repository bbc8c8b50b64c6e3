#include <doctest.h>

#include <cmath>
#include <random>

#include "cmdnls/hardy.hpp"
#include "cmdnls/soliton.hpp"

using namespace cmdnls;

namespace {

const FrequencyGrid kGrid(200.0, 512);

// Transform of the ground state R = sqrt(2)/(x + i): -2 pi i sqrt(2) e^{-xi}.
cplx ground_state_hat(double xi) { return -kTwoPi * kI * std::sqrt(2.0) * std::exp(-xi); }

double max_error(const ChiralField& f, const std::function<cplx(double)>& exact, int upto = -1) {
  double e = 0.0;
  const int n = upto < 0 ? f.grid.K : upto;
  for (int k = 0; k < n; ++k) e = std::max(e, std::abs(f.coeffs[k] - exact(f.grid.xi(k))));
  return e;
}

}  // namespace

TEST_CASE("grid geometry and validation") {
  CHECK(kGrid.dxi() == doctest::Approx(kTwoPi / 200.0));
  CHECK(kGrid.spatial_size() == 1024);
  CHECK(kGrid.x(0) == doctest::Approx(-100.0));
  CHECK_THROWS_AS(FrequencyGrid(200.0, 4), Error);
  CHECK_THROWS_AS(FrequencyGrid(-1.0, 512), Error);
}

TEST_CASE("gregory weights integrate smooth decaying functions") {
  const auto q = kGrid.quadrature().weights(0);
  // Decay rates chosen so the truncation at xi_max = 16 is below round-off.
  double s0 = 0.0, s3 = 0.0;
  for (int k = 0; k < kGrid.K; ++k) {
    const double xi = kGrid.xi(k);
    s0 += q[k] * std::exp(-2.0 * xi);
    s3 += q[k] * xi * xi * xi * std::exp(-3.0 * xi);
  }
  CHECK(std::abs(s0 - 0.5) < 1e-12);
  CHECK(std::abs(s3 - 6.0 / 81.0) < 1e-10);  // O(h^8) endpoint error
}

TEST_CASE("half-line convolution and correlation match closed forms") {
  const auto& Q = kGrid.quadrature();
  CVec a(kGrid.K), b(kGrid.K);
  for (int k = 0; k < kGrid.K; ++k) {
    a[k] = std::exp(-kGrid.xi(k));
    b[k] = std::exp(-2.0 * kGrid.xi(k));
  }
  const ChiralField conv(kGrid, Q.convolve(a, 0, b, 0), 0);
  CHECK(max_error(conv, [](double xi) { return cplx((std::exp(-xi) - std::exp(-2 * xi)) / kTwoPi); }) < 1e-12);
  // The geometric tail continuation is shared by both factors, so they decay alike.
  const ChiralField corr(kGrid, Q.correlate(b, 0, b, 0, tail_ratio(b)), 0);
  CHECK(max_error(corr, [](double s) { return cplx(std::exp(-2.0 * s) / (8.0 * kPi)); }) < 1e-11);
}

TEST_CASE("ground state functionals") {
  const ChiralField R = ChiralField::from_transform(kGrid, ground_state_hat);
  CHECK(std::abs(mass(R) - kTwoPi) / kTwoPi < 1e-10);
  CHECK(std::abs(energy(R)) < 1e-8);
  // (1/2pi) int xi 8 pi^2 e^{-2 xi} = pi and (1/2pi) int (1 + xi^2) 8 pi^2 e^{-2xi} = 3 pi.
  CHECK(homogeneous_sobolev_norm(R, 0.5) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-9));
  CHECK(sobolev_norm(R, 1.0) == doctest::Approx(std::sqrt(3.0 * kPi)).epsilon(1e-9));
  CHECK(std::abs(centroid(R)) < 1e-8);
}

TEST_CASE("products of chiral functions") {
  const ChiralField R = ChiralField::from_transform(kGrid, ground_state_hat);
  // R^2 = 2/(x+i)^2 has transform -4 pi xi e^{-xi}.
  CHECK(max_error(product(R, R), [](double xi) { return cplx(-4.0 * kPi * xi * std::exp(-xi)); }) < 1e-10);
  // |R|^2 = 2/(1 + x^2) has transform 2 pi e^{-|xi|}.
  CHECK(max_error(szego_density(R), [](double xi) { return cplx(kTwoPi * std::exp(-xi)); }, kGrid.K - 2 * kEndpointOrder) < 1e-10);
  // The energy residual of R vanishes: R' = i Pi_+(|R|^2) R.
  CHECK(std::sqrt(mass(energy_residual(R))) < 1e-6);
}

TEST_CASE("spatial evaluation of a decaying field") {
  // xi e^{-xi} is the transform of 1 / (2 pi (1 - i x)^2).
  const ChiralField f = ChiralField::from_transform(kGrid, [](double xi) { return cplx(xi * std::exp(-xi)); });
  // Pointwise values are those of the L-periodization, up to the transform
  // truncated at xi_max (16 e^{-16} ~ 2e-6).
  const auto exact = [](double x) {
    cplx s = 0.0;
    for (int n = -4000; n <= 4000; ++n) s += 1.0 / (kTwoPi * std::pow(cplx(1.0, -(x + n * kGrid.L)), 2));
    return s;
  };
  const CVec v = to_spatial(f);
  double e = 0.0;
  for (int m = 0; m < kGrid.spatial_size(); m += 16) e = std::max(e, std::abs(v[m] - exact(kGrid.x(m))));
  CHECK(e < 1e-6);
  // (1/2pi) int xi^2 e^{-2 xi} = 1/(8 pi), by either quadrature.
  CHECK(mass(f) == doctest::Approx(1.0 / (8.0 * kPi)).epsilon(1e-10));
  CHECK(mass_spatial(f) == doctest::Approx(1.0 / (8.0 * kPi)).epsilon(1e-6));
  const VarianceReport var = variance(f);
  CHECK_FALSE(var.boundary_dominated);
  // int x^2 / (4 pi^2 (1 + x^2)^2) dx = 1/(8 pi).
  CHECK(var.value == doctest::Approx(1.0 / (8.0 * kPi)).epsilon(1e-6));
}

TEST_CASE("Galilean boost and gauge transform") {
  const ChiralField R = ChiralField::from_transform(kGrid, ground_state_hat);
  const ChiralField b = galilean_boost(R, 8 * kGrid.dxi());
  CHECK(b.origin == 8);
  CHECK(mass(b) == doctest::Approx(mass(R)).epsilon(1e-12));
  CHECK_THROWS_AS(galilean_boost(R, 0.5 * kGrid.dxi()), Error);

  const ChiralField f = ChiralField::from_transform(kGrid, [](double xi) { return cplx(xi * xi * std::exp(-xi * xi)); });
  const RealLineField u = embed(f);
  const RealLineField v = gauge_transform(u);
  CHECK(mass(v) == doctest::Approx(mass(u)).epsilon(1e-10));
  CHECK(std::sqrt(mass(inverse_gauge_transform(v) - u)) < 1e-10);
}

TEST_CASE("projection and Hilbert transform") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  const double a = 1.0 + 0.1 * n(rng);
  const RealLineField g = RealLineField::from_transform(kGrid, [=](double xi) { return cplx(std::exp(-a * xi * xi)); });
  CHECK(g.is_real(1e-12));
  const ChiralField p = project_plus(g);
  // Pi_+ keeps the positive frequencies: (1 + iH) / 2 on the two-sided field.
  const RealLineField half = 0.5 * (g + kI * hilbert_transform(g));
  for (int k = 1; k < kGrid.K; ++k) REQUIRE(std::abs(p.coeffs[k] - half.at(k)) < 1e-12);
  CHECK(std::abs(half.at(-3)) < 1e-12);
}

TEST_CASE("snapshot round trip is exact") {
  const ChiralField f = ChiralField::from_transform(kGrid, [](double xi) { return std::polar(std::exp(-xi), xi / 3.0); });
  const std::string path = "hardy_snapshot_test/f.csv";
  write_snapshot(join_path("hardy_snapshot_test", "f.csv"), f);
  const ChiralField g = read_snapshot(path, kGrid);
  for (int k = 0; k < kGrid.K; ++k) REQUIRE(g.coeffs[k] == f.coeffs[k]);
}
