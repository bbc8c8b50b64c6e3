#include <doctest.h>

#include <cmath>

#include "cmdnls/poles.hpp"
#include "cmdnls/soliton.hpp"

using namespace cmdnls;

TEST_CASE("one pole is static") {
  const PoleDerivative d = pole_rhs(PoleState{0.0, {-kI}, {std::sqrt(2.0)}});
  CHECK(std::abs(d.dz[0]) == 0.0);
  CHECK(std::abs(d.da[0]) == 0.0);
}

TEST_CASE("Calogero-Moser flow reproduces the inverse formula") {
  const SpectralData data{0.0, 1.0, {0.0, 1.0}, {0.0, 0.0}};
  std::vector<double> times;
  for (int i = 1; i <= 50; ++i) times.push_back(0.1 * i);
  const PoleResidues start = residues_at_time(data, 0.0);
  const PoleTrajectory tr = integrate_poles(PoleState{0.0, start.poles, start.residues}, times, 1e-10);
  REQUIRE(tr.event == PoleEvent::Completed);
  REQUIRE(tr.states.size() == times.size());
  double dev = 0.0;
  for (size_t i = 0; i < times.size(); ++i) {
    const PoleResidues ref = residues_at_time(data, times[i]);
    for (size_t k = 0; k < ref.poles.size(); ++k) {
      size_t m = 0;
      for (size_t j = 1; j < ref.poles.size(); ++j)
        if (std::abs(ref.poles[j] - tr.states[i].z[k]) < std::abs(ref.poles[m] - tr.states[i].z[k])) m = j;
      dev = std::max({dev, std::abs(ref.poles[m] - tr.states[i].z[k]), std::abs(ref.residues[m] - tr.states[i].a[k])});
    }
  }
  CHECK(dev < 1e-6);
  CHECK(tr.max_constraint < 1e-8);
}

TEST_CASE("second-order Calogero-Moser law") {
  const RationalSoliton s = residues_from_poles({cplx(-2.0, -1.0), cplx(0.0, -1.5), cplx(2.0, -1.0)});
  std::vector<double> times;
  for (int i = 1; i <= 100; ++i) times.push_back(0.01 * i);
  const PoleTrajectory tr = integrate_poles(PoleState{0.0, s.poles, s.residues()}, times, 1e-12);
  REQUIRE(tr.event == PoleEvent::Completed);
  CHECK(acceleration_residual(tr.states) < 1e-5);
}

TEST_CASE("integration backwards in time") {
  const SpectralData data{0.0, 1.0, {0.0, -1.0}, {0.5, 0.0}};
  const PoleResidues start = residues_at_time(data, 1.0);
  const PoleTrajectory tr = integrate_poles(PoleState{1.0, start.poles, start.residues}, {0.5, 0.0}, 1e-10);
  REQUIRE(tr.states.size() == 2);
  const PoleResidues ref = residues_at_time(data, 0.0);
  double dev = 0.0;
  for (size_t k = 0; k < ref.poles.size(); ++k) {
    double best = 1e300;
    for (cplx z : tr.states[1].z) best = std::min(best, std::abs(z - ref.poles[k]));
    dev = std::max(dev, best);
  }
  CHECK(dev < 1e-6);
}

TEST_CASE("invalid pole states") {
  CHECK_THROWS_AS(integrate_poles(PoleState{0.0, {-kI}, {}}, {1.0}, 1e-10), Error);
  CHECK(collision_gap({-kI, cplx(0.0, -2.0)}) > 0.0);
}
