#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "cmdnls/pde.hpp"
#include "cmdnls/soliton.hpp"

using namespace cmdnls;

namespace {

const FrequencyGrid kGrid(200.0, 512);

ChiralField ground_state() { return to_field(residues_from_poles({-kI}), kGrid); }
ChiralField two_soliton() { return to_field(residues_from_poles({-kI, -2.0 * kI}), kGrid); }

ChiralField run(const ChiralField& u0, double T, double dt, Scheme scheme = Scheme::IFRK4) {
  EvolutionConfig c;
  c.T = T;
  c.dt = dt;
  c.scheme = scheme;
  c.stride = 1 << 30;
  c.diagnostics = false;
  return evolve(u0, c).snapshots.back();
}

}  // namespace

TEST_CASE("config validation and scheme names") {
  CHECK(parse_scheme("IFRK4") == Scheme::IFRK4);
  CHECK(parse_scheme("RK4-direct") == Scheme::RK4);
  CHECK_THROWS_AS(parse_scheme("Euler"), Error);
  EvolutionConfig c;
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c.dt = 1e-3;
  c.stride = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("right-hand side") {
  CHECK(std::sqrt(mass(pde_rhs(ChiralField(kGrid)))) == 0.0);
  CHECK(std::sqrt(mass(pde_rhs(ground_state()))) < 1e-6);
}

TEST_CASE("ground state stays put") {
  const ChiralField R = ground_state();
  EvolutionConfig c;
  c.T = 1.0;
  c.stride = 100;
  const Trajectory tr = evolve(R, c);
  REQUIRE(tr.event == "completed");
  CHECK(tr.snapshots.size() == 11);
  double dev = 0.0;
  for (const auto& u : tr.snapshots) dev = std::max(dev, std::sqrt(mass(u - R)));
  CHECK(dev < 1e-8);
  for (const Drift& d : conservation_report(tr)) CHECK_MESSAGE(d.value < 1e-10, d.name);
}

TEST_CASE("fourth-order convergence") {
  const ChiralField u0 = two_soliton();
  const ChiralField ref = run(u0, 1.0, 0.00125);
  const double e1 = std::sqrt(mass(run(u0, 1.0, 0.01) - ref));
  const double e2 = std::sqrt(mass(run(u0, 1.0, 0.005) - ref));
  // Richardson: with a reference at dt/8 the ratio of errors is 16 (1 - 1/4096)/(1 - 1/256).
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.2));
  const ChiralField direct = run(u0, 0.2, 1e-4, Scheme::RK4);
  CHECK(std::sqrt(mass(direct - run(u0, 0.2, 1e-3))) < 1e-6);
}

TEST_CASE("boosted ground state travels at speed 2 eta") {
  const ChiralField R = ground_state();
  const double eta = 8 * kGrid.dxi();
  EvolutionConfig c;
  c.T = 2.0;
  c.stride = 100;
  c.diagnostics = false;
  const Trajectory tr = evolve(galilean_boost(R, eta), c);
  double st = 0, sc = 0, stt = 0, stc = 0;
  const double n = static_cast<double>(tr.times.size());
  for (size_t i = 0; i < tr.times.size(); ++i) {
    const double t = tr.times[i], x = centroid(tr.snapshots[i]);
    st += t, sc += x, stt += t * t, stc += t * x;
  }
  const double slope = (n * stc - st * sc) / (n * stt - st * st);
  CHECK(std::abs(slope - 2.0 * eta) < 1e-3);
}

TEST_CASE("subcritical datum: conservation and boundedness") {
  ChiralField u0 = ChiralField::from_transform(kGrid, [](double xi) { return cplx(xi * std::exp(-4.0 * xi * xi)); });
  u0 = std::sqrt(0.9 * kTwoPi / mass(u0)) * u0;
  EvolutionConfig c;
  c.T = 1.0;
  c.stride = 100;
  const Trajectory tr = evolve(u0, c);
  REQUIRE(tr.event == "completed");
  for (const Drift& d : conservation_report(tr)) {
    if (d.name == "u_hat_0") CHECK(d.value < 1e-10);
    else CHECK_MESSAGE(d.value < 1e-6, d.name);
  }
  for (const auto& d : tr.diagnostics) {
    CHECK(d.energy > -1e-8);
    CHECK(d.h_one < 2.0 * tr.diagnostics.front().h_one);
  }
}

TEST_CASE("virial law") {
  const ChiralField u0 = ChiralField::from_transform(kGrid, [](double xi) { return cplx(xi * std::exp(-xi)); });
  EvolutionConfig c;
  c.T = 1.0;
  c.stride = 50;
  const VirialReport r = virial_check(u0, c);
  REQUIRE(r.accepted);
  CHECK(r.leading_rel_error < 1e-4);
  CHECK(r.fit_residual < 1e-6);
  CHECK(r.identity_error < 1e-6);
  const VirialReport rejected = virial_check(ground_state(), c);
  CHECK_FALSE(rejected.accepted);
  CHECK_FALSE(rejected.diagnostic.empty());
}

TEST_CASE("gauged equation tracks the chiral flow") {
  // The gauged field has a broader spectrum than u, hence the finer grid.
  const FrequencyGrid fine(200.0, 1024);
  ChiralField u0 = ChiralField::from_transform(fine, [](double xi) { return cplx(xi * xi * std::exp(-xi * xi)); });
  u0 = std::sqrt(0.9 * kTwoPi / mass(u0)) * u0;
  EvolutionConfig c;
  c.T = 1.0;
  c.stride = 100;
  CHECK(gauge_crosscheck(u0, c) < 1e-6);
}

TEST_CASE("Lax equation residual decays like dt^2") {
  const ChiralField u0 = two_soliton();
  const ChiralField mid = run(u0, 0.5, 1e-3);
  std::vector<double> res;
  for (double d : {0.2, 0.1, 0.05}) {
    const ChiralField plus = run(mid, d, 1e-3), minus = run(u0, 0.5 - d, 1e-3);
    res.push_back(lax_equation_residual({minus, mid, plus}, d).resolved);
  }
  CHECK(res[0] / res[1] == doctest::Approx(4.0).epsilon(0.2));
  CHECK(res[1] / res[2] == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("two-soliton spectral evolution") {
  const SpectralEvolutionReport r = spectral_evolution_check(two_soliton(), 0.5, 1e-3);
  CHECK(r.phi_drift < 1e-4);
  CHECK(r.rho_drift < 1e-4);
  CHECK(r.lambda_drift < 1e-4);
  CHECK(r.gamma_error < 1e-3);
  CHECK(std::abs(r.gamma_shift[0]) < 1e-3);
}

TEST_CASE("supercritical blowup is reported") {
  ChiralField u0 = ChiralField::from_transform(kGrid, [](double xi) { return cplx(xi * std::exp(-xi)); });
  u0 = std::sqrt(3.0 * kTwoPi / mass(u0)) * u0;
  EvolutionConfig c;
  c.T = 5.0;
  c.dt = 1e-2;
  c.stride = 10;
  const Trajectory tr = evolve(u0, c);
  REQUIRE(tr.event == "blowup");
  CHECK(tr.last_valid_time < c.T);
  CHECK(tr.step_warning);
  for (const auto& s : tr.snapshots) CHECK(s.finite());
}

TEST_CASE("trajectory files") {
  EvolutionConfig c;
  c.T = 0.1;
  c.stride = 50;
  const Trajectory tr = evolve(ground_state(), c);
  const auto files = write_trajectory("pde_trajectory_test", tr);
  CHECK(files.size() == 1 + tr.snapshots.size());
  const std::string diag = read_text("pde_trajectory_test/diagnostics.csv");
  CHECK(diag.rfind("t,mass,momentum,energy,I0,I1,I2,I3,I4,u_hat_0_re,u_hat_0_im,h_half,h_one\n", 0) == 0);
  CHECK(std::count(diag.begin(), diag.end(), '\n') == 1 + static_cast<long>(tr.snapshots.size()));
  std::filesystem::remove_all("pde_trajectory_test");
}
