#include "cmdnls/pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "cmdnls/io.hpp"
#include "cmdnls/soliton.hpp"

namespace cmdnls {

Scheme parse_scheme(const std::string& name) {
  if (name == "IFRK4") return Scheme::IFRK4;
  if (name == "RK4" || name == "RK4-direct") return Scheme::RK4;
  throw Error(ErrorKind::Config, "unknown scheme '" + name + "'");
}

const char* to_string(Scheme s) { return s == Scheme::IFRK4 ? "IFRK4" : "RK4-direct"; }

void EvolutionConfig::validate() const {
  if (!(dt > 0) || !(T > 0) || stride < 1) throw Error(ErrorKind::Config, "evolution needs dt > 0, T > 0, stride >= 1");
}

namespace {

// u_t = -i w u + N(u) on coefficient vectors.
using Nonlinear = std::function<CVec(const CVec&)>;

CVec combine(const CVec& a, cplx s, const CVec& b) {
  CVec r(a);
  for (size_t i = 0; i < r.size(); ++i) r[i] += s * b[i];
  return r;
}

class Stepper {
 public:
  Stepper(std::vector<double> w, Nonlinear N, Scheme scheme, double h)
      : w_(std::move(w)), N_(std::move(N)), scheme_(scheme), h_(h) {
    for (double v : w_) {
      E_.push_back(std::polar(1.0, -v * h));
      E2_.push_back(std::polar(1.0, -0.5 * v * h));
    }
  }

  CVec step(const CVec& u) const {
    return scheme_ == Scheme::IFRK4 ? lawson(u) : rk4(u);
  }

 private:
  CVec scale(const std::vector<cplx>& e, const CVec& u) const {
    CVec r(u);
    for (size_t i = 0; i < r.size(); ++i) r[i] *= e[i];
    return r;
  }

  CVec lawson(const CVec& u) const {
    const double h = h_;
    const CVec k1 = N_(u);
    const CVec k2 = N_(scale(E2_, combine(u, 0.5 * h, k1)));
    const CVec E2u = scale(E2_, u);
    const CVec k3 = N_(combine(E2u, 0.5 * h, k2));
    const CVec k4 = N_(combine(scale(E_, u), h, scale(E2_, k3)));
    CVec out = scale(E_, u);
    const CVec Ek1 = scale(E_, k1);
    const CVec E2k23 = scale(E2_, combine(k2, 1.0, k3));
    for (size_t i = 0; i < out.size(); ++i) out[i] += h / 6.0 * (Ek1[i] + 2.0 * E2k23[i] + k4[i]);
    return out;
  }

  CVec full(const CVec& u) const {
    CVec r = N_(u);
    for (size_t i = 0; i < r.size(); ++i) r[i] -= kI * w_[i] * u[i];
    return r;
  }

  CVec rk4(const CVec& u) const {
    const double h = h_;
    const CVec k1 = full(u);
    const CVec k2 = full(combine(u, 0.5 * h, k1));
    const CVec k3 = full(combine(u, 0.5 * h, k2));
    const CVec k4 = full(combine(u, h, k3));
    CVec out(u);
    for (size_t i = 0; i < out.size(); ++i) out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
  }

  std::vector<double> w_;
  Nonlinear N_;
  Scheme scheme_;
  double h_;
  std::vector<cplx> E_, E2_;
};

std::vector<double> chiral_dispersion(const FrequencyGrid& g) {
  std::vector<double> w(g.K);
  for (int k = 0; k < g.K; ++k) w[k] = g.xi(k) * g.xi(k);
  return w;
}

std::vector<double> line_dispersion(const FrequencyGrid& g) {
  std::vector<double> w(2 * g.K);
  for (int k = -g.K; k < g.K; ++k) w[k + g.K] = g.xi(k) * g.xi(k);
  return w;
}

ChiralField chiral_nonlinearity(const ChiralField& u) {
  // 2i D(Pi_+|u|^2) u
  const ChiralField drho = fourier_multiplier(szego_density(u), [](double xi) { return cplx(xi); });
  return cplx(0.0, 2.0) * product(drho, u);
}

RealLineField qdnls_nonlinearity(const RealLineField& v) {
  const FrequencyGrid& g = v.grid;
  const CVec vp = v.to_spatial_padded(2);
  CVec rho(vp.size()), quintic(vp.size());
  for (size_t m = 0; m < vp.size(); ++m) {
    const double r = std::norm(vp[m]);
    rho[m] = r;
    quintic[m] = r * r * vp[m];
  }
  const RealLineField rho_hat = RealLineField::from_spatial_padded(g, rho, 2);
  const RealLineField drho = fourier_multiplier(rho_hat, [](double xi) { return cplx(std::abs(xi)); });
  const RealLineField cubic = line_convolve(drho, v);
  const RealLineField fifth = RealLineField::from_spatial_padded(g, quintic, 2);
  RealLineField out(g);
  for (int k = -g.K; k < g.K; ++k) out.at(k) = kI * cubic.at(k) - 0.25 * kI * fifth.at(k);
  return out;
}

bool finite(const CVec& c) {
  return std::all_of(c.begin(), c.end(), [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double sup_abs(const CVec& v) {
  double m = 0.0;
  for (auto z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

ChiralField pde_rhs(const ChiralField& u) {
  ChiralField r = chiral_nonlinearity(u);
  for (int k = 0; k < u.grid.K; ++k) r.coeffs[k] -= kI * u.grid.xi(k) * u.grid.xi(k) * u.coeffs[k];
  return r;
}

RealLineField qdnls_rhs(const RealLineField& v) {
  RealLineField r = qdnls_nonlinearity(v);
  for (int k = -v.grid.K; k < v.grid.K; ++k) r.at(k) -= kI * v.grid.xi(k) * v.grid.xi(k) * v.at(k);
  return r;
}

Diagnostics diagnose(const ChiralField& u, double t) {
  Diagnostics d;
  d.t = t;
  d.mass = mass(u);
  d.momentum = momentum(u);
  d.energy = energy(u);
  d.I = conserved_hierarchy(u, 4);
  d.u_hat_0 = u.coeffs[0];
  d.h_half = sobolev_norm(u, 0.5);
  d.h_one = sobolev_norm(u, 1.0);
  return d;
}

Trajectory evolve(const ChiralField& u0, const EvolutionConfig& cfg) {
  cfg.validate();
  const FrequencyGrid g = u0.grid;
  const long steps = std::max(1L, std::lround(cfg.T / cfg.dt));
  const double h = cfg.T / steps;
  const int origin = u0.origin;
  Stepper stepper(chiral_dispersion(g), [&](const CVec& c) {
    return chiral_nonlinearity(ChiralField(g, c, origin)).coeffs;
  }, cfg.scheme, h);

  Trajectory tr;
  auto record = [&](const ChiralField& u, double t) {
    tr.times.push_back(t);
    tr.snapshots.push_back(u);
    if (cfg.diagnostics) tr.diagnostics.push_back(diagnose(u, t));
  };
  const CVec x0 = to_spatial(u0);
  const double umax = sup_abs(x0);
  tr.box_warning = std::max(std::abs(x0.front()), std::abs(x0.back())) > 1e-8 * umax;
  const double m0 = mass(u0);
  tr.step_warning = umax * umax * h * g.xi_max() > 0.5 || m0 * m0 * h > 0.1;
  record(u0, 0.0);
  CVec c = u0.coeffs;
  for (long n = 1; n <= steps; ++n) {
    CVec next = stepper.step(c);
    if (!finite(next)) {
      tr.event = "blowup";
      return tr;
    }
    c = std::move(next);
    tr.last_valid_time = n * h;
    if (n % cfg.stride == 0 || n == steps) {
      if (tr.times.back() < n * h - 0.5 * h) record(ChiralField(g, c, origin), n * h);
    }
  }
  return tr;
}

std::vector<Drift> conservation_report(const Trajectory& traj) {
  if (traj.diagnostics.size() < 2) throw Error(ErrorKind::Arity, "conservation report needs at least 2 snapshots");
  const auto& d0 = traj.diagnostics.front();
  std::vector<std::pair<std::string, std::function<double(const Diagnostics&)>>> q = {
      {"mass", [](const Diagnostics& d) { return d.mass; }},
      {"momentum", [](const Diagnostics& d) { return d.momentum; }},
      {"energy", [](const Diagnostics& d) { return d.energy; }},
  };
  for (int k = 0; k <= 4; ++k)
    q.push_back({"I" + std::to_string(k), [k](const Diagnostics& d) { return d.I[k]; }});
  std::vector<Drift> out;
  for (auto& [name, get] : q) {
    const double ref = get(d0);
    const double scale = std::abs(ref) < 1e-8 ? 1.0 : std::abs(ref);
    double worst = 0.0;
    for (const auto& d : traj.diagnostics) worst = std::max(worst, std::abs(get(d) - ref) / scale);
    out.push_back({name, worst});
  }
  const double ref = std::abs(d0.u_hat_0);
  double worst = 0.0;
  for (const auto& d : traj.diagnostics) worst = std::max(worst, std::abs(d.u_hat_0 - d0.u_hat_0));
  out.push_back({"u_hat_0", ref < 1e-8 ? worst : worst / ref});
  return out;
}

namespace {

// E(e^{i x^2/4t} u0) through its transform: g^ = i xi u^ - u^'/(2t) - i (rho * u)^.
double pseudo_conformal_energy(const ChiralField& u0, double t) {
  const auto& quad = u0.grid.quadrature();
  const CVec d = quad.derivative(u0.coeffs, u0.origin);
  const ChiralField nl = product(szego_density(u0), u0);
  CVec gh(u0.grid.K, 0.0);
  for (int k = u0.origin; k < u0.grid.K; ++k)
    gh[k] = kI * u0.grid.xi(k) * u0.coeffs[k] - d[k] / (2.0 * t) - kI * nl.coeffs[k];
  return 0.5 * mass(ChiralField(u0.grid, gh, u0.origin));
}

}  // namespace

VirialReport virial_check(const ChiralField& u0, const EvolutionConfig& cfg) {
  VirialReport r;
  const VarianceReport v0 = variance(u0);
  if (v0.boundary_dominated) {
    r.accepted = false;
    r.diagnostic = "infinite variance: 1/x tail constant " + num17(v0.boundary_density) + " against variance " +
                   num17(v0.value);
    return r;
  }
  r.energy0 = energy(u0);
  EvolutionConfig c = cfg;
  c.diagnostics = false;
  const Trajectory tr = evolve(u0, c);
  double vmax = 0.0;
  for (size_t i = 0; i < tr.snapshots.size(); ++i) {
    r.times.push_back(tr.times[i]);
    r.V.push_back(variance(tr.snapshots[i], tr.times[i]).value);
    vmax = std::max(vmax, std::abs(r.V.back()));
  }
  if (vmax == 0.0) return r;
  const int n = static_cast<int>(r.times.size());
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    A(i, 0) = r.times[i] * r.times[i];
    A(i, 1) = r.times[i];
    A(i, 2) = 1.0;
    b(i) = r.V[i];
  }
  const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(b);
  r.leading = coef(0);
  const double target = 8.0 * r.energy0;
  r.leading_rel_error = target != 0 ? std::abs(r.leading - target) / std::abs(target) : std::abs(r.leading);
  r.fit_residual = (A * coef - b).cwiseAbs().maxCoeff() / vmax;
  for (int i = 0; i < n; ++i) {
    const double t = r.times[i];
    if (t <= 0) continue;
    const double lhs = 8.0 * t * t * pseudo_conformal_energy(u0, t);
    r.identity_error = std::max(r.identity_error, std::abs(lhs - r.V[i]) / vmax);
  }
  return r;
}

double gauge_crosscheck(const ChiralField& u0, const EvolutionConfig& cfg) {
  EvolutionConfig c = cfg;
  c.diagnostics = false;
  const Trajectory tr = evolve(u0, c);
  const FrequencyGrid g = u0.grid;
  const long steps = std::max(1L, std::lround(cfg.T / cfg.dt));
  const double h = cfg.T / steps;
  Stepper stepper(line_dispersion(g), [&](const CVec& cv) { return qdnls_nonlinearity(RealLineField(g, cv)).coeffs; },
                  cfg.scheme, h);
  CVec v = gauge_transform(embed(u0)).coeffs;
  double worst = 0.0;
  size_t next = 0;
  auto compare = [&](double t) {
    while (next < tr.times.size() && tr.times[next] < t - 0.5 * h) ++next;
    if (next < tr.times.size() && std::abs(tr.times[next] - t) < 0.5 * h) {
      const RealLineField diff = gauge_transform(embed(tr.snapshots[next])) - RealLineField(g, v);
      worst = std::max(worst, std::sqrt(mass(diff)));
    }
  };
  compare(0.0);
  for (long n = 1; n <= steps; ++n) {
    v = stepper.step(v);
    if (!finite(v)) throw Error(ErrorKind::NumericalBreakdown, "gauged evolution blew up");
    compare(n * h);
  }
  return worst;
}

SpectralEvolutionReport spectral_evolution_check(const ChiralField& u0, double T, double dt) {
  SpectralEvolutionReport r;
  r.before = spectral_data_from_potential(u0);
  EvolutionConfig c;
  c.dt = dt;
  c.T = T;
  c.stride = std::max(1L, std::lround(T / dt));
  c.diagnostics = false;
  const Trajectory tr = evolve(u0, c);
  if (tr.event != "completed") throw Error(ErrorKind::NumericalBreakdown, "evolution ended early: " + tr.event);
  const ChiralField& uT = tr.snapshots.back();
  r.after = spectral_data_from_potential(uT);
  if (r.after.N() != r.before.N()) throw Error(ErrorKind::NotASoliton, "bound-state count changed along the flow");
  r.phi_drift = std::abs(std::remainder(r.after.phi - r.before.phi, kTwoPi));
  r.rho_drift = std::abs(r.after.rho - r.before.rho);
  for (int j = 0; j < r.before.N(); ++j) {
    r.lambda_drift = std::max(r.lambda_drift, std::abs(r.after.lambda[j] - r.before.lambda[j]));
    r.gamma_shift.push_back(r.after.gamma[j] - r.before.gamma[j]);
    r.gamma_expected.push_back(2.0 * r.before.lambda[j] * T);
    r.gamma_error = std::max(r.gamma_error, std::abs(r.gamma_shift.back() - r.gamma_expected.back()));
  }
  const ChiralField synth = field_from_spectral(r.before, T, u0.grid);
  const auto q = u0.grid.quadrature().weights(0);
  double acc = 0.0;
  for (int k = 0; k < u0.grid.K; ++k) acc += q[k] * std::abs(uT.coeffs[k] - synth.coeffs[k]);
  r.field_error = acc / kTwoPi;
  return r;
}

std::vector<std::string> write_trajectory(const std::string& dir, const Trajectory& traj) {
  std::vector<std::string> files;
  CsvWriter csv({"t", "mass", "momentum", "energy", "I0", "I1", "I2", "I3", "I4", "u_hat_0_re", "u_hat_0_im", "h_half",
                 "h_one"});
  for (const auto& d : traj.diagnostics) {
    std::vector<std::string> row{num17(d.t), num17(d.mass), num17(d.momentum), num17(d.energy)};
    for (double v : d.I) row.push_back(num17(v));
    row.push_back(num17(d.u_hat_0.real()));
    row.push_back(num17(d.u_hat_0.imag()));
    row.push_back(num17(d.h_half));
    row.push_back(num17(d.h_one));
    csv.row(row);
  }
  const std::string diag = join_path(dir, "diagnostics.csv");
  csv.save(diag);
  files.push_back(diag);
  for (size_t i = 0; i < traj.snapshots.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%05zu.csv", i);
    const std::string path = join_path(dir, name);
    write_snapshot(path, traj.snapshots[i]);
    files.push_back(path);
  }
  return files;
}

}  // namespace cmdnls
