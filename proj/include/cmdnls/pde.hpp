#pragma once

#include <string>
#include <vector>

#include "cmdnls/hardy.hpp"
#include "cmdnls/lax.hpp"

namespace cmdnls {

enum class Scheme { IFRK4, RK4 };
Scheme parse_scheme(const std::string& name);
const char* to_string(Scheme s);

struct EvolutionConfig {
  double dt = 1e-3;
  double T = 1.0;
  Scheme scheme = Scheme::IFRK4;
  int stride = 1;           // steps between stored snapshots
  bool diagnostics = true;  // evaluate M, P, E, I_k, ... at every snapshot
  void validate() const;
};

struct Diagnostics {
  double t = 0.0;
  double mass = 0.0, momentum = 0.0, energy = 0.0;
  std::vector<double> I;  // I_0..I_4
  cplx u_hat_0 = 0.0;
  double h_half = 0.0, h_one = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<ChiralField> snapshots;
  std::vector<Diagnostics> diagnostics;
  std::string event = "completed";  // or "blowup"
  double last_valid_time = 0.0;
  bool step_warning = false;  // |u|_inf^2 dt xi_max > 0.5 or |u|^4 dt > 0.1
  bool box_warning = false;   // |u(+-L/2)| > 1e-8 max|u| at t = 0
};

// du/dt = i u_xx + 2i D_+(|u|^2) u, in frequency.
ChiralField pde_rhs(const ChiralField& u);
// du/dt = i v_xx + i |D|(|v|^2) v - (i/4)|v|^4 v (gauged equation).
RealLineField qdnls_rhs(const RealLineField& v);

Diagnostics diagnose(const ChiralField& u, double t);
Trajectory evolve(const ChiralField& u0, const EvolutionConfig& cfg);

struct Drift {
  std::string name;
  double value = 0.0;  // max_t |Q(t) - Q(0)| / |Q(0)| (absolute when |Q(0)| < 1e-8)
};
std::vector<Drift> conservation_report(const Trajectory& traj);

struct VirialReport {
  bool accepted = true;
  std::string diagnostic;
  double energy0 = 0.0;
  double leading = 0.0;          // fitted coefficient of t^2
  double leading_rel_error = 0.0;  // |leading - 8 E0| / (8 E0)
  double fit_residual = 0.0;     // max |V - fit| / max |V|
  double identity_error = 0.0;   // max |8 t^2 E(e^{ix^2/4t} u0) - V(t)| / max |V|
  std::vector<double> times, V;
};
VirialReport virial_check(const ChiralField& u0, const EvolutionConfig& cfg);

// sup_t ||Phi(u(t)) - v(t)||_{L^2} with v evolved by the gauged equation.
double gauge_crosscheck(const ChiralField& u0, const EvolutionConfig& cfg);

struct SpectralEvolutionReport {
  SpectralData before, after;
  double phi_drift = 0.0, rho_drift = 0.0, lambda_drift = 0.0;
  std::vector<double> gamma_shift, gamma_expected;
  double gamma_error = 0.0;
  double field_error = 0.0;  // sup_x bound |u(T) - synth(T)|
};
SpectralEvolutionReport spectral_evolution_check(const ChiralField& u0, double T, double dt);

// diagnostics.csv plus one snapshot CSV per stored time.
std::vector<std::string> write_trajectory(const std::string& dir, const Trajectory& traj);

}  // namespace cmdnls
