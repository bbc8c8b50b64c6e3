#pragma once

#include <string>
#include <vector>

#include "cmdnls/common.hpp"

namespace cmdnls {

// Poles and residues of u(t, x) = sum_j a_j / (x - z_j).
struct PoleState {
  double t = 0.0;
  std::vector<cplx> z, a;
};

struct PoleDerivative {
  std::vector<cplx> dz, da;
};

// Complexified Calogero-Moser flow:
// a_k' = 2i sum_{l != k} (a_l - a_k)/(z_k - z_l)^2,  a_k z_k' = -2i sum_{l != k} a_l/(z_k - z_l).
PoleDerivative pole_rhs(const PoleState& s);

enum class PoleEvent { Completed, Collision, BoundaryApproach };
const char* to_string(PoleEvent e);

struct PoleTrajectory {
  std::vector<PoleState> states;  // one per reached output time
  PoleEvent event = PoleEvent::Completed;
  double event_time = 0.0;
  double max_constraint = 0.0;    // over every accepted step
  long steps = 0, rejected = 0;
};

// Dormand-Prince 5(4) with PI step control (atol 1e-12, rtol = tol); lands
// exactly on each output time (which must be monotone away from s0.t, either
// direction). Stops early on collision or on a pole approaching the real axis.
PoleTrajectory integrate_poles(const PoleState& s0, const std::vector<double>& out_times, double tol);

// max over k and interior times of |z_k'' - sum_{l != k} 8/(z_k - z_l)^3| with
// z'' from the 5-point central stencil on uniformly spaced states.
double acceleration_residual(const std::vector<PoleState>& traj);

// Collision threshold shared with the inverse spectral formula.
double collision_gap(const std::vector<cplx>& z);

}  // namespace cmdnls
