#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cmdnls/hardy.hpp"
#include "cmdnls/io.hpp"

namespace cmdnls {

// Discrete Lax operator L_u = D - T_u T_ubar acting on coefficient vectors.
// The coefficient space carries the quadrature inner product
// <f, g> = (1/2pi) sum_k q_k f_k conj(g_k). Away from the first and last
// 2 kEndpointOrder indices (where the product rules carry endpoint
// corrections) L is self-adjoint for that inner product, i.e. `entries` is
// Hermitian there after the similarity Q^{1/2} (.) Q^{-1/2}.
struct LaxMatrix {
  FrequencyGrid grid;
  ChiralField u;
  Eigen::MatrixXcd T;     // T_u
  Eigen::MatrixXcd Tbar;  // T_ubar
  Eigen::MatrixXcd entries;
};

struct EigenSystem {
  std::vector<double> eigenvalues;          // all eigenvalues, ascending (real parts)
  std::vector<double> bound_eigenvalues;    // ascending
  std::vector<ChiralField> bound_states;    // unit norm, <u, psi> real positive
  std::vector<double> overlaps;             // |<u,psi>|^2 / (2 pi ||psi||^2)
  std::vector<double> localization;         // energy fraction at |x| > L/4
  int count() const { return static_cast<int>(bound_states.size()); }
};

struct SpectralData {
  double phi = 0.0;
  double rho = 0.0;
  std::vector<double> lambda;  // lambda[0] = 0
  std::vector<double> gamma;
  int N() const { return static_cast<int>(lambda.size()); }
};

struct SpectralExtraction {
  SpectralData data;
  EigenSystem eig;
  double im_g1 = 0.0;  // Im <G psi_1, psi_1>, equal to -rho in exact arithmetic
};

// T_u as a matrix: (T_u f)_j = (1/2pi) int_0^{xi_j} u^(xi_j - zeta) f^(zeta).
Eigen::MatrixXcd toeplitz_from_symbol(const ChiralField& u);
// T_ubar as a matrix, consistent with toeplitz_conj.
Eigen::MatrixXcd toeplitz_conj_from_symbol(const ChiralField& u);

LaxMatrix assemble_lax(const ChiralField& u);
// L f computed without matrices (through hardy_core products).
ChiralField apply_lax(const ChiralField& u, const ChiralField& f);

// max |S - S*| with S = Q^{1/2} A Q^{-1/2} over indices [margin, K - margin);
// `sign` = -1 measures skew-adjointness.
double adjointness_defect(const Eigen::MatrixXcd& A, const FrequencyGrid& g, double sign = 1.0, int margin = 0);

// Full eigen-decomposition and bound-state selection.
EigenSystem bound_states(const LaxMatrix& L, double delta = 0.05);

// I_k = <L^k u, u> for k = 0..kmax (kmax <= 8).
std::vector<double> conserved_hierarchy(const ChiralField& u, int kmax);

Eigen::MatrixXcd assemble_B(const ChiralField& u);
Eigen::MatrixXcd assemble_B_tilde(const ChiralField& u);

// max over interior snapshots of |(L(t+dt) - L(t-dt))/(2dt) - [B, L](t)|_max,
// over the whole matrix and over the resolved block of indices
// [2 kEndpointOrder, K/2). Outside that block the discrete identity is
// limited by the endpoint corrections (a band |k - j| < 2m) and by the
// truncation of the intermediate sums in [B, L] near xi_max.
struct LaxResidual {
  double full = 0.0;
  double resolved = 0.0;
};
LaxResidual lax_equation_residual(const std::vector<ChiralField>& snapshots, double dt);

SpectralExtraction extract_spectral_data(const ChiralField& u);
SpectralData spectral_data_from_potential(const ChiralField& u);

struct OperatorBoundReport {
  double toeplitz_lhs = 0.0, toeplitz_rhs = 0.0;
  double hankel_lhs = 0.0, hankel_rhs = 0.0;
  bool holds(double tol = 1e-10) const {
    return toeplitz_lhs <= toeplitz_rhs + tol && hankel_lhs <= hankel_rhs + tol;
  }
};
// ||T_ubar f||^2 <= (1/2pi)||u||^2 <Df,f> and ||H_u(f')|| <= (2pi)^{-1/2}|u|_{H^{3/2}} ||f||.
OperatorBoundReport operator_bound_checks(const ChiralField& u, const ChiralField& f);

json spectrum_json(double mass, const EigenSystem& eig, const SpectralData* data);
json spectral_data_json(const SpectralData& d);

}  // namespace cmdnls
