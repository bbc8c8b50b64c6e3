#pragma once

#include <Eigen/Dense>
#include <memory>

#include "cmdnls/common.hpp"
#include "cmdnls/fft.hpp"

namespace cmdnls {

// Order of the endpoint corrections used for every half-line integral.
inline constexpr int kEndpointOrder = 8;

// Gregory endpoint weights w_0..w_{m-1} (in units of the step); nodes beyond
// the correction block carry weight 1. Exact for polynomials of degree < m at
// a smooth endpoint, with the far end assumed to have decayed.
const std::vector<double>& gregory_weights();

// Nystrom machinery for functions sampled at xi_k = k h, k = 0..K-1, that are
// smooth on [xi_o, xi_max) and vanish below the support origin o.
//
// Products of chiral functions are half-line convolutions and correlations in
// frequency. Both are evaluated as an FFT trapezoid sum plus O(mK) endpoint
// corrections, so the discrete operators are high order accurate even when the
// integrand has a jump (at xi = 0 or at a boost origin), which is the generic
// situation for slowly decaying fields such as solitons.
class HalfLineQuadrature {
 public:
  HalfLineQuadrature(int K, double h);

  int size() const { return K_; }
  double step() const { return h_; }

  // Weights q_j with sum_j q_j f_j ~ int_{xi_o}^infty f(xi) d xi (includes h).
  std::vector<double> weights(int origin) const;

  // c(xi_k) = (1/2pi) int_0^{xi_k} a(xi_k - zeta) b(zeta) d zeta.
  // The result vanishes below index oa + ob.
  CVec convolve(const CVec& a, int oa, const CVec& b, int ob) const;

  // r(s_k) = (1/2pi) int_0^infty a(s_k + eta) conj(b(eta)) d eta.
  // Beyond xi_max both factors are continued geometrically, f_{K-1+p} =
  // f_{K-1} tail^p (tail = 0 disables the continuation).
  CVec correlate(const CVec& a, int oa, const CVec& b, int ob, cplx tail = 0.0) const;

  // Matrix of g -> convolve(a, oa, g, 0).
  Eigen::MatrixXcd convolution_matrix(const CVec& a, int oa) const;
  // Matrix of f -> correlate(f, 0, b, ob, tail).
  Eigen::MatrixXcd correlation_matrix(const CVec& b, int ob, cplx tail = 0.0) const;

  // d f / d xi on [xi_o, xi_max) by 9-point (8th order) finite differences,
  // one-sided near both ends of the support.
  CVec derivative(const CVec& f, int origin) const;

 private:
  // Row weights of the product rule for a short interval of n steps:
  // int_0^{nh} a(nh - s) b(s) ds ~ h sum_ij W(i,j) a_i b_j.
  const Eigen::MatrixXd& short_rule(int n) const { return short_[n]; }
  int short_limit() const { return 2 * kEndpointOrder - 1; }

  int K_;
  double h_;
  std::vector<Eigen::MatrixXd> short_;
  std::vector<std::vector<double>> fd_;  // derivative stencils by position
  std::unique_ptr<Fft> fa_, fb_;
};

// Geometric decay ratio f_{K-1}/f_{K-2} of the last samples when the tail is
// consistently geometric (exponentially decaying transforms), otherwise 0.
cplx tail_ratio(const CVec& f);

// Per-thread cached engine for a grid (the engine owns FFT scratch space).
const HalfLineQuadrature& quadrature_for(int K, double h);

// Finite-difference weights (Fornberg) for the derivative of given order at x0.
std::vector<double> fd_weights(const std::vector<double>& nodes, double x0, int order);

}  // namespace cmdnls
