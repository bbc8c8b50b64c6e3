#pragma once

#include <functional>
#include <string>

#include "cmdnls/common.hpp"
#include "cmdnls/quadrature.hpp"

namespace cmdnls {

// Uniform frequency grid xi_k = 2 pi k / L (k = 0..K-1) and the matching
// spatial grid x_m = -L/2 + m L/(2K) (m = 0..2K-1) of the periodic box.
struct FrequencyGrid {
  double L = 0.0;
  int K = 0;

  FrequencyGrid() = default;
  FrequencyGrid(double L_, int K_);

  double dxi() const { return kTwoPi / L; }
  double xi(int k) const { return kTwoPi * k / L; }
  double xi_max() const { return xi(K - 1); }
  int spatial_size() const { return 2 * K; }
  double dx() const { return L / (2.0 * K); }
  double x(int m) const { return -0.5 * L + m * dx(); }
  const HalfLineQuadrature& quadrature() const { return quadrature_for(K, dxi()); }

  bool operator==(const FrequencyGrid& o) const { return L == o.L && K == o.K; }
};

// Chiral function stored as samples c_k ~ f^(xi_k) of its Fourier transform
// f^(xi) = int e^{-i xi x} f(x) dx on [0, xi_max). Negative frequencies do not
// exist in storage. `origin` is the first index of the support: samples below
// it are zero and the transform is smooth from xi_origin on (it is nonzero
// only for Galilean boosts, whose spectrum starts at the boost frequency).
struct ChiralField {
  FrequencyGrid grid;
  CVec coeffs;
  int origin = 0;

  ChiralField() = default;
  explicit ChiralField(const FrequencyGrid& g) : grid(g), coeffs(g.K, 0.0) {}
  ChiralField(const FrequencyGrid& g, CVec c, int o = 0);

  static ChiralField from_transform(const FrequencyGrid& g, const std::function<cplx(double)>& fhat,
                                    int origin = 0);

  cplx at_zero() const { return coeffs[origin]; }
  bool finite() const;
};

ChiralField operator+(const ChiralField& a, const ChiralField& b);
ChiralField operator-(const ChiralField& a, const ChiralField& b);
ChiralField operator*(cplx s, const ChiralField& a);

// Two-sided field on the periodic box: coefficients for k = -K..K-1 (stored
// at index k + K) are samples of the line Fourier transform.
struct RealLineField {
  FrequencyGrid grid;
  CVec coeffs;

  RealLineField() = default;
  explicit RealLineField(const FrequencyGrid& g) : grid(g), coeffs(2 * g.K, 0.0) {}
  RealLineField(const FrequencyGrid& g, CVec c);

  cplx& at(int k) { return coeffs[k + grid.K]; }
  cplx at(int k) const { return coeffs[k + grid.K]; }

  static RealLineField from_spatial(const FrequencyGrid& g, const CVec& values);
  static RealLineField from_transform(const FrequencyGrid& g, const std::function<cplx(double)>& fhat);
  CVec to_spatial() const;
  // Pointwise values on a grid refined by `factor` (zero padding in frequency).
  CVec to_spatial_padded(int factor) const;
  static RealLineField from_spatial_padded(const FrequencyGrid& g, const CVec& values, int factor);

  bool is_real(double tol = 1e-12) const;
};

RealLineField operator+(const RealLineField& a, const RealLineField& b);
RealLineField operator-(const RealLineField& a, const RealLineField& b);
RealLineField operator*(cplx s, const RealLineField& a);

// --- projections and multipliers -------------------------------------------
ChiralField project_plus(const RealLineField& f);
RealLineField embed(const ChiralField& f);
ChiralField fourier_multiplier(const ChiralField& f, const std::function<cplx(double)>& symbol);
RealLineField fourier_multiplier(const RealLineField& f, const std::function<cplx(double)>& symbol);
RealLineField hilbert_transform(const RealLineField& f);

// Pointwise values of a chiral field on the spatial grid (periodized).
CVec to_spatial(const ChiralField& f);

// --- products ----------------------------------------------------------------
// Fourier samples of Pi_+(a conj(b)) (correlation of transforms).
ChiralField toeplitz_conj(const ChiralField& b, const ChiralField& f);
// Product of two chiral functions (convolution of transforms).
ChiralField product(const ChiralField& a, const ChiralField& b);
// Pi_+(|u|^2), whose transform is the positive half of the transform of |u|^2.
ChiralField szego_density(const ChiralField& u);
// Dealiased pointwise product of two-sided fields.
RealLineField multiply(const RealLineField& a, const RealLineField& b);
RealLineField abs2(const RealLineField& a);
RealLineField conjugate(const RealLineField& a);

// Line integral (1/2pi) int F(xi) d xi of samples F_k (k = -K..K-1) that are
// smooth on each side of xi = 0 but may have a kink, or a jump whose midpoint
// is the stored value, at xi = 0 (|xi| and sgn(xi) multipliers).
cplx line_integral(const FrequencyGrid& g, const CVec& samples);
// (1/2pi) int a(s) b(xi - s) ds for two-sided samples; `a` may be singular
// at s = 0 in the sense above, `b` must be smooth.
RealLineField line_convolve(const RealLineField& a, const RealLineField& b);

// --- functionals ---------------------------------------------------------------
cplx inner(const ChiralField& f, const ChiralField& g);
cplx inner(const RealLineField& f, const RealLineField& g);
double mass(const ChiralField& f);
double mass(const RealLineField& f);
// Same quantity by trapezoid quadrature of |f(x_m)|^2 on the spatial grid.
double mass_spatial(const ChiralField& f);
double mass_spatial(const RealLineField& f);
double momentum(const ChiralField& f);
// d_x u - i Pi_+(|u|^2) u, the field whose L2 norm squared is 2E.
ChiralField energy_residual(const ChiralField& u);
double energy(const ChiralField& u);
double sobolev_norm(const ChiralField& f, double s);
// Homogeneous norm ((1/2pi) int |xi|^{2s} |f^|^2)^{1/2}.
double homogeneous_sobolev_norm(const ChiralField& f, double s);

// <G f, f> with (G f)^ = i d f^/d xi, the multiplication-by-x generator.
cplx generator_form(const ChiralField& f);
// Modulus centroid Re<G f, f> / M(f) (finite even for 1/x-decaying fields).
double centroid(const ChiralField& f);

// --- symmetries, gauge, variance -------------------------------------------------
RealLineField gauge_transform(const RealLineField& u);
RealLineField inverse_gauge_transform(const RealLineField& v);
// E~(v) = 1/2 |v_x|^2 - 1/4 <|D||v|^2, |v|^2> + 1/24 int |v|^6.
double gauged_energy(const RealLineField& v);
ChiralField galilean_boost(const ChiralField& f, double eta);

struct VarianceReport {
  double value = 0.0;             // int x^2 |f|^2 dx
  double boundary_density = 0.0;  // limit of |f(x)|^2 x^2 at the box edge
  bool boundary_dominated = false;
};
// Variance of f; with t != 0 the free phase e^{-i xi^2 t} is removed before
// differentiating, which keeps the xi-derivative resolved for dispersed data.
VarianceReport variance(const ChiralField& f, double t = 0.0);

// --- snapshot I/O ---------------------------------------------------------------
void write_snapshot(const std::string& csv_path, const ChiralField& f);
ChiralField read_snapshot(const std::string& csv_path, const FrequencyGrid& g, int origin = 0);

}  // namespace cmdnls
