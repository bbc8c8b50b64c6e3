#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "cmdnls/hardy.hpp"
#include "cmdnls/io.hpp"
#include "cmdnls/lax.hpp"

namespace cmdnls {

// Polynomials are stored by ascending coefficients: p(x) = sum_k p[k] x^k.
using Poly = std::vector<cplx>;

cplx poly_eval(const Poly& p, cplx x);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_sub(const Poly& a, const Poly& b);
Poly poly_derivative(const Poly& p);
Poly poly_conj(const Poly& p);  // coefficients conjugated: conj(p(conj x))
Poly poly_from_roots(const std::vector<cplx>& roots, cplx lead = 1.0);
std::vector<cplx> poly_roots(const Poly& p);  // companion-matrix eigenvalues

// Rational potential u = P/Q with every root of Q in the lower half-plane,
// also kept as partial fractions over the distinct poles:
// u(x) = sum_j sum_{r=1}^{m_j} c[j][r-1] / (x - z_j)^r.
struct RationalSoliton {
  Poly P, Q;
  std::vector<cplx> poles;              // distinct
  std::vector<int> multiplicity;
  std::vector<std::vector<cplx>> coeffs;

  int N() const { return static_cast<int>(Q.size()) - 1; }
  bool simple() const;
  std::vector<cplx> residues() const;   // c[j][0]
  cplx operator()(cplx x) const { return poly_eval(P, x) / poly_eval(Q, x); }
};

// Builds the multi-soliton with the given poles. F = i(Q'Qbar - Qbar'Q) has
// conjugate root pairs (alpha, conj alpha); bit j of `branch` selects
// conj(alpha_j) over alpha_j (Im alpha_j < 0, sorted by real part). Without
// `theta`, the phase of P is chosen to make the leading residue real positive.
RationalSoliton residues_from_poles(const std::vector<cplx>& z, unsigned branch = 0,
                                    std::optional<double> theta = std::nullopt);
RationalSoliton soliton_from_polynomials(const Poly& P, const Poly& Q);

// max coefficient of P Pbar - i(Q'Qbar - Qbar'Q), relative to the largest of F.
double validate_multisoliton(const Poly& P, const Poly& Q);
// max_k |sum_j a_j conj(a_k)/(z_j - conj z_k) - i|.
double constraint_residual(const std::vector<cplx>& z, const std::vector<cplx>& a);

// Transform samples of the rational function on a grid.
ChiralField to_field(const RationalSoliton& s, const FrequencyGrid& g);

struct SynthMatrix {
  int N = 0;
  Eigen::MatrixXcd V, W, M;
  Eigen::VectorXcd X, Y;
};
void validate_spectral_data(const SpectralData& d);
SynthMatrix synth_matrix(const SpectralData& d, double t);

cplx eval_soliton(const SpectralData& d, double t, cplx x);
ChiralField field_from_spectral(const SpectralData& d, double t, const FrequencyGrid& g);
std::vector<cplx> poles_at_time(const SpectralData& d, double t);

struct PoleResidues {
  std::vector<cplx> poles;     // sorted by real part
  std::vector<cplx> residues;  // empty when `collision`
  bool collision = false;
};
PoleResidues residues_at_time(const SpectralData& d, double t);
bool poles_collide(const std::vector<cplx>& z);

cplx two_soliton_explicit(double gamma1, double gamma2, double rho, double lambda, double phi, double t, cplx x);
cplx two_soliton_discriminant(double gamma1, double gamma2, double rho, double lambda, double t);

// ||u||_{H^s} of sum_j a_j/(x - z_j), integrated analytically in xi along a
// rotated ray (no truncation).
double pole_sobolev_norm(const std::vector<cplx>& z, const std::vector<cplx>& a, double s);

struct GrowthSample {
  double t, s, norm;
  bool skipped;
};
struct GrowthScan {
  std::vector<GrowthSample> samples;
  std::vector<double> s_list, slopes, slope_stderr;
  std::vector<int> skipped;
};
GrowthScan growth_scan(const SpectralData& d, const std::vector<double>& s_list, const std::vector<double>& t_list);

// Upper bound (1/2pi)||u^ - synth^||_{L^1} for sup_x |u(x) - synth(x)| at t = 0.
double potential_roundtrip(const ChiralField& u);

// Pole-track CSV rows (t, j, z, a, collision flag).
void append_pole_rows(CsvWriter& csv, double t, const std::vector<cplx>& z, const std::vector<cplx>& a, bool collision);
std::vector<std::string> pole_csv_header();

}  // namespace cmdnls
