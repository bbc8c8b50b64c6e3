#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cmdnls/lax.hpp"

namespace cmdnls {

namespace {

Eigen::VectorXd xi_vector(const FrequencyGrid& g) {
  Eigen::VectorXd d(g.K);
  for (int k = 0; k < g.K; ++k) d(k) = g.xi(k);
  return d;
}

ChiralField from_vector(const FrequencyGrid& g, const Eigen::VectorXcd& v) {
  return ChiralField(g, CVec(v.data(), v.data() + v.size()), 0);
}

double localization_fraction(const ChiralField& f) {
  const CVec v = to_spatial(f);
  double inner_part = 0.0, outer_part = 0.0;
  for (int m = 0; m < f.grid.spatial_size(); ++m) {
    const double e = std::norm(v[m]);
    (std::abs(f.grid.x(m)) > 0.25 * f.grid.L ? outer_part : inner_part) += e;
  }
  const double total = inner_part + outer_part;
  return total > 0 ? outer_part / total : 1.0;
}

// Mismatch between psi^(0) and its quartic extrapolation from nodes 1..5,
// relative to max |psi^|. Resolved half-line functions are smooth up to
// xi = 0; the discrete operator also has threshold modes that jump there.
double edge_irregularity(const ChiralField& f) {
  static const double c[5] = {5.0, -10.0, 10.0, -5.0, 1.0};
  cplx extrap = 0.0;
  for (int i = 0; i < 5; ++i) extrap += c[i] * f.coeffs[i + 1];
  double scale = 0.0;
  for (auto z : f.coeffs) scale = std::max(scale, std::abs(z));
  return scale > 0 ? std::abs(f.coeffs[0] - extrap) / scale : 0.0;
}

}  // namespace

Eigen::MatrixXcd toeplitz_from_symbol(const ChiralField& u) {
  return u.grid.quadrature().convolution_matrix(u.coeffs, u.origin);
}

Eigen::MatrixXcd toeplitz_conj_from_symbol(const ChiralField& u) {
  return u.grid.quadrature().correlation_matrix(u.coeffs, u.origin, tail_ratio(u.coeffs));
}

LaxMatrix assemble_lax(const ChiralField& u) {
  LaxMatrix L;
  L.grid = u.grid;
  L.u = u;
  L.T = toeplitz_from_symbol(u);
  L.Tbar = toeplitz_conj_from_symbol(u);
  L.entries = -(L.T * L.Tbar);
  L.entries.diagonal() += xi_vector(u.grid).cast<cplx>();
  return L;
}

ChiralField apply_lax(const ChiralField& u, const ChiralField& f) {
  const ChiralField Df = fourier_multiplier(f, [](double xi) { return cplx(xi); });
  return Df - product(u, toeplitz_conj(u, f));
}

double adjointness_defect(const Eigen::MatrixXcd& A, const FrequencyGrid& g, double sign, int margin) {
  const auto q = g.quadrature().weights(0);
  Eigen::VectorXd s(g.K);
  for (int k = 0; k < g.K; ++k) s(k) = std::sqrt(q[k]);
  const Eigen::MatrixXcd S = s.asDiagonal() * A * s.cwiseInverse().asDiagonal();
  const int n = g.K - 2 * margin;
  if (margin < 0 || n <= 0) throw Error(ErrorKind::Arity, "margin leaves no indices");
  return (S - sign * S.adjoint()).block(margin, margin, n, n).cwiseAbs().maxCoeff();
}

EigenSystem bound_states(const LaxMatrix& L, double delta) {
  const int n = L.grid.K;
  Eigen::MatrixXcd a = L.entries;
  Eigen::VectorXcd w(n);
  Eigen::MatrixXcd vr(n, n);
  cplx dummy;
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, a.data(), n, w.data(), &dummy, 1,
                                        vr.data(), n);
  if (info != 0) throw Error(ErrorKind::NumericalBreakdown, "zgeev failed with info " + std::to_string(info));

  EigenSystem es;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return w(i).real() < w(j).real(); });
  const double mu = mass(L.u);
  for (int i : order) {
    es.eigenvalues.push_back(w(i).real());
    ChiralField psi = from_vector(L.grid, vr.col(i));
    const double norm2 = mass(psi);
    if (!(norm2 > 0)) continue;
    const cplx c = inner(L.u, psi);
    const double overlap = std::norm(c) / (kTwoPi * norm2);
    if (std::abs(overlap - 1.0) > delta || mu <= 0) continue;
    const double outside = localization_fraction(psi);
    if (outside >= 0.1) continue;
    if (edge_irregularity(psi) > 0.01) continue;
    psi = (std::polar(1.0, std::arg(c)) / std::sqrt(norm2)) * psi;
    es.bound_eigenvalues.push_back(w(i).real());
    es.bound_states.push_back(std::move(psi));
    es.overlaps.push_back(overlap);
    es.localization.push_back(outside);
  }
  return es;
}

std::vector<double> conserved_hierarchy(const ChiralField& u, int kmax) {
  if (kmax < 0 || kmax > 8) throw Error(ErrorKind::Arity, "hierarchy order must lie in 0..8");
  std::vector<double> I;
  ChiralField v = u;
  for (int k = 0; k <= kmax; ++k) {
    if (k > 0) v = apply_lax(u, v);
    I.push_back(inner(v, u).real());
  }
  return I;
}

Eigen::MatrixXcd assemble_B(const ChiralField& u) {
  // T_{d u} = [d/dx, T_u] = i[D, T_u] and likewise for ubar; with these
  // discrete definitions B~ = B - i L^2 holds exactly at the matrix level.
  const Eigen::MatrixXcd T = toeplitz_from_symbol(u);
  const Eigen::MatrixXcd Tb = toeplitz_conj_from_symbol(u);
  const Eigen::VectorXcd d = xi_vector(u.grid).cast<cplx>();
  const Eigen::MatrixXcd Tdu = kI * (d.asDiagonal() * T - T * d.asDiagonal());
  const Eigen::MatrixXcd Tdub = kI * (d.asDiagonal() * Tb - Tb * d.asDiagonal());
  const Eigen::MatrixXcd P = T * Tb;
  return T * Tdub - Tdu * Tb + kI * (P * P);
}

Eigen::MatrixXcd assemble_B_tilde(const ChiralField& u) {
  const Eigen::MatrixXcd T = toeplitz_from_symbol(u);
  const Eigen::MatrixXcd Tb = toeplitz_conj_from_symbol(u);
  const Eigen::VectorXcd d = xi_vector(u.grid).cast<cplx>();
  Eigen::MatrixXcd B = 2.0 * kI * (T * d.asDiagonal() * Tb);
  B.diagonal() -= kI * d.cwiseProduct(d);
  return B;
}

LaxResidual lax_equation_residual(const std::vector<ChiralField>& snapshots, double dt) {
  if (snapshots.size() < 3) throw Error(ErrorKind::Arity, "Lax residual needs at least 3 snapshots");
  const int K = snapshots.front().grid.K;
  const int lo = std::min(2 * kEndpointOrder, K / 4), hi = K / 2;
  LaxResidual worst;
  for (size_t i = 1; i + 1 < snapshots.size(); ++i) {
    const Eigen::MatrixXcd Lp = assemble_lax(snapshots[i + 1]).entries;
    const Eigen::MatrixXcd Lm = assemble_lax(snapshots[i - 1]).entries;
    const Eigen::MatrixXcd L = assemble_lax(snapshots[i]).entries;
    const Eigen::MatrixXcd B = assemble_B(snapshots[i]);
    const Eigen::MatrixXcd r = (Lp - Lm) / (2.0 * dt) - (B * L - L * B);
    worst.full = std::max(worst.full, r.cwiseAbs().maxCoeff());
    worst.resolved = std::max(worst.resolved, r.block(lo, lo, hi - lo, hi - lo).cwiseAbs().maxCoeff());
  }
  return worst;
}

SpectralExtraction extract_spectral_data(const ChiralField& u) {
  const double mu = mass(u);
  const int expected = static_cast<int>(std::lround(mu / kTwoPi));
  if (expected < 1 || std::abs(mu - kTwoPi * expected) > 1e-5 * kTwoPi * expected)
    throw Error(ErrorKind::NotASoliton, "mass " + num17(mu) + " is not a multiple of 2 pi");
  SpectralExtraction ex;
  ex.eig = bound_states(assemble_lax(u));
  if (ex.eig.count() != expected)
    throw Error(ErrorKind::NotASoliton, "found " + std::to_string(ex.eig.count()) + " bound states, expected " +
                                            std::to_string(expected));
  int zero = 0;
  for (int j = 1; j < ex.eig.count(); ++j)
    if (std::abs(ex.eig.bound_eigenvalues[j]) < std::abs(ex.eig.bound_eigenvalues[zero])) zero = j;
  if (std::abs(ex.eig.bound_eigenvalues[zero]) > 1e-6)
    throw Error(ErrorKind::NotASoliton, "0 is not an eigenvalue of L_u");

  std::vector<int> order{zero};
  for (int j = 0; j < ex.eig.count(); ++j)
    if (j != zero) order.push_back(j);
  const cplx u0 = u.coeffs[0];
  SpectralData& d = ex.data;
  d.rho = std::norm(u0) / (8.0 * kPi * kPi);
  d.phi = std::arg(u0 / (kTwoPi * kI));
  if (d.phi < 0) d.phi += kTwoPi;
  for (int idx : order) {
    d.lambda.push_back(idx == zero ? 0.0 : ex.eig.bound_eigenvalues[idx]);
    d.gamma.push_back(generator_form(ex.eig.bound_states[idx]).real());
  }
  ex.im_g1 = generator_form(ex.eig.bound_states[zero]).imag();
  return ex;
}

SpectralData spectral_data_from_potential(const ChiralField& u) { return extract_spectral_data(u).data; }

OperatorBoundReport operator_bound_checks(const ChiralField& u, const ChiralField& f) {
  OperatorBoundReport r;
  const double mu = mass(u);
  r.toeplitz_lhs = mass(toeplitz_conj(u, f));
  const auto q = f.grid.quadrature().weights(f.origin);
  double dff = 0.0;
  for (int k = 0; k < f.grid.K; ++k) dff += q[k] * f.grid.xi(k) * std::norm(f.coeffs[k]);
  r.toeplitz_rhs = mu * dff / (kTwoPi * kTwoPi);
  // H_u g = Pi_+(u conj g): transform (1/2pi) int u^(xi + eta) conj g^(eta) d eta.
  const ChiralField df = fourier_multiplier(f, [](double xi) { return kI * xi; });
  const ChiralField h(f.grid, f.grid.quadrature().correlate(u.coeffs, u.origin, df.coeffs, df.origin), 0);
  r.hankel_lhs = std::sqrt(mass(h));
  r.hankel_rhs = homogeneous_sobolev_norm(u, 1.5) * std::sqrt(mass(f)) / std::sqrt(kTwoPi);
  return r;
}

json spectral_data_json(const SpectralData& d) {
  return json{{"phi", d.phi}, {"rho", d.rho}, {"lambda", d.lambda}, {"gamma", d.gamma}};
}

json spectrum_json(double mass_value, const EigenSystem& eig, const SpectralData* data) {
  json j;
  j["mass"] = mass_value;
  j["N"] = eig.count();
  j["eigenvalues"] = eig.bound_eigenvalues;
  j["overlaps"] = eig.overlaps;
  j["spectral_data"] = data ? spectral_data_json(*data) : json(nullptr);
  return j;
}

}  // namespace cmdnls
