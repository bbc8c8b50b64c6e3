#include "cmdnls/soliton.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "cmdnls/parallel.hpp"

namespace cmdnls {

// --- polynomials ------------------------------------------------------------------

cplx poly_eval(const Poly& p, cplx x) {
  cplx v = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
  return v;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

Poly poly_sub(const Poly& a, const Poly& b) {
  Poly c(std::max(a.size(), b.size()), 0.0);
  for (size_t i = 0; i < a.size(); ++i) c[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) c[i] -= b[i];
  return c;
}

Poly poly_derivative(const Poly& p) {
  if (p.size() <= 1) return {0.0};
  Poly d(p.size() - 1);
  for (size_t k = 1; k < p.size(); ++k) d[k - 1] = static_cast<double>(k) * p[k];
  return d;
}

Poly poly_conj(const Poly& p) {
  Poly c(p);
  for (auto& z : c) z = std::conj(z);
  return c;
}

Poly poly_from_roots(const std::vector<cplx>& roots, cplx lead) {
  Poly p{lead};
  for (cplx r : roots) p = poly_mul(p, Poly{-r, 1.0});
  return p;
}

std::vector<cplx> poly_roots(const Poly& p) {
  int n = static_cast<int>(p.size()) - 1;
  while (n > 0 && p[n] == 0.0) --n;
  if (n <= 0) return {};
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) C(i, n - 1) = -p[i] / p[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  std::vector<cplx> r(es.eigenvalues().data(), es.eigenvalues().data() + n);
  return r;
}

namespace {

// Coefficients of p(z + y) in powers of y.
Poly taylor_shift(const Poly& p, cplx z) {
  Poly c(p);
  const int n = static_cast<int>(c.size());
  for (int k = 0; k < n; ++k)
    for (int j = n - 2; j >= k; --j) c[j] += z * c[j + 1];
  return c;
}

double scale_of(const std::vector<cplx>& z) {
  double m = 0.0;
  for (auto v : z) m = std::max(m, std::abs(v));
  return m;
}

// Partial fractions of P/Q over the given distinct poles with multiplicities.
void fill_partial_fractions(RationalSoliton& s) {
  const cplx lead = s.Q.back();
  s.coeffs.assign(s.poles.size(), {});
  for (size_t j = 0; j < s.poles.size(); ++j) {
    const int m = s.multiplicity[j];
    const cplx z = s.poles[j];
    Poly rest{lead};
    for (size_t k = 0; k < s.poles.size(); ++k)
      if (k != j)
        for (int r = 0; r < s.multiplicity[k]; ++r) rest = poly_mul(rest, Poly{-s.poles[k], 1.0});
    const Poly p = taylor_shift(s.P, z), q = taylor_shift(rest, z);
    // g = p / q as a power series in y = x - z, to order m - 1.
    std::vector<cplx> g(m, 0.0);
    for (int n = 0; n < m; ++n) {
      cplx v = n < static_cast<int>(p.size()) ? p[n] : cplx(0.0);
      for (int i = 1; i <= n && i < static_cast<int>(q.size()); ++i) v -= q[i] * g[n - i];
      g[n] = v / q[0];
    }
    s.coeffs[j].resize(m);
    for (int r = 1; r <= m; ++r) s.coeffs[j][r - 1] = g[m - r];
  }
}

Poly lhs_F(const Poly& Q) {
  const Poly Qb = poly_conj(Q);
  Poly F = poly_sub(poly_mul(poly_derivative(Q), Qb), poly_mul(poly_derivative(Qb), Q));
  for (auto& c : F) c *= kI;
  return F;
}

}  // namespace

bool RationalSoliton::simple() const {
  return std::all_of(multiplicity.begin(), multiplicity.end(), [](int m) { return m == 1; });
}

std::vector<cplx> RationalSoliton::residues() const {
  std::vector<cplx> a;
  for (const auto& c : coeffs) a.push_back(c[0]);
  return a;
}

RationalSoliton residues_from_poles(const std::vector<cplx>& z, unsigned branch, std::optional<double> theta) {
  const int N = static_cast<int>(z.size());
  if (N < 1) throw Error(ErrorKind::Arity, "at least one pole is required");
  for (cplx v : z)
    if (!(v.imag() < 0)) throw Error(ErrorKind::InvalidDenominator, "poles must lie in the lower half-plane");
  RationalSoliton s;
  s.Q = poly_from_roots(z);
  const Poly F = lhs_F(s.Q);
  const double lead = F[2 * N - 2].real();
  std::vector<cplx> alpha;
  if (N > 1) {
    const auto roots = poly_roots(Poly(F.begin(), F.begin() + 2 * N - 1));
    const double tol = 1e-9 * (1.0 + scale_of(roots));
    std::vector<cplx> lower, upper;
    for (cplx r : roots) {
      if (std::abs(r.imag()) <= tol)
        throw Error(ErrorKind::DegenerateConfiguration, "F has a real root at " + num17(r.real()));
      (r.imag() < 0 ? lower : upper).push_back(r);
    }
    if (lower.size() != upper.size()) throw Error(ErrorKind::DegenerateConfiguration, "roots of F do not pair up");
    for (cplx r : lower) {
      const auto it = std::min_element(upper.begin(), upper.end(), [&](cplx a, cplx b) {
        return std::abs(a - std::conj(r)) < std::abs(b - std::conj(r));
      });
      if (std::abs(*it - std::conj(r)) > 1e-6 * (1.0 + std::abs(r)))
        throw Error(ErrorKind::DegenerateConfiguration, "roots of F are not conjugate pairs");
    }
    std::sort(lower.begin(), lower.end(), [](cplx a, cplx b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    for (int j = 0; j < N - 1; ++j) alpha.push_back(((branch >> j) & 1u) ? std::conj(lower[j]) : lower[j]);
  }
  s.P = poly_from_roots(alpha, std::polar(std::sqrt(lead), theta.value_or(0.0)));

  const double tol = 1e-10 * (1.0 + scale_of(z));
  for (cplx v : z) {
    auto it = std::find_if(s.poles.begin(), s.poles.end(), [&](cplx w) { return std::abs(w - v) <= tol; });
    if (it == s.poles.end()) {
      s.poles.push_back(v);
      s.multiplicity.push_back(1);
    } else {
      ++s.multiplicity[it - s.poles.begin()];
    }
  }
  fill_partial_fractions(s);
  if (!theta) {
    cplx ref = 0.0;
    for (cplx c : s.coeffs[0])
      if (std::abs(c) > 0) {
        ref = c;
        break;
      }
    const cplx rot = std::polar(1.0, -std::arg(ref));
    for (auto& c : s.P) c *= rot;
    for (auto& row : s.coeffs)
      for (auto& c : row) c *= rot;
  }
  return s;
}

RationalSoliton soliton_from_polynomials(const Poly& P, const Poly& Q) {
  RationalSoliton s;
  s.P = P;
  s.Q = Q;
  const auto roots = poly_roots(Q);
  for (cplx r : roots)
    if (!(r.imag() < 0)) throw Error(ErrorKind::InvalidDenominator, "Q has a root in the closed upper half-plane");
  const double tol = 1e-6 * (1.0 + scale_of(roots));
  std::vector<std::vector<cplx>> clusters;
  for (cplx r : roots) {
    auto it = std::find_if(clusters.begin(), clusters.end(), [&](const auto& c) { return std::abs(c[0] - r) <= tol; });
    if (it == clusters.end()) clusters.push_back({r});
    else it->push_back(r);
  }
  for (const auto& c : clusters) {
    cplx mean = 0.0;
    for (cplx r : c) mean += r;
    s.poles.push_back(mean / static_cast<double>(c.size()));
    s.multiplicity.push_back(static_cast<int>(c.size()));
  }
  fill_partial_fractions(s);
  return s;
}

double validate_multisoliton(const Poly& P, const Poly& Q) {
  for (cplx r : poly_roots(Q))
    if (!(r.imag() < 0)) throw Error(ErrorKind::InvalidDenominator, "Q has a root in the closed upper half-plane");
  const Poly F = lhs_F(Q);
  const Poly diff = poly_sub(poly_mul(P, poly_conj(P)), F);
  double fmax = 0.0, dmax = 0.0;
  for (cplx c : F) fmax = std::max(fmax, std::abs(c));
  for (cplx c : diff) dmax = std::max(dmax, std::abs(c));
  return fmax > 0 ? dmax / fmax : dmax;
}

double constraint_residual(const std::vector<cplx>& z, const std::vector<cplx>& a) {
  double worst = 0.0;
  for (size_t k = 0; k < z.size(); ++k) {
    cplx s = 0.0;
    for (size_t j = 0; j < z.size(); ++j) s += a[j] * std::conj(a[k]) / (z[j] - std::conj(z[k]));
    worst = std::max(worst, std::abs(s - kI));
  }
  return worst;
}

ChiralField to_field(const RationalSoliton& s, const FrequencyGrid& g) {
  // FT of (x - z)^{-r}, Im z < 0: -2 pi i (-i xi)^{r-1} / (r-1)! e^{-i z xi} for xi >= 0.
  return ChiralField::from_transform(g, [&](double xi) {
    cplx v = 0.0;
    for (size_t j = 0; j < s.poles.size(); ++j) {
      const cplx e = std::exp(-kI * s.poles[j] * xi);
      cplx factor = 1.0;
      for (size_t r = 1; r <= s.coeffs[j].size(); ++r) {
        v += s.coeffs[j][r - 1] * factor * e;
        factor *= -kI * xi / static_cast<double>(r);
      }
    }
    return -kTwoPi * kI * v;
  });
}

// --- inverse spectral formula --------------------------------------------------------

void validate_spectral_data(const SpectralData& d) {
  const int N = d.N();
  if (N < 1 || static_cast<int>(d.gamma.size()) != N)
    throw Error(ErrorKind::Arity, "spectral data needs matching lambda and gamma lists");
  if (!(d.rho > 0)) throw Error(ErrorKind::Config, "rho must be positive");
  if (d.lambda[0] != 0.0) throw Error(ErrorKind::Config, "lambda_1 must be 0");
  for (int j = 0; j < N; ++j)
    for (int k = j + 1; k < N; ++k)
      if (std::abs(d.lambda[j] - d.lambda[k]) <= 1e-12 * (1.0 + std::abs(d.lambda[j])))
        throw Error(ErrorKind::DegenerateSpectrum, "eigenvalues lambda must be pairwise distinct");
}

SynthMatrix synth_matrix(const SpectralData& d, double t) {
  validate_spectral_data(d);
  const int N = d.N();
  SynthMatrix m;
  m.N = N;
  m.V = Eigen::MatrixXcd::Zero(N, N);
  m.W = Eigen::MatrixXcd::Zero(N, N);
  for (int j = 0; j < N; ++j) {
    m.V(j, j) = d.lambda[j];
    m.W(j, j) = d.gamma[j] - (j == 0 ? kI * d.rho : cplx(0.0));
    for (int k = 0; k < N; ++k)
      if (k != j) m.W(j, k) = kI / (d.lambda[j] - d.lambda[k]);
  }
  m.M = 2.0 * t * m.V + m.W;
  m.X = Eigen::VectorXcd::Ones(N);
  m.Y = Eigen::VectorXcd::Zero(N);
  m.Y(0) = 1.0;
  return m;
}

cplx eval_soliton(const SpectralData& d, double t, cplx x) {
  const SynthMatrix m = synth_matrix(d, t);
  Eigen::MatrixXcd A = m.M;
  A.diagonal().array() -= x;
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
  if (lu.rcond() < 1e-14) throw Error(ErrorKind::NearSpectrum, "x is (numerically) an eigenvalue of M(t)");
  const Eigen::VectorXcd v = lu.solve(m.X);
  return std::sqrt(2.0 * d.rho) * std::polar(1.0, d.phi) * m.Y.dot(v);
}

ChiralField field_from_spectral(const SpectralData& d, double t, const FrequencyGrid& g) {
  // u^(xi) = 2 pi i sqrt(2 rho) e^{i phi} (e^{-i M xi} X)_1 for xi >= 0.
  const SynthMatrix m = synth_matrix(d, t);
  const Eigen::MatrixXcd E = (-kI * g.dxi() * m.M).exp();
  const cplx c = kTwoPi * kI * std::sqrt(2.0 * d.rho) * std::polar(1.0, d.phi);
  CVec coeffs(g.K);
  Eigen::VectorXcd v = m.X;
  for (int k = 0; k < g.K; ++k) {
    coeffs[k] = c * v(0);
    v = E * v;
  }
  return ChiralField(g, std::move(coeffs), 0);
}

namespace {

void sort_eigenpairs(Eigen::VectorXcd& z, Eigen::MatrixXcd* S) {
  const int N = static_cast<int>(z.size());
  std::vector<int> order(N);
  for (int i = 0; i < N; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return z(a).real() != z(b).real() ? z(a).real() < z(b).real() : z(a).imag() < z(b).imag();
  });
  Eigen::VectorXcd zs(N);
  Eigen::MatrixXcd Ss(S ? S->rows() : 0, N);
  for (int i = 0; i < N; ++i) {
    zs(i) = z(order[i]);
    if (S) Ss.col(i) = S->col(order[i]);
  }
  z = zs;
  if (S) *S = Ss;
}

void check_lower(const Eigen::VectorXcd& z) {
  for (int i = 0; i < z.size(); ++i)
    if (!(z(i).imag() < -1e-14))
      throw Error(ErrorKind::PositivityViolation, "eigenvalue of M(t) with Im z = " + num17(z(i).imag()));
}

}  // namespace

std::vector<cplx> poles_at_time(const SpectralData& d, double t) {
  const SynthMatrix m = synth_matrix(d, t);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m.M, false);
  Eigen::VectorXcd z = es.eigenvalues();
  sort_eigenpairs(z, nullptr);
  check_lower(z);
  return std::vector<cplx>(z.data(), z.data() + z.size());
}

bool poles_collide(const std::vector<cplx>& z) {
  const double gap = 1e-6 * (1.0 + scale_of(z));
  for (size_t j = 0; j < z.size(); ++j)
    for (size_t k = j + 1; k < z.size(); ++k)
      if (std::abs(z[j] - z[k]) < gap) return true;
  return false;
}

PoleResidues residues_at_time(const SpectralData& d, double t) {
  const SynthMatrix m = synth_matrix(d, t);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m.M);
  Eigen::VectorXcd z = es.eigenvalues();
  Eigen::MatrixXcd S = es.eigenvectors();
  sort_eigenpairs(z, &S);
  check_lower(z);
  PoleResidues out;
  out.poles.assign(z.data(), z.data() + z.size());
  out.collision = poles_collide(out.poles);
  if (out.collision) return out;
  // M = S Z S^{-1}: u = c Y^H S (Z - x)^{-1} S^{-1} X, so a_j = -c (Y^H S)_j (S^{-1} X)_j.
  const cplx c = std::sqrt(2.0 * d.rho) * std::polar(1.0, d.phi);
  const Eigen::VectorXcd right = S.fullPivLu().solve(m.X);
  const Eigen::RowVectorXcd left = m.Y.adjoint() * S;
  for (int j = 0; j < z.size(); ++j) out.residues.push_back(-c * left(j) * right(j));
  return out;
}

cplx two_soliton_explicit(double gamma1, double gamma2, double rho, double lambda, double phi, double t, cplx x) {
  const cplx a = gamma1 - kI * rho;
  const double b = gamma2 + 2.0 * lambda * t;
  const cplx num = std::polar(1.0, phi) * std::sqrt(2.0 * rho) * (b + kI / lambda - x);
  const cplx den = x * x - (a + b) * x + a * b - 1.0 / (lambda * lambda);
  return num / den;
}

cplx two_soliton_discriminant(double gamma1, double gamma2, double rho, double lambda, double t) {
  const cplx w = gamma1 - kI * rho - gamma2 - 2.0 * lambda * t;
  return w * w + 4.0 / (lambda * lambda);
}

// --- Sobolev growth -----------------------------------------------------------------------

namespace {

// int_0^inf (1 + xi^2)^s e^{-c xi} d xi for Re c > 0, on the ray xi = tau / c.
cplx laplace_bracket(cplx c, double s) {
  const double r = std::abs(c), th = std::arg(c);
  const cplx rot = std::polar(1.0, -2.0 * th) / (r * r);
  auto f = [&](double tau) -> cplx {
    const double w = std::exp(-tau);
    return w == 0.0 ? cplx(0.0) : std::pow(1.0 + tau * tau * rot, s) * w;
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  const double re = integrator.integrate([&](double tau) { return f(tau).real(); }, 0.0,
                                         std::numeric_limits<double>::infinity());
  const double im = integrator.integrate([&](double tau) { return f(tau).imag(); }, 0.0,
                                         std::numeric_limits<double>::infinity());
  return std::polar(1.0, -th) / r * cplx(re, im);
}

}  // namespace

double pole_sobolev_norm(const std::vector<cplx>& z, const std::vector<cplx>& a, double s) {
  // u^ = -2 pi i sum_j a_j e^{-i z_j xi}, so (1/2pi) int <xi>^{2s} |u^|^2
  // = 2 pi sum_jk a_j conj(a_k) int <xi>^{2s} e^{-i (z_j - conj z_k) xi}.
  cplx acc = 0.0;
  for (size_t j = 0; j < z.size(); ++j)
    for (size_t k = 0; k < z.size(); ++k)
      acc += a[j] * std::conj(a[k]) * laplace_bracket(kI * (z[j] - std::conj(z[k])), s);
  return std::sqrt(std::max(0.0, kTwoPi * acc.real()));
}

GrowthScan growth_scan(const SpectralData& d, const std::vector<double>& s_list, const std::vector<double>& t_list) {
  validate_spectral_data(d);
  for (size_t i = 0; i < t_list.size(); ++i)
    if (!(t_list[i] > 0) || (i > 0 && !(t_list[i] > t_list[i - 1])))
      throw Error(ErrorKind::Config, "t_list must be positive and increasing");
  const size_t nt = t_list.size(), ns = s_list.size();
  std::vector<GrowthSample> samples(nt * ns);
  parallel_for(nt, [&](size_t i) {
    const double t = t_list[i];
    const PoleResidues pr = residues_at_time(d, t);
    for (size_t j = 0; j < ns; ++j) {
      GrowthSample g{t, s_list[j], 0.0, pr.collision};
      if (!pr.collision) g.norm = pole_sobolev_norm(pr.poles, pr.residues, s_list[j]);
      samples[i * ns + j] = g;
    }
  });
  GrowthScan scan;
  scan.s_list = s_list;
  for (size_t j = 0; j < ns; ++j) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0, skipped = 0;
    std::vector<std::pair<double, double>> pts;
    for (size_t i = 0; i < nt; ++i) {
      const auto& g = samples[i * ns + j];
      if (g.skipped || !(g.norm > 0)) {
        ++skipped;
        continue;
      }
      const double x = std::log(g.t), y = std::log(g.norm);
      pts.emplace_back(x, y);
      sx += x, sy += y, sxx += x * x, sxy += x * y, ++n;
    }
    double slope = std::nan(""), err = std::nan("");
    if (n >= 2) {
      const double den = n * sxx - sx * sx;
      slope = (n * sxy - sx * sy) / den;
      const double icpt = (sy - slope * sx) / n;
      double ss = 0;
      for (auto [x, y] : pts) ss += (y - icpt - slope * x) * (y - icpt - slope * x);
      err = n > 2 ? std::sqrt(ss / (n - 2) / (sxx - sx * sx / n)) : 0.0;
    }
    scan.slopes.push_back(slope);
    scan.slope_stderr.push_back(err);
    scan.skipped.push_back(skipped);
  }
  scan.samples = std::move(samples);
  return scan;
}

double potential_roundtrip(const ChiralField& u) {
  const SpectralData d = spectral_data_from_potential(u);
  const ChiralField synth = field_from_spectral(d, 0.0, u.grid);
  const auto q = u.grid.quadrature().weights(0);
  double acc = 0.0;
  for (int k = 0; k < u.grid.K; ++k) acc += q[k] * std::abs(u.coeffs[k] - synth.coeffs[k]);
  return acc / kTwoPi;
}

std::vector<std::string> pole_csv_header() { return {"t", "j", "re_z", "im_z", "re_a", "im_a", "collision_flag"}; }

void append_pole_rows(CsvWriter& csv, double t, const std::vector<cplx>& z, const std::vector<cplx>& a,
                      bool collision) {
  for (size_t j = 0; j < z.size(); ++j) {
    const bool has_a = j < a.size();
    csv.row({num17(t), std::to_string(j + 1), num17(z[j].real()), num17(z[j].imag()),
             has_a ? num17(a[j].real()) : "", has_a ? num17(a[j].imag()) : "", collision ? "1" : "0"});
  }
}

}  // namespace cmdnls
