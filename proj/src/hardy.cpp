#include "cmdnls/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "cmdnls/io.hpp"

namespace cmdnls {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidGrid: return "invalid-grid";
    case ErrorKind::InvalidSymbol: return "invalid-symbol";
    case ErrorKind::NonRealFunctional: return "non-real-functional";
    case ErrorKind::ChiralityViolation: return "chirality-violation";
    case ErrorKind::Alignment: return "alignment";
    case ErrorKind::NumericalBreakdown: return "numerical-breakdown";
    case ErrorKind::NotASoliton: return "not-a-soliton";
    case ErrorKind::DegenerateConfiguration: return "degenerate-configuration";
    case ErrorKind::InvalidDenominator: return "invalid-denominator";
    case ErrorKind::DegenerateSpectrum: return "degenerate-spectrum";
    case ErrorKind::NearSpectrum: return "near-spectrum";
    case ErrorKind::PositivityViolation: return "positivity-violation";
    case ErrorKind::VanishingResidue: return "vanishing-residue";
    case ErrorKind::Stiffness: return "stiffness";
    case ErrorKind::Arity: return "arity";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

namespace {

Fft& fft_for(int n) {
  thread_local std::map<int, std::unique_ptr<Fft>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<Fft>(n)).first;
  return *it->second;
}

void require_same_grid(const FrequencyGrid& a, const FrequencyGrid& b) {
  if (!(a == b)) throw Error(ErrorKind::InvalidGrid, "fields live on different grids");
}

double sign_parity(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

// Values on the spatial grid refined by `factor` from two-sided coefficients.
CVec coeffs_to_values(const FrequencyGrid& g, const CVec& c, int factor) {
  const int N = 2 * g.K * factor;
  Fft& fft = fft_for(N);
  cplx* A = fft.data();
  std::fill(A, A + N, cplx(0.0));
  for (int k = -g.K; k < g.K; ++k) A[(k + N) % N] = c[k + g.K] * sign_parity(k);
  fft.backward();
  CVec v(A, A + N);
  for (auto& x : v) x /= g.L;
  return v;
}

CVec values_to_coeffs(const FrequencyGrid& g, const CVec& v, int factor) {
  const int N = 2 * g.K * factor;
  if (static_cast<int>(v.size()) != N) throw Error(ErrorKind::InvalidGrid, "spatial sample count mismatch");
  Fft& fft = fft_for(N);
  cplx* A = fft.data();
  std::copy(v.begin(), v.end(), A);
  fft.forward();
  const double dx = g.L / N;
  CVec c(2 * g.K);
  for (int k = -g.K; k < g.K; ++k) c[k + g.K] = dx * sign_parity(k) * A[(k + N) % N];
  return c;
}

}  // namespace

// --- grid and field types ------------------------------------------------------

FrequencyGrid::FrequencyGrid(double L_, int K_) : L(L_), K(K_) {
  if (!(L > 0) || !std::isfinite(L)) throw Error(ErrorKind::InvalidGrid, "domain length must be positive");
  if (K < 8) throw Error(ErrorKind::InvalidGrid, "mode count must be at least 8");
}

ChiralField::ChiralField(const FrequencyGrid& g, CVec c, int o) : grid(g), coeffs(std::move(c)), origin(o) {
  if (static_cast<int>(coeffs.size()) != g.K) throw Error(ErrorKind::InvalidGrid, "chiral field needs K coefficients");
  if (o < 0 || o >= g.K) throw Error(ErrorKind::ChiralityViolation, "support origin out of range");
  for (int k = 0; k < o; ++k) coeffs[k] = 0.0;
}

ChiralField ChiralField::from_transform(const FrequencyGrid& g, const std::function<cplx(double)>& fhat,
                                        int origin) {
  CVec c(g.K, 0.0);
  for (int k = origin; k < g.K; ++k) c[k] = fhat(g.xi(k));
  return ChiralField(g, std::move(c), origin);
}

bool ChiralField::finite() const {
  return std::all_of(coeffs.begin(), coeffs.end(),
                     [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

ChiralField operator+(const ChiralField& a, const ChiralField& b) {
  require_same_grid(a.grid, b.grid);
  CVec c(a.coeffs);
  for (size_t k = 0; k < c.size(); ++k) c[k] += b.coeffs[k];
  return ChiralField(a.grid, std::move(c), std::min(a.origin, b.origin));
}

ChiralField operator-(const ChiralField& a, const ChiralField& b) { return a + cplx(-1.0) * b; }

ChiralField operator*(cplx s, const ChiralField& a) {
  CVec c(a.coeffs);
  for (auto& z : c) z *= s;
  return ChiralField(a.grid, std::move(c), a.origin);
}

RealLineField::RealLineField(const FrequencyGrid& g, CVec c) : grid(g), coeffs(std::move(c)) {
  if (static_cast<int>(coeffs.size()) != 2 * g.K) throw Error(ErrorKind::InvalidGrid, "line field needs 2K coefficients");
}

RealLineField RealLineField::from_spatial(const FrequencyGrid& g, const CVec& values) {
  return RealLineField(g, values_to_coeffs(g, values, 1));
}

RealLineField RealLineField::from_spatial_padded(const FrequencyGrid& g, const CVec& values, int factor) {
  return RealLineField(g, values_to_coeffs(g, values, factor));
}

RealLineField RealLineField::from_transform(const FrequencyGrid& g, const std::function<cplx(double)>& fhat) {
  RealLineField f(g);
  for (int k = -g.K; k < g.K; ++k) f.at(k) = fhat(g.xi(k));
  return f;
}

CVec RealLineField::to_spatial() const { return coeffs_to_values(grid, coeffs, 1); }
CVec RealLineField::to_spatial_padded(int factor) const { return coeffs_to_values(grid, coeffs, factor); }

bool RealLineField::is_real(double tol) const {
  // f real <=> f^(-xi) = conj f^(xi); the k = -K mode has no partner on the grid.
  double scale = 0.0;
  for (auto z : coeffs) scale = std::max(scale, std::abs(z));
  for (int k = 1; k < grid.K; ++k)
    if (std::abs(at(-k) - std::conj(at(k))) > tol * std::max(scale, 1e-300)) return false;
  return std::abs(at(0).imag()) <= tol * std::max(scale, 1e-300);
}

RealLineField operator+(const RealLineField& a, const RealLineField& b) {
  require_same_grid(a.grid, b.grid);
  CVec c(a.coeffs);
  for (size_t k = 0; k < c.size(); ++k) c[k] += b.coeffs[k];
  return RealLineField(a.grid, std::move(c));
}

RealLineField operator-(const RealLineField& a, const RealLineField& b) { return a + cplx(-1.0) * b; }

RealLineField operator*(cplx s, const RealLineField& a) {
  CVec c(a.coeffs);
  for (auto& z : c) z *= s;
  return RealLineField(a.grid, std::move(c));
}

// --- projections and multipliers ----------------------------------------------

ChiralField project_plus(const RealLineField& f) {
  CVec c(f.coeffs.begin() + f.grid.K, f.coeffs.end());
  return ChiralField(f.grid, std::move(c), 0);
}

RealLineField embed(const ChiralField& f) {
  RealLineField r(f.grid);
  for (int k = 0; k < f.grid.K; ++k) r.at(k) = f.coeffs[k];
  return r;
}

ChiralField fourier_multiplier(const ChiralField& f, const std::function<cplx(double)>& symbol) {
  CVec c(f.coeffs);
  for (int k = 0; k < f.grid.K; ++k) {
    const cplx m = symbol(f.grid.xi(k));
    if (!std::isfinite(m.real()) || !std::isfinite(m.imag()))
      throw Error(ErrorKind::InvalidSymbol, "symbol is not finite at xi = " + num17(f.grid.xi(k)));
    c[k] *= m;
  }
  return ChiralField(f.grid, std::move(c), f.origin);
}

RealLineField fourier_multiplier(const RealLineField& f, const std::function<cplx(double)>& symbol) {
  RealLineField r(f);
  for (int k = -f.grid.K; k < f.grid.K; ++k) {
    const cplx m = symbol(f.grid.xi(k));
    if (!std::isfinite(m.real()) || !std::isfinite(m.imag()))
      throw Error(ErrorKind::InvalidSymbol, "symbol is not finite at xi = " + num17(f.grid.xi(k)));
    r.at(k) *= m;
  }
  return r;
}

RealLineField hilbert_transform(const RealLineField& f) {
  RealLineField r(f);
  for (int k = -f.grid.K; k < f.grid.K; ++k) r.at(k) *= (k > 0) ? cplx(0, -1) : (k < 0 ? cplx(0, 1) : cplx(0));
  return r;
}

CVec to_spatial(const ChiralField& f) { return embed(f).to_spatial(); }

// --- products --------------------------------------------------------------------

ChiralField toeplitz_conj(const ChiralField& b, const ChiralField& f) {
  require_same_grid(b.grid, f.grid);
  const auto& q = f.grid.quadrature();
  return ChiralField(f.grid, q.correlate(f.coeffs, f.origin, b.coeffs, b.origin, tail_ratio(b.coeffs)), 0);
}

ChiralField product(const ChiralField& a, const ChiralField& b) {
  require_same_grid(a.grid, b.grid);
  const auto& q = a.grid.quadrature();
  const int o = std::min(a.origin + b.origin, a.grid.K - 1);
  return ChiralField(a.grid, q.convolve(a.coeffs, a.origin, b.coeffs, b.origin), o);
}

ChiralField szego_density(const ChiralField& u) { return toeplitz_conj(u, u); }

RealLineField multiply(const RealLineField& a, const RealLineField& b) {
  require_same_grid(a.grid, b.grid);
  CVec va = a.to_spatial_padded(2), vb = b.to_spatial_padded(2);
  for (size_t m = 0; m < va.size(); ++m) va[m] *= vb[m];
  return RealLineField::from_spatial_padded(a.grid, va, 2);
}

RealLineField abs2(const RealLineField& a) { return multiply(a, conjugate(a)); }

RealLineField conjugate(const RealLineField& a) {
  // conj(f)^(xi) = conj(f^(-xi)); the unpaired k = -K mode is dropped.
  RealLineField r(a.grid);
  for (int k = -a.grid.K + 1; k < a.grid.K; ++k) r.at(k) = std::conj(a.at(-k));
  return r;
}

cplx line_integral(const FrequencyGrid& g, const CVec& F) {
  const auto& w = gregory_weights();
  const int m = std::min(static_cast<int>(w.size()), g.K / 4);
  cplx s = 0.0;
  for (auto z : F) s += z;
  auto at = [&](int k) { return F[k + g.K]; };
  s += (2.0 * w[0] - 1.0) * at(0);
  for (int i = 1; i < m; ++i) s += (w[i] - 1.0) * (at(i) + at(-i));
  return s * g.dxi() / kTwoPi;
}

RealLineField line_convolve(const RealLineField& a, const RealLineField& b) {
  require_same_grid(a.grid, b.grid);
  const FrequencyGrid& g = a.grid;
  const int K = g.K, N = 4 * K;
  Fft& fa = fft_for(N);
  // Two transforms of the same size share the cached plan, so stage b in a copy.
  CVec bt(N, 0.0);
  {
    cplx* B = fa.data();
    std::fill(B, B + N, cplx(0.0));
    for (int j = 0; j < 2 * K; ++j) B[j] = b.coeffs[j];
    fa.forward();
    std::copy(B, B + N, bt.begin());
  }
  cplx* A = fa.data();
  std::fill(A, A + N, cplx(0.0));
  for (int j = 0; j < 2 * K; ++j) A[j] = a.coeffs[j];
  fa.forward();
  for (int j = 0; j < N; ++j) A[j] *= bt[j] / static_cast<double>(N);
  fa.backward();
  // Index arithmetic: (j + K) + (k - j + K) = k + 2K.
  const auto& w = gregory_weights();
  const int m = std::min(static_cast<int>(w.size()), K / 4);
  auto bv = [&](int k) { return (k >= -K && k < K) ? b.at(k) : cplx(0.0); };
  RealLineField out(g);
  const double scale = g.dxi() / kTwoPi;
  for (int k = -K; k < K; ++k) {
    cplx s = A[k + 2 * K];
    s += (2.0 * w[0] - 1.0) * a.at(0) * bv(k);
    for (int i = 1; i < m; ++i) s += (w[i] - 1.0) * (a.at(i) * bv(k - i) + a.at(-i) * bv(k + i));
    out.at(k) = scale * s;
  }
  return out;
}

// --- functionals ----------------------------------------------------------------------

cplx inner(const ChiralField& f, const ChiralField& g) {
  require_same_grid(f.grid, g.grid);
  const auto q = f.grid.quadrature().weights(std::max(f.origin, g.origin));
  cplx s = 0.0;
  for (int k = 0; k < f.grid.K; ++k) s += q[k] * f.coeffs[k] * std::conj(g.coeffs[k]);
  return s / kTwoPi;
}

cplx inner(const RealLineField& f, const RealLineField& g) {
  require_same_grid(f.grid, g.grid);
  cplx s = 0.0;
  for (size_t k = 0; k < f.coeffs.size(); ++k) s += f.coeffs[k] * std::conj(g.coeffs[k]);
  return s * f.grid.dxi() / kTwoPi;
}

double mass(const ChiralField& f) { return inner(f, f).real(); }
double mass(const RealLineField& f) { return inner(f, f).real(); }

double mass_spatial(const RealLineField& f) {
  const CVec v = f.to_spatial();
  double s = 0.0;
  for (auto z : v) s += std::norm(z);
  return s * f.grid.dx();
}

double mass_spatial(const ChiralField& f) { return mass_spatial(embed(f)); }

double momentum(const ChiralField& u) {
  const auto q = u.grid.quadrature().weights(u.origin);
  cplx kinetic = 0.0;
  for (int k = 0; k < u.grid.K; ++k) kinetic += q[k] * u.grid.xi(k) * u.coeffs[k] * std::conj(u.coeffs[k]);
  kinetic /= kTwoPi;
  // int |u|^4 = (1/2pi) int_R |rho^|^2 = (1/pi) int_0^inf |rho^|^2 since |u|^2 is real.
  const ChiralField rho = szego_density(u);
  const auto q0 = u.grid.quadrature().weights(0);
  double quartic = 0.0;
  for (int k = 0; k < u.grid.K; ++k) quartic += q0[k] * std::norm(rho.coeffs[k]);
  quartic /= kPi;
  const cplx p = kinetic - 0.5 * quartic;
  if (std::abs(p.imag()) > 1e-10 * std::max(1.0, std::abs(p)))
    throw Error(ErrorKind::NonRealFunctional, "momentum has imaginary part " + num17(p.imag()));
  return p.real();
}

ChiralField energy_residual(const ChiralField& u) {
  const ChiralField nonlinear = product(szego_density(u), u);
  CVec c(u.grid.K, 0.0);
  for (int k = u.origin; k < u.grid.K; ++k) c[k] = kI * (u.grid.xi(k) * u.coeffs[k] - nonlinear.coeffs[k]);
  return ChiralField(u.grid, std::move(c), u.origin);
}

double energy(const ChiralField& u) { return 0.5 * mass(energy_residual(u)); }

double sobolev_norm(const ChiralField& f, double s) {
  const auto q = f.grid.quadrature().weights(f.origin);
  double acc = 0.0;
  for (int k = 0; k < f.grid.K; ++k) {
    const double xi = f.grid.xi(k);
    acc += q[k] * std::pow(1.0 + xi * xi, s) * std::norm(f.coeffs[k]);
  }
  return std::sqrt(acc / kTwoPi);
}

double homogeneous_sobolev_norm(const ChiralField& f, double s) {
  const auto q = f.grid.quadrature().weights(f.origin);
  double acc = 0.0;
  for (int k = 0; k < f.grid.K; ++k) {
    const double xi = f.grid.xi(k);
    acc += q[k] * (xi > 0 ? std::pow(xi, 2 * s) : (s == 0 ? 1.0 : 0.0)) * std::norm(f.coeffs[k]);
  }
  return std::sqrt(acc / kTwoPi);
}

cplx generator_form(const ChiralField& f) {
  const auto& quad = f.grid.quadrature();
  const CVec d = quad.derivative(f.coeffs, f.origin);
  const auto q = quad.weights(f.origin);
  cplx s = 0.0;
  for (int k = 0; k < f.grid.K; ++k) s += q[k] * kI * d[k] * std::conj(f.coeffs[k]);
  return s / kTwoPi;
}

double centroid(const ChiralField& f) {
  const double m = mass(f);
  return m > 0 ? generator_form(f).real() / m : 0.0;
}

// --- symmetries, gauge, variance --------------------------------------------------------

namespace {

// theta(x_m) = int_{-L/2}^{x_m} rho: spectral antiderivative of the periodic
// part plus the linear ramp carried by the mean.
std::vector<double> cumulative_density(const FrequencyGrid& g, const CVec& values) {
  const int N = static_cast<int>(values.size());
  Fft& fft = fft_for(N);
  cplx* A = fft.data();
  for (int m = 0; m < N; ++m) A[m] = std::norm(values[m]);
  fft.forward();
  const double mean = A[0].real() / N;
  A[0] = 0.0;
  for (int j = 1; j < N; ++j) {
    const int kk = (j <= N / 2) ? j : j - N;
    if (2 * j == N) {
      A[j] = 0.0;
      continue;
    }
    A[j] /= kI * (kTwoPi * kk / g.L) * static_cast<double>(N);
  }
  fft.backward();
  std::vector<double> theta(N);
  const double base = A[0].real();
  for (int m = 0; m < N; ++m) theta[m] = A[m].real() - base + mean * (m * g.L / N);
  return theta;
}

RealLineField apply_gauge(const RealLineField& f, double sign) {
  CVec v = f.to_spatial();
  const auto theta = cumulative_density(f.grid, v);
  for (size_t m = 0; m < v.size(); ++m) v[m] *= std::polar(1.0, sign * 0.5 * theta[m]);
  return RealLineField::from_spatial(f.grid, v);
}

}  // namespace

RealLineField gauge_transform(const RealLineField& u) { return apply_gauge(u, -1.0); }
RealLineField inverse_gauge_transform(const RealLineField& v) { return apply_gauge(v, +1.0); }

double gauged_energy(const RealLineField& v) {
  const FrequencyGrid& g = v.grid;
  double kinetic = 0.0;
  for (int k = -g.K; k < g.K; ++k) kinetic += g.xi(k) * g.xi(k) * std::norm(v.at(k));
  kinetic *= g.dxi() / kTwoPi;
  const CVec vp = v.to_spatial_padded(2);
  CVec rho(vp.size());
  double sextic = 0.0;
  for (size_t m = 0; m < vp.size(); ++m) {
    const double r = std::norm(vp[m]);
    rho[m] = r;
    sextic += r * r * r;
  }
  sextic *= g.L / static_cast<double>(vp.size());
  const RealLineField rho_hat = RealLineField::from_spatial_padded(g, rho, 2);
  CVec F(2 * g.K);
  for (int k = -g.K; k < g.K; ++k) F[k + g.K] = std::abs(g.xi(k)) * std::norm(rho_hat.at(k));
  const double dispersive = line_integral(g, F).real();
  return 0.5 * kinetic - 0.25 * dispersive + sextic / 24.0;
}

ChiralField galilean_boost(const ChiralField& f, double eta) {
  if (eta < 0) throw Error(ErrorKind::ChiralityViolation, "boost with eta < 0 leaves the Hardy space");
  const double steps = eta / f.grid.dxi();
  const long n = std::lround(steps);
  if (std::abs(steps - static_cast<double>(n)) > 1e-9 * std::max(1.0, steps))
    throw Error(ErrorKind::Alignment, "boost eta must be a multiple of the frequency spacing");
  if (n + f.origin >= f.grid.K) throw Error(ErrorKind::Alignment, "boost moves the spectrum off the grid");
  CVec c(f.grid.K, 0.0);
  for (int k = f.origin; k + n < f.grid.K; ++k) c[k + n] = f.coeffs[k];
  return ChiralField(f.grid, std::move(c), f.origin + static_cast<int>(n));
}

VarianceReport variance(const ChiralField& f, double t) {
  // x f <-> i d/dxi f^, so int x^2 |f|^2 = (1/2pi) int |d f^/dxi|^2 on the
  // support. A jump of f^ at the support origin is a delta in d f^/dxi: the
  // field then decays like 1/x and the variance diverges; the tail constant
  // lim x^2 |f(x)|^2 = |f^(origin)|^2 / (4 pi^2) measures that.
  const FrequencyGrid& g = f.grid;
  CVec w(g.K, 0.0);
  for (int k = f.origin; k < g.K; ++k) w[k] = std::polar(1.0, g.xi(k) * g.xi(k) * t) * f.coeffs[k];
  const auto& quad = g.quadrature();
  const CVec d = quad.derivative(w, f.origin);
  const auto q = quad.weights(f.origin);
  double acc = 0.0;
  for (int k = f.origin; k < g.K; ++k) acc += q[k] * std::norm(d[k] - 2.0 * kI * g.xi(k) * t * w[k]);
  VarianceReport r;
  r.value = acc / kTwoPi;
  // |f(+-L/2)|^2 L^2 for a 1/x tail with the constant above.
  r.boundary_density = std::norm(f.coeffs[f.origin]) / (kPi * kPi);
  r.boundary_dominated = r.boundary_density > 1e-8 * r.value;
  return r;
}

// --- snapshot I/O ---------------------------------------------------------------------------

void write_snapshot(const std::string& csv_path, const ChiralField& f) {
  CsvWriter csv({"k", "xi", "re", "im"});
  for (int k = 0; k < f.grid.K; ++k)
    csv.row({std::to_string(k), num17(f.grid.xi(k)), num17(f.coeffs[k].real()), num17(f.coeffs[k].imag())});
  csv.save(csv_path);
  std::string meta = csv_path;
  const auto dot = meta.rfind(".csv");
  meta = (dot == std::string::npos ? meta : meta.substr(0, dot)) + ".json";
  json j = {{"L", f.grid.L}, {"K", f.grid.K}, {"convention", "integral e^{-i xi x}"}, {"origin", f.origin}};
  write_text(meta, dump_json(j));
}

ChiralField read_snapshot(const std::string& csv_path, const FrequencyGrid& g, int origin) {
  std::istringstream in(read_text(csv_path));
  std::string line;
  std::getline(in, line);
  CVec c(g.K, 0.0);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell[4];
    for (auto& s : cell) std::getline(ls, s, ',');
    const int k = std::stoi(cell[0]);
    if (k < 0 || k >= g.K) throw Error(ErrorKind::Config, "snapshot index out of range");
    c[k] = cplx(std::stod(cell[2]), std::stod(cell[3]));
  }
  return ChiralField(g, std::move(c), origin);
}

}  // namespace cmdnls
