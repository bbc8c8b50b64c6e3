#include "cmdnls/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <map>

namespace cmdnls {

namespace {

// Gregory corrections d_j = w_j - 1 for the left end of h * sum_{j>=0} f(jh).
// Euler-Maclaurin: the trapezoid error on x^p is -1/2 for p = 0 and
// B_{p+1}/(p+1) for odd p; the corrections must reproduce exactly that.
std::vector<double> compute_gregory(int m) {
  static const long double bernoulli_even[] = {1.0L / 6, -1.0L / 30, 1.0L / 42, -1.0L / 30,
                                               5.0L / 66, -691.0L / 2730};
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  MatL A(m, m);
  VecL rhs(m);
  for (int p = 0; p < m; ++p) {
    for (int j = 0; j < m; ++j) A(p, j) = (p == 0) ? 1.0L : std::pow(static_cast<long double>(j), p);
    if (p == 0) {
      rhs(p) = -0.5L;
    } else if (p % 2 == 1) {
      rhs(p) = bernoulli_even[(p - 1) / 2] / (p + 1);
    } else {
      rhs(p) = 0.0L;
    }
  }
  VecL d = A.fullPivLu().solve(rhs);
  std::vector<double> w(m);
  for (int j = 0; j < m; ++j) w[j] = static_cast<double>(1.0L + d(j));
  return w;
}

const std::vector<double>& gregory_for(int m) {
  static const std::vector<std::vector<double>> table = [] {
    std::vector<std::vector<double>> t(kEndpointOrder + 1);
    for (int m = 1; m <= kEndpointOrder; ++m) t[m] = compute_gregory(m);
    return t;
  }();
  return table[m];
}

long double lagrange(int i, int p, long double s) {
  long double v = 1.0L;
  for (int q = 0; q < p; ++q)
    if (q != i) v *= (s - q) / static_cast<long double>(i - q);
  return v;
}

// W(i,j) = int_0^n l_i(n - s) l_j(s) ds on nodes 0..p-1, exact by Gauss-Legendre.
Eigen::MatrixXd product_rule(int n, int p) {
  using boost::math::quadrature::gauss;
  Eigen::MatrixXd W(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      auto f = [&](long double s) { return lagrange(i, p, n - s) * lagrange(j, p, s); };
      W(i, j) = static_cast<double>(gauss<long double, 20>::integrate(f, 0.0L, static_cast<long double>(n)));
    }
  return W;
}

int order_for(int K) { return std::clamp(K / 4, 1, kEndpointOrder); }

}  // namespace

const std::vector<double>& gregory_weights() { return gregory_for(kEndpointOrder); }

std::vector<double> fd_weights(const std::vector<double>& nodes, double x0, int order) {
  // Fornberg's recursion for arbitrary node sets.
  const int n = static_cast<int>(nodes.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0, c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][order];
  return w;
}

HalfLineQuadrature::HalfLineQuadrature(int K, double h) : K_(K), h_(h) {
  if (K < 2 || !(h > 0)) throw Error(ErrorKind::InvalidGrid, "quadrature needs K >= 2 and h > 0");
  const int m = order_for(K);
  short_.resize(2 * m - 1);
  for (int n = 1; n < 2 * m - 1; ++n) short_[n] = product_rule(n, std::max(m, n + 1));
  const int width = std::min(9, K);
  fd_.resize(width);
  std::vector<double> nodes(width);
  for (int i = 0; i < width; ++i) nodes[i] = i;
  for (int r = 0; r < width; ++r) fd_[r] = fd_weights(nodes, r, 1);
  fa_ = std::make_unique<Fft>(2 * K);
  fb_ = std::make_unique<Fft>(2 * K);
}

std::vector<double> HalfLineQuadrature::weights(int origin) const {
  const auto& w = gregory_for(order_for(K_));
  const int m = static_cast<int>(w.size());
  std::vector<double> q(K_, 0.0);
  for (int j = std::max(origin, 0); j < K_; ++j) {
    const int i = j - origin;
    q[j] = h_ * (i < m ? w[i] : 1.0);
  }
  return q;
}

CVec HalfLineQuadrature::convolve(const CVec& a, int oa, const CVec& b, int ob) const {
  const int N = 2 * K_;
  cplx* A = fa_->data();
  cplx* B = fb_->data();
  for (int j = 0; j < N; ++j) {
    A[j] = j < K_ ? a[j] : 0.0;
    B[j] = j < K_ ? b[j] : 0.0;
  }
  fa_->forward();
  fb_->forward();
  for (int j = 0; j < N; ++j) A[j] *= B[j] / static_cast<double>(N);
  fa_->backward();

  const auto& w = gregory_for(order_for(K_));
  const int m = static_cast<int>(w.size());
  const int lim = 2 * m - 1;
  auto at = [&](const CVec& v, int j) { return (j >= 0 && j < K_) ? v[j] : cplx(0.0); };
  const double scale = h_ / kTwoPi;
  CVec out(K_, 0.0);
  for (int k = 0; k < K_; ++k) {
    const int n = k - oa - ob;
    if (n <= 0) continue;
    cplx s = 0.0;
    if (n < lim) {
      const Eigen::MatrixXd& W = short_rule(n);
      for (int i = 0; i < W.rows(); ++i) {
        const cplx ai = at(a, oa + i);
        if (ai == 0.0) continue;
        for (int j = 0; j < W.cols(); ++j) s += W(i, j) * ai * at(b, ob + j);
      }
    } else {
      s = A[k];
      for (int i = 0; i < m; ++i)
        s += (w[i] - 1.0) * (a[k - ob - i] * b[ob + i] + a[oa + i] * b[k - oa - i]);
    }
    out[k] = scale * s;
  }
  return out;
}

namespace {

// Tail of sum_{j >= K-k} a_{k+j} conj(b_j) per unit a_{K-1}, with both
// sequences continued by the ratio r beyond the grid:
// M_k = sum_{p=1}^{k} r^p conj(b_{K-1-k+p}) + conj(b_{K-1}) r^k |r|^2/(1-|r|^2).
CVec tail_factors(const CVec& b, cplx r) {
  const int K = static_cast<int>(b.size());
  CVec M(K, 0.0);
  if (r == 0.0) return M;
  const double r2 = std::norm(r);
  const cplx far = std::conj(b[K - 1]) * r2 / (1.0 - r2);
  cplx partial = 0.0, rk = 1.0;
  for (int k = 0; k < K; ++k) {
    M[k] = partial + far * rk;
    partial = r * (std::conj(b[K - 1 - k]) + partial);
    rk *= r;
  }
  return M;
}

}  // namespace

cplx tail_ratio(const CVec& f) {
  const int K = static_cast<int>(f.size());
  if (K < 3 || f[K - 2] == 0.0 || f[K - 3] == 0.0) return 0.0;
  const cplx r = f[K - 1] / f[K - 2];
  const cplx r_prev = f[K - 2] / f[K - 3];
  if (!(std::abs(r) < 0.999) || std::abs(r - r_prev) > 0.05 * std::abs(r)) return 0.0;
  return r;
}

CVec HalfLineQuadrature::correlate(const CVec& a, int oa, const CVec& b, int ob, cplx tail) const {
  const int N = 2 * K_;
  cplx* A = fa_->data();
  cplx* B = fb_->data();
  for (int j = 0; j < N; ++j) {
    A[j] = j < K_ ? a[j] : 0.0;
    B[j] = 0.0;
  }
  B[0] = std::conj(b[0]);
  for (int j = 1; j < K_; ++j) B[N - j] = std::conj(b[j]);
  fa_->forward();
  fb_->forward();
  for (int j = 0; j < N; ++j) A[j] *= B[j] / static_cast<double>(N);
  fa_->backward();

  const auto& w = gregory_for(order_for(K_));
  const int m = static_cast<int>(w.size());
  const double scale = h_ / kTwoPi;
  CVec out(K_, 0.0);
  for (int k = 0; k < K_; ++k) {
    const int j0 = std::max(ob, oa - k);
    const int top = K_ - 1 - k;
    if (j0 > top) continue;
    cplx s = A[k];
    for (int i = 0; i < m && j0 + i <= top; ++i) s += (w[i] - 1.0) * a[k + j0 + i] * std::conj(b[j0 + i]);
    out[k] = scale * s;
  }
  if (tail != 0.0) {
    const CVec M = tail_factors(b, tail);
    for (int k = 0; k < K_; ++k) out[k] += scale * a[K_ - 1] * M[k];
  }
  return out;
}

Eigen::MatrixXcd HalfLineQuadrature::convolution_matrix(const CVec& a, int oa) const {
  const auto& w = gregory_for(order_for(K_));
  const int m = static_cast<int>(w.size());
  const int lim = 2 * m - 1;
  const double scale = h_ / kTwoPi;
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(K_, K_);
  for (int k = 0; k < K_; ++k) {
    const int n = k - oa;
    if (n <= 0) continue;
    if (n < lim) {
      const Eigen::MatrixXd& W = short_rule(n);
      for (int j = 0; j < W.cols() && j < K_; ++j) {
        cplx s = 0.0;
        for (int i = 0; i < W.rows() && oa + i < K_; ++i) s += W(i, j) * a[oa + i];
        T(k, j) = scale * s;
      }
    } else {
      for (int j = 0; j <= n; ++j) {
        double wj = 1.0;
        if (j < m) wj = w[j];
        if (n - j < m) wj = w[n - j];
        T(k, j) = scale * wj * a[k - j];
      }
    }
  }
  return T;
}

Eigen::MatrixXcd HalfLineQuadrature::correlation_matrix(const CVec& b, int ob, cplx tail) const {
  const auto& w = gregory_for(order_for(K_));
  const int m = static_cast<int>(w.size());
  const double scale = h_ / kTwoPi;
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(K_, K_);
  for (int k = 0; k < K_; ++k)
    for (int j = std::max(ob, 0); k + j < K_; ++j) {
      const int i = j - ob;
      R(k, k + j) = scale * (i < m ? w[i] : 1.0) * std::conj(b[j]);
    }
  if (tail != 0.0) {
    const CVec M = tail_factors(b, tail);
    for (int k = 0; k < K_; ++k) R(k, K_ - 1) += scale * M[k];
  }
  return R;
}

CVec HalfLineQuadrature::derivative(const CVec& f, int origin) const {
  CVec d(K_, 0.0);
  const int width = static_cast<int>(fd_.size());
  const int half = width / 2;
  if (K_ - origin < width) return d;
  for (int k = origin; k < K_; ++k) {
    int s = k - half;
    if (s < origin) s = origin;
    if (s + width > K_) s = K_ - width;
    const auto& c = fd_[k - s];
    cplx v = 0.0;
    for (int i = 0; i < width; ++i) v += c[i] * f[s + i];
    d[k] = v / h_;
  }
  return d;
}

const HalfLineQuadrature& quadrature_for(int K, double h) {
  thread_local std::map<std::pair<int, double>, std::unique_ptr<HalfLineQuadrature>> cache;
  auto key = std::make_pair(K, h);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<HalfLineQuadrature>(K, h)).first;
  return *it->second;
}

}  // namespace cmdnls
