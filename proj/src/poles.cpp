#include "cmdnls/poles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmdnls/soliton.hpp"

namespace cmdnls {

const char* to_string(PoleEvent e) {
  switch (e) {
    case PoleEvent::Completed: return "completed";
    case PoleEvent::Collision: return "collision";
    case PoleEvent::BoundaryApproach: return "boundary-approach";
  }
  return "unknown";
}

double collision_gap(const std::vector<cplx>& z) {
  double m = 0.0;
  for (auto v : z) m = std::max(m, std::abs(v));
  return 1e-6 * (1.0 + m);
}

PoleDerivative pole_rhs(const PoleState& s) {
  const size_t N = s.z.size();
  PoleDerivative d;
  d.dz.assign(N, 0.0);
  d.da.assign(N, 0.0);
  for (size_t k = 0; k < N; ++k) {
    if (std::abs(s.a[k]) < 1e-13) throw Error(ErrorKind::VanishingResidue, "residue a_" + std::to_string(k + 1) + " vanished");
    cplx sa = 0.0, sz = 0.0;
    for (size_t l = 0; l < N; ++l) {
      if (l == k) continue;
      const cplx w = s.z[k] - s.z[l];
      sa += (s.a[l] - s.a[k]) / (w * w);
      sz += s.a[l] / w;
    }
    d.da[k] = 2.0 * kI * sa;
    d.dz[k] = -2.0 * kI * sz / s.a[k];
  }
  return d;
}

namespace {

using Vec = std::vector<cplx>;

// Packed state y = (z_1..z_N, a_1..a_N).
Vec pack(const PoleState& s) {
  Vec y(s.z);
  y.insert(y.end(), s.a.begin(), s.a.end());
  return y;
}

PoleState unpack(double t, const Vec& y) {
  const size_t N = y.size() / 2;
  PoleState s;
  s.t = t;
  s.z.assign(y.begin(), y.begin() + N);
  s.a.assign(y.begin() + N, y.end());
  return s;
}

Vec f(double t, const Vec& y) {
  const PoleDerivative d = pole_rhs(unpack(t, y));
  Vec r(d.dz);
  r.insert(r.end(), d.da.begin(), d.da.end());
  return r;
}

Vec axpy(const Vec& y, double h, std::initializer_list<std::pair<double, const Vec*>> terms) {
  Vec r(y);
  for (auto [c, k] : terms)
    for (size_t i = 0; i < r.size(); ++i) r[i] += h * c * (*k)[i];
  return r;
}

bool collided(const PoleState& s) {
  const double gap = collision_gap(s.z);
  for (size_t j = 0; j < s.z.size(); ++j)
    for (size_t k = j + 1; k < s.z.size(); ++k)
      if (std::abs(s.z[j] - s.z[k]) < gap) return true;
  return false;
}

// Squared pair gaps (z_j - z_k)^2: symmetric under relabelling, hence smooth
// in t even through a collision, where the poles themselves behave like sqrt.
Vec squared_gaps(const PoleState& s) {
  Vec g;
  for (size_t j = 0; j < s.z.size(); ++j)
    for (size_t k = j + 1; k < s.z.size(); ++k) g.push_back((s.z[j] - s.z[k]) * (s.z[j] - s.z[k]));
  return g;
}

// Smallest |(z_j - z_k)^2| on [t1, t2] from the polynomial through the last
// (up to three) accepted points; returns (value, location).
std::pair<double, double> interpolated_min_gap2(const std::vector<std::pair<double, Vec>>& hist) {
  const size_t n = hist.size();
  const double t1 = hist[n - 2].first, t2 = hist[n - 1].first;
  double best = std::numeric_limits<double>::infinity(), where = t2;
  const int samples = 256;
  for (int i = 0; i <= samples; ++i) {
    const double t = t1 + (t2 - t1) * i / samples;
    for (size_t p = 0; p < hist.back().second.size(); ++p) {
      cplx v = 0.0;
      for (size_t a = 0; a < n; ++a) {
        double w = 1.0;
        for (size_t b = 0; b < n; ++b)
          if (b != a) w *= (t - hist[b].first) / (hist[a].first - hist[b].first);
        v += w * hist[a].second[p];
      }
      if (std::abs(v) < best) best = std::abs(v), where = t;
    }
  }
  return {best, where};
}

bool near_axis(const PoleState& s) {
  const double gap = collision_gap(s.z);
  return std::any_of(s.z.begin(), s.z.end(), [&](cplx v) { return v.imag() >= -gap; });
}

}  // namespace

PoleTrajectory integrate_poles(const PoleState& s0, const std::vector<double>& out_times, double tol) {
  // Dormand-Prince tableau.
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                      e6 = 22.0 / 525, e7 = -1.0 / 40;
  const double atol = 1e-12, rtol = tol;

  PoleTrajectory tr;
  if (s0.z.size() != s0.a.size() || s0.z.empty()) throw Error(ErrorKind::Arity, "pole state needs matching z and a");
  double t = s0.t;
  Vec y = pack(s0);
  tr.max_constraint = constraint_residual(s0.z, s0.a);
  if (collided(s0)) {
    tr.event = PoleEvent::Collision;
    tr.event_time = t;
    return tr;
  }
  Vec k1 = f(t, y);
  double h = 0.0, err_prev = 1e-4;
  std::vector<std::pair<double, Vec>> hist{{t, squared_gaps(s0)}};
  for (double target : out_times) {
    const double dir = target >= t ? 1.0 : -1.0;
    if (h == 0.0) h = dir * std::min(1e-2, std::max(std::abs(target - t), 1e-6));
    h = dir * std::abs(h);
    while (dir * (target - t) > 0) {
      bool last = false;
      double step = h;
      if (dir * (t + step - target) >= 0) {
        step = target - t;
        last = true;
      }
      if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(t)) && !last)
        throw Error(ErrorKind::Stiffness, "step size underflow at t = " + num17(t));
      const Vec k2 = f(t + c2 * step, axpy(y, step, {{a21, &k1}}));
      const Vec k3 = f(t + c3 * step, axpy(y, step, {{a31, &k1}, {a32, &k2}}));
      const Vec k4 = f(t + c4 * step, axpy(y, step, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      const Vec k5 = f(t + c5 * step, axpy(y, step, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      const Vec k6 = f(t + step, axpy(y, step, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      const Vec yn = axpy(y, step, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      const Vec k7 = f(t + step, yn);
      double err = 0.0;
      for (size_t i = 0; i < y.size(); ++i) {
        const cplx e = step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(yn[i]));
        err = std::max(err, std::abs(e) / sc);
      }
      if (err <= 1.0) {
        t = last ? target : t + step;
        y = yn;
        k1 = k7;
        ++tr.steps;
        const PoleState s = unpack(t, y);
        tr.max_constraint = std::max(tr.max_constraint, constraint_residual(s.z, s.a));
        // PI controller (exponents 0.7/5 and 0.4/5).
        const double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.14) * std::pow(err_prev, 0.08);
        err_prev = std::max(err, 1e-4);
        if (!last) h = step * std::clamp(fac, 0.2, 5.0);
        hist.emplace_back(t, squared_gaps(s));
        if (hist.size() > 3) hist.erase(hist.begin());
        double event_time = t;
        bool collision = collided(s);
        if (!collision && s.z.size() > 1) {
          const auto [g2, where] = interpolated_min_gap2(hist);
          // Near a collision the poles sit at a square-root branch point, so
          // integration errors eps move them by O(sqrt eps) while the squared
          // gap stays O(eps) accurate; the threshold applies to the latter.
          if (g2 < collision_gap(s.z)) collision = true, event_time = where;
        }
        if (collision || near_axis(s)) {
          tr.event = collision ? PoleEvent::Collision : PoleEvent::BoundaryApproach;
          tr.event_time = event_time;
          tr.states.push_back(s);
          return tr;
        }
      } else {
        ++tr.rejected;
        h = step * std::max(0.2, 0.9 * std::pow(err, -0.2));
      }
    }
    tr.states.push_back(unpack(t, y));
  }
  tr.event = PoleEvent::Completed;
  tr.event_time = t;
  return tr;
}

double acceleration_residual(const std::vector<PoleState>& traj) {
  if (traj.size() < 5) throw Error(ErrorKind::Arity, "acceleration residual needs at least 5 states");
  const double dt = traj[1].t - traj[0].t;
  for (size_t i = 1; i < traj.size(); ++i)
    if (std::abs(traj[i].t - traj[i - 1].t - dt) > 1e-9 * std::abs(dt))
      throw Error(ErrorKind::Arity, "acceleration residual needs uniformly spaced states");
  double worst = 0.0;
  const size_t N = traj[0].z.size();
  for (size_t i = 2; i + 2 < traj.size(); ++i)
    for (size_t k = 0; k < N; ++k) {
      const cplx zdd = (-traj[i - 2].z[k] + 16.0 * traj[i - 1].z[k] - 30.0 * traj[i].z[k] + 16.0 * traj[i + 1].z[k] -
                        traj[i + 2].z[k]) /
                       (12.0 * dt * dt);
      cplx force = 0.0;
      for (size_t l = 0; l < N; ++l)
        if (l != k) {
          const cplx w = traj[i].z[k] - traj[i].z[l];
          force += 8.0 / (w * w * w);
        }
      worst = std::max(worst, std::abs(zdd - force));
    }
  return worst;
}

}  // namespace cmdnls
