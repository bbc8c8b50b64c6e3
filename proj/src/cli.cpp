#include "cmdnls/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>

#include "cmdnls/lax.hpp"
#include "cmdnls/parallel.hpp"
#include "cmdnls/pde.hpp"
#include "cmdnls/poles.hpp"
#include "cmdnls/soliton.hpp"

namespace cmdnls {

namespace {

// --- config helpers -------------------------------------------------------------

void allow_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorKind::Config, where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw Error(ErrorKind::Config, "unknown key '" + it.key() + "' in " + where);
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::Config, std::string("key '") + key + "' has the wrong type");
  }
}

FrequencyGrid parse_grid(const json& cfg) {
  const json g = cfg.value("grid", json::object());
  allow_keys(g, {"L", "K"}, "grid");
  const double L = get_or(g, "L", 200.0);
  const int K = get_or(g, "K", 512);
  if (!(L > 0)) throw Error(ErrorKind::Config, "grid.L must be positive");
  return FrequencyGrid(L, K);
}

std::vector<cplx> parse_poles(const json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::Config, "poles must be a non-empty list of [re, im] pairs");
  std::vector<cplx> z;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw Error(ErrorKind::Config, "each pole must be a [re, im] pair");
    z.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return z;
}

SpectralData parse_spectral(const json& j) {
  allow_keys(j, {"phi", "rho", "lambda", "gamma"}, "spectral_data");
  SpectralData d;
  d.phi = get_or(j, "phi", 0.0);
  d.rho = get_or(j, "rho", 1.0);
  d.lambda = get_or(j, "lambda", std::vector<double>{});
  d.gamma = get_or(j, "gamma", std::vector<double>(d.lambda.size(), 0.0));
  try {
    validate_spectral_data(d);
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  return d;
}

// Uniform double in [0, 1) from the top 53 bits (portable across standard libraries).
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

SpectralData random_spectral_data(int N, std::mt19937_64& rng) {
  if (N < 1) throw Error(ErrorKind::Config, "random.N must be at least 1");
  SpectralData d;
  d.phi = kTwoPi * uniform01(rng);
  d.rho = 0.5 + 1.5 * uniform01(rng);
  d.lambda = {0.0};
  // Distinct nonzero eigenvalues, spaced at least 0.25 apart.
  double level = 0.0;
  for (int j = 1; j < N; ++j) {
    level += 0.25 + 0.75 * uniform01(rng);
    d.lambda.push_back(uniform01(rng) < 0.5 ? -level : level);
  }
  for (int j = 0; j < N; ++j) d.gamma.push_back(2.0 * uniform01(rng) - 1.0);
  return d;
}

// --- checks -----------------------------------------------------------------------

CheckResult upper_bound(const std::string& name, double measured, double tol, std::string detail = "") {
  return {name, measured <= tol ? "pass" : "fail", measured, tol, std::move(detail)};
}

CheckResult failed_check(const std::string& name, const std::string& detail) {
  return {name, "fail", std::nullopt, std::nullopt, detail};
}

// Runs `body`, turning library errors into a failing check so that a
// discretization-limited configuration still yields a report.
void guarded(ReportDocument& rep, const std::string& name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    rep.checks.push_back(failed_check(name, e.what()));
  }
}

std::string artifact(ReportDocument& rep, const std::string& dir, const std::string& name) {
  rep.artifacts.push_back(name);
  return join_path(dir, name);
}

void record_files(ReportDocument& rep, const std::vector<std::string>& paths) {
  for (const auto& p : paths) {
    rep.artifacts.push_back(std::filesystem::path(p).filename().string());
    if (p.size() > 4 && p.substr(p.size() - 4) == ".csv") {
      const std::string meta = p.substr(0, p.size() - 4) + ".json";
      if (std::filesystem::exists(meta)) rep.artifacts.push_back(std::filesystem::path(meta).filename().string());
    }
  }
}

double max_overlap_defect(const EigenSystem& eig) {
  double worst = 0.0;
  for (double o : eig.overlaps) worst = std::max(worst, std::abs(o - 1.0));
  return worst;
}

void spectrum_checks(ReportDocument& rep, const ChiralField& u, int N, const EigenSystem& eig) {
  const double mu = mass(u);
  rep.checks.push_back(upper_bound("mass_quantization", std::abs(mu - kTwoPi * N) / (kTwoPi * N), 1e-6));
  rep.checks.push_back({"bound_state_count", eig.count() == N ? "pass" : "fail", double(eig.count()), double(N),
                        "expected " + std::to_string(N)});
  rep.checks.push_back(eig.count() > 0 ? upper_bound("overlap_identity", max_overlap_defect(eig), 0.05)
                                       : failed_check("overlap_identity", "no bound states"));
}

// --- synth --------------------------------------------------------------------------

void cmd_synth(ReportDocument& rep, const json& cfg, const std::string& out) {
  allow_keys(cfg, {"grid", "poles", "branch", "theta", "spectral_data", "t", "spectrum", "out", "seed"}, "config");
  const FrequencyGrid g = parse_grid(cfg);
  const bool from_poles = cfg.contains("poles"), from_data = cfg.contains("spectral_data");
  if (from_poles == from_data) throw Error(ErrorKind::Config, "synth needs exactly one of poles or spectral_data");
  std::vector<cplx> z;
  SpectralData d;
  if (from_poles) {
    z = parse_poles(cfg["poles"]);
    for (cplx p : z)
      if (!(p.imag() < 0)) throw Error(ErrorKind::Config, "poles must lie in the lower half-plane");
  } else {
    d = parse_spectral(cfg["spectral_data"]);
  }
  const unsigned branch = get_or(cfg, "branch", 0u);
  const std::optional<double> theta =
      cfg.contains("theta") ? std::optional<double>(get_or(cfg, "theta", 0.0)) : std::nullopt;
  const double t = get_or(cfg, "t", 0.0);
  const bool spectrum = get_or(cfg, "spectrum", true);

  guarded(rep, "synthesis", [&] {
    ChiralField u;
    std::vector<cplx> poles, residues;
    bool collision = false;
    if (from_poles) {
      const RationalSoliton s = residues_from_poles(z, branch, theta);
      u = to_field(s, g);
      poles = s.poles;
      if (s.simple()) residues = s.residues();
      collision = !s.simple();
    } else {
      u = field_from_spectral(d, t, g);
      const PoleResidues pr = residues_at_time(d, t);
      poles = pr.poles;
      residues = pr.residues;
      collision = pr.collision;
    }
    const int N = from_poles ? static_cast<int>(z.size()) : d.N();
    write_snapshot(artifact(rep, out, "field.csv"), u);
    rep.artifacts.push_back("field.json");
    CsvWriter csv(pole_csv_header());
    append_pole_rows(csv, t, poles, residues, collision);
    csv.save(artifact(rep, out, "poles.csv"));
    if (!spectrum) {
      rep.checks.push_back(upper_bound("mass_quantization", std::abs(mass(u) - kTwoPi * N) / (kTwoPi * N), 1e-6));
      return;
    }
    const EigenSystem eig = bound_states(assemble_lax(u));
    std::optional<SpectralData> extracted;
    std::string note;
    try {
      extracted = extract_spectral_data(u).data;
    } catch (const Error& e) {
      note = e.what();
    }
    json sj = spectrum_json(mass(u), eig, extracted ? &*extracted : nullptr);
    if (!note.empty()) sj["extraction_error"] = note;
    write_text(artifact(rep, out, "spectrum.json"), dump_json(sj) + "\n");
    spectrum_checks(rep, u, N, eig);
  });
}

// --- evolve ---------------------------------------------------------------------------

ChiralField parse_initial(const json& j, const FrequencyGrid& g) {
  allow_keys(j, {"poles", "branch", "theta", "spectral_data", "t", "transform", "mass", "boost"}, "initial");
  const int kinds = int(j.contains("poles")) + int(j.contains("spectral_data")) + int(j.contains("transform"));
  if (kinds != 1) throw Error(ErrorKind::Config, "initial needs exactly one of poles, spectral_data or transform");
  ChiralField u;
  if (j.contains("poles")) {
    const auto z = parse_poles(j["poles"]);
    const std::optional<double> theta =
        j.contains("theta") ? std::optional<double>(get_or(j, "theta", 0.0)) : std::nullopt;
    u = to_field(residues_from_poles(z, get_or(j, "branch", 0u), theta), g);
  } else if (j.contains("spectral_data")) {
    u = field_from_spectral(parse_spectral(j["spectral_data"]), get_or(j, "t", 0.0), g);
  } else {
    const json& tr = j["transform"];
    allow_keys(tr, {"power", "rate", "gaussian"}, "initial.transform");
    const double p = get_or(tr, "power", 1.0), a = get_or(tr, "rate", 0.0), b = get_or(tr, "gaussian", 0.0);
    if (p < 0 || a < 0 || b < 0 || (a == 0 && b == 0))
      throw Error(ErrorKind::Config, "transform needs power >= 0 and a positive rate or gaussian width");
    u = ChiralField::from_transform(g, [=](double xi) { return cplx(std::pow(xi, p) * std::exp(-a * xi - b * xi * xi)); });
  }
  if (j.contains("mass")) {
    const double target = get_or(j, "mass", 0.0);
    if (!(target > 0)) throw Error(ErrorKind::Config, "initial.mass must be positive");
    u = std::sqrt(target / mass(u)) * u;
  }
  if (j.contains("boost")) u = galilean_boost(u, get_or(j, "boost", 0) * g.dxi());
  return u;
}

void cmd_evolve(ReportDocument& rep, const json& cfg, const std::string& out) {
  allow_keys(cfg, {"grid", "initial", "dt", "T", "scheme", "stride", "tolerances", "out", "seed"}, "config");
  const FrequencyGrid g = parse_grid(cfg);
  if (!cfg.contains("initial")) throw Error(ErrorKind::Config, "evolve needs an initial datum");
  const ChiralField u0 = parse_initial(cfg["initial"], g);
  EvolutionConfig ec;
  ec.dt = get_or(cfg, "dt", 1e-3);
  ec.T = get_or(cfg, "T", 1.0);
  ec.scheme = parse_scheme(get_or(cfg, "scheme", std::string("IFRK4")));
  ec.stride = get_or(cfg, "stride", 100);
  ec.validate();
  std::map<std::string, double> tol = {{"mass", 1e-10}, {"u_hat_0", 1e-10}};
  const json tj = cfg.value("tolerances", json::object());
  allow_keys(tj, {"mass", "momentum", "energy", "I0", "I1", "I2", "I3", "I4", "u_hat_0"}, "tolerances");
  for (auto it = tj.begin(); it != tj.end(); ++it) tol[it.key()] = get_or(tj, it.key().c_str(), 0.0);

  guarded(rep, "evolution", [&] {
    const Trajectory traj = evolve(u0, ec);
    record_files(rep, write_trajectory(out, traj));
    json cj;
    cj["event"] = traj.event;
    cj["last_valid_time"] = traj.last_valid_time;
    cj["step_warning"] = traj.step_warning;
    cj["box_warning"] = traj.box_warning;
    cj["scheme"] = to_string(ec.scheme);
    json drifts = json::object();
    if (traj.event == "completed") {
      for (const Drift& dr : conservation_report(traj)) {
        drifts[dr.name] = dr.value;
        const double t = tol.count(dr.name) ? tol[dr.name] : 1e-6;
        rep.checks.push_back(upper_bound("drift_" + dr.name, dr.value, t));
      }
    } else {
      rep.checks.push_back({"conservation", "skipped", std::nullopt, std::nullopt,
                            "event " + traj.event + " at t = " + num17(traj.last_valid_time)});
    }
    cj["drifts"] = drifts;
    write_text(artifact(rep, out, "conservation.json"), dump_json(cj) + "\n");
  });
}

// --- growth ----------------------------------------------------------------------------

std::vector<double> parse_times(const json& cfg) {
  if (cfg.contains("t_list") && cfg.contains("t_range"))
    throw Error(ErrorKind::Config, "give either t_list or t_range, not both");
  if (cfg.contains("t_list")) return get_or(cfg, "t_list", std::vector<double>{});
  const json r = cfg.value("t_range", json::object());
  allow_keys(r, {"start", "stop", "count"}, "t_range");
  const double a = get_or(r, "start", 50.0), b = get_or(r, "stop", 500.0);
  const int n = get_or(r, "count", 16);
  if (!(a > 0) || !(b > a) || n < 2) throw Error(ErrorKind::Config, "t_range needs 0 < start < stop and count >= 2");
  std::vector<double> t;
  for (int i = 0; i < n; ++i) t.push_back(a * std::pow(b / a, double(i) / (n - 1)));
  return t;
}

void growth_checks(ReportDocument& rep, const GrowthScan& scan, int N, size_t nt) {
  for (size_t j = 0; j < scan.s_list.size(); ++j) {
    const std::string tag = "s=" + num17(scan.s_list[j]);
    const double frac = nt ? double(scan.skipped[j]) / double(nt) : 1.0;
    rep.checks.push_back(upper_bound("skipped_fraction " + tag, frac, 0.1));
    const double expected = N >= 2 ? 2.0 * scan.s_list[j] : 0.0;
    const double tol = N >= 2 ? 0.05 * expected : 0.05;
    const double slope = scan.slopes[j];
    rep.checks.push_back(std::isfinite(slope)
                             ? upper_bound("growth_exponent " + tag, std::abs(slope - expected), tol,
                                           "slope " + num17(slope) + ", expected " + num17(expected))
                             : failed_check("growth_exponent " + tag, "too few samples to fit"));
  }
}

void cmd_growth(ReportDocument& rep, const json& cfg, const std::string& out) {
  allow_keys(cfg, {"spectral_data", "random", "s_list", "t_list", "t_range", "out", "seed"}, "config");
  if (cfg.contains("spectral_data") == cfg.contains("random"))
    throw Error(ErrorKind::Config, "growth needs exactly one of spectral_data or random");
  SpectralData d;
  if (cfg.contains("spectral_data")) {
    d = parse_spectral(cfg["spectral_data"]);
  } else {
    allow_keys(cfg["random"], {"N"}, "random");
    std::mt19937_64 rng(rep.seed);
    d = random_spectral_data(get_or(cfg["random"], "N", 2), rng);
  }
  const auto s_list = get_or(cfg, "s_list", std::vector<double>{0.5, 1.0, 2.0});
  for (double s : s_list)
    if (!(s > 0)) throw Error(ErrorKind::Config, "s_list entries must be positive");
  const auto t_list = parse_times(cfg);

  guarded(rep, "growth", [&] {
    const GrowthScan scan = growth_scan(d, s_list, t_list);
    CsvWriter csv({"t", "s", "norm", "skipped"});
    for (const auto& smp : scan.samples) csv.row({num17(smp.t), num17(smp.s), num17(smp.norm), smp.skipped ? "1" : "0"});
    csv.save(artifact(rep, out, "growth.csv"));
    json ej;
    ej["spectral_data"] = spectral_data_json(d);
    ej["exponents"] = json::array();
    for (size_t j = 0; j < s_list.size(); ++j)
      ej["exponents"].push_back({{"s", s_list[j]},
                                 {"slope", scan.slopes[j]},
                                 {"stderr", scan.slope_stderr[j]},
                                 {"band", json::array({scan.slopes[j] - 2 * scan.slope_stderr[j],
                                                       scan.slopes[j] + 2 * scan.slope_stderr[j]})},
                                 {"skipped", scan.skipped[j]},
                                 {"expected", d.N() >= 2 ? 2 * s_list[j] : 0.0}});
    write_text(artifact(rep, out, "exponents.json"), dump_json(ej) + "\n");
    growth_checks(rep, scan, d.N(), t_list.size());
  });
}

// --- poles ------------------------------------------------------------------------------

struct PoleComparison {
  double deviation = 0.0, constraint = 0.0;
  PoleTrajectory ode;
  std::vector<double> times;
  std::vector<PoleResidues> factory;
};

// Factory poles/residues vs the Calogero-Moser integration from t_start; each
// ODE pole is matched to the nearest factory pole.
PoleComparison compare_pole_oracles(const SpectralData& d, double t0, double t1, int samples, double tol) {
  PoleComparison c;
  for (int i = 0; i < samples; ++i) c.times.push_back(t0 + (t1 - t0) * i / (samples - 1));
  for (double t : c.times) c.factory.push_back(residues_at_time(d, t));
  if (c.factory.front().collision) throw Error(ErrorKind::DegenerateConfiguration, "poles collide at t_start");
  const PoleState s0{t0, c.factory.front().poles, c.factory.front().residues};
  c.ode = integrate_poles(s0, std::vector<double>(c.times.begin() + 1, c.times.end()), tol);
  c.constraint = c.ode.max_constraint;
  for (size_t i = 0; i < c.ode.states.size(); ++i) {
    const PoleState& s = c.ode.states[i];
    const PoleResidues& f = c.factory[i + 1];
    if (f.collision) continue;
    for (size_t k = 0; k < s.z.size(); ++k) {
      size_t best = 0;
      for (size_t m = 1; m < f.poles.size(); ++m)
        if (std::abs(f.poles[m] - s.z[k]) < std::abs(f.poles[best] - s.z[k])) best = m;
      c.deviation = std::max({c.deviation, std::abs(f.poles[best] - s.z[k]), std::abs(f.residues[best] - s.a[k])});
    }
  }
  return c;
}

void cmd_poles(ReportDocument& rep, const json& cfg, const std::string& out) {
  allow_keys(cfg, {"spectral_data", "t_start", "t_end", "samples", "tol", "out", "seed"}, "config");
  if (!cfg.contains("spectral_data")) throw Error(ErrorKind::Config, "poles needs spectral_data");
  const SpectralData d = parse_spectral(cfg["spectral_data"]);
  const double t0 = get_or(cfg, "t_start", 0.0), t1 = get_or(cfg, "t_end", 5.0), tol = get_or(cfg, "tol", 1e-10);
  const int samples = get_or(cfg, "samples", 51);
  if (samples < 2 || !(t1 != t0) || !(tol > 0))
    throw Error(ErrorKind::Config, "poles needs samples >= 2, t_end != t_start and tol > 0");

  guarded(rep, "pole_tracks", [&] {
    const PoleComparison c = compare_pole_oracles(d, t0, t1, samples, tol);
    CsvWriter fac(pole_csv_header()), ode(pole_csv_header());
    for (size_t i = 0; i < c.times.size(); ++i)
      append_pole_rows(fac, c.times[i], c.factory[i].poles, c.factory[i].residues, c.factory[i].collision);
    append_pole_rows(ode, c.times.front(), c.factory.front().poles, c.factory.front().residues, false);
    for (const auto& s : c.ode.states) append_pole_rows(ode, s.t, s.z, s.a, false);
    fac.save(artifact(rep, out, "poles_factory.csv"));
    ode.save(artifact(rep, out, "poles_ode.csv"));
    if (c.ode.event != PoleEvent::Completed)
      rep.checks.push_back(failed_check("ode_completed", std::string("stopped by ") + to_string(c.ode.event) +
                                                             " at t = " + num17(c.ode.event_time)));
    rep.checks.push_back(upper_bound("oracle_deviation", c.deviation, 1e-6));
    rep.checks.push_back(upper_bound("constraint_residual", c.constraint, 1e-8));
  });
}

// --- check ------------------------------------------------------------------------------

void cmd_check(ReportDocument& rep, const json& cfg, const std::string& out) {
  allow_keys(cfg, {"grid", "out", "seed"}, "config");
  const FrequencyGrid g = parse_grid(cfg);
  std::mt19937_64 rng(rep.seed);

  guarded(rep, "ground_state", [&] {
    const ChiralField R = to_field(residues_from_poles({-kI}), g);
    rep.checks.push_back(upper_bound("ground_state_mass", std::abs(mass(R) - kTwoPi) / kTwoPi, 1e-10));
    rep.checks.push_back(upper_bound("ground_state_energy", std::abs(energy(R)), 1e-8));
    rep.checks.push_back(upper_bound("ground_state_rhs", std::sqrt(mass(pde_rhs(R))), 1e-6));
  });
  guarded(rep, "two_soliton_spectrum", [&] {
    const ChiralField u = to_field(residues_from_poles({-kI, -2.0 * kI}), g);
    const EigenSystem eig = bound_states(assemble_lax(u));
    spectrum_checks(rep, u, 2, eig);
    double nonzero = 0.0;
    for (double l : eig.bound_eigenvalues)
      if (std::abs(l) > std::abs(nonzero)) nonzero = l;
    rep.checks.push_back(upper_bound("two_soliton_eigenvalue", std::abs(nonzero + 1.0 / std::sqrt(2.0)), 1e-3));
    rep.checks.push_back(upper_bound("round_trip", potential_roundtrip(u), 1e-5));
  });
  guarded(rep, "explicit_vs_general", [&] {
    const double g1 = 0.3, g2 = -0.2, rho = 1.0, lam = 1.0, phi = 0.4;
    const SpectralData d{phi, rho, {0.0, lam}, {g1, g2}};
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double t = 5.0 * uniform01(rng), x = 20.0 * uniform01(rng) - 10.0;
      worst = std::max(worst, std::abs(two_soliton_explicit(g1, g2, rho, lam, phi, t, x) - eval_soliton(d, t, x)));
    }
    rep.checks.push_back(upper_bound("explicit_vs_general", worst, 1e-10));
  });
  const SpectralData pair{0.0, 1.0, {0.0, 1.0}, {0.0, 0.0}};
  guarded(rep, "pole_asymptotics", [&] {
    const double t = 100.0;
    const auto z = poles_at_time(pair, t);
    cplx z2 = z[0];
    for (cplx p : z)
      if (std::abs(p.imag()) < std::abs(z2.imag())) z2 = p;
    const double predicted = -pair.rho / (4.0 * t * t);
    rep.checks.push_back(upper_bound("pole_asymptotics", std::abs(z2.imag() / predicted - 1.0), 0.1));
  });
  guarded(rep, "pole_oracles", [&] {
    const PoleComparison c = compare_pole_oracles(pair, 0.0, 5.0, 51, 1e-10);
    rep.checks.push_back(upper_bound("pole_oracle_deviation", c.deviation, 1e-6));
    rep.checks.push_back(upper_bound("pole_constraint", c.constraint, 1e-8));
  });
  guarded(rep, "operator_bounds", [&] {
    const ChiralField R = to_field(residues_from_poles({-kI}), g);
    const double a = 0.5 + uniform01(rng), w = 2.0 * uniform01(rng);
    const ChiralField f = ChiralField::from_transform(g, [=](double xi) { return xi * std::exp(-a * xi) * std::polar(1.0, w * xi); });
    const OperatorBoundReport b = operator_bound_checks(R, f);
    rep.checks.push_back(upper_bound("toeplitz_bound", b.toeplitz_lhs - b.toeplitz_rhs, 1e-10));
    rep.checks.push_back(upper_bound("hankel_bound", b.hankel_lhs - b.hankel_rhs, 1e-10));
  });
  guarded(rep, "lax_rhs", [&] {
    const ChiralField u = to_field(residues_from_poles({-kI, -2.0 * kI}), g);
    const Eigen::Map<const Eigen::VectorXcd> v(u.coeffs.data(), g.K);
    const Eigen::VectorXcd b = assemble_B_tilde(u) * v;
    const ChiralField r = pde_rhs(u);
    double worst = 0.0, scale = 0.0;
    for (int k = 0; k < g.K; ++k) {
      worst = std::max(worst, std::abs(b(k) - r.coeffs[k]));
      scale = std::max(scale, std::abs(r.coeffs[k]));
    }
    rep.checks.push_back(upper_bound("rhs_equals_B_tilde_u", worst / std::max(scale, 1.0), 1e-8));
  });
  guarded(rep, "static_evolution", [&] {
    const ChiralField R = to_field(residues_from_poles({-kI}), g);
    EvolutionConfig ec;
    ec.dt = 1e-3;
    ec.T = 1.0;
    ec.stride = 100;
    const Trajectory traj = evolve(R, ec);
    if (traj.event != "completed") throw Error(ErrorKind::NumericalBreakdown, "static evolution blew up");
    double dev = 0.0;
    for (const auto& u : traj.snapshots) dev = std::max(dev, std::sqrt(mass(u - R)));
    rep.checks.push_back(upper_bound("static_deviation", dev, 1e-8));
    for (const Drift& dr : conservation_report(traj))
      if (dr.name == "mass") rep.checks.push_back(upper_bound("static_mass_drift", dr.value, 1e-10));
  });
  guarded(rep, "growth", [&] {
    std::vector<double> ts;
    for (int i = 0; i < 16; ++i) ts.push_back(50.0 * std::pow(10.0, i / 15.0));
    const GrowthScan scan = growth_scan(pair, {1.0}, ts);
    growth_checks(rep, scan, 2, ts.size());
  });
  (void)out;
}

}  // namespace

bool ReportDocument::failed() const {
  if (!error.empty()) return true;
  for (const auto& c : checks)
    if (c.status == "fail") return true;
  return false;
}

json ReportDocument::to_json() const {
  json j;
  j["command"] = command;
  j["seed"] = seed;
  j["config"] = config;
  j["checks"] = json::array();
  for (const auto& c : checks) {
    json cj{{"name", c.name}, {"status", c.status}};
    cj["measured"] = c.measured ? json(*c.measured) : json(nullptr);
    cj["tolerance"] = c.tolerance ? json(*c.tolerance) : json(nullptr);
    if (!c.detail.empty()) cj["detail"] = c.detail;
    j["checks"].push_back(cj);
  }
  j["artifacts"] = artifacts;
  if (!error.empty()) j["error"] = error;
  j["status"] = failed() ? "fail" : "pass";
  return j;
}

ReportDocument run_command(const std::string& command, const json& config, const std::string& out_dir,
                           std::uint64_t seed) {
  ReportDocument rep;
  rep.command = command;
  rep.config = config;
  rep.seed = seed;
  if (command == "synth")
    cmd_synth(rep, config, out_dir);
  else if (command == "evolve")
    cmd_evolve(rep, config, out_dir);
  else if (command == "growth")
    cmd_growth(rep, config, out_dir);
  else if (command == "poles")
    cmd_poles(rep, config, out_dir);
  else if (command == "check")
    cmd_check(rep, config, out_dir);
  else
    throw Error(ErrorKind::Config, "unknown command '" + command + "'");
  return rep;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Chiral CM-DNLS experiments"};
  std::string command, config_path, out_dir;
  std::uint64_t seed = 0;
  app.add_option("command", command, "synth, evolve, growth, poles or check")
      ->required()
      ->check(CLI::IsMember({"synth", "evolve", "growth", "poles", "check"}));
  app.add_option("--config", config_path, "JSON config file")->required();
  auto* out_opt = app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "seed for randomized sweeps");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  json config;
  ReportDocument rep;
  const auto start = std::chrono::steady_clock::now();
  try {
    config = json::parse(read_text(config_path));
    if (!config.is_object()) throw Error(ErrorKind::Config, "config must be a JSON object");
    if (!out_opt->count()) out_dir = get_or(config, "out", std::string("cmdnls_out"));
    if (!seed_opt->count()) seed = get_or(config, "seed", std::uint64_t{0});
    rep = run_command(command, config, out_dir, seed);
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  try {
    write_text(join_path(out_dir, "report.json"), dump_json(rep.to_json()) + "\n");
    write_text(join_path(out_dir, "timing.json"), dump_json(json{{"command", command}, {"wall_time_s", wall}}) + "\n");
  } catch (const Error& e) {
    std::cerr << "cannot write report: " << e.what() << "\n";
    return kExitUsage;
  }
  for (const auto& c : rep.checks)
    std::cout << c.status << "  " << c.name << (c.measured ? "  measured=" + num17(*c.measured) : "")
              << (c.tolerance ? "  tol=" + num17(*c.tolerance) : "") << (c.detail.empty() ? "" : "  (" + c.detail + ")")
              << "\n";
  std::cout << (rep.failed() ? "FAIL" : "PASS") << " " << command << " -> " << out_dir << "\n";
  return rep.failed() ? kExitCheckFailed : kExitPass;
}

}  // namespace cmdnls
