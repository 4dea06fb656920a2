// inls_lab: ground states, verification suites, evolutions, sweeps and exponent tables.
//
// Exit codes: 0 success, 1 a check failed, 2 usage or precondition error.

#include "inls/inls.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <boost/uuid/detail/sha1.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace inls;

namespace {

/// Usage problems that are not CLI11 parse errors (bad --init, empty lists, unreadable files).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw UsageError("cannot write " + (dir / name).string());
  return out;
}

void write_json(const fs::path& dir, const std::string& name, const ordered_json& j) {
  open_out(dir, name) << j.dump(2) << "\n";
}

ordered_json params_json(const Params& P) { return {{"N", P.N}, {"b", P.b}, {"p", P.p}}; }

std::string sha1_hex(const RadialField& u) {
  boost::uuids::detail::sha1 h;
  h.process_bytes(u.values.data(), u.values.size() * sizeof(cplx));
  boost::uuids::detail::sha1::digest_type d;
  h.get_digest(d);
  std::ostringstream s;
  for (unsigned int w : d) {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", w);
    s << buf;
  }
  return s.str();
}

// ---------------------------------------------------------------------------------------
// Shared flags

struct ParamFlags {
  int N = 3;
  double b = 1.0;
  double p = 3.0;
  Params get() const {
    Params P{N, b, p};
    P.validate();
    return P;
  }
  void attach(CLI::App* app) {
    app->add_option("--dim", N, "spatial dimension N >= 2")->required();
    app->add_option("--b", b, "weight exponent b > 0")->required();
    app->add_option("--p", p, "nonlinearity power p > 1")->required();
  }
};

struct RunFlags {
  double t_end = 2.0, dt = 1e-3, r_max = 40.0, dr = 5e-3;
  void attach(CLI::App* app) {
    app->add_option("--tend", t_end, "final time")->capture_default_str();
    app->add_option("--dt", dt, "time step")->capture_default_str();
    app->add_option("--rmax", r_max, "outer radius (Dirichlet wall)")->capture_default_str();
    app->add_option("--dr", dr, "radial spacing")->capture_default_str();
  }
  StepperConfig config() const {
    StepperConfig c;
    c.t_end = t_end;
    c.dt = dt;
    c.r_max = r_max;
    c.dr = dr;
    return c;
  }
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("not a number in list: '" + item + "'");
    }
  }
  return out;
}

double parse_number(const std::string& text, const std::string& what) {
  auto v = parse_list(text);
  if (v.size() != 1) throw UsageError(what + " needs a single number, got '" + text + "'");
  return v[0];
}

Cutoff parse_cutoff(const std::string& spec) {
  if (spec == "quadratic") return Cutoff::quadratic();
  auto colon = spec.find(':');
  if (colon != std::string::npos) {
    std::string kind = spec.substr(0, colon);
    double R = parse_number(spec.substr(colon + 1), "cutoff radius");
    if (kind == "phi") return Cutoff::phi(R);
    if (kind == "psi") return Cutoff::psi(R);
  }
  throw UsageError("cutoff must be quadratic, phi:<R> or psi:<R>, got '" + spec + "'");
}

/// Ground state (Q, or W at energy-critical p) tabulated on the evolution grid.
GroundState comparison_ground(const Params& P, GridPtr grid) {
  if (is_energy_critical(P)) return energy_critical_ground(P, grid);
  return shoot(P);
}

RadialField read_profile_csv(const std::string& path, GridPtr grid) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read initial datum file '" + path + "'");
  std::string header;
  std::getline(in, header);
  std::vector<double> r, re, im;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto v = parse_list(line);
    if (v.size() < 2) throw UsageError("initial datum rows need r,re[,im]: '" + line + "'");
    if (!r.empty() && !(v[0] > r.back())) throw UsageError("initial datum radii must increase");
    r.push_back(v[0]);
    re.push_back(v[1]);
    im.push_back(v.size() > 2 ? v[2] : 0.0);
  }
  if (r.size() < 2) throw UsageError("initial datum file has fewer than two rows");
  RadialField u(grid);
  std::size_t j = 0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    double x = grid->r(i);
    if (x < r.front() || x > r.back()) continue;  // zero outside the sampled range
    while (j + 2 < r.size() && r[j + 1] < x) ++j;
    double f = (x - r[j]) / (r[j + 1] - r[j]);
    u[i] = cplx((1 - f) * re[j] + f * re[j + 1], (1 - f) * im[j] + f * im[j + 1]);
  }
  return u;
}

struct InitialDatum {
  RadialField u;
  std::string spec;
};

InitialDatum make_initial(const std::string& spec, const Params& P, GridPtr grid,
                          const std::optional<GroundState>& ground) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) throw UsageError("--init must be cQ:<c>, gaussian:<amp> or file:<path>");
  std::string kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
  if (kind == "cQ") {
    double c = parse_number(arg, "cQ amplitude");
    if (!ground) throw UsageError("cQ initial data need a ground state for these parameters");
    return {resample(ground->profile, grid).scaled(c), spec};
  }
  if (kind == "gaussian") {
    double a = parse_number(arg, "gaussian amplitude");
    return {RadialField::sample(grid, [a](double r) { return a * std::exp(-r * r); }), spec};
  }
  if (kind == "file") return {read_profile_csv(arg, grid), spec};
  (void)P;
  throw UsageError("unknown --init kind '" + kind + "'");
}

// ---------------------------------------------------------------------------------------
// ground-state

int cmd_ground_state(const ParamFlags& pf, double r_max, double dr, double tol, const fs::path& out) {
  Params P = pf.get();
  ordered_json j;
  j["schema"] = 1;
  j["params"] = params_json(P);
  bool pass = true;
  std::ofstream csv;
  if (is_energy_critical(P)) {
    GridPtr grid = RadialGrid::make(P.N, r_max, dr);
    WReport rep = explicit_w_report(P, grid);
    double id_pot = std::abs(rep.potential - rep.grad_sq) / rep.grad_sq;
    double id_energy = std::abs(rep.energy - (P.b + 2) / (2.0 * P.N + 2 * P.b) * rep.grad_sq) / rep.grad_sq;
    j["kind"] = "explicit_W";
    j["shoot_value"] = 1.0;
    j["mass"] = mass(explicit_W(P, grid));
    j["grad_sq"] = rep.grad_sq;
    j["potential"] = rep.potential;
    j["energy"] = rep.energy;
    j["sharp_sobolev_constant"] = rep.c_sha;
    j["stationary_residual"] = rep.residual;
    j["potential_equals_grad_sq_residual"] = id_pot;
    j["energy_relation_residual"] = id_energy;
    pass = rep.residual < 1e-5 && id_pot < 1e-5 && id_energy < 1e-5;
    std::printf("W: stationary residual %.3e, potential vs |grad W|^2 %.3e, E(W) relation %.3e\n", rep.residual,
                id_pot, id_energy);
    csv = open_out(out, "profile.csv");
    csv << "r,Q\n";
    RadialField W = explicit_W(P, grid);
    for (std::size_t i = 0; i < grid->size(); ++i) csv << fmt(grid->r(i)) << "," << fmt(W[i].real()) << "\n";
  } else {
    GroundState Q = shoot(P, {.r_max = r_max, .dr = dr, .tol = tol});
    auto [r1, r2] = pohozaev_residuals(Q.profile, P);
    double w = weinstein(Q.profile, P);
    j["kind"] = "shooting";
    j["shoot_value"] = Q.shoot_value;
    j["mass"] = Q.mass;
    j["grad_sq"] = Q.grad_sq;
    j["potential"] = Q.potential;
    j["ode_residual"] = Q.ode_residual;
    j["decay_rate"] = Q.decay_rate;
    j["r_match"] = Q.r_match;
    j["pohozaev_residual_mass"] = r1;
    j["pohozaev_residual_potential"] = r2;
    j["weinstein"] = w;
    pass = r1 < 1e-4 && r2 < 1e-4;
    std::printf("Q(0) = %.12e, Pohozaev residuals %.3e %.3e\n", Q.shoot_value, r1, r2);
    if (!exponents_of(P).sigma_infinite()) {
      double c = c_opt_closed_form(Q.grad_norm(), Q.mass_norm(), P);
      j["c_opt_closed_form"] = c;
      j["c_opt_agreement"] = std::abs(w - c) / c;
      pass = pass && std::abs(w - c) / c < 1e-4;
      std::printf("weinstein(Q) = %.12e, closed-form C_opt = %.12e\n", w, c);
    } else {
      std::printf("weinstein(Q) = %.12e (sharp constant at mass-critical p)\n", w);
    }
    csv = open_out(out, "profile.csv");
    csv << "r,Q\n";
    for (std::size_t i = 0; i < Q.profile.size(); ++i)
      csv << fmt(Q.profile.grid->r(i)) << "," << fmt(Q.profile[i].real()) << "\n";
  }
  j["pass"] = pass;
  write_json(out, "ground_state.json", j);
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------------------
// verify

struct Check {
  std::string name, ref;
  bool pass;
  double value, tolerance;
};

void add(std::vector<Check>& out, std::string name, std::string ref, double value, double tol, bool pass) {
  out.push_back({std::move(name), std::move(ref), pass, value, tol});
}

std::vector<Check> suite_inequalities() {
  std::vector<Check> c;
  Params P{3, 1.0, 4.0};
  GroundState Q = shoot(P);
  double c_opt = c_opt_closed_form(Q.grad_norm(), Q.mass_norm(), P);
  add(c, "gn_check_ground_state", "sharp weighted Gagliardo-Nirenberg constant", gn_check(Q.profile, P, c_opt), 1e-4,
      std::abs(gn_check(Q.profile, P, c_opt) - 1.0) < 1e-4);
  auto gauss = RadialField::sample(Q.profile.grid, [](double r) { return std::exp(-r * r); });
  double gg = gn_check(gauss, P, c_opt);
  add(c, "gn_check_gaussian_below_one", "weighted Gagliardo-Nirenberg inequality", gg, 1e-6, gg <= 1.0 + 1e-6);
  auto g8 = RadialGrid::make(3, 8.0, 1e-3);
  auto f = RadialField::sample(g8, [](double r) { return std::exp(-r * r); });
  double s21 = radial_sobolev_21(f);
  double s21_exact = std::sqrt(0.5) * std::exp(-0.5) / std::pow(1.5 * M_PI * std::sqrt(M_PI / 2) * std::pow(M_PI / 2, 1.5), 0.25);
  add(c, "radial_sobolev_gaussian", "radial Sobolev inequality", s21, 1e-4, std::abs(s21 - s21_exact) < 1e-4);
  add(c, "radial_sobolev_endpoint_s1", "fractional radial Sobolev inequality", radial_sobolev_210(f, 1.0), 0.0,
      radial_sobolev_210(f, 1.0) == radial_sobolev_23(f));
  double h = hardy_ratio(f, 2.0);
  add(c, "hardy_gaussian", "Hardy inequality, constant r/(N-r)", h, 2.0, h <= 2.0 + 1e-6);
  Rational theta = interpolation_theta(exponents::RationalParams{3, Rational(1), Rational(4)});
  add(c, "interpolation_theta_3_1_4", "interpolation between radial Sobolev endpoints", to_double(theta), 0.0,
      theta == Rational(3, 5));
  auto w = divergence_witness({2, 2.0, 2.0}, {8, 16, 32, 64});
  add(c, "divergence_witness_slope", "failure of the inequality below p = 1 + 2b/(N-1)", w.fitted_slope, 0.05,
      std::abs(w.fitted_slope - w.predicted_slope) / w.predicted_slope < 0.05);
  return c;
}

std::vector<Check> suite_virial() {
  std::vector<Check> c;
  Params P{3, 1.0, 3.0};
  for (double R : {1.0, 2.0, 4.0, 8.0}) {
    auto g = RadialGrid::make(3, 3.0 * R, 3.0 * R / 1e5);
    std::string tag = "_R" + std::to_string(static_cast<int>(R));
    bool phi_ok = true, psi_ok = true, cf_ok = true;
    double mismatch = 0.0;
    try {
      build_zeta_theta_phi(R, g);
    } catch (const std::logic_error&) {
      phi_ok = false;
    }
    try {
      build_vartheta_psi(R, g);
    } catch (const std::logic_error&) {
      psi_ok = false;
    }
    try {
      mismatch = psi12(R, P, *g).closed_form_mismatch;
    } catch (const std::logic_error&) {
      cf_ok = false;
      mismatch = std::numeric_limits<double>::infinity();
    }
    add(c, "phi_invariants" + tag, "virial weight phi_R: 0 <= phi'' <= 2, phi'/r <= 2, lap phi <= 2N", 0.0, 1e-12,
        phi_ok);
    add(c, "psi_invariants" + tag, "virial weight psi_R: psi'' <= 2, psi'/r <= 2, lap psi <= 2N", 0.0, 1e-12,
        psi_ok);
    add(c, "psi2_closed_form" + tag, "inner-annulus closed form of psi_2", mismatch, 1e-8, cf_ok);
    auto l53 = lemma53_check(R, P, 1e-3);
    add(c, "psi_sign_condition" + tag, "2 psi_1 dominates the psi_2 power for small eps", l53.margin, 0.0,
        l53.holds);
  }
  std::vector<double> sups;
  for (double R : {1.0, 2.0, 4.0, 8.0}) sups.push_back(lemma52_check(R, P));
  double spread = (*std::max_element(sups.begin(), sups.end()) - *std::min_element(sups.begin(), sups.end())) /
                  *std::min_element(sups.begin(), sups.end());
  add(c, "psi2_power_derivative_R_independent", "R |d/dr psi_2^{1/(p-1)}| bounded uniformly in R", spread, 0.1,
      spread < 0.1);
  auto g = RadialGrid::make(3, 20.0, 5e-3);
  auto u = RadialField::sample(g, [](double r) { return cplx(std::exp(-r * r), 0.3 * r * std::exp(-r)); });
  double e16 = 16.0 * energy(u, P);
  double dev = std::abs(virial_rhs(u, P, quadratic_profile(g)) - e16) / std::abs(e16);
  add(c, "quadratic_virial_equals_16E", "virial identity V'' = 16 E at mass-critical p", dev, 1e-10, dev < 1e-10);
  return c;
}

std::vector<Check> suite_exponents() {
  using namespace exponents;
  std::vector<Check> c;
  auto s = scattering_exponents(Rational(2), 3);
  auto x = auxiliary_exponents(Rational(2), 3);
  bool triple = s.q == Rational(8, 3) && s.r == 4 && s.k == 8 && s.m == Rational(8, 5) && x.l == Rational(12, 5) &&
                x.delta == Rational(1, 2);
  add(c, "worked_triple_alpha2_N3", "scattering exponent system", 0.0, 0.0, triple);
  std::mt19937_64 rng(1234567);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    int N = 2 + i % 5;
    Rational lo(4, N), hi = N >= 3 ? Rational(4, N - 2) : Rational(10);
    Rational a = lo + Rational(1 + static_cast<long long>(rng() % 999999), 1000000) * (hi - lo);
    auto ss = scattering_exponents(a, N);
    auto xx = auxiliary_exponents(a, N);
    bool ok = 1 / ss.k + 1 / ss.m == 2 / ss.q && ss.k > ss.q / 2 && admissible_check(PairQR::from(ss.q, ss.r), N) &&
              admissible_check(PairQR::from(ss.k, xx.l), N) && 1 / ss.r == 1 / xx.l - xx.delta / N;
    bad += !ok;
  }
  add(c, "random_window_identities", "Hoelder and Sobolev exponent relations, exact", bad, 0.0, bad == 0);
  add(c, "admissible_8_3_4", "Schroedinger admissible pair", 0.0, 0.0,
      admissible_check(PairQR::from(Rational(8, 3), Rational(4)), 3) &&
          !admissible_check(PairQR::from(Rational(2), Rational(2)), 3));
  auto m = morawetz_beta({3, Rational(1), Rational(4)}, ModeNMinus1{});
  add(c, "morawetz_3_1_4", "Morawetz exponent beta = max(1/3, 2/((N-1) alpha + 2))", to_double(m.beta), 0.0,
      m.alpha == 2 && m.beta == Rational(1, 3));
  auto d = dispersive_n_feasible(Rational(2), 3);
  add(c, "dispersive_choice_alpha2_N3", "dispersive exponent choice 0 <= 1/n < 1/(alpha+2)", to_double(d.inv_n), 0.0,
      d.feasible && d.inv_n == 0);
  return c;
}

int cmd_verify(const std::string& suite, const fs::path& out, bool write_file) {
  std::vector<std::pair<std::string, std::vector<Check> (*)()>> all = {
      {"exponents", suite_exponents}, {"inequalities", suite_inequalities}, {"virial", suite_virial}};
  ordered_json j;
  j["schema"] = 1;
  j["suite"] = suite;
  j["checks"] = ordered_json::array();
  bool pass = true;
  bool matched = false;
  for (const auto& [name, fn] : all) {
    if (suite != "all" && suite != name) continue;
    matched = true;
    for (const Check& ch : fn()) {
      j["checks"].push_back({{"suite", name},
                             {"name", ch.name},
                             {"ref", ch.ref},
                             {"pass", ch.pass},
                             {"value", ch.value},
                             {"tolerance", ch.tolerance}});
      pass = pass && ch.pass;
    }
  }
  if (!matched) throw UsageError("unknown suite '" + suite + "'");
  j["pass"] = pass;
  std::cout << j.dump(2) << "\n";
  if (write_file) write_json(out, "verify.json", j);
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------------------
// evolve / sweep

struct RunRequest {
  Params P;
  StepperConfig cfg;
  std::string init;
};

struct RunResult {
  EvolutionRun run;
  std::optional<ThresholdReport> threshold;
  std::string threshold_note;
  RadialField u0;
};

std::optional<GroundState> try_ground(const Params& P, GridPtr grid) {
  RegimeClass rc = classify(P);
  if (rc.kind == Regime::EnergySupercritical) return std::nullopt;
  if (rc.kind != Regime::EnergyCritical && !(P.p > lwp_lower_power(P.N, P.b) + 1e-12)) return std::nullopt;
  return comparison_ground(P, grid);
}

RunResult run_one(const RunRequest& req, const std::optional<GroundState>& ground, const StateObserver& obs = {}) {
  GridPtr grid = evolution_grid(req.P.N, req.cfg);
  RunResult res{{}, std::nullopt, "", RadialField(grid)};
  res.u0 = make_initial(req.init, req.P, grid, ground).u;
  StepperConfig cfg = req.cfg;
  if (ground) {
    try {
      res.threshold = threshold_report(res.u0, req.P, *ground);
    } catch (const PreconditionError& e) {
      res.threshold_note = e.what();
    }
    RegimeClass rc = classify(req.P);
    if (rc.kind == Regime::Intercritical)
      cfg.gradient_threshold = ground->grad_norm() * std::pow(ground->mass_norm(), exponents_of(req.P).sigma_c);
  }
  res.run = evolve(res.u0, req.P, cfg, obs);
  return res;
}

std::string agreement(const RunResult& r) {
  if (!r.threshold) return "n/a";
  Verdict v = r.threshold->verdict;
  RunStatus s = r.run.outcome.status;
  if (v == Verdict::GlobalBranch) return s == RunStatus::CompletedGlobal ? "true" : "false";
  if (v == Verdict::BlowupBranch || v == Verdict::NegativeEnergy) return s == RunStatus::BlowupDetected ? "true" : "false";
  return "n/a";
}

ordered_json outcome_json(const RunOutcome& o) {
  ordered_json j;
  j["status"] = status_name(o.status);
  j["t_final"] = o.t_final;
  j["blowup_time_estimate"] = o.blowup_time_estimate ? ordered_json(*o.blowup_time_estimate) : ordered_json(nullptr);
  j["drift_exceeded"] = o.drift_exceeded;
  j["boundary_flag"] = o.boundary_flag;
  j["max_mass_drift"] = o.max_mass_drift;
  j["max_energy_drift"] = o.max_energy_drift;
  return j;
}

struct EvolveExtras {
  std::size_t save_every = 0;
  std::string cutoff = "quadratic";
  std::optional<double> bound_radius;
  double bound_eps = 1e-3;
  std::optional<double> bound_C;
};

int cmd_evolve(const RunRequest& base, const EvolveExtras& ex, const fs::path& out) {
  RunRequest req = base;
  req.cfg.cutoff = parse_cutoff(ex.cutoff);
  req.cfg.save_every = ex.save_every;
  GridPtr grid = evolution_grid(req.P.N, req.cfg);
  auto ground = try_ground(req.P, grid);

  std::optional<BoundRecorder> bound;
  if (ex.bound_radius) bound.emplace(req.P, *ex.bound_radius, ex.bound_eps, req.cfg.energy_drift_tol);
  StateObserver obs;
  if (bound) obs = [&](double t, const RadialField& u) { (*bound)(t, u); };
  RunResult res = run_one(req, ground, obs);
  const EvolutionRun& run = res.run;

  auto csv = open_out(out, "diagnostics.csv");
  csv << "t,mass,energy,grad_sq,potential";
  for (double R : req.cfg.local_radii) csv << ",local_mass_" << R;
  csv << ",virial_V,virial_Vp,grad_product,bound_holds\n";
  for (const auto& row : run.rows) {
    csv << fmt(row.t) << "," << fmt(row.mass) << "," << fmt(row.energy) << "," << fmt(row.grad_sq) << ","
        << fmt(row.potential);
    for (double m : row.local_mass) csv << "," << fmt(m);
    csv << "," << fmt(row.virial_V) << "," << fmt(row.virial_Vp) << "," << fmt(row.grad_product) << ","
        << (row.bound_holds ? 1 : 0) << "\n";
  }

  ordered_json j;
  j["schema"] = 1;
  j["params"] = params_json(req.P);
  j["regime"] = regime_name(classify(req.P).kind);
  j["init"] = req.init;
  j["initial_datum_sha1"] = sha1_hex(res.u0);
  j["cfg"] = {{"dt", req.cfg.dt},
              {"t_end", req.cfg.t_end},
              {"r_max", req.cfg.r_max},
              {"dr", req.cfg.dr},
              {"blowup_gradient_factor", req.cfg.blowup_gradient_factor},
              {"energy_drift_tol", req.cfg.energy_drift_tol},
              {"cutoff", ex.cutoff},
              {"save_every", ex.save_every}};
  j["outcome"] = outcome_json(run.outcome);
  if (res.threshold) {
    j["verdict"] = verdict_name(res.threshold->verdict);
    j["agreement"] = agreement(res);
  } else {
    j["verdict"] = nullptr;
    j["verdict_note"] = res.threshold_note;
  }
  bool all_bound = true;
  for (const auto& row : run.rows) all_bound = all_bound && row.bound_holds;
  j["uniform_bound_all_rows"] = all_bound;

  if (ex.save_every > 0) {
    auto st = open_out(out, "states.csv");
    st << "t,r,re,im\n";
    for (const auto& s : run.states)
      for (std::size_t i = 0; i < s.u.size(); ++i)
        st << fmt(s.t) << "," << fmt(grid->r(i)) << "," << fmt(s.u[i].real()) << "," << fmt(s.u[i].imag()) << "\n";
    if (run.states.size() >= 3)
      j["virial_dynamic_deviation"] =
          virial_dynamic_check(run, req.P, build_cutoff(req.cfg.cutoff, grid), req.cfg.nonlinear);
  }
  if (bound) {
    const auto& samples = bound->samples();
    double C = ex.bound_C ? *ex.bound_C : calibrate_remainder(samples);
    BoundSeries series = blowup_bound_check(samples, req.P, *ex.bound_radius, ex.bound_eps, C);
    auto bc = open_out(out, "virial_bound.csv");
    bc << "t,V,Vp,Vpp,rhs_bound,slack,checked\n";
    for (const auto& row : series.rows)
      bc << fmt(row.t) << "," << fmt(row.V) << "," << fmt(row.Vp) << "," << fmt(row.Vpp) << "," << fmt(row.rhs_bound)
         << "," << fmt(row.slack) << "," << (row.checked ? 1 : 0) << "\n";
    j["virial_bound"] = {{"kind", bound_name(series.kind)},
                         {"R", series.R},
                         {"eps", series.eps},
                         {"C", series.C},
                         {"C_source", ex.bound_C ? "given" : "calibrated on this run"},
                         {"tolerance", series.tol},
                         {"holds", series.holds}};
  }
  write_json(out, "summary.json", j);
  std::cout << j.dump(2) << "\n";
  return 0;
}

unsigned sweep_threads(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("INLS_LAB_THREADS")) {
    try {
      int v = std::stoi(env);
      if (v >= 1) n = static_cast<unsigned>(v);
    } catch (const std::exception&) {
      throw UsageError("INLS_LAB_THREADS must be a positive integer");
    }
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, jobs));
}

int cmd_sweep(const Params& P, const StepperConfig& cfg, const std::string& amplitudes, const fs::path& out) {
  std::vector<double> amps = parse_list(amplitudes);
  if (amps.empty()) throw UsageError("--amplitudes needs at least one value");
  GridPtr grid = evolution_grid(P.N, cfg);
  auto ground = try_ground(P, grid);
  if (!ground) throw PreconditionError("sweeps scale the ground state, which these parameters do not have");

  std::vector<std::optional<RunResult>> results(amps.size());
  std::vector<std::string> errors(amps.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < amps.size();) {
      try {
        char c[32];
        std::snprintf(c, sizeof c, "cQ:%.17g", amps[k]);  // round-trips, so runs match `evolve`
        RunRequest req{P, cfg, c};
        results[k] = run_one(req, ground);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < sweep_threads(amps.size()); ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << "c,verdict,status,agreement,t_final\n";
  bool all_agree = true;
  for (std::size_t k = 0; k < amps.size(); ++k) {
    if (!results[k]) throw std::runtime_error("sweep run c = " + fmt(amps[k]) + " failed: " + errors[k]);
    const RunResult& r = *results[k];
    std::string a = agreement(r);
    all_agree = all_agree && a != "false";
    csv << fmt(amps[k]) << "," << (r.threshold ? verdict_name(r.threshold->verdict) : "Undetermined") << ","
        << status_name(r.run.outcome.status) << "," << a << "," << fmt(r.run.outcome.t_final) << "\n";
  }
  open_out(out, "sweep.csv") << csv.str();
  std::cout << csv.str();
  return all_agree ? 0 : 1;
}

// ---------------------------------------------------------------------------------------
// exponents

int cmd_exponents(const Params& P, const std::string& alpha_text) {
  using namespace exponents;
  RegimeClass rc = classify(P);
  Exponents e = exponents_of(P);
  std::ostringstream csv;
  csv << "name,value,decimal\n";
  auto num = [&](const std::string& name, double v) { csv << name << "," << fmt(v) << "," << fmt(v) << "\n"; };
  auto rat = [&](const std::string& name, const Rational& q) {
    csv << name << "," << q.str() << "," << fmt(to_double(q)) << "\n";
  };
  csv << "regime," << regime_name(rc.kind) << ",\n";
  num("gamma_c", e.gamma_c);
  if (e.sigma_infinite())
    csv << "sigma_c,inf,inf\n";
  else
    num("sigma_c", e.sigma_c);
  num("gn_exponent_A", e.A);
  num("gn_exponent_B", e.B);
  num("pohozaev_a", pohozaev_a(P));
  num("lwp_lower_power", lwp_lower_power(P.N, P.b));
  num("mass_critical_power", mass_critical_power(P.N, P.b));
  num("energy_critical_power", energy_critical_power(P.N, P.b));
  RationalParams RP = RationalParams::from(P);
  std::optional<Rational> alpha;
  try {
    auto m = morawetz_beta(RP, ModeNMinus1{});
    rat("morawetz_alpha", m.alpha);
    rat("morawetz_beta", m.beta);
    alpha = m.alpha;
  } catch (const PreconditionError& ex) {
    csv << "morawetz_alpha,undefined,\n";
  }
  if (!alpha_text.empty()) alpha = parse_rational(alpha_text);
  if (alpha) {
    rat("alpha", *alpha);
    try {
      auto s = scattering_exponents(*alpha, P.N);
      auto x = auxiliary_exponents(*alpha, P.N);
      rat("q", s.q);
      rat("r", s.r);
      rat("k", s.k);
      rat("m", s.m);
      rat("l", x.l);
      rat("delta", x.delta);
      if (P.N >= 3) {
        auto d = dispersive_n_feasible(*alpha, P.N);
        rat("inv_n", d.inv_n);
        rat("dispersive_theta", d.theta);
        csv << "dispersive_feasible," << (d.feasible ? "true" : "false") << ",\n";
      }
    } catch (const PreconditionError& ex) {
      csv << "scattering_window,outside," << "\n";
    }
  }
  if (P.N >= 3 && P.p + 1 >= 2 + 2 * P.b / (P.N - 1) && P.p <= energy_critical_power(P.N, P.b))
    rat("interpolation_theta", inls::interpolation_theta(RP));
  std::cout << csv.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inls_lab: radial inhomogeneous NLS laboratory"};
  app.require_subcommand(1);
  std::string out_dir = ".";
  app.add_option("--out", out_dir, "directory for output files")->capture_default_str();

  ParamFlags gs_p, ev_p, sw_p, ex_p;
  double gs_rmax = 20.0, gs_dr = 1e-3, gs_tol = 1e-15;
  auto* gs = app.add_subcommand("ground-state", "solve for Q (or W at energy-critical p)");
  gs_p.attach(gs);
  gs->add_option("--rmax", gs_rmax)->capture_default_str();
  gs->add_option("--dr", gs_dr)->capture_default_str();
  gs->add_option("--tol", gs_tol, "relative bracket width on Q(0)")->capture_default_str();

  std::string suite = "all";
  bool verify_file = false;
  auto* vf = app.add_subcommand("verify", "run invariant suites and print a JSON report");
  vf->add_option("--suite", suite)->check(CLI::IsMember({"inequalities", "virial", "exponents", "all"}));
  vf->add_flag("--write", verify_file, "also write verify.json to --out");

  RunFlags ev_r, sw_r;
  std::string init;
  EvolveExtras ex;
  double bound_R = 0, bound_C = 0;
  auto* ev = app.add_subcommand("evolve", "evolve one initial datum");
  ev_p.attach(ev);
  ev_r.attach(ev);
  ev->add_option("--init", init, "cQ:<c>, gaussian:<amp> or file:<path>")->required();
  ev->add_option("--save-every", ex.save_every, "keep every k-th state for the virial check");
  ev->add_option("--cutoff", ex.cutoff, "quadratic, phi:<R> or psi:<R>")->capture_default_str();
  auto* br = ev->add_option("--bound-radius", bound_R, "psi_R radius for the localized virial bound");
  ev->add_option("--bound-eps", ex.bound_eps)->capture_default_str();
  auto* bc = ev->add_option("--bound-C", bound_C, "remainder constant; calibrated on the run if absent");

  std::string amps;
  auto* sw = app.add_subcommand("sweep", "evolve c*Q for several amplitudes and compare with thresholds");
  sw_p.attach(sw);
  sw_r.attach(sw);
  sw->add_option("--amplitudes", amps, "comma-separated list of c")->required();

  std::string alpha;
  auto* xp = app.add_subcommand("exponents", "print the exponent table as CSV");
  ex_p.attach(xp);
  xp->add_option("--alpha", alpha, "scattering exponent alpha (rational); defaults to the Morawetz alpha");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gs) return cmd_ground_state(gs_p, gs_rmax, gs_dr, gs_tol, out_dir);
    if (*vf) return cmd_verify(suite, out_dir, verify_file);
    if (*ev) {
      if (*br) ex.bound_radius = bound_R;
      if (*bc) ex.bound_C = bound_C;
      return cmd_evolve({ev_p.get(), ev_r.config(), init}, ex, out_dir);
    }
    if (*sw) return cmd_sweep(sw_p.get(), sw_r.config(), amps, out_dir);
    if (*xp) return cmd_exponents(ex_p.get(), alpha);
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
