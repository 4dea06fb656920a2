#pragma once

// Strang-split Crank–Nicolson integrator for i u_t + Δu + r^b|u|^{p−1}u = 0 on radial data.
//
// The unknowns are nodes 1..n−2. Node 0 is decoupled by the flux-form Laplacian (its face
// has zero area) and is reset to the even extrapolation (4u_1 − u_2)/3 after each step;
// node n−1 is a Dirichlet wall. Mass, gradient and potential all carry zero weight at both
// of these nodes, so the discrete mass Σ w_i|u_i|² is conserved to roundoff.

#include "inls/cutoffs.hpp"
#include "inls/exponents.hpp"
#include "inls/functionals.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace inls {

struct StepperConfig {
  double dt = 1e-3;
  double r_max = 40.0;
  double dr = 5e-3;
  double t_end = 2.0;
  double blowup_gradient_factor = 10.0;
  double energy_drift_tol = 1e-4;   // relative to |E(0)| + 1
  bool nonlinear = true;
  std::vector<double> local_radii{1.0, 2.0, 4.0};
  Cutoff cutoff = Cutoff::quadratic();  // weight for the virial_V / virial_Vp columns
  double boundary_band = 0.05;          // outer fraction of [0, r_max] watched for reflections
  double boundary_mass_tol = 1e-6;      // relative to M(0)
  std::size_t save_every = 0;           // keep every k-th state; 0 keeps none
  std::optional<double> gradient_threshold;  // ‖∇Q‖‖Q‖^{σ_c}: enables the per-row uniform bound flag

  void validate() const {
    if (!(dt > 0.0)) throw PreconditionError("dt must be positive");
    if (!(t_end > 0.0)) throw PreconditionError("t_end must be positive");
    if (!(blowup_gradient_factor > 1.0)) throw PreconditionError("blowup_gradient_factor must exceed 1");
    if (!(dr > 0.0) || !(r_max > dr)) throw PreconditionError("grid needs 0 < dr < r_max");
  }
};

inline GridPtr evolution_grid(int N, const StepperConfig& cfg) { return RadialGrid::make(N, cfg.r_max, cfg.dr); }

struct DiagnosticsRow {
  double t = 0, mass = 0, energy = 0, grad_sq = 0, potential = 0;
  std::vector<double> local_mass;
  double virial_V = 0, virial_Vp = 0;
  double grad_product = 0;  // ‖∇u‖‖u‖^{σ_c}; NaN when σ_c is infinite
  bool bound_holds = true;
};

enum class RunStatus { CompletedGlobal, BlowupDetected, UnderResolved };

inline const char* status_name(RunStatus s) {
  switch (s) {
    case RunStatus::CompletedGlobal: return "CompletedGlobal";
    case RunStatus::BlowupDetected: return "BlowupDetected";
    case RunStatus::UnderResolved: return "UnderResolved";
  }
  return "?";
}

struct RunOutcome {
  RunStatus status = RunStatus::CompletedGlobal;
  double t_final = 0;
  std::optional<double> blowup_time_estimate;
  bool drift_exceeded = false;   // refinement flag: energy drift passed energy_drift_tol at some step
  bool boundary_flag = false;    // mass reached the wall band
  double max_mass_drift = 0;     // max_t |M(t) − M(0)| / M(0)
  double max_energy_drift = 0;   // max_t |E(t) − E(0)| / (|E(0)| + 1)
};

struct SavedState {
  double t;
  RadialField u;
};

struct EvolutionRun {
  RunOutcome outcome;
  std::vector<DiagnosticsRow> rows;
  std::vector<SavedState> states;
  RadialField final_state;
};

/// ∫_{r ≤ R} |u|² with trapezoid weights; the node at R takes half weight if it lands on one.
inline double local_mass(const RadialField& u, double R) {
  const RadialGrid& g = *u.grid;
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double r = g.r(i);
    if (r > R + 1e-12 * g.dr()) break;
    double w = g.weights()[i];
    if (std::abs(r - R) <= 1e-12 * g.dr() && i + 1 < g.size()) w *= 0.5;
    s += w * std::norm(u[i]);
  }
  return s;
}

/// V = ∫φ|u|².
inline double virial_V(const RadialField& u, const Cutoff& c) {
  const RadialGrid& g = *u.grid;
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.weights()[i] * c.jet(g.r(i)).v * std::norm(u[i]);
  return s;
}

/// V' = 2 Im ∫ φ' ∂_r u ū, on faces so that it pairs with the discrete Laplacian.
inline double virial_Vp(const RadialField& u, const Cutoff& c) {
  const RadialGrid& g = *u.grid;
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    double mid = (static_cast<double>(i) + 0.5) * g.dr();
    cplx du = u[i + 1] - u[i];
    cplx avg = 0.5 * (u[i] + u[i + 1]);
    s += g.face(i) * c.jet(mid).d1 * (du * std::conj(avg)).imag();
  }
  return 2.0 * s;
}

/// One time step of fixed size and direction. Factorizes I − i(dt/2)Δ once.
class Stepper {
 public:
  Stepper(GridPtr grid, const Params& P, double dt, bool nonlinear = true)
      : grid_(std::move(grid)), P_(P), dt_(dt), nonlinear_(nonlinear) {
    const std::size_t n = grid_->size();
    if (n < 4) throw PreconditionError("evolution grid needs at least 4 nodes");
    const double dr = grid_->dr();
    lo_.assign(n, 0.0);
    di_.assign(n, 0.0);
    up_.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      double m = dr * grid_->cell_volume(i);
      lo_[i] = grid_->face(i - 1) / m;
      up_[i] = grid_->face(i) / m;
      di_[i] = -(grid_->face(i - 1) + grid_->face(i)) / m;
    }
    // Thomas elimination for (I − iτL)x = y, τ = dt/2
    const cplx it(0.0, dt / 2.0);
    cprime_.assign(n, 0.0);
    denom_.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      cplx a = -it * lo_[i], b = 1.0 - it * di_[i], c = -it * up_[i];
      cplx d = (i == 1) ? b : b - a * cprime_[i - 1];
      if (std::abs(d) < 1e-300) throw std::runtime_error("Crank-Nicolson tridiagonal pivot vanished");
      denom_[i] = d;
      cprime_[i] = c / d;
    }
    rb_.resize(n);
    for (std::size_t i = 0; i < n; ++i) rb_[i] = std::pow(grid_->r(i), P.b);
  }

  double dt() const { return dt_; }
  const GridPtr& grid() const { return grid_; }

  void advance(RadialField& u) const {
    if (u.grid->size() != grid_->size()) throw std::invalid_argument("field does not live on the stepper grid");
    const std::size_t n = grid_->size();
    if (nonlinear_) phase(u, dt_ / 2.0);
    const cplx it(0.0, dt_ / 2.0);
    std::vector<cplx> rhs(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      cplx right = (i + 2 < n) ? u[i + 1] : cplx(0.0);
      rhs[i] = u[i] + it * (lo_[i] * u[i - 1] + di_[i] * u[i] + up_[i] * right);
    }
    // forward sweep; lo_[1] = 0 so node 0 never enters
    std::vector<cplx> y(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      cplx a = -it * lo_[i];
      y[i] = (i == 1 ? rhs[i] : rhs[i] - a * y[i - 1]) / denom_[i];
    }
    u[n - 1] = 0.0;
    u[n - 2] = y[n - 2];
    for (std::size_t i = n - 2; i-- > 1;) u[i] = y[i] - cprime_[i] * u[i + 1];
    if (nonlinear_) phase(u, dt_ / 2.0);
    u[0] = (4.0 * u[1] - u[2]) / 3.0;
  }

 private:
  void phase(RadialField& u, double h) const {
    const double e = (P_.p - 1.0) / 2.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      double a = std::norm(u[i]);
      if (a == 0.0) continue;
      double th = h * rb_[i] * std::pow(a, e);
      u[i] *= cplx(std::cos(th), std::sin(th));
    }
  }

  GridPtr grid_;
  Params P_;
  double dt_;
  bool nonlinear_;
  std::vector<double> lo_, di_, up_, rb_;
  std::vector<cplx> cprime_, denom_;
};

/// Single step; builds a Stepper each call, so loops should hold their own.
inline RadialField step(const RadialField& u, const Params& P, double dt, bool nonlinear = true) {
  if (!u.finite()) throw PreconditionError("step needs a finite field");
  RadialField out = u;
  Stepper(u.grid, P, dt, nonlinear).advance(out);
  return out;
}

namespace detail {

inline DiagnosticsRow diagnose(double t, const RadialField& u, const Params& P, const StepperConfig& cfg, double sigma) {
  DiagnosticsRow row;
  row.t = t;
  row.mass = mass(u);
  row.grad_sq = gradient_sq_norm(u);
  row.potential = cfg.nonlinear ? potential(u, P) : 0.0;
  row.energy = 0.5 * row.grad_sq - row.potential / (P.p + 1.0);
  for (double R : cfg.local_radii) row.local_mass.push_back(local_mass(u, R));
  row.virial_V = virial_V(u, cfg.cutoff);
  row.virial_Vp = virial_Vp(u, cfg.cutoff);
  row.grad_product = std::isinf(sigma) ? std::numeric_limits<double>::quiet_NaN()
                                       : std::sqrt(row.grad_sq) * std::pow(row.mass, sigma / 2.0);
  if (cfg.gradient_threshold) row.bound_holds = row.grad_product < *cfg.gradient_threshold;
  return row;
}

inline double band_mass(const RadialField& u, double r_from) {
  const RadialGrid& g = *u.grid;
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.r(i) >= r_from) s += g.weights()[i] * std::norm(u[i]);
  return s;
}

}  // namespace detail

using StateObserver = std::function<void(double t, const RadialField& u)>;

/// Runs to t_end or until self-focusing outruns the grid. The observer, if any, sees the
/// initial state and the state after every accepted step.
inline EvolutionRun evolve(const RadialField& u0, const Params& P, const StepperConfig& cfg,
                           const StateObserver& observer = {}) {
  cfg.validate();
  RegimeClass rc = classify(P);
  if (!rc.lwp_lower_ok) throw PreconditionError("evolution requires p >= 1 + 2b/(N-1)");
  const RadialGrid& g = *u0.grid;
  if (std::abs(g.dr() - cfg.dr) > 1e-9 * cfg.dr + 1e-3 * cfg.dr || std::abs(g.r_max() - cfg.r_max) > g.dr())
    throw PreconditionError("initial datum is not sampled on the configured grid");
  if (!u0.finite()) throw PreconditionError("initial datum is not finite");

  const double sigma = exponents_of(P).sigma_c;
  const double band_from = g.r_max() * (1.0 - cfg.boundary_band);
  RadialField u = u0;
  u[u.size() - 1] = 0.0;
  u[0] = (4.0 * u[1] - u[2]) / 3.0;

  EvolutionRun run;
  RunOutcome& out = run.outcome;
  Stepper stepper(u0.grid, P, cfg.dt, cfg.nonlinear);
  double t = 0.0;
  // Quadratures reject non-finite integrands; an overflowing datum is under-resolved, not an error.
  try {
    run.rows.push_back(detail::diagnose(t, u, P, cfg, sigma));
  } catch (const std::domain_error&) {
    out.status = RunStatus::UnderResolved;
    run.final_state = std::move(u);
    return run;
  }
  if (observer) observer(t, u);
  if (cfg.save_every > 0) run.states.push_back({t, u});
  const DiagnosticsRow first = run.rows.front();
  const double m0 = first.mass, e0 = first.energy, g0 = first.grad_sq;
  const auto steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
  out.status = RunStatus::CompletedGlobal;

  for (std::size_t k = 1; k <= steps; ++k) {
    stepper.advance(u);
    t = static_cast<double>(k) * cfg.dt;
    if (!u.finite()) {
      out.status = RunStatus::UnderResolved;
      break;
    }
    DiagnosticsRow row;
    try {
      row = detail::diagnose(t, u, P, cfg, sigma);
    } catch (const std::domain_error&) {
      out.status = RunStatus::UnderResolved;
      break;
    }
    double mdrift = m0 > 0.0 ? std::abs(row.mass - m0) / m0 : std::abs(row.mass);
    double edrift = std::abs(row.energy - e0) / (std::abs(e0) + 1.0);
    out.max_mass_drift = std::max(out.max_mass_drift, mdrift);
    out.max_energy_drift = std::max(out.max_energy_drift, edrift);
    if (edrift > cfg.energy_drift_tol) out.drift_exceeded = true;
    if (m0 > 0.0 && detail::band_mass(u, band_from) > cfg.boundary_mass_tol * m0) out.boundary_flag = true;
    bool focused = g0 > 0.0 && row.grad_sq >= cfg.blowup_gradient_factor * cfg.blowup_gradient_factor * g0;
    run.rows.push_back(std::move(row));
    if (observer) observer(t, u);
    if (cfg.save_every > 0 && k % cfg.save_every == 0) run.states.push_back({t, u});
    if (focused && edrift > cfg.energy_drift_tol) {
      out.status = RunStatus::BlowupDetected;
      break;
    }
  }
  out.t_final = run.rows.back().t;
  run.final_state = std::move(u);
  if (out.status == RunStatus::BlowupDetected && run.rows.size() >= 2) {
    // 1/‖∇u‖² extrapolated linearly to zero from the last two rows
    const auto& a = run.rows[run.rows.size() - 2];
    const auto& b = run.rows.back();
    double ya = 1.0 / a.grad_sq, yb = 1.0 / b.grad_sq;
    out.blowup_time_estimate = (ya > yb) ? b.t + yb * (b.t - a.t) / (ya - yb) : b.t;
  }
  return run;
}

struct MorawetzWindow {
  double t0 = 0, t1 = 0;
  double sum = 0;  // Σ dt·∫r^b|u|^{p+1} over steps in [t0, t1]
};

struct ScatteringReport {
  std::vector<double> running_min_potential;  // one per row
  std::vector<double> final_local_mass;       // at the configured radii
  std::vector<double> radii;
  std::vector<MorawetzWindow> windows;
  std::optional<double> morawetz_beta;        // absent when the weight mode is not admissible
};

/// Post-hoc decay diagnostics for a global run. Windows are [t0, t1] pairs.
inline ScatteringReport scattering_diagnostics(const EvolutionRun& run, const Params& P,
                                               const std::vector<double>& radii,
                                               const std::vector<std::pair<double, double>>& windows) {
  if (run.outcome.status != RunStatus::CompletedGlobal)
    throw PreconditionError("scattering diagnostics need a CompletedGlobal run");
  if (run.rows.empty()) throw PreconditionError("run has no diagnostics rows");
  ScatteringReport rep;
  rep.radii = radii;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& row : run.rows) {
    best = std::min(best, row.potential);
    rep.running_min_potential.push_back(best);
  }
  for (double R : radii) rep.final_local_mass.push_back(local_mass(run.final_state, R));
  for (auto [t0, t1] : windows) {
    MorawetzWindow w{t0, t1, 0.0};
    for (std::size_t k = 1; k < run.rows.size(); ++k) {
      const auto& a = run.rows[k - 1];
      const auto& b = run.rows[k];
      if (a.t >= t0 - 1e-12 && b.t <= t1 + 1e-12) w.sum += 0.5 * (b.t - a.t) * (a.potential + b.potential);
    }
    rep.windows.push_back(w);
  }
  try {
    auto m = exponents::morawetz_beta(exponents::RationalParams::from(P), exponents::ModeNMinus1{});
    rep.morawetz_beta = to_double(m.beta);
  } catch (const PreconditionError&) {
  }
  return rep;
}

}  // namespace inls
