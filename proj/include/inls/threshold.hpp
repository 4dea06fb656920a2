#pragma once

// Ground-state thresholds for the global/blow-up dichotomy and the coercivity gaps that
// the two branches rely on.

#include "inls/functionals.hpp"
#include "inls/ground_state.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace inls {

enum class Verdict { GlobalBranch, BlowupBranch, AboveThreshold, NegativeEnergy };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::GlobalBranch: return "GlobalBranch";
    case Verdict::BlowupBranch: return "BlowupBranch";
    case Verdict::AboveThreshold: return "AboveThreshold";
    case Verdict::NegativeEnergy: return "NegativeEnergy";
  }
  return "?";
}

/// Products compared against the ground state. At energy-critical p the products are the
/// bare E(u0), ‖∇u0‖ and the comparison object is W. At mass-critical p only the energy
/// sign matters and the products are NaN.
struct ThresholdReport {
  double me_product = 0;
  double grad_product = 0;
  double me_Q = 0;
  double grad_Q = 0;
  double energy = 0;
  Verdict verdict = Verdict::AboveThreshold;
};

inline ThresholdReport threshold_report(const RadialField& u0, const Params& P, const GroundState& ground) {
  ThresholdReport rep;
  rep.energy = energy(u0, P);
  double g = gradient_sq_norm(u0);
  double m = mass(u0);
  if (is_mass_critical(P)) {
    if (!(rep.energy < 0.0))
      throw PreconditionError("at mass-critical p the threshold products are undefined; only E(u0) < 0 is decisive");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rep.me_product = rep.grad_product = rep.me_Q = rep.grad_Q = nan;
    rep.verdict = Verdict::NegativeEnergy;
    return rep;
  }
  RegimeClass rc = classify(P);
  if (rc.kind == Regime::EnergyCritical) {
    if (!ground.explicit_profile) throw PreconditionError("energy-critical thresholds compare against W");
    rep.me_product = rep.energy;
    rep.grad_product = std::sqrt(g);
    rep.me_Q = 0.5 * ground.grad_sq - ground.potential * (P.N - 2.0) / (2.0 * (P.N + P.b));
    rep.grad_Q = ground.grad_norm();
  } else if (rc.kind == Regime::Intercritical) {
    double s = exponents_of(P).sigma_c;
    rep.me_product = rep.energy * std::pow(m, s);
    rep.grad_product = std::sqrt(g) * std::pow(m, s / 2.0);
    rep.me_Q = (0.5 * ground.grad_sq - ground.potential / (P.p + 1.0)) * std::pow(ground.mass, s);
    rep.grad_Q = ground.grad_norm() * std::pow(ground.mass_norm(), s);
  } else {
    throw PreconditionError(std::string("threshold report needs intercritical or energy-critical p, got ") +
                            regime_name(rc.kind));
  }
  if (rep.energy < 0.0)
    rep.verdict = Verdict::BlowupBranch;
  else if (rep.me_product < rep.me_Q && rep.grad_product < rep.grad_Q)
    rep.verdict = Verdict::GlobalBranch;
  else if (rep.me_product < rep.me_Q && rep.grad_product > rep.grad_Q)
    rep.verdict = Verdict::BlowupBranch;
  else
    rep.verdict = Verdict::AboveThreshold;
  return rep;
}

struct CoercivityGap {
  double K = 0;          // ‖∇f‖² − a/(2(p+1))·P(f)
  double potential = 0;
  double delta = 0;      // δ(ρ)
  bool holds = false;    // K ≥ δ·P(f)
};

/// Requires ‖∇f‖‖f‖^{σ_c} < (1−ρ)‖∇Q‖‖Q‖^{σ_c}; then K(f) ≥ δ(ρ)·P(f).
inline CoercivityGap coercivity_gap(const RadialField& f, const Params& P, const GroundState& ground, double rho) {
  Exponents e = exponents_of(P);
  if (e.sigma_infinite() || classify(P).kind != Regime::Intercritical)
    throw PreconditionError("coercivity gap needs intercritical p");
  if (!(rho > 0.0 && rho < 1.0)) throw PreconditionError("rho must lie in (0, 1)");
  double lf = std::sqrt(gradient_sq_norm(f)) * std::pow(std::sqrt(mass(f)), e.sigma_c);
  double lq = ground.grad_norm() * std::pow(ground.mass_norm(), e.sigma_c);
  if (!(lf < (1.0 - rho) * lq))
    throw PreconditionError("coercivity gap requires |grad f| |f|^sigma_c < (1 - rho) |grad Q| |Q|^sigma_c");
  CoercivityGap out;
  out.K = k_functional(f, P);
  out.potential = potential(f, P);
  out.delta = coercivity_delta(rho, P);
  out.holds = out.K >= out.delta * out.potential;
  return out;
}

}  // namespace inls
