#pragma once

#include "inls/functionals.hpp"
#include "inls/grid.hpp"
#include "inls/params.hpp"
#include "inls/rational.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace inls {

/// Positive radial solution of Q'' + (N−1)/r Q' − Q + r^b Q^p = 0.
///
/// For b > 0 the weight vanishes at the origin, so ΔQ(0) = Q(0) > 0: the profile rises to a single
/// interior maximum and decays monotonically beyond it.
struct GroundState {
  Params params;
  RadialField profile;     // real-valued, positive
  std::vector<double> derivative;  // Q' carried by the integrator (analytic on the tail)
  double shoot_value = 0;  // Q(0)
  double ode_residual = 0;
  double decay_rate = 0;   // least-squares C in Q ~ e^{−C r} on [r_match/2, r_match]
  double r_match = 0;      // tail c r^{−(N−1)/2} e^{−r} grafted beyond this radius
  double mass = 0;
  double grad_sq = 0;
  double potential = 0;
  bool explicit_profile = false;  // W of the energy-critical problem instead of a shooting result

  double grad_norm() const { return std::sqrt(grad_sq); }
  double mass_norm() const { return std::sqrt(mass); }
};

struct ShootOptions {
  double r_max = 20.0;
  double dr = 1e-3;
  double tol = 1e-15;  // relative bracket width on Q(0)
  double match_threshold = 1e-8;
};

namespace detail {

enum class Shot { Overshoot, Undershoot };

struct Trajectory {
  std::vector<double> q, dq;
  Shot kind = Shot::Undershoot;
  std::size_t stop = 0;  // last valid node before the classifying event
};

inline std::array<double, 2> ode_rhs(const Params& P, double r, double q, double dq) {
  return {dq, -(P.N - 1.0) / r * dq + q - std::pow(r, P.b) * std::pow(std::abs(q), P.p - 1.0) * q};
}

/// Series start Q ≈ a + a r²/(2N) − a^p r^{2+b}/((2+b)(N+b)), then fixed-step RK4.
/// Overshoot: Q crosses zero. Undershoot: Q' turns positive after the profile started to decay,
/// or the integration reaches r_max with Q positive.
inline Trajectory integrate_shot(const Params& P, double a, double dr, std::size_t n) {
  Trajectory t;
  t.q.assign(n, 0.0);
  t.dq.assign(n, 0.0);
  t.q[0] = a;
  double r1 = dr;
  t.q[1] = a + a * r1 * r1 / (2.0 * P.N) - std::pow(a, P.p) * std::pow(r1, 2.0 + P.b) / ((2.0 + P.b) * (P.N + P.b));
  t.dq[1] = a * r1 / P.N - std::pow(a, P.p) * std::pow(r1, 1.0 + P.b) / (P.N + P.b);
  bool decaying = false;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double r = static_cast<double>(i) * dr;
    double q = t.q[i], dq = t.dq[i];
    auto k1 = ode_rhs(P, r, q, dq);
    auto k2 = ode_rhs(P, r + dr / 2, q + dr / 2 * k1[0], dq + dr / 2 * k1[1]);
    auto k3 = ode_rhs(P, r + dr / 2, q + dr / 2 * k2[0], dq + dr / 2 * k2[1]);
    auto k4 = ode_rhs(P, r + dr, q + dr * k3[0], dq + dr * k3[1]);
    t.q[i + 1] = q + dr / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    t.dq[i + 1] = dq + dr / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
    if (t.q[i + 1] <= 0.0) {
      t.kind = Shot::Overshoot;
      t.stop = i;
      return t;
    }
    if (t.dq[i + 1] < 0.0) decaying = true;
    if (decaying && t.dq[i + 1] > 0.0) {
      t.kind = Shot::Undershoot;
      t.stop = i;
      return t;
    }
  }
  t.kind = Shot::Undershoot;
  t.stop = n - 1;
  return t;
}

}  // namespace detail

/// Ground state by bisection on Q(0) over a bracket found by the sweep a = 2^k, k = −10…10.
inline GroundState shoot(const Params& P, const ShootOptions& opt = {}) {
  P.validate();
  RegimeClass rc = classify(P);
  if (rc.kind == Regime::EnergySupercritical || rc.kind == Regime::EnergyCritical)
    throw PreconditionError("shooting needs p < (N+2+2b)/(N-2): no H^1 ground state at or above energy-critical p");
  double lower = lwp_lower_power(P.N, P.b);
  if (!(P.p > lower) || detail::near(P.p, lower))
    throw PreconditionError("ground state existence (sharp Gagliardo-Nirenberg optimizer) requires p > 1 + 2b/(N-1)");

  GridPtr grid = RadialGrid::make(P.N, opt.r_max, opt.dr);
  const std::size_t n = grid->size();
  const double dr = grid->dr();

  double lo = 0, hi = 0;
  bool have_lo = false, found = false;
  for (int k = -10; k <= 10; ++k) {
    double a = std::ldexp(1.0, k);
    auto kind = detail::integrate_shot(P, a, dr, n).kind;
    if (kind == detail::Shot::Undershoot) {
      lo = a;
      have_lo = true;
    } else if (have_lo) {
      hi = a;
      found = true;
      break;
    }
  }
  if (!found) throw std::runtime_error("shooting bracket not found for Q(0) in [2^-10, 2^10]");

  while (hi - lo > opt.tol * hi) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (detail::integrate_shot(P, mid, dr, n).kind == detail::Shot::Overshoot)
      hi = mid;
    else
      lo = mid;
  }

  detail::Trajectory tl = detail::integrate_shot(P, lo, dr, n);
  detail::Trajectory th = detail::integrate_shot(P, hi, dr, n);
  if (tl.kind != detail::Shot::Undershoot || th.kind != detail::Shot::Overshoot)
    throw std::logic_error("shooting classifier is not monotone on the final bracket");

  // matching radius: below threshold, before either bracket trajectory loses fidelity
  std::size_t peak = 0;
  for (std::size_t i = 0; i <= tl.stop; ++i)
    if (tl.q[i] > tl.q[peak]) peak = i;
  std::size_t im = std::min(tl.stop, th.stop);
  for (std::size_t i = peak; i <= std::min(tl.stop, th.stop); ++i) {
    double gap = std::abs(tl.q[i] - th.q[i]);
    if (tl.q[i] < opt.match_threshold * tl.q[0] || gap > 1e-3 * tl.q[i]) {
      im = i;
      break;
    }
  }
  if (im < 4) throw std::runtime_error("shooting trajectory lost fidelity before decaying");

  GroundState gs;
  gs.params = P;
  gs.shoot_value = 0.5 * (lo + hi);
  gs.r_match = grid->r(im);
  std::vector<cplx> vals(n);
  for (std::size_t i = 0; i <= im; ++i) vals[i] = tl.q[i];
  const double tail_exp = (P.N - 1.0) / 2.0;
  const double c = tl.q[im] * std::pow(gs.r_match, tail_exp) * std::exp(gs.r_match);
  for (std::size_t i = im + 1; i < n; ++i) {
    double r = grid->r(i);
    vals[i] = c * std::pow(r, -tail_exp) * std::exp(-r);
  }
  gs.profile = RadialField(grid, std::move(vals));

  // decay fit of log Q on [r_m/2, r_m]
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t cnt = 0;
  for (std::size_t i = im / 2; i <= im; ++i) {
    double x = grid->r(i), y = std::log(tl.q[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    ++cnt;
  }
  double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  gs.decay_rate = -slope;

  gs.derivative.assign(n, 0.0);
  for (std::size_t i = 0; i <= im; ++i) gs.derivative[i] = tl.dq[i];
  for (std::size_t i = im + 1; i < n; ++i) {
    double r = grid->r(i);
    gs.derivative[i] = -gs.profile[i].real() * (1.0 + tail_exp / r);
  }

  // Sup-norm ODE residual with Q'' from a fourth-order difference of the integrator's Q'.
  // RK4 drops order in the boundary layer r < 0.1 next to the regular singular point, so the
  // residual is sampled on [0.1, r_m).
  double res = 0;
  for (std::size_t i = 2; i + 2 < im; ++i) {
    double r = grid->r(i);
    if (r < 0.1) continue;
    const auto& f = tl.dq;
    double d2 = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * dr);
    double q = tl.q[i];
    res = std::max(res, std::abs(d2 + (P.N - 1.0) / r * f[i] - q + std::pow(r, P.b) * std::pow(q, P.p)));
  }
  gs.ode_residual = res;
  gs.mass = mass(gs.profile);
  gs.grad_sq = gradient_sq_norm(gs.profile);
  gs.potential = inls::potential(gs.profile, P);
  return gs;
}

// ---------------------------------------------------------------------------------------------
// Energy-critical profile W = (1 + r^{2+b}/((N+b)(N−2)))^{−(N−2)/(2+b)}, −ΔW = r^b W^{(N+2+2b)/(N−2)}.

inline void require_energy_critical(const Params& P, const char* what) {
  P.validate();
  if (!is_energy_critical(P))
    throw PreconditionError(std::string(what) + " requires N >= 3 and energy-critical p = (N+2+2b)/(N-2)");
}

namespace detail {
/// log(1 + r^{2+b}/((N+b)(N−2))) without overflow for large r.
inline double w_log1p(int N, double b, double r) {
  if (r <= 0.0) return 0.0;
  double lx = (2.0 + b) * std::log(r) - std::log((N + b) * (N - 2.0));
  return lx > 0.0 ? lx + std::log1p(std::exp(-lx)) : std::log1p(std::exp(lx));
}
}  // namespace detail

inline double w_value(int N, double b, double r) {
  return std::exp(-(N - 2.0) / (2.0 + b) * detail::w_log1p(N, b, r));
}

inline double w_derivative(int N, double b, double r) {
  if (r <= 0.0) return 0.0;
  double k = (N - 2.0) / (2.0 + b);
  return -std::exp((1.0 + b) * std::log(r) - std::log(N + b) - (k + 1.0) * detail::w_log1p(N, b, r));
}

inline RadialField explicit_W(const Params& P, GridPtr grid) {
  require_energy_critical(P, "explicit W");
  return RadialField::sample(grid, [&](double r) { return w_value(P.N, P.b, r); });
}

/// Quadratures of W on the grid plus analytic tails beyond r_max (W decays only algebraically).
struct WReport {
  double grad_sq = 0;    // ‖∇W‖²
  double potential = 0;  // ∫ r^b W^{(2N+2b)/(N−2)}
  double energy = 0;
  double c_sha = 0;      // ∫ r^b W^{2*} / (‖∇W‖²)^{(N+b)/(N−2)}
  double residual = 0;   // sup |ΔW + r^b W^p| on [0.1, 10]
};

inline WReport explicit_w_report(const Params& P, GridPtr grid) {
  require_energy_critical(P, "W relations");
  RadialField W = explicit_W(P, grid);
  const int N = P.N;
  const double b = P.b;
  const double omega = sphere_area(N);
  const double R = grid->r_max();
  boost::math::quadrature::exp_sinh<double> tail;
  // The grid quadratures end at the node r_max; the tails continue from there.
  const double k = (N - 2.0) / (2.0 + b);
  auto grad_tail = tail.integrate(
      [&](double r) {
        double lr = std::log(r);
        // |W'|² r^{N−1} in log form
        return std::exp(2.0 * ((1.0 + b) * lr - std::log(N + b) - (k + 1.0) * detail::w_log1p(N, b, r)) +
                        (N - 1.0) * lr);
      },
      R, std::numeric_limits<double>::infinity());
  auto pot_tail = tail.integrate(
      [&](double r) {
        double lr = std::log(r);
        return std::exp((b + N - 1.0) * lr - (P.p + 1.0) * k * detail::w_log1p(N, b, r));
      },
      R, std::numeric_limits<double>::infinity());
  // trapezoid ends with a half weight at r_max; the tail integrals start exactly there
  WReport rep;
  rep.grad_sq = gradient_sq_norm(W) + omega * grad_tail;
  rep.potential = potential(W, P) + omega * pot_tail;
  rep.energy = 0.5 * rep.grad_sq - rep.potential / (P.p + 1.0);
  rep.c_sha = rep.potential / std::pow(rep.grad_sq, (N + b) / (N - 2.0));
  RadialField lap = laplacian(W);
  for (std::size_t i = 1; i + 1 < grid->size(); ++i) {
    double r = grid->r(i);
    if (r < 0.1 - 1e-12 || r > 10.0 + 1e-12) continue;
    double w = W[i].real();
    rep.residual = std::max(rep.residual, std::abs(lap[i].real() + std::pow(r, b) * std::pow(w, P.p)));
  }
  return rep;
}

inline double sharp_sobolev_constant(const Params& P, GridPtr grid) { return explicit_w_report(P, grid).c_sha; }

/// W packaged as the comparison object for energy-critical thresholds.
inline GroundState energy_critical_ground(const Params& P, GridPtr grid) {
  WReport rep = explicit_w_report(P, grid);
  GroundState gs;
  gs.params = P;
  gs.profile = explicit_W(P, grid);
  gs.shoot_value = 1.0;
  gs.ode_residual = rep.residual;
  gs.mass = mass(gs.profile);
  gs.grad_sq = rep.grad_sq;
  gs.potential = rep.potential;
  gs.explicit_profile = true;
  return gs;
}

// ---------------------------------------------------------------------------------------------
// Uniqueness hypotheses for φ'' + (N−1)/r φ' − φ + r^b φ^p = 0 written as (fφ')' + f(g φ + h φ^p) = 0
// with f = r^{N−1}, g = −1, h = r^b.

struct UniquenessConstants {
  Rational C, D;
};

/// C = ((N−1)(p−1)−2b)/(p+3);  D = (2(N−1)+b)(2N+2b−(N−2)(p+1))((N−2)(p+1)−2−b)/(p+3)³.
inline UniquenessConstants uniqueness_constants(int N, const Rational& b, const Rational& p) {
  Rational s = p + 3;
  UniquenessConstants u;
  u.C = ((N - 1) * (p - 1) - 2 * b) / s;
  u.D = (2 * (N - 1) + b) / s * ((2 * N + 2 * b - (N - 2) * (p + 1)) / s) * (((N - 2) * (p + 1) - 2 - b) / s);
  return u;
}

struct UniquenessReport {
  double C_const = 0;
  double D_const = 0;
  std::optional<double> k_crossing;
  std::array<bool, 7> conditions{};
  double alpha_exponent = 0;  // α(r) = r^{e}
  std::size_t sign_changes = 0;  // of G on the probe radii
  bool all() const {
    for (bool c : conditions)
      if (!c) return false;
    return true;
  }
};

inline double uniqueness_alpha_exponent(const Params& P) {
  return (2.0 * (P.N - 1.0) * (P.p + 1.0) - 2.0 * P.b) / (P.p + 3.0);
}
inline double uniqueness_alpha(const Params& P, double r) { return std::pow(r, uniqueness_alpha_exponent(P)); }
inline double uniqueness_beta(const Params& P, double r) {
  return (2.0 * (P.N - 1.0) + P.b) / (P.p + 3.0) * std::pow(r, uniqueness_alpha_exponent(P) - 1.0);
}
inline double uniqueness_gamma(const Params& P, double r) {
  double s = P.p + 3.0;
  return (2.0 * (P.N - 1.0) + P.b) / s * (2.0 * P.N + 2.0 * P.b - (P.N - 2.0) * (P.p + 1.0)) / s *
         std::pow(r, uniqueness_alpha_exponent(P) - 2.0);
}
inline double uniqueness_G(const Params& P, double r, double C, double D) {
  return (-C * r * r + D) * std::pow(r, uniqueness_alpha_exponent(P) - 3.0);
}

inline UniquenessReport uniqueness_conditions(const Params& P, const std::vector<double>& r_probe) {
  P.validate();
  double lower = lwp_lower_power(P.N, P.b);
  if (!(P.p > lower) || detail::near(P.p, lower))
    throw PreconditionError("uniqueness hypotheses are checked for p > 1 + 2b/(N-1)");
  if (P.N >= 3 && !(P.p < energy_critical_power(P.N, P.b)))
    throw PreconditionError("uniqueness hypotheses are checked for p < (N+2+2b)/(N-2)");
  if (r_probe.empty()) throw std::invalid_argument("probe radii are empty");

  const int N = P.N;
  const double b = P.b, p = P.p, s = p + 3.0;
  UniquenessReport rep;
  rep.C_const = ((N - 1.0) * (p - 1.0) - 2.0 * b) / s;
  rep.D_const = (2.0 * (N - 1.0) + b) / s * (2.0 * N + 2.0 * b - (N - 2.0) * (p + 1.0)) / s *
                ((N - 2.0) * (p + 1.0) - 2.0 - b) / s;
  rep.alpha_exponent = uniqueness_alpha_exponent(P);
  const double e = rep.alpha_exponent;

  double rmin = r_probe.front(), rmax = r_probe.front();
  for (double r : r_probe) rmin = std::min(rmin, r), rmax = std::max(rmax, r);

  // (1) f = r^{N−1} stays bounded at 0
  rep.conditions[0] = N - 1 >= 0;
  // (2) (1/f)∫_0^r f(|g|+h) = r/N + r^{b+1}/(N+b) → 0
  auto c2 = [&](double r) { return r / N + std::pow(r, b + 1.0) / (N + b); };
  rep.conditions[1] = c2(rmin) < c2(rmax) && c2(rmin) <= 2.0 * rmin && b + 1.0 > 0.0;
  // (3a) r^{N−1}(1+r^b) ∈ L¹(0,R); (3b) (1+r^b)(r − R^{2−N} r^{N−1})/(N−2), or r(1+r^b)log(R/r) for N = 2;
  // (3c) r^{1−N} ∉ L¹(0,R)
  bool c3a = N - 1.0 > -1.0;
  bool c3b = true;  // the integrand is ~ r near 0 in every dimension, hence integrable
  if (N >= 3) {
    double Rb = rmax;
    auto f3 = [&](double r) { return (1.0 + std::pow(r, b)) * (r - std::pow(Rb, 2.0 - N) * std::pow(r, N - 1.0)) / (N - 2.0); };
    c3b = std::isfinite(f3(rmin)) && std::abs(f3(rmin)) <= 2.0 * (1.0 + std::pow(rmin, b)) * rmin / (N - 2.0);
  } else {
    c3b = std::isfinite(rmin * (1.0 + std::pow(rmin, b)) * std::log(rmax / rmin));
  }
  bool c3c = 1.0 - N <= -1.0;
  rep.conditions[2] = c3a && c3b && c3c;
  // (4) α's exponent minus one equals ((2N−3)(p+1) − 2 − 2b)/(p+3) > 0: α, β bounded; αg, αh → 0
  rep.conditions[3] = ((2.0 * N - 3.0) * (p + 1.0) - 2.0 - 2.0 * b) / s > 0.0 && e > 0.0;
  // (5) γ ~ r^{e−2} with positive coefficient (limit 0 or ∞), or constant nonnegative
  double gamma_coef = (2.0 * (N - 1.0) + b) / s * (2.0 * N + 2.0 * b - (N - 2.0) * (p + 1.0)) / s;
  double e2 = 2.0 * ((N - 2.0) * (p + 1.0) - 2.0 - b) / s;
  rep.conditions[4] = e2 > 0.0 || gamma_coef >= 0.0;
  // (6) G = (−Cr² + D) r^{e−3} changes sign once at k = sqrt(D/C), or never (k = 0) when D ≤ 0
  double C = rep.C_const, D = rep.D_const;
  if (C > 0.0) rep.k_crossing = D > 0.0 ? std::sqrt(D / C) : 0.0;
  int prev = 0;
  bool order_ok = true;
  std::vector<double> sorted = r_probe;
  std::sort(sorted.begin(), sorted.end());
  for (double r : sorted) {
    double G = uniqueness_G(P, r, C, D);
    int sg = G > 0 ? 1 : (G < 0 ? -1 : 0);
    if (sg != 0) {
      if (prev != 0 && sg != prev) ++rep.sign_changes;
      if (prev < 0 && sg > 0) order_ok = false;
      prev = sg;
    }
    if (rep.k_crossing) {
      double k = *rep.k_crossing;
      if (r < k && G < 0) order_ok = false;
      if (r > k && G > 0) order_ok = false;
    }
  }
  rep.conditions[5] = rep.k_crossing.has_value() && order_ok && rep.sign_changes <= 1;
  // (7) G⁻ ≢ 0
  rep.conditions[6] = C > 0.0;
  return rep;
}

}  // namespace inls
