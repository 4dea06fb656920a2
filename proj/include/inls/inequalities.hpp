#pragma once

#include "inls/exponents.hpp"
#include "inls/functionals.hpp"
#include "inls/grid.hpp"
#include "inls/params.hpp"
#include "inls/rational.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace inls {

namespace detail {
inline double weighted_sup(const RadialField& f, double power) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double r = f.grid->r(i);
    double w = power == 0.0 ? 1.0 : std::pow(r, power);
    s = std::max(s, w * std::abs(f[i]));
  }
  return s;
}
inline void require_nonzero(double g, double m) {
  if (!(g > 0.0) || !(m > 0.0)) throw PreconditionError("ratio is undefined for the zero field");
}
}  // namespace detail

/// sup r^{(N−1)/2}|f| / (‖∇f‖^{1/2} ‖f‖^{1/2}).
inline double radial_sobolev_21(const RadialField& f) {
  const int N = f.grid->dim();
  double g = gradient_sq_norm(f), m = mass(f);
  detail::require_nonzero(g, m);
  return detail::weighted_sup(f, (N - 1.0) / 2.0) / (std::pow(g, 0.25) * std::pow(m, 0.25));
}

/// sup r^{(N−2s)/2}|f| / (‖∇f‖^s ‖f‖^{1−s}) for ½ ≤ s ≤ 1, N ≥ 3.
inline double radial_sobolev_210(const RadialField& f, double s) {
  const int N = f.grid->dim();
  if (N < 3) throw PreconditionError("fractional radial Sobolev ratio needs N >= 3");
  if (!(s >= 0.5 && s <= 1.0)) throw PreconditionError("fractional radial Sobolev ratio needs 1/2 <= s <= 1");
  double g = gradient_sq_norm(f), m = mass(f);
  detail::require_nonzero(g, m);
  double denom = std::pow(g, s / 2.0) * (s == 1.0 ? 1.0 : std::pow(m, (1.0 - s) / 2.0));
  return detail::weighted_sup(f, (N - 2.0 * s) / 2.0) / denom;
}

/// sup r^{(N−2)/2}|f| / ‖∇f‖, N ≥ 3.
inline double radial_sobolev_23(const RadialField& f) {
  if (f.grid->dim() < 3) throw PreconditionError("radial Sobolev ratio with r^{(N-2)/2} needs N >= 3");
  return radial_sobolev_210(f, 1.0);
}

/// P(f) / (C_opt (‖∇f‖²)^{A/2} M(f)^{B/2}); at most 1 when c_opt is the sharp constant.
inline double gn_check(const RadialField& f, const Params& P, double c_opt) {
  P.validate();
  double lower = lwp_lower_power(P.N, P.b);
  if (!(P.p > lower) || detail::near(P.p, lower))
    throw PreconditionError("weighted Gagliardo-Nirenberg inequality requires p > 1 + 2b/(N-1)");
  if (P.N >= 3 && P.p > energy_critical_power(P.N, P.b) && !is_energy_critical(P))
    throw PreconditionError("weighted Gagliardo-Nirenberg inequality requires p <= (N+2+2b)/(N-2)");
  return weinstein(f, P) / c_opt;
}

/// θ with p+1 = (2 + 2b/(N−1))θ + ((2N+2b)/(N−2))(1−θ), checked against the two exponent
/// identities (b/(N−1))θ + (2N+2b)/(N−2)·(1−θ) = (N(p−1)−2b)/2 and (2 + b/(N−1))θ = (4+2b−(N−2)(p−1))/2.
inline Rational interpolation_theta(const exponents::RationalParams& P) {
  const int N = P.N;
  if (N < 3) throw PreconditionError("interpolation between radial Sobolev endpoints needs N >= 3");
  const Rational& b = P.b;
  const Rational& p = P.p;
  Rational lo = 2 + 2 * b / (N - 1);
  Rational hi = (2 * N + 2 * b) / (N - 2);
  if (p + 1 < lo || p + 1 > hi)
    throw PreconditionError("interpolation needs 2 + 2b/(N-1) <= p+1 <= (2N+2b)/(N-2)");
  Rational theta = (hi - (p + 1)) / (hi - lo);
  if (b / (N - 1) * theta + hi * (1 - theta) != (N * (p - 1) - 2 * b) / 2)
    throw std::logic_error("gradient-exponent identity fails");
  if ((2 + b / (N - 1)) * theta != (4 + 2 * b - (N - 2) * (p - 1)) / 2)
    throw std::logic_error("mass-exponent identity fails");
  return theta;
}

inline double interpolation_theta(const Params& P) {
  return to_double(interpolation_theta(exponents::RationalParams::from(P)));
}

/// Smooth bump exp(−1/(t(1−t))) on (0, 1).
inline double witness_bump(double t) { return (t <= 0.0 || t >= 1.0) ? 0.0 : std::exp(-1.0 / (t * (1.0 - t))); }

struct WitnessResult {
  std::vector<std::pair<double, double>> ratios;  // (k, ratio_k)
  double fitted_slope = 0;
  double predicted_slope = 0;  // (N−1)/2 · (1 + 2b/(N−1) − p)
};

/// ∫ r^b |f_k|^{p+1} / ‖f_k‖_{H¹}^{p+1} for f_k = ψ(r − k); grows like k^{(N−1)/2(1+2b/(N−1)−p)}.
inline WitnessResult divergence_witness(const Params& P, const std::vector<double>& k_values, double dr = 1e-3) {
  P.validate();
  if (!(P.p < lwp_lower_power(P.N, P.b)) || detail::near(P.p, lwp_lower_power(P.N, P.b)))
    throw PreconditionError("the divergence witness exists only for 1 < p < 1 + 2b/(N-1)");
  if (k_values.size() < 2) throw std::invalid_argument("slope fit needs at least two k values");
  WitnessResult out;
  out.predicted_slope = (P.N - 1.0) / 2.0 * (1.0 + 2.0 * P.b / (P.N - 1.0) - P.p);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double k : k_values) {
    GridPtr g = RadialGrid::make(P.N, k + 2.0, dr);
    RadialField f = RadialField::sample(g, [k](double r) { return witness_bump(r - k); });
    double h1 = mass(f) + gradient_sq_norm(f);
    double ratio = potential(f, P) / std::pow(h1, (P.p + 1.0) / 2.0);
    out.ratios.emplace_back(k, ratio);
    double x = std::log(k), y = std::log(ratio);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  double n = static_cast<double>(k_values.size());
  out.fitted_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return out;
}

/// ‖f/r‖_{L^q} / ‖∂_r f‖_{L^q}, bounded by q/(N−q) for 1 < q < N.
inline double hardy_ratio(const RadialField& f, double q) {
  const RadialGrid& g = *f.grid;
  const int N = g.dim();
  if (!(q > 1.0 && q < N)) throw PreconditionError("Hardy inequality needs 1 < r < N");
  const double omega = sphere_area(N);
  const double dr = g.dr();
  // ∫ |f|^q r^{N−1−q}: first cell integrated against the exact weight, trapezoid beyond
  const double e = N - 1.0 - q;
  double num = 0.0;
  double f0 = std::pow(std::abs(f[0]), q), f1 = std::pow(std::abs(f[1]), q);
  num += omega * 0.5 * (f0 + f1) * std::pow(dr, e + 1.0) / (e + 1.0);
  for (std::size_t i = 1; i < g.size(); ++i) {
    double w = (i == g.size() - 1 ? 0.5 : 1.0) * (i == 1 ? 0.5 : 1.0);
    num += omega * w * dr * std::pow(std::abs(f[i]), q) * std::pow(g.r(i), e);
  }
  std::vector<cplx> d = radial_derivative(f);
  std::vector<double> dq(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) dq[i] = std::pow(std::abs(d[i]), q);
  double den = integrate(g, dq);
  if (!(den > 0.0)) throw PreconditionError("Hardy ratio is undefined for a constant field");
  return std::pow(num / den, 1.0 / q);
}

}  // namespace inls
