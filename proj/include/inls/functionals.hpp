#pragma once

#include "inls/grid.hpp"
#include "inls/params.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace inls {

inline double mass(const RadialField& u) { return integrate(u); }

/// ∫ r^b |u|^{p+1}.
inline double potential(const RadialField& u, const Params& P) {
  const RadialGrid& g = *u.grid;
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) f[i] = std::pow(g.r(i), P.b) * std::pow(std::abs(u[i]), P.p + 1.0);
  return integrate(g, f);
}

inline double energy(const RadialField& u, const Params& P) {
  return 0.5 * gradient_sq_norm(u) - potential(u, P) / (P.p + 1.0);
}

/// Weinstein quotient P(u) / ((‖∇u‖²)^{A/2} M(u)^{B/2}); invariant under u ↦ c·u(λ·).
inline double weinstein(const RadialField& u, const Params& P) {
  Exponents e = exponents_of(P);
  double g = gradient_sq_norm(u);
  double m = mass(u);
  if (!(g > 0.0) || !(m > 0.0)) throw PreconditionError("Weinstein quotient is undefined for the zero field");
  return potential(u, P) / (std::pow(g, e.A / 2.0) * std::pow(m, e.B / 2.0));
}

/// Relative residuals of the two Pohozaev relations
///   ‖∇Q‖² = a/(4+2b−(N−2)(p−1)) ‖Q‖²,   ‖∇Q‖² = a/(2(p+1)) ∫r^b|Q|^{p+1},   a = N(p−1)−2b.
inline std::pair<double, double> pohozaev_residuals(const RadialField& Q, const Params& P) {
  double g = gradient_sq_norm(Q);
  if (!(g > 0.0)) throw PreconditionError("Pohozaev residuals are undefined for the zero field");
  double a = pohozaev_a(P);
  double k1 = a / (4.0 + 2.0 * P.b - (P.N - 2.0) * (P.p - 1.0));
  double k2 = a / (2.0 * (P.p + 1.0));
  return {std::abs(g - k1 * mass(Q)) / g, std::abs(g - k2 * potential(Q, P)) / g};
}

/// C_opt = 2(p+1)/a · (‖∇Q‖‖Q‖^{σ_c})^{−(a−4)/2}, a = N(p−1)−2b. Arguments are norms, not squares.
inline double c_opt_closed_form(double grad_norm, double mass_norm, const Params& P) {
  Exponents e = exponents_of(P);
  if (e.sigma_infinite())
    throw PreconditionError("closed-form C_opt needs finite sigma_c; at mass-critical p use weinstein(Q)");
  double a = pohozaev_a(P);
  return 2.0 * (P.p + 1.0) / a * std::pow(grad_norm * std::pow(mass_norm, e.sigma_c), -(a - 4.0) / 2.0);
}

/// F(λ) = ½λ² − C_opt/(p+1)·λ^{A}.
inline double coercivity_F(double lambda, const Params& P, double c_opt) {
  return 0.5 * lambda * lambda - c_opt / (P.p + 1.0) * std::pow(lambda, exponents_of(P).A);
}

/// G(λ) = (aλ² − 4λ^{a/2}) / (a − 4); G(0) = 0, G(1) = 1.
inline double coercivity_G(double lambda, const Params& P) {
  double a = pohozaev_a(P);
  if (is_mass_critical(P)) throw PreconditionError("coercivity G has a zero denominator at mass-critical p");
  return (a * lambda * lambda - 4.0 * std::pow(lambda, a / 2.0)) / (a - 4.0);
}

/// δ(ρ) with K(f) ≥ δ(ρ)·∫r^b|f|^{p+1} whenever ‖∇f‖‖f‖^{σ_c} < (1−ρ)‖∇Q‖‖Q‖^{σ_c}.
inline double coercivity_delta(double rho, const Params& P) {
  double a = pohozaev_a(P);
  double s = std::pow(1.0 - rho, (a - 4.0) / 2.0);
  return a * (1.0 - s) / (2.0 * (P.p + 1.0) * s);
}

/// K(f) = ‖∇f‖² − a/(2(p+1)) ∫r^b|f|^{p+1}.
inline double k_functional(const RadialField& f, const Params& P) {
  return gradient_sq_norm(f) - pohozaev_a(P) / (2.0 * (P.p + 1.0)) * potential(f, P);
}

}  // namespace inls
