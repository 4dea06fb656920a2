#pragma once

// Radial virial weights equal to r² inside r ≤ R and flattened outside.
//
//   PhiR: φ_R = R²θ(r/R), θ'' = ζ, ζ = 2 on [0,1], a quintic smoothstep down to 0 on [1,2].
//   PsiR: ψ_R = R²Θ(r/R), Θ' = ϑ, ϑ = 2s on [0,1], 2[s − (s−1)⁵] on (1, s1], then a
//         degree-7 Hermite bridge to 0 on (s1, 2), 0 beyond; s1 = 1 + 5^{−1/4}.
//
// The bridge matches ϑ and its first three derivatives at s1 and vanishes to third order at
// 2, so ψ_R is C⁴ and Δ²ψ_R is bounded. Everything is evaluated in closed form; there is no
// quadrature in this file.

#include "inls/grid.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace inls {

enum class CutoffKind { Quadratic, PhiR, PsiR };

inline const char* cutoff_name(CutoffKind k) {
  switch (k) {
    case CutoffKind::Quadratic: return "Quadratic";
    case CutoffKind::PhiR: return "PhiR";
    case CutoffKind::PsiR: return "PsiR";
  }
  return "?";
}

/// Value and radial derivatives of a weight at one radius. d1_over_r stays finite at r = 0.
struct CutoffJet {
  double v = 0, d1 = 0, d2 = 0, d3 = 0, d4 = 0, d1_over_r = 0;
};

namespace detail {

/// θ and derivatives in the scaled variable s for the smoothstep cutoff; index k is θ^{(k)}.
inline std::array<double, 5> theta_phi(double s) {
  if (s <= 1.0) return {s * s, 2.0 * s, 2.0, 0.0, 0.0};
  if (s >= 2.0) return {26.0 / 7.0 + 3.0 * (s - 2.0), 3.0, 0.0, 0.0, 0.0};
  double x = s - 1.0, x2 = x * x, x4 = x2 * x2;
  double smooth = x * x2 * (10.0 - 15.0 * x + 6.0 * x2);
  return {1.0 + 2.0 * x + x2 - x4 * x + x4 * x2 - 2.0 / 7.0 * x4 * x2 * x,
          2.0 + 2.0 * x - 5.0 * x4 + 6.0 * x4 * x - 2.0 * x4 * x2,
          2.0 * (1.0 - smooth),
          -60.0 * x2 * (1.0 - x) * (1.0 - x),
          -120.0 * x * (1.0 - x) * (1.0 - 2.0 * x)};
}

inline double psi_s1() { return 1.0 + std::pow(5.0, -0.25); }

/// Coefficients c_0..c_7 of the bridge P(t), t = (s − s1)/h, h = 2 − s1.
struct Bridge {
  std::array<double, 8> c{};
  double h = 0, s1 = 0, theta_s1 = 0, theta_end = 0;

  double eval(double t, int k) const {
    // k-th t-derivative by Horner on the differentiated coefficients
    double acc = 0.0;
    for (int j = 7; j >= k; --j) {
      double coef = c[j];
      for (int m = 0; m < k; ++m) coef *= static_cast<double>(j - m);
      acc = acc * t + coef;
    }
    return acc;
  }
  double antiderivative(double t) const {
    double acc = 0.0;
    for (int j = 7; j >= 0; --j) acc = acc * t + c[j] / (j + 1.0);
    return acc * t;
  }
};

inline Bridge build_bridge() {
  Bridge B;
  B.s1 = psi_s1();
  B.h = 2.0 - B.s1;
  double x = B.s1 - 1.0;
  double x2 = x * x;
  double y0 = 2.0 * (B.s1 - x2 * x2 * x);
  double y1 = 2.0 * (1.0 - 5.0 * x2 * x2);
  double y2 = -40.0 * x2 * x;
  double y3 = -120.0 * x2;
  double h = B.h;
  B.c[0] = y0;
  B.c[1] = y1 * h;
  B.c[2] = y2 * h * h / 2.0;
  B.c[3] = y3 * h * h * h / 6.0;
  // P^{(k)}(1) = 0 for k = 0..3 fixes c_4..c_7
  double A[4][5];
  for (int k = 0; k < 4; ++k) {
    double rhs = 0.0;
    for (int j = k; j < 4; ++j) {
      double f = 1.0;
      for (int m = 0; m < k; ++m) f *= j - m;
      rhs -= f * B.c[j];
    }
    for (int j = 4; j < 8; ++j) {
      double f = 1.0;
      for (int m = 0; m < k; ++m) f *= j - m;
      A[k][j - 4] = f;
    }
    A[k][4] = rhs;
  }
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    for (int j = 0; j < 5; ++j) std::swap(A[col][j], A[piv][j]);
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      double f = A[r][col] / A[col][col];
      for (int j = col; j < 5; ++j) A[r][j] -= f * A[col][j];
    }
  }
  for (int k = 0; k < 4; ++k) B.c[4 + k] = A[k][4] / A[k][k];
  B.theta_s1 = B.s1 * B.s1 - std::pow(x, 6) / 3.0;
  B.theta_end = B.theta_s1 + h * B.antiderivative(1.0);
  // ϑ' < 0 on the open bridge; near the endpoints it vanishes like t and (1−t)³
  for (int i = 1; i < 10000; ++i) {
    double t = i / 10000.0;
    if (!(B.eval(t, 1) < 0.0)) throw std::logic_error("cutoff bridge is not strictly decreasing");
  }
  return B;
}

inline const Bridge& bridge() {
  static const Bridge B = build_bridge();
  return B;
}

/// Θ, ϑ, ϑ', ϑ'', ϑ''' in s, plus ϑ/s.
inline std::array<double, 6> theta_psi(double s) {
  if (s <= 1.0) return {s * s, 2.0 * s, 2.0, 0.0, 0.0, 2.0};
  const Bridge& B = bridge();
  if (s >= 2.0) return {B.theta_end, 0.0, 0.0, 0.0, 0.0, 0.0};
  if (s <= B.s1) {
    double x = s - 1.0, x2 = x * x, x4 = x2 * x2;
    double v = 2.0 * (s - x4 * x);
    return {s * s - x4 * x2 / 3.0, v, 2.0 * (1.0 - 5.0 * x4), -40.0 * x2 * x, -120.0 * x2, v / s};
  }
  double t = (s - B.s1) / B.h;
  double v = B.eval(t, 0);
  return {B.theta_s1 + B.h * B.antiderivative(t), v, B.eval(t, 1) / B.h, B.eval(t, 2) / (B.h * B.h),
          B.eval(t, 3) / (B.h * B.h * B.h), v / s};
}

}  // namespace detail

/// Analytic radial weight; cheap to copy.
class Cutoff {
 public:
  static Cutoff quadratic() { return Cutoff(CutoffKind::Quadratic, 0.0); }
  static Cutoff phi(double R) { return Cutoff(CutoffKind::PhiR, R); }
  static Cutoff psi(double R) {
    (void)detail::bridge();
    return Cutoff(CutoffKind::PsiR, R);
  }

  CutoffKind kind() const { return kind_; }
  double R() const { return R_; }

  CutoffJet jet(double r) const {
    CutoffJet j;
    if (kind_ == CutoffKind::Quadratic || r <= R_) {
      j.v = r * r;
      j.d1 = 2.0 * r;
      j.d2 = 2.0;
      j.d1_over_r = 2.0;
      return j;
    }
    double s = r / R_;
    if (kind_ == CutoffKind::PhiR) {
      auto t = detail::theta_phi(s);
      j = {R_ * R_ * t[0], R_ * t[1], t[2], t[3] / R_, t[4] / (R_ * R_), t[1] / s};
    } else {
      auto t = detail::theta_psi(s);
      j = {R_ * R_ * t[0], R_ * t[1], t[2], t[3] / R_, t[4] / (R_ * R_), t[5]};
    }
    return j;
  }

  /// Δφ = φ'' + (N−1)φ'/r.
  double laplacian(int N, double r) const {
    CutoffJet j = jet(r);
    return j.d2 + (N - 1.0) * j.d1_over_r;
  }

  /// Δ²φ for a radial φ; zero wherever φ = r².
  double bilaplacian(int N, double r) const {
    if (kind_ == CutoffKind::Quadratic || r <= R_) return 0.0;
    CutoffJet j = jet(r);
    double m = N - 1.0;
    return j.d4 + 2.0 * m * j.d3 / r + m * (m - 2.0) * (j.d2 / (r * r) - j.d1 / (r * r * r));
  }

 private:
  Cutoff(CutoffKind k, double R) : kind_(k), R_(R) {
    if (k != CutoffKind::Quadratic && !(R > 0.0)) throw PreconditionError("cutoff radius must be positive");
  }
  CutoffKind kind_;
  double R_;
};

/// A cutoff tabulated on a grid, with the sign invariants checked at construction.
struct CutoffProfile {
  Cutoff fn = Cutoff::quadratic();
  GridPtr grid;
  std::vector<double> phi, d1, d2, lap, bilap;

  CutoffKind kind() const { return fn.kind(); }
  double R() const { return fn.R(); }
};

namespace detail {

inline CutoffProfile tabulate(const Cutoff& c, GridPtr grid) {
  CutoffProfile out;
  out.fn = c;
  out.grid = grid;
  const std::size_t n = grid->size();
  out.phi.resize(n);
  out.d1.resize(n);
  out.d2.resize(n);
  out.lap.resize(n);
  out.bilap.resize(n);
  const int N = grid->dim();
  for (std::size_t i = 0; i < n; ++i) {
    double r = grid->r(i);
    CutoffJet j = c.jet(r);
    out.phi[i] = j.v;
    out.d1[i] = j.d1;
    out.d2[i] = j.d2;
    out.lap[i] = c.laplacian(N, r);
    out.bilap[i] = c.bilaplacian(N, r);
  }
  return out;
}

inline void require_profile(bool ok, CutoffKind k, const char* what, double r) {
  if (!ok)
    throw std::logic_error(std::string(cutoff_name(k)) + " violates " + what + " at r = " + std::to_string(r));
}

}  // namespace detail

inline CutoffProfile quadratic_profile(GridPtr grid) { return detail::tabulate(Cutoff::quadratic(), grid); }

/// φ_R with 0 ≤ φ'' ≤ 2, φ'/r ≤ 2 and Δφ ≤ 2N; throws std::logic_error if the grid says otherwise.
inline CutoffProfile build_zeta_theta_phi(double R, GridPtr grid) {
  CutoffProfile out = detail::tabulate(Cutoff::phi(R), grid);
  const double tol = 1e-12;
  const int N = grid->dim();
  for (std::size_t i = 1; i < grid->size(); ++i) {
    double r = grid->r(i);
    CutoffJet j = out.fn.jet(r);
    detail::require_profile(j.d2 >= -tol && j.d2 <= 2.0 + tol, CutoffKind::PhiR, "0 <= phi'' <= 2", r);
    detail::require_profile(2.0 - j.d1_over_r >= -tol, CutoffKind::PhiR, "phi'/r <= 2", r);
    detail::require_profile(2.0 * N - out.lap[i] >= -tol, CutoffKind::PhiR, "lap phi <= 2N", r);
  }
  return out;
}

/// ψ_R with ψ'' ≤ 2, ψ'/r ≤ 2 and Δψ ≤ 2N.
inline CutoffProfile build_vartheta_psi(double R, GridPtr grid) {
  CutoffProfile out = detail::tabulate(Cutoff::psi(R), grid);
  const double tol = 1e-12;
  const int N = grid->dim();
  for (std::size_t i = 1; i < grid->size(); ++i) {
    double r = grid->r(i);
    CutoffJet j = out.fn.jet(r);
    detail::require_profile(j.d2 <= 2.0 + tol, CutoffKind::PsiR, "psi'' <= 2", r);
    detail::require_profile(j.d1_over_r <= 2.0 + tol, CutoffKind::PsiR, "psi'/r <= 2", r);
    detail::require_profile(out.lap[i] <= 2.0 * N + tol, CutoffKind::PsiR, "lap psi <= 2N", r);
  }
  return out;
}

inline CutoffProfile build_cutoff(const Cutoff& c, GridPtr grid) {
  switch (c.kind()) {
    case CutoffKind::PhiR: return build_zeta_theta_phi(c.R(), grid);
    case CutoffKind::PsiR: return build_vartheta_psi(c.R(), grid);
    default: return quadratic_profile(grid);
  }
}

}  // namespace inls
