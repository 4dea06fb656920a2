#pragma once

#include "inls/params.hpp"
#include "inls/rational.hpp"

#include <string>
#include <variant>
#include <vector>

namespace inls::exponents {

/// An exponent pair stored by reciprocals so that q = ∞ is simply 1/q = 0.
struct PairQR {
  Rational inv_q;
  Rational inv_r;
  static PairQR from(const Rational& q, const Rational& r) { return {1 / q, 1 / r}; }
};

/// (N, b, p) with exact entries.
struct RationalParams {
  int N;
  Rational b;
  Rational p;
  static RationalParams from(const Params& P) {
    return {P.N, rational_from_double(P.b), rational_from_double(P.p)};
  }
};

/// 2/q + N/r = N/2 with 2 ≤ r ≤ 2N/(N−2) (N ≥ 3), 2 ≤ r < ∞ (N = 2), 2 ≤ r ≤ ∞ (N = 1).
inline bool admissible_check(const PairQR& qr, int N) {
  if (qr.inv_q < 0 || qr.inv_r < 0) return false;
  if (2 * qr.inv_q + N * qr.inv_r != Rational(N, 2)) return false;
  if (qr.inv_r > Rational(1, 2)) return false;
  if (N >= 3) return qr.inv_r >= Rational(N - 2, 2 * N);
  if (N == 2) return qr.inv_r > 0;
  return true;
}

inline void require_window(const Rational& alpha, int N, const char* what) {
  if (N < 1) throw PreconditionError(std::string(what) + ": dimension must be positive");
  if (!(alpha > Rational(4, N)))
    throw PreconditionError(std::string(what) + " requires alpha > 4/N (scattering window)");
  if (N >= 3 && !(alpha < Rational(4, N - 2)))
    throw PreconditionError(std::string(what) + " requires alpha < 4/(N-2) (scattering window)");
}

struct ScatteringExponents {
  Rational q, r, k, m;
};

/// q = 4(α+2)/(Nα), r = α+2, k = 2α(α+2)/(4−(N−2)α), m = 2α(α+2)/(Nα²+(N−2)α−4).
/// Verified on return: 1/k + 1/m = 2/q, k > q/2, (q, r) admissible.
inline ScatteringExponents scattering_exponents(const Rational& alpha, int N) {
  require_window(alpha, N, "scattering exponents");
  const Rational& a = alpha;
  ScatteringExponents s;
  s.q = 4 * (a + 2) / (N * a);
  s.r = a + 2;
  s.k = 2 * a * (a + 2) / (4 - (N - 2) * a);
  s.m = 2 * a * (a + 2) / (N * a * a + (N - 2) * a - 4);
  if (1 / s.k + 1 / s.m != 2 / s.q) throw std::logic_error("1/k + 1/m != 2/q");
  if (!(s.k > s.q / 2)) throw std::logic_error("k <= q/2");
  if (!admissible_check(PairQR::from(s.q, s.r), N)) throw std::logic_error("(q, r) not admissible");
  return s;
}

struct AuxiliaryExponents {
  Rational l, delta;
};

/// l = 2Nα(α+2)/(Nα²+4(N−1)α−8), δ = (Nα−4)/(2α).
/// Verified on return: (k, l) admissible, δ ∈ (0, 1), and the Sobolev relation 1/r = 1/l − δ/N,
/// which forces l ≤ r (the embedding W^{δ,l} ⊂ L^r runs from the smaller to the larger exponent).
inline AuxiliaryExponents auxiliary_exponents(const Rational& alpha, int N) {
  require_window(alpha, N, "auxiliary exponents");
  const Rational& a = alpha;
  AuxiliaryExponents x;
  x.l = 2 * N * a * (a + 2) / (N * a * a + 4 * (N - 1) * a - 8);
  x.delta = (N * a - 4) / (2 * a);
  ScatteringExponents s = scattering_exponents(alpha, N);
  if (!admissible_check(PairQR::from(s.k, x.l), N)) throw std::logic_error("(k, l) not admissible");
  if (!(x.delta > 0 && x.delta < 1)) throw std::logic_error("delta outside (0, 1)");
  if (1 / s.r != 1 / x.l - x.delta / N) throw std::logic_error("Sobolev relation 1/r = 1/l - delta/N fails");
  if (!(x.l <= s.r)) throw std::logic_error("l > r");
  return x;
}

/// Weight mode for the Morawetz exponent: which radial Sobolev power absorbs |x|^b.
struct ModeNMinus1 {};
struct ModeNMinus2 {};
struct ModeS {
  Rational s;
};
using MorawetzMode = std::variant<ModeNMinus1, ModeNMinus2, ModeS>;

struct Morawetz {
  Rational alpha, beta;
};

/// α = p − 1 − 2b/d with d = N−1, N−2 or N−2s; β = max{1/3, 2/((N−1)α + 2)}.
inline Morawetz morawetz_beta(const RationalParams& P, const MorawetzMode& mode) {
  Rational d;
  if (std::holds_alternative<ModeNMinus1>(mode)) {
    d = P.N - 1;
  } else if (std::holds_alternative<ModeNMinus2>(mode)) {
    d = P.N - 2;
  } else {
    d = P.N - 2 * std::get<ModeS>(mode).s;
  }
  if (d <= 0) throw PreconditionError("Morawetz weight mode needs a positive radial Sobolev power");
  Morawetz m;
  m.alpha = P.p - 1 - 2 * P.b / d;
  if (!(m.alpha > 0)) throw PreconditionError("Morawetz exponent requires alpha = p - 1 - 2b/d > 0");
  Rational cand = 2 / ((P.N - 1) * m.alpha + 2);
  m.beta = cand > Rational(1, 3) ? cand : Rational(1, 3);
  return m;
}

struct DispersiveChoice {
  bool feasible = false;
  bool in_window = false;
  Rational inv_n;     // 1/n
  Rational theta;     // 1/r = θ/l + (1−θ)/n
  Rational factorization;  // (α+1)(Nα² + (N−2)α − 4)
  std::vector<std::string> failed;  // names of violated constraints
};

/// Chooses 1/n = 0 for α > 1 and 1/n = (1−α)/2 otherwise, then checks
///   0 ≤ 1/n < 1/(α+2),   (1−α)/2 ≤ 1/n ≤ (N+2−(N−2)α)/(2N),   1/n < ((N−2)(α²+3α)−4)/(2Nα(α+2)).
/// Feasible only inside the open window 4/N < α < 4/(N−2); the constraint values are reported
/// either way.
inline DispersiveChoice dispersive_n_feasible(const Rational& alpha, int N) {
  if (N < 3) throw PreconditionError("dispersive exponent choice is defined for N >= 3");
  const Rational& a = alpha;
  DispersiveChoice c;
  c.in_window = a > Rational(4, N) && a < Rational(4, N - 2);
  if (!c.in_window) c.failed.push_back("window 4/N < alpha < 4/(N-2)");
  c.inv_n = a > 1 ? Rational(0) : (1 - a) / 2;
  c.factorization = (a + 1) * (N * a * a + (N - 2) * a - 4);
  if (c.factorization != N * a * a * a + 2 * (N - 1) * a * a + (N - 6) * a - 4)
    throw std::logic_error("cubic factorization mismatch");
  const Rational& n = c.inv_n;
  if (!(n >= 0 && n < 1 / (a + 2))) c.failed.push_back("0 <= 1/n < 1/(alpha+2)");
  if (!(n >= (1 - a) / 2 && n <= (N + 2 - (N - 2) * a) / (2 * N)))
    c.failed.push_back("(1-alpha)/2 <= 1/n <= (N+2-(N-2)alpha)/(2N)");
  if (!(n < ((N - 2) * (a * a + 3 * a) - 4) / (2 * N * a * (a + 2))))
    c.failed.push_back("1/n < ((N-2)(alpha^2+3alpha)-4)/(2N alpha(alpha+2))");
  if (a <= 1 && !(c.factorization > 0)) c.failed.push_back("N alpha^3 + 2(N-1)alpha^2 + (N-6)alpha - 4 > 0");
  // θ from 1/r = θ/l + (1−θ)/n
  Rational inv_r = 1 / (a + 2);
  Rational denom_l = N * a * a + 4 * (N - 1) * a - 8;
  if (denom_l != 0) {
    Rational inv_l = denom_l / (2 * N * a * (a + 2));
    if (inv_l != n) c.theta = (inv_r - n) / (inv_l - n);
  }
  c.feasible = c.failed.empty();
  return c;
}

}  // namespace inls::exponents
