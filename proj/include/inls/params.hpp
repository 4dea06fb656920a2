#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace inls {

/// Raised when inputs fall outside the hypotheses an operation relies on.
/// The message names the violated hypothesis.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dimension, weight exponent and nonlinearity power of i u_t + Δu = −|x|^b |u|^{p−1} u.
struct Params {
  int N = 3;
  double b = 1.0;
  double p = 3.0;

  void validate() const {
    if (N < 2) throw PreconditionError("dimension N must satisfy N >= 2");
    if (!(b > 0.0) || !std::isfinite(b)) throw PreconditionError("weight exponent b must satisfy b > 0");
    if (!(p > 1.0) || !std::isfinite(p)) throw PreconditionError("nonlinearity power p must satisfy p > 1");
  }

  std::string str() const {
    return "(N=" + std::to_string(N) + ", b=" + std::to_string(b) + ", p=" + std::to_string(p) + ")";
  }
};

enum class Regime { MassSubcritical, MassCritical, Intercritical, EnergyCritical, EnergySupercritical };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::MassSubcritical: return "MassSubcritical";
    case Regime::MassCritical: return "MassCritical";
    case Regime::Intercritical: return "Intercritical";
    case Regime::EnergyCritical: return "EnergyCritical";
    case Regime::EnergySupercritical: return "EnergySupercritical";
  }
  return "?";
}

struct RegimeClass {
  Regime kind;
  bool lwp_lower_ok;         // p >= 1 + 2b/(N-1)
  bool scattering_range_ok;  // p > (N+4)/N + 2b/(N-1)
};

namespace detail {
inline bool near(double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(y)); }
}  // namespace detail

inline double mass_critical_power(int N, double b) { return (N + 4.0 + 2.0 * b) / N; }

/// Infinite for N = 2.
inline double energy_critical_power(int N, double b) {
  if (N <= 2) return std::numeric_limits<double>::infinity();
  return (N + 2.0 + 2.0 * b) / (N - 2.0);
}

inline double lwp_lower_power(int N, double b) { return 1.0 + 2.0 * b / (N - 1.0); }

inline bool is_mass_critical(const Params& P) { return detail::near(P.p, mass_critical_power(P.N, P.b)); }

inline bool is_energy_critical(const Params& P) {
  return P.N >= 3 && detail::near(P.p, energy_critical_power(P.N, P.b));
}

inline RegimeClass classify(const Params& P) {
  P.validate();
  RegimeClass rc{};
  double pm = mass_critical_power(P.N, P.b);
  double pe = energy_critical_power(P.N, P.b);
  if (detail::near(P.p, pm)) {
    rc.kind = Regime::MassCritical;
  } else if (P.p < pm) {
    rc.kind = Regime::MassSubcritical;
  } else if (P.N >= 3 && detail::near(P.p, pe)) {
    rc.kind = Regime::EnergyCritical;
  } else if (P.N >= 3 && P.p > pe) {
    rc.kind = Regime::EnergySupercritical;
  } else {
    rc.kind = Regime::Intercritical;
  }
  double lower = lwp_lower_power(P.N, P.b);
  rc.lwp_lower_ok = P.p >= lower || detail::near(P.p, lower);
  rc.scattering_range_ok = P.p > (P.N + 4.0) / P.N + 2.0 * P.b / (P.N - 1.0);
  return rc;
}

/// Critical exponents and the Gagliardo–Nirenberg powers A (gradient) and B (mass), A + B = p + 1.
struct Exponents {
  double gamma_c;
  double sigma_c;  // +inf when gamma_c == 0
  double A;
  double B;
  bool sigma_infinite() const { return std::isinf(sigma_c); }
};

inline Exponents exponents_of(const Params& P) {
  Exponents e{};
  e.gamma_c = P.N / 2.0 - (2.0 + P.b) / (P.p - 1.0);
  if (is_mass_critical(P)) {
    e.gamma_c = 0.0;
    e.sigma_c = std::numeric_limits<double>::infinity();
  } else {
    e.sigma_c = (4.0 + 2.0 * P.b - (P.N - 2.0) * (P.p - 1.0)) / (P.N * (P.p - 1.0) - 4.0 - 2.0 * P.b);
  }
  e.A = (P.N * (P.p - 1.0) - 2.0 * P.b) / 2.0;
  e.B = (4.0 + 2.0 * P.b - (P.N - 2.0) * (P.p - 1.0)) / 2.0;
  return e;
}

/// N(p−1) − 2b, the coefficient that recurs in Pohozaev and virial relations.
inline double pohozaev_a(const Params& P) { return P.N * (P.p - 1.0) - 2.0 * P.b; }

}  // namespace inls
