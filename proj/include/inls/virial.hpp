#pragma once

// Localized virial identities evaluated on grid states, the ψ_R sign lemmas behind the
// mass-critical blow-up argument, and the remainder envelopes of the localized estimates.

#include "inls/cutoffs.hpp"
#include "inls/evolution.hpp"
#include "inls/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace inls {

// ---------------------------------------------------------------------------------------
// ψ_{1,R}, ψ_{2,R}

/// ψ₁ = 2 − ψ'', ψ₂ = (p★−1)(2N − Δψ) − 2b(2 − ψ'/r), with p★ the mass-critical power.
inline std::pair<double, double> psi_parts(const Cutoff& c, int N, double b, double r) {
  CutoffJet j = c.jet(r);
  double ps = mass_critical_power(N, b) - 1.0;
  double lap = j.d2 + (N - 1.0) * j.d1_over_r;
  return {2.0 - j.d2, ps * (2.0 * N - lap) - 2.0 * b * (2.0 - j.d1_over_r)};
}

/// Constants of the inner-annulus form ψ₂ = (s−1)⁴·h(s), h(s) = C + D − D/s.
struct Psi2Closed {
  double C, D;
  double h(double s) const { return C + D - D / s; }
  double value(double s) const { return std::pow(s - 1.0, 4) * h(s); }
};

inline Psi2Closed psi2_closed_form(int N, double b) {
  double ps = mass_critical_power(N, b) - 1.0;
  return {10.0 * ps, 2.0 * ((N - 1.0) * ps - 2.0 * b)};
}

struct Psi12 {
  std::vector<double> psi1, psi2;
  double closed_form_mismatch = 0;  // sup over (R, s1·R] against the closed form
};

/// Requires mass-critical params; throws if the assembled ψ₂ disagrees with the closed form.
inline Psi12 psi12(double R, const Params& P, const RadialGrid& grid) {
  if (!is_mass_critical(P)) throw PreconditionError("psi_1, psi_2 use the mass-critical power");
  Cutoff c = Cutoff::psi(R);
  Psi2Closed cf = psi2_closed_form(P.N, P.b);
  double s1 = detail::psi_s1();
  Psi12 out;
  out.psi1.resize(grid.size());
  out.psi2.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double r = grid.r(i);
    auto [a, b] = psi_parts(c, P.N, P.b, r);
    out.psi1[i] = a;
    out.psi2[i] = b;
    double s = r / R;
    if (s > 1.0 && s <= s1) out.closed_form_mismatch = std::max(out.closed_form_mismatch, std::abs(b - cf.value(s)));
  }
  if (out.closed_form_mismatch > 1e-8)
    throw std::logic_error("psi_2 disagrees with its inner-annulus closed form by " +
                           std::to_string(out.closed_form_mismatch));
  return out;
}

namespace detail {
inline void require_lemma_params(const Params& P) {
  if (!is_mass_critical(P)) throw PreconditionError("the psi_R lemmas concern mass-critical p");
  if (!(P.b > 0.0 && P.b < 2.0 * (P.N - 1.0))) throw PreconditionError("the psi_R lemmas require 0 < b < 2(N-1)");
}
constexpr std::size_t kLemmaPoints = 100000;
}  // namespace detail

/// sup_{r > R} R·|∂_r ψ₂^{1/(p★−1)}| on a 10⁵-point grid over (R, 3R]. The value is a
/// function of r/R alone, so it should not move with R beyond sampling error.
inline double lemma52_check(double R, const Params& P) {
  detail::require_lemma_params(P);
  Cutoff c = Cutoff::psi(R);
  const double ps = mass_critical_power(P.N, P.b) - 1.0;
  const double q = 1.0 / ps;
  double sup = 0.0;
  for (std::size_t i = 1; i <= detail::kLemmaPoints; ++i) {
    double r = R + 2.0 * R * static_cast<double>(i) / detail::kLemmaPoints;
    CutoffJet j = c.jet(r);
    double psi2 = psi_parts(c, P.N, P.b, r).second;
    if (!(psi2 > 0.0)) continue;
    // (ψ'/r)' = (ψ'' − ψ'/r)/r
    double dq = (j.d2 - j.d1_over_r) / r;
    double dpsi2 = ps * (-j.d3 - (P.N - 1.0) * dq) + 2.0 * P.b * dq;
    sup = std::max(sup, R * std::abs(q * std::pow(psi2, q - 1.0) * dpsi2));
  }
  return sup;
}

struct Lemma53 {
  bool holds = false;
  double margin = 0;  // min over r > R of 2ψ₁ − Nε/(2N+4+2b)·ψ₂^{N/(2+b)}
  double argmin = 0;
};

inline Lemma53 lemma53_check(double R, const Params& P, double eps) {
  detail::require_lemma_params(P);
  if (P.N < 3 || P.b > P.N - 2.0) throw PreconditionError("the psi_R sign lemma requires N >= 3 and b <= N - 2");
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  Cutoff c = Cutoff::psi(R);
  const double coef = P.N * eps / (2.0 * P.N + 4.0 + 2.0 * P.b);
  const double e = P.N / (2.0 + P.b);
  Lemma53 out;
  out.margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i <= detail::kLemmaPoints; ++i) {
    double r = R + 2.0 * R * static_cast<double>(i) / detail::kLemmaPoints;
    auto [p1, p2] = psi_parts(c, P.N, P.b, r);
    double v = 2.0 * p1 - coef * std::pow(std::max(p2, 0.0), e);
    if (v < out.margin) {
      out.margin = v;
      out.argmin = r;
    }
  }
  out.holds = out.margin >= 0.0;
  return out;
}

// ---------------------------------------------------------------------------------------
// Virial identity

/// V''_φ = −∫Δ²φ|u|² + 4∫φ''|∂_r u|² − 2(p−1)/(p+1)∫Δφ r^b|u|^{p+1} + 4/(p+1)∫ b r^{b−1}φ'|u|^{p+1}.
/// The gradient term is taken on faces, matching gradient_sq_norm. With nonlinear = false the
/// potential terms are dropped (free flow).
inline double virial_rhs(const RadialField& u, const Params& P, const CutoffProfile& cutoff, bool nonlinear = true) {
  const RadialGrid& g = *u.grid;
  if (!cutoff.grid || cutoff.grid->size() != g.size() || cutoff.grid->dr() != g.dr() ||
      cutoff.grid->dim() != g.dim())
    throw std::invalid_argument("cutoff is not tabulated on the field's grid");
  const Cutoff& c = cutoff.fn;
  double s = 4.0 * weighted_gradient_sq(u, [&](double r) { return c.jet(r).d2; });
  const auto& w = g.weights();
  for (std::size_t i = 0; i < g.size(); ++i) {
    double a2 = std::norm(u[i]);
    s -= w[i] * cutoff.bilap[i] * a2;
    if (!nonlinear || a2 == 0.0) continue;
    double r = g.r(i);
    double pot = std::pow(r, P.b) * std::pow(a2, (P.p + 1.0) / 2.0);
    double d1r = c.jet(r).d1_over_r;
    s += w[i] * pot * (-2.0 * (P.p - 1.0) / (P.p + 1.0) * cutoff.lap[i] + 4.0 / (P.p + 1.0) * P.b * d1r);
  }
  return s;
}

struct VirialSample {
  double t = 0, V = 0, Vp = 0, rhs = 0;
};

inline VirialSample virial_sample(double t, const RadialField& u, const Params& P, const CutoffProfile& cutoff,
                                  bool nonlinear = true) {
  return {t, virial_V(u, cutoff.fn), virial_Vp(u, cutoff.fn), virial_rhs(u, P, cutoff, nonlinear)};
}

inline std::vector<VirialSample> virial_samples(const std::vector<SavedState>& states, const Params& P,
                                                const CutoffProfile& cutoff, bool nonlinear = true) {
  std::vector<VirialSample> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(virial_sample(s.t, s.u, P, cutoff, nonlinear));
  return out;
}

/// Observer that records virial samples during a run instead of keeping whole states.
class VirialRecorder {
 public:
  VirialRecorder(const Params& P, CutoffProfile cutoff, bool nonlinear = true)
      : P_(P), cutoff_(std::move(cutoff)), nonlinear_(nonlinear) {}
  void operator()(double t, const RadialField& u) { samples_.push_back(virial_sample(t, u, P_, cutoff_, nonlinear_)); }
  const std::vector<VirialSample>& samples() const { return samples_; }

 private:
  Params P_;
  CutoffProfile cutoff_;
  bool nonlinear_;
  std::vector<VirialSample> samples_;
};

namespace detail {
inline double uniform_spacing(const std::vector<double>& t) {
  double h = t[1] - t[0];
  if (!(h > 0.0)) throw PreconditionError("samples must be strictly increasing in time");
  for (std::size_t i = 2; i < t.size(); ++i)
    if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * h) throw PreconditionError("samples must be uniformly spaced");
  return h;
}
}  // namespace detail

/// max_j |δ²V_j/δt² − rhs_j| / max_j |rhs_j| over interior samples; 0 when both sides vanish.
inline double virial_dynamic_check(const std::vector<VirialSample>& samples) {
  if (samples.size() < 3) throw PreconditionError("virial dynamic check needs at least 3 saved states");
  std::vector<double> t;
  for (const auto& s : samples) t.push_back(s.t);
  double h = detail::uniform_spacing(t);
  double dev = 0.0, scale = 0.0;
  for (std::size_t j = 1; j + 1 < samples.size(); ++j) {
    double vpp = (samples[j + 1].V - 2.0 * samples[j].V + samples[j - 1].V) / (h * h);
    dev = std::max(dev, std::abs(vpp - samples[j].rhs));
    scale = std::max(scale, std::abs(samples[j].rhs));
  }
  if (scale == 0.0) return dev == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return dev / scale;
}

inline double virial_dynamic_check(const EvolutionRun& run, const Params& P, const CutoffProfile& cutoff,
                                   bool nonlinear = true) {
  return virial_dynamic_check(virial_samples(run.states, P, cutoff, nonlinear));
}

// ---------------------------------------------------------------------------------------
// Localized blow-up estimates

enum class VirialBound { MassCritical, Intercritical, EnergyCritical };

inline const char* bound_name(VirialBound b) {
  switch (b) {
    case VirialBound::MassCritical: return "mass-critical localized virial";
    case VirialBound::Intercritical: return "intercritical localized virial";
    case VirialBound::EnergyCritical: return "energy-critical localized virial";
  }
  return "?";
}

inline VirialBound bound_for(const Params& P) {
  RegimeClass rc = classify(P);
  switch (rc.kind) {
    case Regime::MassCritical: return VirialBound::MassCritical;
    case Regime::Intercritical:
      if (P.p > 5.0 + 1e-12) throw PreconditionError("the intercritical localized virial estimate needs p <= 5");
      return VirialBound::Intercritical;
    case Regime::EnergyCritical:
      if (P.p > 5.0 + 1e-12) throw PreconditionError("the energy-critical localized virial estimate needs p <= 5");
      return VirialBound::EnergyCritical;
    default: throw PreconditionError("no localized virial estimate for this regime");
  }
}

/// The explicit part of the bound and the shape multiplying the unknown constant C.
struct BoundTerms {
  double main = 0;
  double shape = 0;
};

inline BoundTerms bound_terms(const RadialField& u, const Params& P, double R, double eps, double energy0) {
  VirialBound kind = bound_for(P);
  BoundTerms bt;
  double G = gradient_sq_norm(u);
  if (kind == VirialBound::MassCritical) {
    if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
    Cutoff c = Cutoff::psi(R);
    const double coef = P.N * eps / (2.0 * P.N + 4.0 + 2.0 * P.b);
    const double e = P.N / (2.0 + P.b);
    double outer = weighted_gradient_sq(u, [&](double r) {
      if (r <= R) return 0.0;
      auto [p1, p2] = psi_parts(c, P.N, P.b, r);
      return 2.0 * p1 - coef * std::pow(std::max(p2, 0.0), e);
    });
    bt.main = 16.0 * energy0 - 2.0 * outer;
    bt.shape = (1.0 + eps + std::pow(eps, -(2.0 + P.b) / (2.0 * P.N - 2.0 - P.b))) / (R * R);
    return bt;
  }
  bt.main = 8.0 * G - (4.0 * P.N * (P.p - 1.0) - 8.0 * P.b) / (P.p + 1.0) * potential(u, P);
  if (std::abs(P.p - 5.0) <= 1e-12)
    bt.shape = 1.0 / (R * R) + std::pow(R, -(2.0 * (P.N - 1.0) - P.b)) * G;
  else
    bt.shape = 1.0 / (R * R) + std::pow(R, -((P.N - 1.0) * (P.p - 1.0) / 2.0 - P.b)) * (G + 1.0);
  return bt;
}

/// Per-time inputs for the bound check, recorded during or after a run.
struct BoundSample {
  double t = 0, V = 0, Vp = 0, main = 0, shape = 0;
  bool resolved = true;  // energy drift still within tolerance
};

struct BoundRow {
  double t = 0, V = 0, Vp = 0, Vpp = 0, rhs_bound = 0, slack = 0;
  bool checked = false;
};

struct BoundSeries {
  VirialBound kind = VirialBound::Intercritical;
  double R = 0, eps = 0, C = 0, tol = 0;
  std::vector<BoundRow> rows;
  bool holds = true;
  double min_slack = std::numeric_limits<double>::infinity();
};

/// Observer that records bound inputs with the ψ_R weight at every accepted step.
class BoundRecorder {
 public:
  BoundRecorder(const Params& P, double R, double eps, double drift_tol = 1e-4)
      : P_(P), R_(R), eps_(eps), tol_(drift_tol), cutoff_(Cutoff::psi(R)) {
    (void)bound_for(P);
  }
  void operator()(double t, const RadialField& u) {
    double E = energy(u, P_);
    if (samples_.empty()) e0_ = E;
    BoundSample s;
    s.t = t;
    s.V = virial_V(u, cutoff_);
    s.Vp = virial_Vp(u, cutoff_);
    BoundTerms bt = bound_terms(u, P_, R_, eps_, e0_);
    s.main = bt.main;
    s.shape = bt.shape;
    bool ok = std::abs(E - e0_) / (std::abs(e0_) + 1.0) <= tol_;
    drifted_ = drifted_ || !ok;
    s.resolved = !drifted_;
    samples_.push_back(s);
  }
  const std::vector<BoundSample>& samples() const { return samples_; }
  double energy0() const { return e0_; }

 private:
  Params P_;
  double R_, eps_, tol_;
  Cutoff cutoff_;
  double e0_ = 0;
  bool drifted_ = false;
  std::vector<BoundSample> samples_;
};

namespace detail {
inline std::vector<double> second_differences(const std::vector<BoundSample>& s, double& h) {
  if (s.size() < 3) throw PreconditionError("bound check needs at least 3 samples");
  std::vector<double> t;
  for (const auto& x : s) t.push_back(x.t);
  h = uniform_spacing(t);
  std::vector<double> vpp(s.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t j = 1; j + 1 < s.size(); ++j) vpp[j] = (s[j + 1].V - 2.0 * s[j].V + s[j - 1].V) / (h * h);
  return vpp;
}
inline bool interior_resolved(const std::vector<BoundSample>& s, std::size_t j) {
  return s[j - 1].resolved && s[j].resolved && s[j + 1].resolved;
}
}  // namespace detail

/// Smallest C ≥ 0 with V'' ≤ main + C·shape on the resolved interior samples of a run.
inline double calibrate_remainder(const std::vector<BoundSample>& samples) {
  double h = 0;
  auto vpp = detail::second_differences(samples, h);
  double C = 0.0;
  for (std::size_t j = 1; j + 1 < samples.size(); ++j) {
    if (!detail::interior_resolved(samples, j)) continue;
    C = std::max(C, (vpp[j] - samples[j].main) / samples[j].shape);
  }
  return C;
}

/// Checks V'' ≤ main + C·shape + tol at every resolved interior sample. tol defaults to
/// 2e−2·max|V''|, the accuracy of the second difference established by the dynamic check.
inline BoundSeries blowup_bound_check(const std::vector<BoundSample>& samples, const Params& P, double R, double eps,
                                      double C, std::optional<double> tol = std::nullopt) {
  BoundSeries out;
  out.kind = bound_for(P);
  out.R = R;
  out.eps = eps;
  out.C = C;
  double h = 0;
  auto vpp = detail::second_differences(samples, h);
  double scale = 0.0;
  for (std::size_t j = 1; j + 1 < samples.size(); ++j)
    if (detail::interior_resolved(samples, j)) scale = std::max(scale, std::abs(vpp[j]));
  out.tol = tol.value_or(2e-2 * scale);
  for (std::size_t j = 0; j < samples.size(); ++j) {
    BoundRow row;
    row.t = samples[j].t;
    row.V = samples[j].V;
    row.Vp = samples[j].Vp;
    row.Vpp = vpp[j];
    row.rhs_bound = samples[j].main + C * samples[j].shape;
    row.checked = j > 0 && j + 1 < samples.size() && detail::interior_resolved(samples, j);
    row.slack = row.checked ? row.rhs_bound + out.tol - row.Vpp : std::numeric_limits<double>::quiet_NaN();
    if (row.checked) {
      out.min_slack = std::min(out.min_slack, row.slack);
      if (row.slack < 0.0) out.holds = false;
    }
    out.rows.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------------------
// Coercivity on the blow-up branch

struct BlowupCoercivity {
  double H = 0;    // (1+ε)‖∇u‖² − a/(2(p+1))∫r^b|u|^{p+1}
  double eps = 0;
  double nu = 0;
  double rho = 0;  // 0 on the negative-energy branch
  bool holds = false;  // H ≤ −ν
};

namespace detail {
/// λ* > 1 with g(λ*) = target for g decreasing on (1, ∞) from g(1) = 1.
template <class G>
double solve_above_one(G&& g, double target) {
  double lo = 1.0, hi = 2.0;
  while (g(hi) > target) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (g(mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}
}  // namespace detail

/// ε, ν > 0 with H(u) ≤ −ν on the blow-up side of the ground-state threshold. ε is half of
/// the largest value the threshold argument allows, so ν stays strictly positive.
///
/// For u = cQ (or cW) the Gagliardo–Nirenberg step is an equality and H = −ν exactly, so the
/// comparison carries a relative tolerance sized to the quadrature error of the ground state.
inline BlowupCoercivity coercivity_gap_58(const RadialField& u, const Params& P, const GroundState& ground,
                                          double rel_tol = 1e-3) {
  if (is_mass_critical(P)) throw PreconditionError("blow-up coercivity needs intercritical or energy-critical p");
  ThresholdReport rep = threshold_report(u, P, ground);
  if (rep.verdict != Verdict::BlowupBranch)
    throw PreconditionError(std::string("blow-up coercivity requires the blow-up branch, got ") +
                            verdict_name(rep.verdict));
  const double G = gradient_sq_norm(u);
  const double E = rep.energy;
  const double a = pohozaev_a(P);
  BlowupCoercivity out;
  if (is_energy_critical(P)) {
    const double k = (2.0 + P.b) / (P.N - 2.0);
    if (E < 0.0) {
      out.eps = k;
      out.nu = -(2.0 * P.N + 2.0 * P.b) / (P.N - 2.0) * E;
    } else {
      double theta = 1.0 - E / rep.me_Q;
      double star = (2.0 * P.N + 2.0 * P.b) / (P.N - 2.0);
      auto gw = [&](double l) {
        return ((P.N + P.b) * l * l - (P.N - 2.0) * std::pow(l, star)) / (2.0 + P.b);
      };
      out.rho = detail::solve_above_one(gw, 1.0 - theta) - 1.0;
      double gap = theta + 2.0 * out.rho + out.rho * out.rho;
      out.eps = 0.5 * k * gap / ((1.0 + out.rho) * (1.0 + out.rho));
      out.nu = (k * gap - out.eps * (1.0 + out.rho) * (1.0 + out.rho)) * ground.grad_sq;
    }
  } else {
    const double e = a - 4.0;
    if (E < 0.0) {
      out.eps = e / 4.0;
      out.nu = -a / 2.0 * E;
    } else {
      double theta = 1.0 - rep.me_product / rep.me_Q;
      out.rho = detail::solve_above_one([&](double l) { return coercivity_G(l, P); }, 1.0 - theta) - 1.0;
      double gap = theta + 2.0 * out.rho + out.rho * out.rho;
      double s = exponents_of(P).sigma_c;
      out.eps = 0.5 * e / 4.0 * gap / ((1.0 + out.rho) * (1.0 + out.rho));
      out.nu = ground.grad_sq * std::pow(ground.mass / mass(u), s) *
               (e / 4.0 * gap - out.eps * (1.0 + out.rho) * (1.0 + out.rho));
    }
  }
  out.H = (1.0 + out.eps) * G - a / (2.0 * (P.p + 1.0)) * potential(u, P);
  out.holds = out.H <= -out.nu + rel_tol * std::abs(out.nu);
  return out;
}

}  // namespace inls
