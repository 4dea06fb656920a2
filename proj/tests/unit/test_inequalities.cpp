#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace inls;
using inls::test::ground;
using inls::test::rel;

namespace {

RadialField gaussian(int N, double r_max = 8.0, double dr = 1e-3) {
  return RadialField::sample(RadialGrid::make(N, r_max, dr), [](double r) { return std::exp(-r * r); });
}

RadialField dilate(const RadialField& f, double lambda) {
  return RadialField(std::make_shared<const RadialGrid>(f.grid->dim(), f.grid->dr() / lambda, f.size()), f.values);
}

}  // namespace

TEST(RadialSobolev, GaussianClosedForm) {
  auto f = gaussian(3);
  double sup = std::sqrt(0.5) * std::exp(-0.5);
  double denom = std::pow(5.9063 * 1.96870, 0.25);
  EXPECT_NEAR(radial_sobolev_21(f), sup / denom, 1e-4);
  EXPECT_NEAR(radial_sobolev_21(f), 0.232, 1e-3);
}

TEST(RadialSobolev, HomogeneityAndDilation) {
  auto f = gaussian(3);
  for (double c : {0.1, 3.0}) {
    auto g = f.scaled(c);
    EXPECT_LT(rel(radial_sobolev_21(g), radial_sobolev_21(f)), 1e-12);
    EXPECT_LT(rel(radial_sobolev_23(g), radial_sobolev_23(f)), 1e-12);
    EXPECT_LT(rel(radial_sobolev_210(g, 0.75), radial_sobolev_210(f, 0.75)), 1e-12);
    EXPECT_LT(rel(hardy_ratio(g, 2.0), hardy_ratio(f, 2.0)), 1e-12);
  }
  EXPECT_LT(rel(radial_sobolev_21(dilate(f, 2.0)), radial_sobolev_21(f)), 1e-6);
  EXPECT_LT(rel(hardy_ratio(dilate(f, 2.0), 2.0), hardy_ratio(f, 2.0)), 1e-6);
}

TEST(RadialSobolev, EndpointsCoincide) {
  auto f = gaussian(3);
  EXPECT_EQ(radial_sobolev_210(f, 1.0), radial_sobolev_23(f));
  EXPECT_EQ(radial_sobolev_210(f, 0.5), radial_sobolev_21(f));
  EXPECT_THROW(radial_sobolev_210(f, 0.4), PreconditionError);
  EXPECT_THROW(radial_sobolev_210(f, 1.1), PreconditionError);
  EXPECT_THROW(radial_sobolev_23(gaussian(2)), PreconditionError);
  RadialField z(f.grid);
  EXPECT_THROW(radial_sobolev_21(z), PreconditionError);
}

TEST(RadialSobolev, StableUnderRefinement) {
  double a = radial_sobolev_23(gaussian(3, 8.0, 2e-3));
  double b = radial_sobolev_23(gaussian(3, 8.0, 1e-3));
  EXPECT_LT(rel(a, b), 1e-3);
  auto g4 = gaussian(4);
  double prev = 0.0;
  for (double s : {0.5, 0.75, 1.0}) {
    double v = radial_sobolev_210(g4, s);
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(v, 0.0);
    if (prev > 0.0) {
      EXPECT_NE(v, prev);
    }
    prev = v;
  }
}

TEST(RadialSobolev, AlgebraicProfileIsFinite) {
  Params P{4, 2.0, 5.0};
  auto g = RadialGrid::make(4, 200.0, 1e-2);
  double v = radial_sobolev_23(explicit_W(P, g));
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_GT(v, 0.0);
}

TEST(GagliardoNirenberg, SaturatedOnlyByGroundState) {
  Params P{3, 1.0, 4.0};
  const auto& Q = ground(3, 1.0, 4.0);
  double c_opt = c_opt_closed_form(Q.grad_norm(), Q.mass_norm(), P);
  EXPECT_NEAR(gn_check(Q.profile, P, c_opt), 1.0, 1e-4);
  EXPECT_LT(gn_check(gaussian(3, 20.0), P, c_opt), 1.0);
  auto bumped = RadialField::sample(Q.profile.grid, [](double r) { return 0.5 * std::exp(-(r - 3) * (r - 3)); });
  for (std::size_t i = 0; i < bumped.size(); ++i) bumped[i] += 0.3 * Q.profile[i];
  EXPECT_LT(gn_check(bumped, P, c_opt), 1.0);
}

TEST(GagliardoNirenberg, RandomProfilesStayBelowSharpConstant) {
  Params P{3, 1.0, 4.0};
  const auto& Q = ground(3, 1.0, 4.0);
  double c_opt = weinstein(Q.profile, P);
  std::mt19937 rng(20240611);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    double a1 = 0.2 + 2.0 * U(rng), a2 = 2.0 * U(rng), w1 = 0.3 + 2.0 * U(rng), w2 = 0.3 + 2.0 * U(rng);
    double c = 4.0 * U(rng);
    auto f = RadialField::sample(Q.profile.grid, [&](double r) {
      return a1 * std::exp(-w1 * r * r) + a2 * std::exp(-w2 * (r - c) * (r - c));
    });
    double v = gn_check(f, P, c_opt);
    EXPECT_LE(v, 1.0 + 1e-6) << "trial " << trial;
    EXPECT_LT(v, 1.0 - 1e-4) << "trial " << trial;
  }
}

TEST(GagliardoNirenberg, RegimeWindow) {
  auto f = gaussian(3);
  EXPECT_THROW(gn_check(f, {3, 1.0, 2.0}, 1.0), PreconditionError);
  EXPECT_THROW(gn_check(f, {3, 1.0, 9.0}, 1.0), PreconditionError);
}

TEST(Interpolation, EndpointsAndWorkedCase) {
  using exponents::RationalParams;
  EXPECT_EQ(interpolation_theta(RationalParams{3, Rational(1), Rational(2)}), Rational(1));
  EXPECT_EQ(interpolation_theta(RationalParams{3, Rational(1), Rational(7)}), Rational(0));
  EXPECT_EQ(interpolation_theta(RationalParams{3, Rational(1), Rational(4)}), Rational(3, 5));
  EXPECT_NEAR(interpolation_theta(Params{3, 1.0, 4.0}), 0.6, 1e-15);
  EXPECT_THROW(interpolation_theta(RationalParams{3, Rational(1), Rational(8)}), PreconditionError);
  EXPECT_THROW(interpolation_theta(RationalParams{2, Rational(1), Rational(4)}), PreconditionError);
}

TEST(Interpolation, IdentitiesHoldForRandomRationalTriples) {
  std::mt19937 rng(99);
  int checked = 0;
  while (checked < 100) {
    int N = 3 + static_cast<int>(rng() % 4);
    Rational b(1 + static_cast<long long>(rng() % 40), 8);
    Rational lo = 1 + 2 * b / (N - 1), hi = (N + 2 + 2 * b) / (N - 2);
    Rational t(static_cast<long long>(rng() % 1001), 1000);
    Rational p = lo + t * (hi - lo);
    // the identities are asserted inside; a failure throws logic_error
    Rational theta = interpolation_theta(exponents::RationalParams{N, b, p});
    EXPECT_GE(theta, 0);
    EXPECT_LE(theta, 1);
    ++checked;
  }
}

TEST(DivergenceWitness, SlopeMatchesPrediction) {
  Params P{2, 2.0, 2.0};
  auto w = divergence_witness(P, {8, 16, 32, 64});
  EXPECT_DOUBLE_EQ(w.predicted_slope, 1.5);
  EXPECT_LT(std::abs(w.fitted_slope - 1.5) / 1.5, 0.05);
  for (std::size_t i = 1; i < w.ratios.size(); ++i) EXPECT_GT(w.ratios[i].second, w.ratios[i - 1].second);
  EXPECT_THROW(divergence_witness({2, 2.0, 5.0}, {8, 16}), PreconditionError);
}

TEST(DivergenceWitness, WideRatiosInHigherDimension) {
  Params P{3, 2.0, 2.5};
  auto w = divergence_witness(P, {8, 64});
  EXPECT_LT(std::abs(w.fitted_slope - w.predicted_slope) / w.predicted_slope, 0.05);
}

TEST(Hardy, BoundedBySharpConstant) {
  auto f = gaussian(3);
  EXPECT_LE(hardy_ratio(f, 2.0), 2.0 + 1e-6);
  auto g = RadialField::sample(f.grid, [](double r) { return r * std::exp(-r * r); });
  EXPECT_LE(hardy_ratio(g, 2.0), 2.0 + 1e-6);
  auto f5 = gaussian(5);
  EXPECT_LE(hardy_ratio(f5, 3.0), 1.5 + 1e-6);
  EXPECT_THROW(hardy_ratio(f, 3.0), PreconditionError);
  EXPECT_THROW(hardy_ratio(f, 1.0), PreconditionError);
}
