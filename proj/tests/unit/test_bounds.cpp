#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "fpld/bounds.hpp"

using namespace fpld;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

double big_tail(double x) {
  return static_cast<double>(boost::math::erfc(Big(x) / boost::multiprecision::sqrt(Big(2))) / 2);
}

}  // namespace

TEST(NormalTail, FrozenValues) {
  EXPECT_EQ(normal_tail(0.0), 0.5);
  const std::pair<double, double> cases[] = {
      {0.5, 0.3085375387259868963622954},   {1.0, 0.1586552539314570514147675},
      {2.0, 0.0227501319481792072002826},   {3.0, 0.001349898031630094526651815},
      {5.0, 2.866515718791939116737523e-7}, {8.0, 6.220960574271784123515995e-16}};
  for (auto [x, v] : cases) EXPECT_NEAR(normal_tail(x) / v, 1.0, 1e-12) << x;
}

TEST(NormalTail, MatchesExtendedPrecision) {
  for (int i = -200; i <= 1200; ++i) {
    const double x = i / 100.0;
    const double ref = big_tail(x);
    EXPECT_LE(std::abs(normal_tail(x) / ref - 1.0), x <= 8.0 ? 1e-12 : 1e-10) << x;
  }
}

TEST(NormalTail, Sandwich) {
  for (int i = 0; i <= 800; ++i) {
    const double x = i / 100.0;
    const double t = normal_tail(x);
    EXPECT_LE(x * normal_pdf(x) / (1.0 + x * x), t * (1 + 1e-13));
    EXPECT_LE(t, 2.0 * std::exp(-0.5 * x * x) / (1.0 + x) * (1 + 1e-13));
  }
}

TEST(NormalTail, LogTailFarOut) {
  EXPECT_NEAR(log_normal_tail(2.0), std::log(normal_tail(2.0)), 1e-14);
  EXPECT_TRUE(std::isfinite(log_normal_tail(40.0)));
  EXPECT_NEAR(log_normal_tail(40.0), -0.5 * 1600 - std::log(40.0 * std::sqrt(2 * M_PI)), 1e-3);
}

TEST(Mills, ValueAtOne) { EXPECT_NEAR(mills_psi(1.0), 0.6556795424187984715438712, 1e-15); }

TEST(Mills, MatchesExtendedPrecision) {
  for (int i = 1; i <= 600; ++i) {
    const double t = i / 20.0;
    const Big ref = boost::math::erfc(Big(t) / boost::multiprecision::sqrt(Big(2))) / 2 /
                    (exp(-Big(t) * t / 2) / sqrt(2 * boost::math::constants::pi<Big>()));
    EXPECT_LE(std::abs(mills_psi(t) / static_cast<double>(ref) - 1.0), 1e-10) << t;
  }
}

TEST(Mills, RatioBounds) {
  for (int i = 1; i <= 5000; ++i) {
    const double t = i / 100.0;
    const double tp = t * mills_psi(t);
    if (t >= 2.0) {
      EXPECT_GE(tp, 0.75);
      EXPECT_LE(tp, 1.0);
    }
    EXPECT_LE(std::abs(tp - 1.0), 1.0 / (t * t)) << t;
  }
}

TEST(Mills, RejectsNonFinite) { EXPECT_THROW(mills_psi(INFINITY), std::domain_error); }

TEST(Envelope, Shape) {
  const auto m = compute_moments(family_power(1000, 1.0));
  const auto d = Design::make(1000, 250);
  const auto e0 = tail_ratio_envelope(0.0, m, d, 2.0);
  EXPECT_NEAR(e0.exponent, 2.0 * m.beta3N / d.omega, 1e-15);
  for (double x : {0.0, 1.0, 3.0, 7.0}) {
    const auto e = tail_ratio_envelope(x, m, d, 0.3);
    EXPECT_NEAR(e.lower * e.upper, 1.0, 1e-12);
    const auto wider = tail_ratio_envelope(x, m, d, 0.6);
    EXPECT_LT(wider.lower, e.lower);
    EXPECT_GT(wider.upper, e.upper);
  }
  EXPECT_TRUE(tail_ratio_envelope(3.0, m, d, 0.05).contains(1.119));
  EXPECT_FALSE(tail_ratio_envelope(8.0, m, d, 1.0).in_range);
  EXPECT_THROW(tail_ratio_envelope(1.0, m, d, 0.0), std::invalid_argument);
}

TEST(Band, FrozenAndMonotone) {
  const auto m = compute_moments(family_power(100, 1.0));
  const auto d = Design::make(100, 25);
  const auto b = relative_error_band(2.0, m, d, 1.0);
  EXPECT_NEAR(b.relative_band, 8.09959490886234, 1e-12);
  EXPECT_NEAR(b.be_bound, 0.36538699036423705, 1e-14);
  const auto b0 = relative_error_band(0.0, m, d, 1.0);
  EXPECT_DOUBLE_EQ(b0.relative_band, b0.be_bound);
  double prev = relative_error_band(2.0, m, d, 1.0).be_bound;
  for (int i = 1; i <= 100; ++i) {
    const double v = relative_error_band(2.0 + 0.1 * i, m, d, 1.0).be_bound;
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(relative_error_band(1.0, m, d, 1.0).relative_band,
            relative_error_band(1.0, m, d, 2.0).relative_band);
}

TEST(X0, Values) {
  EXPECT_EQ(x0_transform(0.0, 10, 0.5).x0, 0.0);
  EXPECT_NEAR(x0_transform(2.0, 250, 0.75).x0, 1.9920476822239892, 1e-14);
  // x^2 q = 1 leaves the radicand at n
  const double q = 0.25;
  EXPECT_DOUBLE_EQ(x0_transform(2.0, 17, q).x0, 2.0);
  EXPECT_THROW(x0_transform(0.0, 1, 0.5), std::domain_error);
  const auto d = Design::make(1000, 250);
  const auto r = x0_transform(2.0, d);
  EXPECT_NEAR(r.b0, r.x0 / d.omega, 1e-15);
}

TEST(X0, DeviationBoundOnRandomInputs) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(1.0, 10.0), uq(0.001, 0.999);
  std::uniform_int_distribution<std::size_t> un(4, 5000);
  for (int i = 0; i < 10000; ++i) {
    const double x = ux(rng), q = uq(rng);
    const auto n = un(rng);
    const auto r = x0_transform(x, n, q);
    EXPECT_LE(r.rel_dev, 2.0 * x * x / n + 1e-15);
    if (2.0 * x * x / n <= 0.5) {
      EXPECT_GE(r.x0, x / 2);
      EXPECT_LE(r.x0, 1.5 * x);
    }
  }
}

TEST(ImpliedA, Arithmetic) {
  const auto m = compute_moments(family_power(1000, 1.0));
  const auto d = Design::make(1000, 250);
  EXPECT_EQ(implied_A(1.0, 2.0, m, d), 0.0);
  EXPECT_NEAR(implied_A(1.119, 3.0, m, d), 0.018518345008205303, 1e-12);
  EXPECT_NEAR(implied_A(1.3, 2.0, m, d), implied_A(1.0 / 1.3, 2.0, m, d), 1e-15);
  EXPECT_THROW(implied_A(0.0, 2.0, m, d), std::invalid_argument);
}
