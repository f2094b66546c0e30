#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <boost/math/distributions/chi_squared.hpp>

#include "fpld/error.hpp"
#include "fpld/exact.hpp"
#include "fpld/sampling.hpp"

using namespace fpld;

namespace {

Sample make_sample(const Population& pop, std::vector<std::size_t> idx) {
  Sample s;
  for (auto k : idx) s.values.push_back(pop[k]);
  s.indices = std::move(idx);
  return s;
}

double z_score(const TailEstimate& mc, double exact) {
  const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(mc.reps));
  return se > 0.0 ? std::abs(mc.p_hat - exact) / se : (mc.p_hat == exact ? 0.0 : 1e300);
}

}  // namespace

TEST(Sampler, DistinctIndicesAndDeterminism) {
  const auto pop = family_power(5, 1.0);
  auto r1 = block_stream(3, 0), r2 = block_stream(3, 0);
  for (int i = 0; i < 100; ++i) {
    const auto a = draw_sample(pop, 2, r1), b = draw_sample(pop, 2, r2);
    EXPECT_EQ(a.indices, b.indices);
    EXPECT_NE(a.indices[0], a.indices[1]);
    EXPECT_EQ(a.values[0], pop[a.indices[0]]);
  }
  auto r = block_stream(1, 0);
  EXPECT_THROW(draw_sample(pop, 0, r), std::invalid_argument);
  EXPECT_THROW(draw_sample(pop, 5, r), std::invalid_argument);
}

TEST(Sampler, SubsetFrequenciesUniform) {
  const auto pop = family_power(6, 1.0);
  auto rng = block_stream(11, 0);
  std::map<std::vector<std::size_t>, int> freq;
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) {
    auto s = draw_sample(pop, 3, rng);
    std::sort(s.indices.begin(), s.indices.end());
    ++freq[s.indices];
  }
  ASSERT_EQ(freq.size(), 20u);
  double chi2 = 0.0;
  for (const auto& [subset, count] : freq) {
    EXPECT_NEAR(count / static_cast<double>(kDraws), 0.05, 0.005);
    chi2 += std::pow(count - kDraws / 20.0, 2) / (kDraws / 20.0);
  }
  const double pvalue = boost::math::cdf(boost::math::complement(boost::math::chi_squared(19), chi2));
  EXPECT_GT(pvalue, 0.001);
}

TEST(Sampler, ComplementOfLargeSampleIsUniform) {
  const auto pop = family_power(7, 1.0);
  auto rng = block_stream(5, 0);
  std::vector<int> left_out(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto s = draw_sample(pop, 6, rng);
    std::set<std::size_t> in(s.indices.begin(), s.indices.end());
    for (std::size_t k = 0; k < 7; ++k) {
      if (!in.contains(k)) ++left_out[k];
    }
  }
  for (int c : left_out) EXPECT_NEAR(c / 70000.0, 1.0 / 7.0, 0.006);
}

TEST(SampleStats, SymmetricPair) {
  const Population pop({-1.0, 1.0, -1.0, 1.0});
  const auto d = Design::make(4, 2);
  const auto st = sample_stats(make_sample(pop, {0, 1}), d, pop);
  EXPECT_EQ(st.S_n, 0.0);
  EXPECT_EQ(st.Xbar, 0.0);
  EXPECT_EQ(st.Vn2, 2.0);
  ASSERT_TRUE(st.V1n);
  EXPECT_EQ(*st.V1n, 0.0);
  ASSERT_TRUE(st.t_n);
  EXPECT_EQ(*st.t_n, 0.0);
}

TEST(SampleStats, ConstantSampleHasNoT) {
  const Population pop({-1.0, 1.0, -1.0, 1.0});
  const auto st = sample_stats(make_sample(pop, {1, 3}), Design::make(4, 2), pop);
  EXPECT_FALSE(st.t_n.has_value());
}

TEST(SampleStats, FrozenStandardizedValues) {
  const auto pop = standardize(family_power(10, 1.0));
  const auto d = Design::make(10, 2);
  const auto a = sample_stats(make_sample(pop, {0, 9}), d, pop);
  EXPECT_NEAR(a.S_n, 0.0, 1e-14);
  EXPECT_NEAR(a.Vn2, 4.909090909090909, 1e-13);
  EXPECT_NEAR(*a.V1n, 2.909090909090909, 1e-13);
  EXPECT_NEAR(*a.V2n, 2.6798898071625343, 1e-13);
  EXPECT_NEAR(a.sigma_hat2, 4.909090909090909, 1e-13);
  EXPECT_NEAR(*a.t_n, 0.0, 1e-14);
  const auto b = sample_stats(make_sample(pop, {2, 9}), d, pop);
  EXPECT_NEAR(*b.t_n, 0.3194382824999699, 1e-13);
}

TEST(SampleStats, VarianceIdentity) {
  const auto pop = family_power(50, 1.5);
  const auto d = Design::make(50, 9);
  auto rng = block_stream(2, 0);
  for (int i = 0; i < 200; ++i) {
    const auto st = sample_stats(draw_sample(pop, d.n, rng), d, pop);
    const double alt = (st.Vn2 - d.n * st.Xbar * st.Xbar) / (d.n - 1);
    EXPECT_NEAR(st.sigma_hat2, alt, 1e-9 * std::abs(st.sigma_hat2) + 1e-9);
    EXPECT_FALSE(st.V1n.has_value());
  }
}

TEST(McSum, ImpossibleEventAndSymmetry) {
  const auto pop = family_power(12, 1.0);
  const auto d = Design::make(12, 6);
  EXPECT_EQ(mc_tail_sum(pop, d, 100.0, {5000, 1, 2}).p_hat, 0.0);

  std::vector<double> pm;
  for (int k = 0; k < 12; ++k) pm.push_back(k % 2 ? 1.0 : -1.0);
  const Population sym(pm);
  const auto mc = mc_tail_sum(sym, d, 0.0, {40000, 4, 3});
  const auto ex = exact_tail_enum(sym, 6, EnumStatistic::sum(), 0.0);
  EXPECT_GE(ex.estimate.p_hat, 0.5);
  EXPECT_LE(std::abs(mc.p_hat - ex.estimate.p_hat), 3.0 * mc.std_error);
}

TEST(McSum, AgreesWithSubsetSumRecursion) {
  const auto pop = family_power(30, 1.0);
  const auto d = Design::make(30, 10);
  const auto m = compute_moments(pop);
  const auto mc = mc_tail_sum(pop, d, 1.5, {100000, 9, 4});
  const double exact = exact_tail_dp(pop, 10, d.n * m.mu + 1.5 * m.sigma() * d.omega).estimate.p_hat;
  EXPECT_LE(z_score(mc, exact), 4.0);
}

TEST(McSum, StandardErrorFormula) {
  const auto pop = family_power(40, 1.0);
  const auto e = mc_tail_sum(pop, Design::make(40, 10), 0.7, {12345, 1, 1});
  EXPECT_EQ(e.method, TailMethod::mc);
  EXPECT_DOUBLE_EQ(e.std_error, std::sqrt(e.p_hat * (1.0 - e.p_hat) / 12345));
  EXPECT_EQ(e.hits, static_cast<std::uint64_t>(std::llround(e.p_hat * 12345)));
}

TEST(McSum, Determinism) {
  const auto pop = family_power(100, 1.0);
  const auto d = Design::make(100, 25);
  const std::vector<double> xs{0.5, 1.0, 2.0};
  const auto a = mc_tail_sum(pop, d, xs, {20000, 77, 3});
  const auto b = mc_tail_sum(pop, d, xs, {20000, 77, 3});
  const auto c = mc_tail_sum(pop, d, xs, {20000, 78, 3});
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_EQ(a[i].hits, b[i].hits);
    EXPECT_EQ(a[i].p_hat, b[i].p_hat);
  }
  EXPECT_NE(a[0].hits, c[0].hits);
}

TEST(McT, AgreesWithEnumeration) {
  const auto pop = family_power(12, 1.0);
  const auto d = Design::make(12, 4);
  const std::vector<double> xs{0.0, 0.5, 1.0, 2.0, 3.0};
  const auto mc = mc_tail_t(pop, d, xs, {100000, 5, 4});
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double exact = exact_tail_enum(pop, 4, EnumStatistic::t(), xs[i]).estimate.p_hat;
    EXPECT_LE(z_score(mc[i], exact), 4.0) << xs[i];
  }
}

TEST(McT, SymmetricPopulationAtZero) {
  std::vector<double> v;
  for (int k = -50; k <= 50; ++k) {
    if (k != 0) v.push_back(k);
  }
  const Population pop(v);
  const auto d = Design::make(100, 50);
  const auto e = mc_tail_t(pop, d, 0.0, {40000, 3, 2});
  EXPECT_LE(std::abs(e.p_hat - 0.5), 3.0 * e.std_error);
}

TEST(McT, ConstantSamplesCountedSeparately) {
  const Population pop({0, 0, 0, 0, 0, 0, 0, 1});
  const auto d = Design::make(8, 2);
  const auto e = mc_tail_t(pop, d, 0.5, {20000, 1, 2});
  // C(7,2)/C(8,2) = 3/4 of samples are constant
  EXPECT_NEAR(e.undefined_samples / 20000.0, 0.75, 0.02);
  EXPECT_LE(e.p_hat, 0.25 + 0.02);
}

TEST(McQuadratic, ReducesToSumEvent) {
  const auto pop = standardize(family_power(60, 1.0));
  const auto d = Design::make(60, 15);
  for (double x : {0.5, 1.0, 1.5}) {
    const auto q = mc_tail_quadratic_tilt(pop, d, x, {}, {50000, 21, 2});
    const auto s = mc_tail_sum(pop, d, x, {50000, 21, 2});
    EXPECT_LE(std::abs(q.p_hat - s.p_hat), 3.0 * std::hypot(q.std_error, s.std_error) + 1e-12);
  }
  EXPECT_EQ(mc_tail_quadratic_tilt(pop, d, 40.0, {}, {1000, 1, 1}).p_hat, 0.0);
  EXPECT_THROW(mc_tail_quadratic_tilt(family_power(60, 1.0), d, 1.0, {}, {10, 1, 1}),
               NotStandardized);
}

TEST(McQuadratic, AgreesWithEnumeration) {
  const auto pop = standardize(family_power(12, 1.0));
  const auto d = Design::make(12, 6);
  const QuadraticTilt qt{0.5, 36.0, 0.0};
  const auto mc = mc_tail_quadratic_tilt(pop, d, 1.0, qt, {100000, 8, 4});
  const auto ex = exact_tail_enum(pop, 6, EnumStatistic::quadratic(1.0, qt), 1.0);
  EXPECT_LE(z_score(mc, ex.estimate.p_hat), 4.0);
  EXPECT_FALSE(mc.out_of_regime);
  EXPECT_TRUE(mc_tail_quadratic_tilt(pop, d, 1.0, {0.9, 0.0, 0.0}, {10, 1, 1}).out_of_regime);
}

TEST(Bernoulli, MatchesSrswor) {
  const auto pop = family_power(100, 1.0);
  const auto d = Design::make(100, 25);
  const auto b = bernoulli_conditioned_tail(pop, d, 1.0, {40000, 3, 2});
  const auto s = mc_tail_sum(pop, d, 1.0, {40000, 4, 2});
  EXPECT_EQ(b.method, TailMethod::bernoulli_conditioned);
  EXPECT_EQ(b.reps, 40000u);
  EXPECT_GT(b.attempts, b.reps);
  EXPECT_LE(std::abs(b.p_hat - s.p_hat), 4.0 * std::hypot(b.std_error, s.std_error));
  EXPECT_EQ(bernoulli_conditioned_tail(pop, d, 50.0, {1000, 1, 1}).p_hat, 0.0);
}

TEST(Bernoulli, MatchesEnumeration) {
  const auto pop = family_power(12, 1.0);
  const auto d = Design::make(12, 6);
  const auto m = compute_moments(pop);
  const auto b = bernoulli_conditioned_tail(pop, d, 0.8, {60000, 6, 3});
  const double exact = exact_tail_enum(pop, 6, EnumStatistic::sum(),
                                       6 * m.mu + 0.8 * m.sigma() * d.omega).estimate.p_hat;
  EXPECT_LE(z_score(b, exact), 4.0);
}

TEST(Bernoulli, AcceptanceProbability) {
  EXPECT_NEAR(bernoulli_acceptance_probability(Design::make(100, 25)), 0.0918, 1e-3);
  // the guard only bites near 1 / sqrt(2 pi N p q) < 1e-6
  EXPECT_LT(bernoulli_acceptance_probability(Design::make(1000000000000ull, 500000000000ull)), 1e-6);
}

TEST(EfronIdentity, BoundaryAndSymmetricCases) {
  const Population pop({-1.0, 1.0, -1.0, 1.0});
  const auto d = Design::make(4, 2);
  const auto s = make_sample(pop, {0, 1});
  EXPECT_EQ(t_identity_check(s, d, 0.0), std::optional<bool>(true));
  EXPECT_EQ(t_identity_check(s, d, 1.0), std::optional<bool>(true));
  EXPECT_FALSE(t_identity_check(make_sample(pop, {1, 3}), d, 1.0).has_value());
}

TEST(EfronIdentity, RandomSamples) {
  const auto pop = standardize(family_power(100, 1.0));
  const auto d = Design::make(100, 25);
  auto rng = block_stream(19, 0);
  int disagreements = 0;
  for (int i = 0; i < 20000; ++i) {
    const auto s = draw_sample(pop, 25, rng);
    for (double x : {0.5, 1.0, 2.0, 3.0}) {
      const auto ok = t_identity_check(s, d, x);
      if (ok && !*ok) ++disagreements;
    }
  }
  EXPECT_EQ(disagreements, 0);
}
