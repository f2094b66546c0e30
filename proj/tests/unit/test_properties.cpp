#include <gtest/gtest.h>

#include "fpld/properties.hpp"

using namespace fpld;
using namespace fpld::cli;

TEST(Properties, QuickValidationPasses) {
  ValidationOptions opt;
  opt.workers = 4;
  const auto r = run_validation(opt);
  EXPECT_TRUE(r.passed());
  for (const auto& p : r.properties) {
    EXPECT_TRUE(p.passed) << p.name << " " << p.first_failure.dump();
    EXPECT_GT(p.checked, 0u) << p.name;
  }
}

TEST(Properties, FaultyCurvatureIsCaught) {
  const auto curv = check_cgf_curvature_bounds(faulty_k2_cgf);
  EXPECT_FALSE(curv.passed);
  EXPECT_GT(curv.violations, 0u);
  ASSERT_FALSE(curv.first_failure.is_null());
  EXPECT_TRUE(curv.first_failure["point"].contains("p"));
  EXPECT_FALSE(check_cgf_local_K2(faulty_k2_cgf).passed);
  EXPECT_FALSE(check_cgf_derivatives(faulty_k2_cgf).passed);
  // the slope checks do not see K''
  EXPECT_TRUE(check_cgf_slope_bounds(faulty_k2_cgf).passed);
}

TEST(Properties, TallyRecordsWorstMargin) {
  Tally t("demo");
  t.le(0.5, 1.0, {{"i", 0}});
  t.le(0.9, 1.0, {{"i", 1}});
  t.le(1.2, 1.0, {{"i", 2}});
  const auto r = std::move(t).finish();
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.checked, 3u);
  EXPECT_EQ(r.violations, 1u);
  EXPECT_NEAR(r.worst_margin, -0.2, 1e-15);
  EXPECT_EQ(r.first_failure["point"]["i"], 2);
}

TEST(Properties, TiltRegimeAtCap) {
  const double cap = tilt_regime_cap();
  EXPECT_GT(cap, 0.0);
  const auto r = check_tilt_regime(cap, {1.5, 0.75, 72});
  EXPECT_TRUE(r.passed) << r.first_failure.dump();
}
