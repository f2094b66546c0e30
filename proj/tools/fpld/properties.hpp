#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "fpld/tilt.hpp"

namespace fpld::cli {

/// Outcome of one property over its grid. A point passes when
/// observed <= bound (or < for strict checks); margin = bound - observed.
struct PropertyResult {
  std::string name;
  bool passed = true;
  std::uint64_t checked = 0;
  std::uint64_t violations = 0;
  double worst_margin = 0.0;  ///< smallest margin seen, scaled by the bound when relative
  nlohmann::json worst_point;
  nlohmann::json first_failure;  ///< null when passed
  nlohmann::json info = nlohmann::json::object();
};

void to_json(nlohmann::json& j, const PropertyResult& r);

/// Accumulates grid checks into a PropertyResult.
class Tally {
 public:
  explicit Tally(std::string name);
  /// observed <= bound + slack. `scale` normalizes the recorded margin.
  bool le(double observed, double bound, const nlohmann::json& point, double slack = 0.0,
          double scale = 1.0);
  /// observed < bound.
  bool lt(double observed, double bound, const nlohmann::json& point, double scale = 1.0);
  /// Records a boolean check with unit margin.
  bool expect(bool ok, const nlohmann::json& point);
  nlohmann::json& info() { return r_.info; }
  PropertyResult finish() &&;

 private:
  bool record(bool ok, double margin, double observed, double bound, const nlohmann::json& point);
  PropertyResult r_;
  bool any_ = false;
};

// Inequalities for K on 200-point grids, p in {0.05, 0.25, 0.5, 0.75, 0.95}.
PropertyResult check_cgf_slope_bounds(const CgfFunction& K);      // 0 < K'(x) <= pq e^{2t}, 0 < x <= t
PropertyResult check_cgf_curvature_bounds(const CgfFunction& K);  // pq e^{-3t} < K''(x) < pq e^{3t}
PropertyResult check_cgf_local_K(const CgfFunction& K);   // |K/pq - x^2/2| <= |x|^3/2, |x| <= 1/16
PropertyResult check_cgf_local_K1(const CgfFunction& K);  // |K'/pq - x| <= x^2
PropertyResult check_cgf_local_K2(const CgfFunction& K);  // |K''/pq - 1 - (q-p)x| <= 8x^2
PropertyResult check_cgf_derivatives(const CgfFunction& K);  // finite differences of K

/// Root and tilted-sum bounds for the tilt coefficients on the standardized
/// a_k = k population (N = 1000, n = 250) at one x and shape. Coefficient
/// bounds on b_k are included only when x is inside the small-x regime.
PropertyResult check_tilt_regime(double x, const TiltParameters& params);

/// Largest x of the small-x regime for the population used by check_tilt_regime.
double tilt_regime_cap();

PropertyResult check_normal_tail_sandwich();
PropertyResult check_normal_tail_precision();
PropertyResult check_mills_ratio();
PropertyResult check_x0_deviation(std::uint64_t seed, std::size_t trials);
PropertyResult check_efron_identity(std::uint64_t samples, std::uint64_t seed);
PropertyResult check_dp_enum_equality();
PropertyResult check_dp_mc_agreement(std::uint64_t reps, std::uint64_t seed, unsigned workers);
PropertyResult check_bernoulli_equivalence(std::uint64_t reps, std::uint64_t seed, unsigned workers);
PropertyResult check_mgf_expansion();

enum class ValidationLevel { quick, full };

struct ValidationOptions {
  ValidationLevel level = ValidationLevel::quick;
  CgfFunction cgf = fpld::cgf;
  std::uint64_t seed = 1;
  unsigned workers = 8;
};

struct ValidationReport {
  std::string level;
  std::vector<PropertyResult> properties;
  bool passed() const;
};

void to_json(nlohmann::json& j, const ValidationReport& r);

ValidationReport run_validation(const ValidationOptions& opt);

/// K with K'' inflated by e^{4|z|}; used to exercise the failure path.
CgfValues faulty_k2_cgf(double z, double p);

}  // namespace fpld::cli
