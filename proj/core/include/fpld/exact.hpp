#pragma once

#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fpld/population.hpp"
#include "fpld/sampling.hpp"

namespace fpld {

using BigCount = boost::multiprecision::cpp_int;

/// An exact tail probability hits / total over all n-subsets.
struct ExactTail {
  TailEstimate estimate;
  BigCount hits;
  BigCount total;
};

/// Statistic evaluated on each subset by the enumeration oracle.
struct EnumStatistic {
  enum class Kind { sum, t, quadratic_tilt };
  Kind kind = Kind::sum;
  double x = 0.0;      ///< quadratic tilt only
  QuadraticTilt qt{};  ///< quadratic tilt only

  static EnumStatistic sum() { return {}; }
  static EnumStatistic t() { return {Kind::t, 0.0, {}}; }
  static EnumStatistic quadratic(double x, const QuadraticTilt& qt) {
    return {Kind::quadratic_tilt, x, qt};
  }
};

/// Fraction of n-subsets with statistic >= threshold.
///   sum:            S_n (raw values)
///   t:              t_n; constant subsets never qualify
///   quadratic_tilt: the quadratic-tilt statistic; needs a standardized population
/// Throws InstanceTooLarge when C(N, n) > 1e7.
ExactTail exact_tail_enum(const Population& pop, std::size_t n, const EnumStatistic& stat,
                          double threshold);

/// Exact distribution of S_n for an integer-valued population, built by the
/// subset-count recursion count[j][s] one unit at a time.
///
/// Throws std::invalid_argument for non-integer values and InstanceTooLarge
/// when N n (n (max - min) + 1) > 1e9.
class SumDistribution {
 public:
  SumDistribution(const Population& pop, std::size_t n);

  /// P(S_n >= threshold); a fractional threshold is rounded up.
  ExactTail tail(double threshold) const;
  long long min_sum() const noexcept { return offset_; }
  long long max_sum() const noexcept { return offset_ + static_cast<long long>(counts_.size()) - 1; }
  const BigCount& total() const noexcept { return total_; }

 private:
  long long offset_ = 0;
  std::vector<BigCount> counts_;  // counts_[s] = #subsets with sum offset_ + s
  std::vector<BigCount> upper_;   // upper_[s] = sum_{r >= s} counts_[r]
  BigCount total_;
};

ExactTail exact_tail_dp(const Population& pop, std::size_t n, double threshold);

}  // namespace fpld
