#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <span>
#include <vector>

namespace fpld {

/// A finite population {a_1, ..., a_N}. Immutable; at least two distinct values.
class Population {
 public:
  /// Throws DegeneratePopulation if fewer than two units or all units equal,
  /// std::invalid_argument on non-finite values.
  explicit Population(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }

 private:
  std::vector<double> values_;
};

/// Population moments under the divide-by-N convention.
struct PopulationMoments {
  double mu = 0.0;
  double sigma2 = 1.0;
  double beta3N = 1.0;  ///< E|X - mu|^3 / sigma^3
  double max_dev = 1.0;  ///< max_k |a_k - mu|

  double sigma() const;
};

/// Sampling design for a simple random sample of n out of N units.
struct Design {
  std::size_t N = 0;
  std::size_t n = 0;
  double p = 0.0;
  double q = 0.0;
  double omega = 0.0;  ///< sqrt(N p q)

  /// Throws std::invalid_argument unless 1 <= n < N.
  static Design make(std::size_t N, std::size_t n);
};

PopulationMoments compute_moments(const Population& pop);

/// Returns (a_k - mu) / sigma for every unit, order preserved.
Population standardize(const Population& pop);

/// True when mean and variance are 0 and 1 within `tol` (mean scaled by max |a_k|).
bool is_standardized(const Population& pop, double tol = 1e-9);

/// a_k = k^alpha for k = 1..N. Rejects alpha <= -1/3 and N < 2.
Population family_power(std::size_t N, double alpha);

/// Upper ends of the x ranges on which the tail-ratio envelope and the
/// relative-error band are asserted, for absolute constant A.
struct XRange {
  double envelope_cap = 0.0;  ///< (1/A) omega sigma / max_dev
  double band_cap = 0.0;      ///< (1/A) min{omega sigma / max_dev, (omega / beta3N)^(1/3)}
};

XRange valid_x_range(const PopulationMoments& m, const Design& d, double A = 1.0);

/// One decimal number per line, optional header line "value". Blank lines are skipped.
Population read_population(std::istream& in);
Population load_population(const std::filesystem::path& path);

}  // namespace fpld
