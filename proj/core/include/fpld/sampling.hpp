#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fpld/population.hpp"
#include "fpld/rng.hpp"

namespace fpld {

/// A simple random sample without replacement. Indices are 0-based unit positions.
struct Sample {
  std::vector<std::size_t> indices;
  std::vector<double> values;
};

/// Reusable partial Fisher-Yates sampler over the index set {0, ..., N-1}.
///
/// The permutation left behind by one draw is the starting point of the next;
/// every n-subset remains equiprobable because a partial shuffle of any fixed
/// arrangement is uniform.
class SrsworSampler {
 public:
  explicit SrsworSampler(std::size_t N);

  std::span<const std::size_t> draw(std::size_t n, RandomStream& rng);
  std::size_t population_size() const noexcept { return perm_.size(); }

 private:
  std::vector<std::size_t> perm_;
};

/// Fresh draw with its own index array; throws std::invalid_argument unless 1 <= n < N.
Sample draw_sample(const Population& pop, std::size_t n, RandomStream& stream);

/// Population-level constants needed to evaluate per-sample statistics.
struct StatsContext {
  double mu = 0.0;
  double mean_y2 = 0.0;  ///< (1/N) sum (a_k^2 - 1)^2, used by V_2n
  bool standardized = false;

  static StatsContext of(const Population& pop);
};

struct SampleStats {
  double S_n = 0.0;
  double Xbar = 0.0;
  double Vn2 = 0.0;         ///< sum X_k^2
  double sigma_hat2 = 0.0;  ///< sum (X_j - Xbar)^2 / (n - 1)
  std::optional<double> V1n;  ///< V_n^2 - n; standardized populations only
  std::optional<double> V2n;  ///< sum [(X_k^2 - 1)^2 - E(X_k^2 - 1)^2]; standardized only
  std::optional<double> t_n;  ///< empty when the sample is constant
};

/// Throws std::invalid_argument if the sample has fewer than two units.
SampleStats sample_stats(const Sample& s, const Design& d, const StatsContext& ctx);
SampleStats sample_stats(const Sample& s, const Design& d, const Population& pop);

enum class TailMethod { mc, enumeration, dp, bernoulli_conditioned };

std::string_view to_string(TailMethod m) noexcept;

/// A tail probability with its method and sampling error. Exact methods report std_error = 0.
struct TailEstimate {
  double p_hat = 0.0;
  double std_error = 0.0;
  std::uint64_t reps = 0;  ///< replications (accepted draws); 0 for exact methods
  TailMethod method = TailMethod::mc;
  std::uint64_t hits = 0;
  std::uint64_t undefined_samples = 0;  ///< t-statistic: constant samples, counted as misses
  std::uint64_t attempts = 0;           ///< conditioned-Bernoulli: proposals including rejections
  bool out_of_regime = false;           ///< quadratic-tilt parameters outside the proven regime

  /// Binomial plug-in estimate from `hits` out of `reps`.
  static TailEstimate from_counts(std::uint64_t hits, std::uint64_t reps, TailMethod method);
};

/// Replications are split into `workers` contiguous blocks; block j draws from
/// block_stream(seed, j). Results depend on (reps, seed, workers) only.
struct McOptions {
  std::uint64_t reps = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

/// P(S_n - n mu >= x sigma omega_N) for each x.
std::vector<TailEstimate> mc_tail_sum(const Population& pop, const Design& d,
                                      std::span<const double> xs, const McOptions& opt);
TailEstimate mc_tail_sum(const Population& pop, const Design& d, double x, const McOptions& opt);

/// P(t_n >= x) for each x, t_n = sqrt(n)(Xbar - mu) / (sigma_hat sqrt(q)).
std::vector<TailEstimate> mc_tail_t(const Population& pop, const Design& d,
                                    std::span<const double> xs, const McOptions& opt);
TailEstimate mc_tail_t(const Population& pop, const Design& d, double x, const McOptions& opt);

/// Parameters of the quadratic-tilt event
///   b S_n - xi b^2 q V_1n + xi1 b^4 q^2 V_2n >= x^2 + h,   b = x / omega_N.
struct QuadraticTilt {
  double xi = 0.0;
  double xi1 = 0.0;
  double h = 0.0;

  /// 0 <= xi <= 1/2, |xi1| <= 36, |h| <= x^2/5.
  bool in_regime(double x) const noexcept;
};

/// Left-hand side of the quadratic-tilt event for one sample of a standardized population.
double quadratic_tilt_statistic(std::span<const double> sample, const Design& d, double x,
                                const QuadraticTilt& qt, double mean_y2);

/// Requires a standardized population (throws NotStandardized).
TailEstimate mc_tail_quadratic_tilt(const Population& std_pop, const Design& d, double x,
                                    const QuadraticTilt& qt, const McOptions& opt);

/// P(S_n - n mu >= x sigma omega_N) from i.i.d. Bernoulli(p) inclusion vectors
/// conditioned on exactly n inclusions. `opt.reps` counts accepted vectors.
/// Throws std::domain_error if the acceptance probability is below 1e-6.
std::vector<TailEstimate> bernoulli_conditioned_tail(const Population& pop, const Design& d,
                                                     std::span<const double> xs,
                                                     const McOptions& opt);
TailEstimate bernoulli_conditioned_tail(const Population& pop, const Design& d, double x,
                                        const McOptions& opt);

/// Probability that a conditioned-Bernoulli proposal has exactly n inclusions.
double bernoulli_acceptance_probability(const Design& d);

/// Compares I(t_n >= x) with I(S_n / V_n >= x0 sqrt(q)) for one sample of a
/// standardized population. Empty when V_n = 0 or the sample is constant.
std::optional<bool> t_identity_check(const Sample& s, const Design& d, double x);

}  // namespace fpld
