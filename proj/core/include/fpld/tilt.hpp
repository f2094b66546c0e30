#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fpld/population.hpp"

namespace fpld {

/// K(z) = log(p e^{qz} + q e^{-pz}) and its first three derivatives.
///
/// K is the cumulant generating function of a centered Bernoulli(p) indicator:
/// strictly convex with K(0) = K'(0) = 0 and K''(0) = pq.
struct CgfValues {
  double K = 0.0;
  double K1 = 0.0;
  double K2 = 0.0;
  double K3 = 0.0;
};

CgfValues cgf(double z, double p);

/// Signature shared by cgf() and test doubles used for fault injection.
using CgfFunction = std::function<CgfValues(double z, double p)>;

/// Shape parameters of the tilt coefficients
///   b_k = lambda b a_k - theta b^2 q (a_k^2 - 1)
///         + theta1 b^4 q^2 [(a_k^2 - 1)^2 - (1/N) sum_j (a_j^2 - 1)^2],   b = x / omega_N.
struct TiltParameters {
  double lambda = 1.0;  ///< 0 < lambda <= 2
  double theta = 0.0;   ///< 0 <= theta <= 1
  double theta1 = 0.0;  ///< |theta1| <= 72
};

struct TiltCoefficients {
  std::vector<double> b_k;
  TiltParameters params;
  double b = 0.0;  ///< x / omega_N
};

/// Throws NotStandardized for an unstandardized population and
/// std::invalid_argument for parameters outside their ranges.
TiltCoefficients tilt_coeffs(const Population& std_pop, const Design& d, double x,
                             const TiltParameters& params = {});

/// Root alpha of sum_k K'(u b_k + alpha) = 0.
///
/// The map is strictly increasing in alpha and runs from -Np to Nq, so the
/// root exists and is unique. Bracketed bisection with safeguarded Newton;
/// converges to |residual| <= 1e-12 N p q. Throws NumericalFailure otherwise.
double solve_alpha(std::span<const double> b, double p, double u);

/// Sums over the tilted coordinates z_k = u b_k + alpha.
struct TiltState {
  double u = 0.0;
  double alpha = 0.0;
  double K_sum = 0.0;     ///< sum K_k
  double m_N = 0.0;       ///< sum b_k K'_k, the tilted mean of the sample sum
  double sigma_N2 = 0.0;  ///< sum b_k^2 K''_k - (sum b_k K''_k)^2 / sum K''_k
  double K2_sum = 0.0;    ///< sum K''_k
  double bK2_sum = 0.0;   ///< sum b_k K''_k
  double b2K2_sum = 0.0;  ///< sum b_k^2 K''_k
  double residual = 0.0;  ///< |sum K'_k|
};

TiltState tilt_moments(std::span<const double> b, double p, double u, double alpha);

/// solve_alpha followed by tilt_moments.
TiltState tilt_state(std::span<const double> b, double p, double u);

/// Conjugate approximation of E exp(u T_n), T_n the sum of a without-replacement
/// sample of size n from {b_k}:
///   exp(u p sum b_k) G_n(p)^{-1} (sum K''_k)^{-1/2} exp(sum K_k),
///   G_n(p) = sqrt(2 pi) C(N, n) p^n q^{N-n}.
/// The leading factor is 1 when sum b_k = 0.
struct MgfApprox {
  double value = 0.0;
  double log_value = 0.0;
  double Gn_p = 0.0;
  double log_Gn_p = 0.0;
  TiltState state;
};

MgfApprox mgf_approx(std::span<const double> b, const Design& d, double u);

/// log G_n(p), evaluated through log-gamma.
double log_gn(const Design& d);

/// Exact E exp(u T_n) by enumerating every n-subset. Guard: C(N, n) <= 1e7.
double mgf_exact(std::span<const double> b, std::size_t n, double u);

/// Exact associated (tilted) distribution H_n(x; u) = E e^{uT} I(T <= x) / E e^{uT}
/// as sorted atoms with cumulative weights. Guard: C(N, n) <= 1e7.
class AssociatedDistribution {
 public:
  AssociatedDistribution(std::span<const double> b, std::size_t n, double u);

  double cdf(double x) const;

  /// sup_x |H_n(x; u) - Phi((x - mean) / sd)| over all jump points, both sides.
  double kolmogorov_distance_to_normal(double mean, double sd) const;

  std::size_t atoms() const noexcept { return sums_.size(); }

 private:
  std::vector<double> sums_;  // distinct sorted subset sums
  std::vector<double> cum_;   // normalized cumulative weight at each sum
};

double associated_cdf(std::span<const double> b, std::size_t n, double u, double x_eval);

/// Self-normalized importance estimate of H_n(x; u) from `reps` untilted draws,
/// with a bootstrap standard error.
struct AssociatedCdfEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t reps = 0;
};

AssociatedCdfEstimate associated_cdf_mc(std::span<const double> b, std::size_t n, double u,
                                        double x_eval, std::uint64_t reps, std::uint64_t seed,
                                        int bootstrap_resamples = 200);

}  // namespace fpld
