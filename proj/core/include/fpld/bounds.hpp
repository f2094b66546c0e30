#pragma once

#include <cstddef>

#include "fpld/population.hpp"

namespace fpld {

/// Standard normal density.
double normal_pdf(double x) noexcept;

/// 1 - Phi(x). Relative error below 1e-12 on |x| <= 8; continued fraction past x = 8.
double normal_tail(double x);

/// log(1 - Phi(x)); finite for all finite x.
double log_normal_tail(double x);

/// Mills ratio psi(t) = (1 - Phi(t)) / phi(t).
double mills_psi(double t);

/// Envelope exp(-E) <= P(...) / (1 - Phi(x)) <= exp(E), E = A (1 + x)^3 beta3N / omega_N,
/// shared by the standardized-sum and Student-t tail ratios.
struct BoundEnvelope {
  double lower = 1.0;
  double upper = 1.0;
  double exponent = 0.0;  ///< E
  double x = 0.0;
  double A = 0.0;
  double beta3N = 1.0;
  double omega = 0.0;
  bool in_range = true;  ///< x <= (1/A) omega sigma / max_dev

  bool contains(double ratio) const noexcept { return lower <= ratio && ratio <= upper; }
};

BoundEnvelope tail_ratio_envelope(double x, const PopulationMoments& m, const Design& d, double A);

/// Relative-error band of the Cramer-type expansion and the matching
/// non-uniform Berry-Esseen bound.
struct RelativeErrorBand {
  double relative_band = 0.0;  ///< A (1 + x)^3 beta3N / omega_N
  double be_bound = 0.0;       ///< A (1 + |x|)^2 exp(-x^2/2) beta3N / omega_N
  bool in_range = true;
};

RelativeErrorBand relative_error_band(double x, const PopulationMoments& m, const Design& d,
                                      double A);

/// Threshold map for the Student statistic: P(t_n >= x) = P(S_n / V_n >= x0 sqrt(q)).
struct X0Result {
  double x0 = 0.0;       ///< x sqrt(n) / sqrt(n + x^2 q - 1)
  double b0 = 0.0;       ///< x0 / omega_N
  double rel_dev = 0.0;  ///< |x0 / x - 1|; 0 at x = 0
};

/// Throws std::domain_error when n + x^2 q - 1 <= 0.
X0Result x0_transform(double x, std::size_t n, double q);
X0Result x0_transform(double x, const Design& d);

/// Smallest A for which the envelope contains `ratio` at x: |log ratio| omega_N / ((1+x)^3 beta3N).
double implied_A(double ratio, double x, const PopulationMoments& m, const Design& d);

}  // namespace fpld
