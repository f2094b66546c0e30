#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "fpld/population.hpp"
#include "fpld/sampling.hpp"

namespace fpld {

/// Tail approximation P(T_n >= y) for the sum T_n of a without-replacement
/// sample of size n from `values`, obtained by tilting with e^{uT} and
/// replacing the tilted law by N(m_N, sigma_N^2):
///
///   P ~ M(u) e^{-uy} e^{-eps^2/2} psi(eps + u sigma_N) / sqrt(2 pi),   eps = (y - m_N) / sigma_N,
///
/// with M(u) the conjugate approximation of E e^{uT}. Values are centered
/// internally; y refers to the uncentered sum.
struct SaddlepointTail {
  double probability = 0.0;
  double log_probability = 0.0;
  double u = 0.0;
  double alpha = 0.0;
  double mean = 0.0;   ///< m_N of the centered values
  double sigma = 0.0;  ///< sigma_N
  double log_mgf = 0.0;
  double epsilon = 0.0;
  /// C u sigma_N beta3N / omega_N: relative size of the dropped remainder for a
  /// caller-supplied constant C. Diagnostic only.
  double remainder_bound = 0.0;
};

/// Fixed tilt u > 0. Scaling the coefficients by lambda at u = 1 is the same as u = lambda.
SaddlepointTail linear_tilt_tail(std::span<const double> values, std::size_t n, double y, double u,
                                 double C = 1.0);

/// Mean-matching tilt: u* solves m_N(u*) = y - n mean(values), so eps = 0.
/// Throws std::domain_error unless n mean < y < (largest attainable sum), and
/// NumericalFailure if the outer root find does not converge.
SaddlepointTail saddlepoint_tail(std::span<const double> values, std::size_t n, double y,
                                 double C = 1.0);
SaddlepointTail saddlepoint_tail(const Population& std_pop, const Design& d, double y,
                                 double C = 1.0);

/// How the event S_n >= c V_n is replaced by a linear event.
///
/// For any v > 0, V <= (V^2 / v + v) / 2, so
///   { sum_k (a_k - c a_k^2 / (2v)) >= c v / 2 }  is contained in  { S_n >= c V_n }.
/// `fixed_sqrt_n` takes v = sqrt(n), the expansion point of the quadratic-tilt
/// reduction; `optimal` maximizes the approximate probability over v.
enum class TangentRule { optimal, fixed_sqrt_n };

struct StudentSaddlepoint {
  double probability = 0.0;
  double x0 = 0.0;
  double tangent = 0.0;  ///< v
  SaddlepointTail inner;
};

/// Approximates P(t_n >= x) for x > 0 through P(S_n / V_n >= x0 sqrt(q)) on
/// the standardized population. Throws std::domain_error for x <= 0.
StudentSaddlepoint saddlepoint_t_tail(const Population& pop, const Design& d, double x,
                                      TangentRule rule = TangentRule::optimal);

/// Approximates the quadratic-tilt event probability. With `u` empty the tilt is
/// mean-matched; otherwise it is held at u.
SaddlepointTail quadratic_tilt_tail_approx(const Population& std_pop, const Design& d, double x,
                                           const QuadraticTilt& qt,
                                           std::optional<double> u = std::nullopt);

}  // namespace fpld
