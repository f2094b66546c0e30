#include "fpld/saddlepoint.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpld/bounds.hpp"
#include "fpld/error.hpp"
#include "fpld/tilt.hpp"

namespace fpld {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// log psi(t), valid for negative t as well.
double log_mills(double t) {
  if (t > 0.0) return std::log(mills_psi(t));
  return log_normal_tail(t) + 0.5 * t * t + kLogSqrt2Pi;
}

struct Centered {
  std::vector<double> b;
  double shift = 0.0;  // n * mean
  double top = 0.0;    // largest attainable centered sum
  double beta3 = 1.0;
  Design d;
};

Centered center(std::span<const double> values, std::size_t n) {
  if (values.size() < 2) throw std::invalid_argument("need at least two values");
  Centered c;
  c.d = Design::make(values.size(), n);
  const double N = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / N;
  c.b.reserve(values.size());
  double s2 = 0.0, s3 = 0.0;
  for (double v : values) {
    c.b.push_back(v - mean);
    s2 += (v - mean) * (v - mean);
    s3 += std::abs(v - mean) * (v - mean) * (v - mean);
  }
  s2 /= N;
  s3 /= N;
  c.beta3 = s2 > 0.0 ? s3 / std::pow(s2, 1.5) : 1.0;
  c.shift = static_cast<double>(n) * mean;
  std::vector<double> sorted = c.b;
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n), sorted.end(),
                    std::greater<>());
  c.top = std::accumulate(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
  return c;
}

SaddlepointTail assemble(const Centered& c, double y, double u, const TiltState& s, double C) {
  SaddlepointTail r;
  r.u = u;
  r.alpha = s.alpha;
  r.mean = s.m_N;
  r.sigma = std::sqrt(s.sigma_N2);
  r.log_mgf = s.K_sum - log_gn(c.d) - 0.5 * std::log(s.K2_sum);
  r.epsilon = r.sigma > 0.0 ? (y - s.m_N) / r.sigma : 0.0;
  const double a = u * r.sigma;
  r.log_probability =
      r.log_mgf - u * y - 0.5 * r.epsilon * r.epsilon + log_mills(r.epsilon + a) - kLogSqrt2Pi;
  r.probability = std::exp(r.log_probability);
  r.remainder_bound = C * a * c.beta3 / c.d.omega;
  return r;
}

}  // namespace

SaddlepointTail linear_tilt_tail(std::span<const double> values, std::size_t n, double y, double u,
                                 double C) {
  if (!(u > 0.0) || !std::isfinite(u)) throw std::domain_error("tilt u must be positive");
  const auto c = center(values, n);
  const double yc = y - c.shift;
  return assemble(c, yc, u, tilt_state(c.b, c.d.p, u), C);
}

SaddlepointTail saddlepoint_tail(std::span<const double> values, std::size_t n, double y,
                                 double C) {
  const auto c = center(values, n);
  const double yc = y - c.shift;
  if (!(yc > 0.0)) throw std::domain_error("saddlepoint needs y above the mean of the sum");
  if (!(yc < c.top)) throw std::domain_error("saddlepoint needs y below the largest attainable sum");

  const double tol = 1e-9 * std::max(1.0, yc);
  const double p = c.d.p;

  // m_N(u) increases from 0 with slope sigma_N^2(u).
  double lo = 0.0, hi = 0.0;
  TiltState s = tilt_state(c.b, p, 0.0);
  double u = yc / std::max(s.sigma_N2, 1e-300);
  for (int i = 0;; ++i) {
    s = tilt_state(c.b, p, u);
    if (s.m_N >= yc) {
      hi = u;
      break;
    }
    lo = u;
    u *= 2.0;
    if (i > 200) throw NumericalFailure("saddlepoint: could not bracket the tilt from above");
  }

  u = 0.5 * (lo + hi);
  s = tilt_state(c.b, p, u);
  for (int iter = 0; iter < 300; ++iter) {
    const double f = s.m_N - yc;
    if (std::abs(f) <= tol) return assemble(c, yc, u, s, C);
    if (f > 0.0) hi = u; else lo = u;
    double next = s.sigma_N2 > 0.0 ? u - f / s.sigma_N2 : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == u) break;
    u = next;
    s = tilt_state(c.b, p, u);
  }
  if (std::abs(s.m_N - yc) <= tol) return assemble(c, yc, u, s, C);
  throw NumericalFailure("saddlepoint: tilt root find did not converge in [" + std::to_string(lo) +
                         ", " + std::to_string(hi) + "]");
}

SaddlepointTail saddlepoint_tail(const Population& std_pop, const Design& d, double y, double C) {
  if (d.N != std_pop.size()) throw std::invalid_argument("design does not match population size");
  if (!is_standardized(std_pop)) throw NotStandardized("saddlepoint_tail needs a standardized population");
  return saddlepoint_tail(std_pop.values(), d.n, y, C);
}

StudentSaddlepoint saddlepoint_t_tail(const Population& pop, const Design& d, double x,
                                      TangentRule rule) {
  if (!(x > 0.0)) throw std::domain_error("Student saddlepoint needs x > 0");
  if (d.N != pop.size()) throw std::invalid_argument("design does not match population size");
  const Population a = standardize(pop);
  const auto x0 = x0_transform(x, d);
  const double c = x0.x0 * std::sqrt(d.q);

  std::vector<double> lin(a.size());
  auto at = [&](double v) -> std::optional<SaddlepointTail> {
    const double g = c / (2.0 * v);
    for (std::size_t k = 0; k < a.size(); ++k) lin[k] = a[k] - g * a[k] * a[k];
    try {
      return saddlepoint_tail(lin, d.n, 0.5 * c * v);
    } catch (const std::domain_error&) {
      return std::nullopt;  // threshold not attainable for this tangent
    }
  };

  StudentSaddlepoint r;
  r.x0 = x0.x0;
  const double root_n = std::sqrt(static_cast<double>(d.n));
  if (rule == TangentRule::fixed_sqrt_n) {
    auto s = at(root_n);
    if (!s) throw std::domain_error("Student saddlepoint: threshold not attainable");
    r.tangent = root_n;
    r.inner = *s;
    r.probability = s->probability;
    return r;
  }

  // Coarse scan in log v, then golden-section refinement around the best point.
  constexpr int kGrid = 49;
  const double lv_lo = std::log(root_n / 4.0), lv_hi = std::log(root_n * 4.0);
  const double step = (lv_hi - lv_lo) / (kGrid - 1);
  int best = -1;
  double best_lp = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGrid; ++i) {
    if (auto s = at(std::exp(lv_lo + step * i)); s && s->log_probability > best_lp) {
      best_lp = s->log_probability;
      best = i;
    }
  }
  if (best < 0) throw std::domain_error("Student saddlepoint: threshold not attainable");

  auto score = [&](double lv) {
    auto s = at(std::exp(lv));
    return s ? s->log_probability : -std::numeric_limits<double>::infinity();
  };
  double lo = lv_lo + step * std::max(best - 1, 0);
  double hi = lv_lo + step * std::min(best + 1, kGrid - 1);
  constexpr double kPhi = 0.61803398874989484820;
  double x1 = hi - kPhi * (hi - lo), x2 = lo + kPhi * (hi - lo);
  double f1 = score(x1), f2 = score(x2);
  for (int it = 0; it < 40 && hi - lo > 1e-7; ++it) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kPhi * (hi - lo);
      f1 = score(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kPhi * (hi - lo);
      f2 = score(x2);
    }
  }
  double lv = f1 >= f2 ? x1 : x2;
  if (std::max(f1, f2) < best_lp) lv = lv_lo + step * best;
  r.tangent = std::exp(lv);
  r.inner = *at(r.tangent);
  r.probability = r.inner.probability;
  return r;
}

SaddlepointTail quadratic_tilt_tail_approx(const Population& std_pop, const Design& d, double x,
                                           const QuadraticTilt& qt, std::optional<double> u) {
  if (d.N != std_pop.size()) throw std::invalid_argument("design does not match population size");
  if (!is_standardized(std_pop)) {
    throw NotStandardized("quadratic-tilt approximation needs a standardized population");
  }
  const auto a = std_pop.values();
  const double N = static_cast<double>(a.size());
  double mean_y2 = 0.0;
  for (double v : a) mean_y2 += (v * v - 1.0) * (v * v - 1.0);
  mean_y2 /= N;

  const double b = x / d.omega;
  const double b2q = b * b * d.q;
  std::vector<double> w;
  w.reserve(a.size());
  for (double v : a) {
    const double y = v * v - 1.0;
    w.push_back(b * v - qt.xi * b2q * y + qt.xi1 * b2q * b2q * (y * y - mean_y2));
  }
  // V_1n = sum (X^2 - 1) over the sample, so the per-unit terms above add up to the statistic.
  const double threshold = x * x + qt.h;
  if (u) return linear_tilt_tail(w, d.n, threshold, *u);
  return saddlepoint_tail(w, d.n, threshold);
}

}  // namespace fpld
