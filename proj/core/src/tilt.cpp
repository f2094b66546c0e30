#include "fpld/tilt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

#include "detail/subsets.hpp"
#include "fpld/bounds.hpp"
#include "fpld/error.hpp"
#include "fpld/rng.hpp"
#include "fpld/sampling.hpp"

namespace fpld {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// K' and K'' only; the inner loop of the root finders.
//   z <= 0: D = p e^z + q = 1 + p expm1(z),  K' = pq expm1(z) / D,  K'' = pq e^z / D^2
//   z  > 0: D = p + q e^-z = 1 + q expm1(-z), K' = -pq expm1(-z) / D, K'' = pq e^-z / D^2
struct Slope {
  double K1;
  double K2;
};

inline Slope cgf_slope(double z, double p, double q) {
  const double pq = p * q;
  if (z <= 0.0) {
    const double em1 = std::expm1(z);
    const double D = 1.0 + p * em1;
    return {pq * em1 / D, pq * (em1 + 1.0) / (D * D)};
  }
  const double em1 = std::expm1(-z);
  const double D = 1.0 + q * em1;
  return {-pq * em1 / D, pq * (em1 + 1.0) / (D * D)};
}

}  // namespace

CgfValues cgf(double z, double p) {
  const double q = 1.0 - p;
  const double pq = p * q;
  CgfValues v;
  if (z <= 0.0) {
    const double em1 = std::expm1(z);
    const double D = 1.0 + p * em1;
    v.K = -p * z + std::log1p(p * em1);
    v.K1 = pq * em1 / D;
    v.K2 = pq * (em1 + 1.0) / (D * D);
    v.K3 = v.K2 * (1.0 - 2.0 * p * (em1 + 1.0) / D);
  } else {
    const double em1 = std::expm1(-z);
    const double D = 1.0 + q * em1;
    v.K = q * z + std::log1p(q * em1);
    v.K1 = -pq * em1 / D;
    v.K2 = pq * (em1 + 1.0) / (D * D);
    v.K3 = v.K2 * (1.0 - 2.0 * p / D);
  }
  return v;
}

TiltCoefficients tilt_coeffs(const Population& std_pop, const Design& d, double x,
                             const TiltParameters& params) {
  if (d.N != std_pop.size()) throw std::invalid_argument("design does not match population size");
  if (!is_standardized(std_pop)) {
    throw NotStandardized("tilt coefficients require sum a_k = 0 and sum a_k^2 = N");
  }
  if (!(params.lambda > 0.0 && params.lambda <= 2.0)) {
    throw std::invalid_argument("lambda must lie in (0, 2]");
  }
  if (!(params.theta >= 0.0 && params.theta <= 1.0)) {
    throw std::invalid_argument("theta must lie in [0, 1]");
  }
  if (!(std::abs(params.theta1) <= 72.0)) throw std::invalid_argument("|theta1| must be <= 72");

  const auto a = std_pop.values();
  double mean_y2 = 0.0;
  for (double v : a) mean_y2 += (v * v - 1.0) * (v * v - 1.0);
  mean_y2 /= static_cast<double>(a.size());

  TiltCoefficients c;
  c.params = params;
  c.b = x / d.omega;
  const double b = c.b;
  const double b2q = b * b * d.q;
  c.b_k.reserve(a.size());
  for (double v : a) {
    const double y = v * v - 1.0;
    c.b_k.push_back(params.lambda * b * v - params.theta * b2q * y +
                    params.theta1 * b2q * b2q * (y * y - mean_y2));
  }
  return c;
}

double solve_alpha(std::span<const double> b, double p, double u) {
  if (b.empty()) throw std::invalid_argument("solve_alpha needs at least one coefficient");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0, 1)");
  const double q = 1.0 - p;
  const double N = static_cast<double>(b.size());
  const double tol = 1e-12 * N * p * q;

  auto eval = [&](double alpha) {
    long double f = 0.0L, fp = 0.0L;
    for (double bk : b) {
      const auto s = cgf_slope(u * bk + alpha, p, q);
      f += s.K1;
      fp += s.K2;
    }
    return Slope{static_cast<double>(f), static_cast<double>(fp)};
  };

  auto at = eval(0.0);
  if (std::abs(at.K1) <= tol) return 0.0;

  // Bracket the root by expanding away from 0 on the side the sign points to.
  double lo = 0.0, hi = 0.0;
  double step = 1.0;
  if (at.K1 > 0.0) {
    hi = 0.0;
    lo = -step;
    for (int i = 0; eval(lo).K1 > 0.0; ++i) {
      if (i > 1100) throw NumericalFailure("solve_alpha: could not bracket the root from below");
      hi = lo;
      step *= 2.0;
      lo = -step;
    }
  } else {
    lo = 0.0;
    hi = step;
    for (int i = 0; eval(hi).K1 < 0.0; ++i) {
      if (i > 1100) throw NumericalFailure("solve_alpha: could not bracket the root from above");
      lo = hi;
      step *= 2.0;
      hi = step;
    }
  }

  double alpha = 0.5 * (lo + hi);
  at = eval(alpha);
  for (int iter = 0; iter < 400; ++iter) {
    if (std::abs(at.K1) <= tol) return alpha;
    if (at.K1 > 0.0) hi = alpha; else lo = alpha;
    double next = at.K2 > 0.0 ? alpha - at.K1 / at.K2 : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == alpha) break;
    alpha = next;
    at = eval(alpha);
  }
  if (std::abs(at.K1) <= tol) return alpha;
  throw NumericalFailure("solve_alpha did not converge: residual " + std::to_string(at.K1) +
                         " at alpha " + std::to_string(alpha) + ", tolerance " +
                         std::to_string(tol));
}

TiltState tilt_moments(std::span<const double> b, double p, double u, double alpha) {
  long double K = 0, K1 = 0, m = 0, K2 = 0, bK2 = 0, b2K2 = 0;
  for (double bk : b) {
    const auto c = cgf(u * bk + alpha, p);
    K += c.K;
    K1 += c.K1;
    m += bk * c.K1;
    K2 += c.K2;
    bK2 += bk * c.K2;
    b2K2 += bk * bk * c.K2;
  }
  TiltState s;
  s.u = u;
  s.alpha = alpha;
  s.K_sum = static_cast<double>(K);
  s.m_N = static_cast<double>(m);
  s.K2_sum = static_cast<double>(K2);
  s.bK2_sum = static_cast<double>(bK2);
  s.b2K2_sum = static_cast<double>(b2K2);
  s.residual = std::abs(static_cast<double>(K1));

  // K''-weighted variance of the b_k; algebraically equal to the difference
  // form and nonnegative by construction.
  const long double center = bK2 / K2;
  long double var = 0;
  for (double bk : b) {
    const auto c = cgf(u * bk + alpha, p);
    const long double dev = bk - center;
    var += c.K2 * dev * dev;
  }
  s.sigma_N2 = static_cast<double>(var);
  return s;
}

TiltState tilt_state(std::span<const double> b, double p, double u) {
  return tilt_moments(b, p, u, solve_alpha(b, p, u));
}

double log_gn(const Design& d) {
  return kLogSqrt2Pi + detail::log_binomial(d.N, d.n) + static_cast<double>(d.n) * std::log(d.p) +
         static_cast<double>(d.N - d.n) * std::log(d.q);
}

MgfApprox mgf_approx(std::span<const double> b, const Design& d, double u) {
  if (b.size() != d.N) throw std::invalid_argument("coefficient count does not match design N");
  MgfApprox r;
  r.state = tilt_state(b, d.p, u);
  r.log_Gn_p = log_gn(d);
  r.Gn_p = std::exp(r.log_Gn_p);
  const double total = std::accumulate(b.begin(), b.end(), 0.0);
  r.log_value = u * d.p * total + r.state.K_sum - r.log_Gn_p - 0.5 * std::log(r.state.K2_sum);
  r.value = std::exp(r.log_value);
  return r;
}

namespace {

// max over n-subsets of u * sum b_k.
double max_tilted_sum(std::span<const double> b, std::size_t n, double u) {
  std::vector<double> ub;
  ub.reserve(b.size());
  for (double v : b) ub.push_back(u * v);
  std::partial_sort(ub.begin(), ub.begin() + static_cast<std::ptrdiff_t>(n), ub.end(),
                    std::greater<>());
  return std::accumulate(ub.begin(), ub.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
}

}  // namespace

double mgf_exact(std::span<const double> b, std::size_t n, double u) {
  detail::guard_enumeration(b.size(), n);
  const double shift = max_tilted_sum(b, n, u);
  long double acc = 0.0L;
  std::size_t count = 0;
  detail::for_each_subset_sum(b, n, [&](double s) {
    acc += std::exp(static_cast<long double>(u * s - shift));
    ++count;
  });
  return static_cast<double>(std::exp(static_cast<long double>(shift)) * acc /
                             static_cast<long double>(count));
}

AssociatedDistribution::AssociatedDistribution(std::span<const double> b, std::size_t n, double u) {
  detail::guard_enumeration(b.size(), n);
  const double shift = max_tilted_sum(b, n, u);
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(detail::binomial_count(b.size(), n));
  detail::for_each_subset_sum(b, n, [&](double s) { atoms.emplace_back(s, std::exp(u * s - shift)); });
  std::sort(atoms.begin(), atoms.end());

  long double total = 0.0L;
  for (const auto& a : atoms) total += a.second;

  long double running = 0.0L;
  for (const auto& [s, w] : atoms) {
    running += w;
    // sums of equal subsets computed in different orders may differ in the last bits
    if (!sums_.empty() && std::abs(s - sums_.back()) <= 1e-12 * (1.0 + std::abs(s))) {
      cum_.back() = static_cast<double>(running / total);
      continue;
    }
    sums_.push_back(s);
    cum_.push_back(static_cast<double>(running / total));
  }
  cum_.back() = 1.0;
}

double AssociatedDistribution::cdf(double x) const {
  if (std::isnan(x)) throw std::domain_error("associated cdf evaluated at NaN");
  const auto it = std::upper_bound(sums_.begin(), sums_.end(), x + 1e-12 * (1.0 + std::abs(x)));
  if (it == sums_.begin()) return 0.0;
  return cum_[static_cast<std::size_t>(it - sums_.begin()) - 1];
}

double AssociatedDistribution::kolmogorov_distance_to_normal(double mean, double sd) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < sums_.size(); ++i) {
    const double G = 1.0 - normal_tail((sums_[i] - mean) / sd);
    const double left = i == 0 ? 0.0 : cum_[i - 1];
    worst = std::max({worst, std::abs(cum_[i] - G), std::abs(left - G)});
  }
  return worst;
}

double associated_cdf(std::span<const double> b, std::size_t n, double u, double x_eval) {
  return AssociatedDistribution(b, n, u).cdf(x_eval);
}

AssociatedCdfEstimate associated_cdf_mc(std::span<const double> b, std::size_t n, double u,
                                        double x_eval, std::uint64_t reps, std::uint64_t seed,
                                        int bootstrap_resamples) {
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  if (n < 1 || n >= b.size()) throw std::invalid_argument("sample size must satisfy 1 <= n < N");

  auto rng = block_stream(seed, 0);
  SrsworSampler sampler(b.size());
  std::vector<double> sums(reps);
  for (auto& s : sums) {
    s = 0.0;
    for (auto k : sampler.draw(n, rng)) s += b[k];
  }
  const double shift = u * (u >= 0 ? *std::max_element(sums.begin(), sums.end())
                                   : *std::min_element(sums.begin(), sums.end()));
  std::vector<double> w(reps);
  for (std::size_t i = 0; i < reps; ++i) w[i] = std::exp(u * sums[i] - shift);

  auto estimate = [&](auto&& index_of) {
    long double num = 0.0L, den = 0.0L;
    for (std::uint64_t i = 0; i < reps; ++i) {
      const std::size_t j = index_of(i);
      den += w[j];
      if (sums[j] <= x_eval) num += w[j];
    }
    return static_cast<double>(num / den);
  };

  AssociatedCdfEstimate e;
  e.reps = reps;
  e.value = estimate([](std::uint64_t i) { return static_cast<std::size_t>(i); });

  if (bootstrap_resamples > 1) {
    auto boot_rng = block_stream(seed, 1);
    std::uniform_int_distribution<std::size_t> pick(0, reps - 1);
    double mean = 0.0, m2 = 0.0;
    for (int r = 0; r < bootstrap_resamples; ++r) {
      const double v = estimate([&](std::uint64_t) { return pick(boot_rng); });
      const double delta = v - mean;
      mean += delta / (r + 1);
      m2 += delta * (v - mean);
    }
    e.std_error = std::sqrt(m2 / (bootstrap_resamples - 1));
  }
  return e;
}

}  // namespace fpld
