#include "fpld/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "fpld/bounds.hpp"
#include "fpld/error.hpp"

namespace fpld {

SrsworSampler::SrsworSampler(std::size_t N) : perm_(N) {
  for (std::size_t k = 0; k < N; ++k) perm_[k] = k;
}

std::span<const std::size_t> SrsworSampler::draw(std::size_t n, RandomStream& rng) {
  const std::size_t N = perm_.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, N - 1);
    std::swap(perm_[i], perm_[pick(rng)]);
  }
  return std::span<const std::size_t>(perm_.data(), n);
}

namespace {

void check_design(const Population& pop, const Design& d) {
  if (d.N != pop.size()) {
    throw std::invalid_argument("design N=" + std::to_string(d.N) + " does not match population size " +
                                std::to_string(pop.size()));
  }
}

void check_sample_size(std::size_t N, std::size_t n) {
  if (n < 1 || n >= N) {
    throw std::invalid_argument("sample size must satisfy 1 <= n < N");
  }
}

double mean_y2_of(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) {
    const double y = v * v - 1.0;
    s += y * y;
  }
  return s / static_cast<double>(a.size());
}

// Runs `fn(block_reps, stream, counts)` over the replication blocks and sums
// the per-block count vectors.
template <class BlockFn>
std::vector<std::uint64_t> run_blocks(std::size_t slots, const McOptions& opt, BlockFn fn) {
  if (opt.reps < 1) throw std::invalid_argument("reps must be >= 1");
  if (opt.workers < 1) throw std::invalid_argument("workers must be >= 1");
  const std::uint64_t W = opt.workers;
  std::vector<std::vector<std::uint64_t>> partial(W, std::vector<std::uint64_t>(slots, 0));
  std::vector<std::exception_ptr> errors(W);

  auto run_one = [&](std::uint64_t j) {
    try {
      const std::uint64_t block_reps = opt.reps / W + (j < opt.reps % W ? 1 : 0);
      if (block_reps == 0) return;
      auto stream = block_stream(opt.seed, j);
      fn(block_reps, stream, std::span<std::uint64_t>(partial[j]));
    } catch (...) {
      errors[j] = std::current_exception();
    }
  };

  if (W == 1) {
    run_one(0);
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(W);
    for (std::uint64_t j = 0; j < W; ++j) threads.emplace_back(run_one, j);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<std::uint64_t> total(slots, 0);
  for (const auto& p : partial) {
    for (std::size_t s = 0; s < slots; ++s) total[s] += p[s];
  }
  return total;
}

}  // namespace

Sample draw_sample(const Population& pop, std::size_t n, RandomStream& stream) {
  check_sample_size(pop.size(), n);
  SrsworSampler sampler(pop.size());
  const auto idx = sampler.draw(n, stream);
  Sample s;
  s.indices.assign(idx.begin(), idx.end());
  s.values.reserve(n);
  for (auto k : s.indices) s.values.push_back(pop[k]);
  return s;
}

StatsContext StatsContext::of(const Population& pop) {
  StatsContext ctx;
  ctx.mu = compute_moments(pop).mu;
  ctx.standardized = is_standardized(pop);
  if (ctx.standardized) {
    ctx.mu = 0.0;
    ctx.mean_y2 = mean_y2_of(pop.values());
  }
  return ctx;
}

SampleStats sample_stats(const Sample& s, const Design& d, const StatsContext& ctx) {
  const auto& X = s.values;
  const std::size_t n = X.size();
  if (n < 2) throw std::invalid_argument("sample statistics need n >= 2");

  SampleStats st;
  for (double v : X) {
    st.S_n += v;
    st.Vn2 += v * v;
  }
  st.Xbar = st.S_n / static_cast<double>(n);
  double ss = 0.0;
  for (double v : X) ss += (v - st.Xbar) * (v - st.Xbar);
  st.sigma_hat2 = ss / static_cast<double>(n - 1);

  if (ctx.standardized) {
    st.V1n = st.Vn2 - static_cast<double>(n);
    double v2 = 0.0;
    for (double v : X) {
      const double y = v * v - 1.0;
      v2 += y * y - ctx.mean_y2;
    }
    st.V2n = v2;
  }

  const auto [lo, hi] = std::minmax_element(X.begin(), X.end());
  if (*lo != *hi && st.sigma_hat2 > 0.0) {
    st.t_n = std::sqrt(static_cast<double>(n)) * (st.Xbar - ctx.mu) /
             (std::sqrt(st.sigma_hat2) * std::sqrt(d.q));
  }
  return st;
}

SampleStats sample_stats(const Sample& s, const Design& d, const Population& pop) {
  return sample_stats(s, d, StatsContext::of(pop));
}

std::string_view to_string(TailMethod m) noexcept {
  switch (m) {
    case TailMethod::mc: return "mc";
    case TailMethod::enumeration: return "enum";
    case TailMethod::dp: return "dp";
    case TailMethod::bernoulli_conditioned: return "bernoulli_conditioned";
  }
  return "unknown";
}

TailEstimate TailEstimate::from_counts(std::uint64_t hits, std::uint64_t reps, TailMethod method) {
  TailEstimate e;
  e.method = method;
  e.hits = hits;
  e.reps = reps;
  e.p_hat = static_cast<double>(hits) / static_cast<double>(reps);
  e.std_error = std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(reps));
  return e;
}

std::vector<TailEstimate> mc_tail_sum(const Population& pop, const Design& d,
                                      std::span<const double> xs, const McOptions& opt) {
  check_design(pop, d);
  const auto m = compute_moments(pop);
  std::vector<double> thresholds;
  for (double x : xs) {
    thresholds.push_back(static_cast<double>(d.n) * m.mu + x * m.sigma() * d.omega);
  }
  const auto a = pop.values();

  const auto counts = run_blocks(xs.size(), opt, [&](std::uint64_t reps, RandomStream& rng,
                                                     std::span<std::uint64_t> hits) {
    SrsworSampler sampler(d.N);
    for (std::uint64_t r = 0; r < reps; ++r) {
      double s = 0.0;
      for (auto k : sampler.draw(d.n, rng)) s += a[k];
      for (std::size_t j = 0; j < thresholds.size(); ++j) {
        if (s >= thresholds[j]) ++hits[j];
      }
    }
  });

  std::vector<TailEstimate> out;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    out.push_back(TailEstimate::from_counts(counts[j], opt.reps, TailMethod::mc));
  }
  return out;
}

TailEstimate mc_tail_sum(const Population& pop, const Design& d, double x, const McOptions& opt) {
  return mc_tail_sum(pop, d, std::span<const double>(&x, 1), opt).front();
}

std::vector<TailEstimate> mc_tail_t(const Population& pop, const Design& d,
                                    std::span<const double> xs, const McOptions& opt) {
  check_design(pop, d);
  if (d.n < 2) throw std::invalid_argument("t-statistic needs n >= 2");
  const auto m = compute_moments(pop);
  // t_n is location-scale invariant in the population; centering keeps the
  // one-pass variance well conditioned.
  std::vector<double> centered;
  for (double v : pop.values()) centered.push_back(v - m.mu);

  const double n = static_cast<double>(d.n);
  const double scale = std::sqrt(n) * std::sqrt(d.q);
  const std::size_t slots = xs.size() + 1;  // last slot counts constant samples

  const auto counts = run_blocks(slots, opt, [&](std::uint64_t reps, RandomStream& rng,
                                                 std::span<std::uint64_t> hits) {
    SrsworSampler sampler(d.N);
    for (std::uint64_t r = 0; r < reps; ++r) {
      double s = 0.0, ss = 0.0;
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (auto k : sampler.draw(d.n, rng)) {
        const double v = centered[k];
        s += v;
        ss += v * v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const double var = (ss - s * s / n) / (n - 1.0);
      if (lo == hi || !(var > 0.0)) {
        ++hits[slots - 1];
        continue;
      }
      const double t = s / (scale * std::sqrt(var));
      for (std::size_t j = 0; j < xs.size(); ++j) {
        if (t >= xs[j]) ++hits[j];
      }
    }
  });

  std::vector<TailEstimate> out;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    auto e = TailEstimate::from_counts(counts[j], opt.reps, TailMethod::mc);
    e.undefined_samples = counts[slots - 1];
    out.push_back(e);
  }
  return out;
}

TailEstimate mc_tail_t(const Population& pop, const Design& d, double x, const McOptions& opt) {
  return mc_tail_t(pop, d, std::span<const double>(&x, 1), opt).front();
}

bool QuadraticTilt::in_regime(double x) const noexcept {
  return xi >= 0.0 && xi <= 0.5 && std::abs(xi1) <= 36.0 && std::abs(h) <= x * x / 5.0;
}

double quadratic_tilt_statistic(std::span<const double> sample, const Design& d, double x,
                                const QuadraticTilt& qt, double mean_y2) {
  const double b = x / d.omega;
  double S = 0.0, V1 = 0.0, V2 = 0.0;
  for (double v : sample) {
    const double y = v * v - 1.0;
    S += v;
    V1 += y;
    V2 += y * y - mean_y2;
  }
  const double b2q = b * b * d.q;
  return b * S - qt.xi * b2q * V1 + qt.xi1 * b2q * b2q * V2;
}

TailEstimate mc_tail_quadratic_tilt(const Population& std_pop, const Design& d, double x,
                                    const QuadraticTilt& qt, const McOptions& opt) {
  check_design(std_pop, d);
  if (!is_standardized(std_pop)) {
    throw NotStandardized("quadratic-tilt event is defined on a standardized population");
  }
  const auto a = std_pop.values();
  const double mean_y2 = mean_y2_of(a);
  const double threshold = x * x + qt.h;

  const auto counts = run_blocks(1, opt, [&](std::uint64_t reps, RandomStream& rng,
                                             std::span<std::uint64_t> hits) {
    SrsworSampler sampler(d.N);
    std::vector<double> buf(d.n);
    for (std::uint64_t r = 0; r < reps; ++r) {
      const auto idx = sampler.draw(d.n, rng);
      for (std::size_t i = 0; i < d.n; ++i) buf[i] = a[idx[i]];
      if (quadratic_tilt_statistic(buf, d, x, qt, mean_y2) >= threshold) ++hits[0];
    }
  });

  auto e = TailEstimate::from_counts(counts[0], opt.reps, TailMethod::mc);
  e.out_of_regime = !qt.in_regime(x);
  return e;
}

double bernoulli_acceptance_probability(const Design& d) {
  const double N = static_cast<double>(d.N), n = static_cast<double>(d.n);
  const double log_p = std::lgamma(N + 1.0) - std::lgamma(n + 1.0) - std::lgamma(N - n + 1.0) +
                       n * std::log(d.p) + (N - n) * std::log(d.q);
  return std::exp(log_p);
}

std::vector<TailEstimate> bernoulli_conditioned_tail(const Population& pop, const Design& d,
                                                     std::span<const double> xs,
                                                     const McOptions& opt) {
  check_design(pop, d);
  const double accept = bernoulli_acceptance_probability(d);
  if (accept < 1e-6) {
    throw std::domain_error("conditioned-Bernoulli acceptance probability " + std::to_string(accept) +
                            " is below 1e-6; rejection sampling is infeasible");
  }
  const auto m = compute_moments(pop);
  std::vector<double> thresholds;
  for (double x : xs) {
    thresholds.push_back(static_cast<double>(d.n) * m.mu + x * m.sigma() * d.omega);
  }
  const auto a = pop.values();
  const std::size_t slots = xs.size() + 1;  // last slot counts proposals

  const auto counts = run_blocks(slots, opt, [&](std::uint64_t reps, RandomStream& rng,
                                                 std::span<std::uint64_t> hits) {
    std::bernoulli_distribution include(d.p);
    std::uint64_t accepted = 0;
    while (accepted < reps) {
      ++hits[slots - 1];
      std::size_t count = 0;
      double s = 0.0;
      for (std::size_t k = 0; k < d.N; ++k) {
        if (include(rng)) {
          ++count;
          s += a[k];
        }
      }
      if (count != d.n) continue;
      ++accepted;
      for (std::size_t j = 0; j < thresholds.size(); ++j) {
        if (s >= thresholds[j]) ++hits[j];
      }
    }
  });

  std::vector<TailEstimate> out;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    auto e = TailEstimate::from_counts(counts[j], opt.reps, TailMethod::bernoulli_conditioned);
    e.attempts = counts[slots - 1];
    out.push_back(e);
  }
  return out;
}

TailEstimate bernoulli_conditioned_tail(const Population& pop, const Design& d, double x,
                                        const McOptions& opt) {
  return bernoulli_conditioned_tail(pop, d, std::span<const double>(&x, 1), opt).front();
}

std::optional<bool> t_identity_check(const Sample& s, const Design& d, double x) {
  const auto st = sample_stats(s, d, StatsContext{0.0, 0.0, false});
  if (!st.t_n || !(st.Vn2 > 0.0)) return std::nullopt;
  const auto x0 = x0_transform(x, d);
  const bool t_side = *st.t_n >= x;
  const bool ratio_side = st.S_n / std::sqrt(st.Vn2) >= x0.x0 * std::sqrt(d.q);
  return t_side == ratio_side;
}

}  // namespace fpld
