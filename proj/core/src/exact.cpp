#include "fpld/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <string>

#include "detail/subsets.hpp"
#include "fpld/error.hpp"

namespace fpld {

namespace {

ExactTail make_exact(BigCount hits, BigCount total, TailMethod method) {
  ExactTail r;
  r.estimate.method = method;
  r.estimate.reps = 0;
  r.estimate.std_error = 0.0;
  r.estimate.p_hat = static_cast<double>(hits) / static_cast<double>(total);
  if (hits <= std::numeric_limits<std::uint64_t>::max()) {
    r.estimate.hits = static_cast<std::uint64_t>(hits);
  }
  r.hits = std::move(hits);
  r.total = std::move(total);
  return r;
}

}  // namespace

ExactTail exact_tail_enum(const Population& pop, std::size_t n, const EnumStatistic& stat,
                          double threshold) {
  const auto d = Design::make(pop.size(), n);
  detail::guard_enumeration(pop.size(), n);
  const auto a = pop.values();

  std::uint64_t hits = 0, total = 0;
  switch (stat.kind) {
    case EnumStatistic::Kind::sum:
      detail::for_each_subset_sum(a, n, [&](double s) {
        ++total;
        if (s >= threshold) ++hits;
      });
      break;

    case EnumStatistic::Kind::t: {
      if (n < 2) throw std::invalid_argument("t statistic needs n >= 2");
      const auto m = compute_moments(pop);
      const double nn = static_cast<double>(n);
      const double scale = std::sqrt(nn) / std::sqrt(d.q);
      detail::for_each_subset(pop.size(), n, [&](std::span<const std::size_t> idx) {
        ++total;
        double lo = a[idx[0]], hi = lo, mean = 0.0;
        for (auto k : idx) {
          lo = std::min(lo, a[k]);
          hi = std::max(hi, a[k]);
          mean += a[k] - m.mu;
        }
        if (lo == hi) return;
        mean /= nn;
        double ss = 0.0;
        for (auto k : idx) ss += (a[k] - m.mu - mean) * (a[k] - m.mu - mean);
        const double t = scale * mean / std::sqrt(ss / (nn - 1.0));
        if (t >= threshold) ++hits;
      });
      break;
    }

    case EnumStatistic::Kind::quadratic_tilt: {
      if (!is_standardized(pop)) {
        throw NotStandardized("quadratic-tilt statistic needs a standardized population");
      }
      const auto ctx = StatsContext::of(pop);
      std::vector<double> buf(n);
      detail::for_each_subset(pop.size(), n, [&](std::span<const std::size_t> idx) {
        ++total;
        for (std::size_t i = 0; i < n; ++i) buf[i] = a[idx[i]];
        if (quadratic_tilt_statistic(buf, d, stat.x, stat.qt, ctx.mean_y2) >= threshold) ++hits;
      });
      break;
    }
  }
  return make_exact(BigCount(hits), BigCount(total), TailMethod::enumeration);
}

SumDistribution::SumDistribution(const Population& pop, std::size_t n) {
  Design::make(pop.size(), n);
  const auto a = pop.values();
  constexpr double kMaxExact = 4503599627370496.0;  // 2^52
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] != std::round(a[k]) || std::abs(a[k]) > kMaxExact) {
      throw std::invalid_argument("subset-sum recursion needs integer values; unit " +
                                  std::to_string(k + 1) + " is " + std::to_string(a[k]));
    }
  }
  const auto [lo_it, hi_it] = std::minmax_element(a.begin(), a.end());
  const long long lo = static_cast<long long>(*lo_it);
  const long long width = static_cast<long long>(*hi_it) - lo;
  const double cells = static_cast<double>(a.size()) * static_cast<double>(n) *
                       (static_cast<double>(n) * static_cast<double>(width) + 1.0);
  if (cells > 1e9) {
    throw InstanceTooLarge("subset-sum table of " + std::to_string(cells) +
                           " cell updates exceeds the guard of 1e9");
  }

  const std::size_t span = static_cast<std::size_t>(n * width) + 1;
  // table[j][s]: number of j-subsets of the units seen so far with shifted sum s
  std::vector<std::vector<BigCount>> table(n + 1, std::vector<BigCount>(span));
  table[0][0] = 1;
  std::size_t seen = 0;
  for (double v : a) {
    const std::size_t w = static_cast<std::size_t>(static_cast<long long>(v) - lo);
    ++seen;
    for (std::size_t j = std::min(seen, n); j >= 1; --j) {
      const std::size_t reach = (j - 1) * static_cast<std::size_t>(width);
      auto& dst = table[j];
      const auto& src = table[j - 1];
      for (std::size_t s = 0; s <= reach; ++s) {
        if (!src[s].is_zero()) dst[s + w] += src[s];
      }
    }
  }

  // trim to the attained range so min_sum and max_sum are real subset sums
  auto& full = table[n];
  std::size_t first = 0, last = full.size();
  while (full[first].is_zero()) ++first;
  while (full[last - 1].is_zero()) --last;
  offset_ = static_cast<long long>(n) * lo + static_cast<long long>(first);
  counts_.assign(std::make_move_iterator(full.begin() + static_cast<std::ptrdiff_t>(first)),
                 std::make_move_iterator(full.begin() + static_cast<std::ptrdiff_t>(last)));
  upper_.assign(counts_.size() + 1, BigCount(0));
  for (std::size_t s = counts_.size(); s-- > 0;) upper_[s] = upper_[s + 1] + counts_[s];
  total_ = upper_[0];
}

ExactTail SumDistribution::tail(double threshold) const {
  if (std::isnan(threshold)) throw std::invalid_argument("threshold is NaN");
  const double shifted = std::ceil(threshold) - static_cast<double>(offset_);
  std::size_t s = 0;
  if (shifted > static_cast<double>(counts_.size())) {
    s = counts_.size();
  } else if (shifted > 0.0) {
    s = static_cast<std::size_t>(shifted);
  }
  return make_exact(upper_[s], total_, TailMethod::dp);
}

ExactTail exact_tail_dp(const Population& pop, std::size_t n, double threshold) {
  return SumDistribution(pop, n).tail(threshold);
}

}  // namespace fpld
