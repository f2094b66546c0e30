#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fpld/error.hpp"

namespace fpld::detail {

/// log C(N, n).
inline double log_binomial(std::size_t N, std::size_t n) {
  return std::lgamma(static_cast<double>(N) + 1.0) - std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(N - n) + 1.0);
}

/// Exact C(N, n) as an unsigned 64-bit count; only valid below the guard.
inline std::size_t binomial_count(std::size_t N, std::size_t n) {
  std::size_t r = 1;
  for (std::size_t k = 1; k <= n; ++k) r = r * (N - n + k) / k;
  return r;
}

inline void guard_enumeration(std::size_t N, std::size_t n, double limit = 1e7) {
  if (n > N) throw std::invalid_argument("subset size exceeds population size");
  if (log_binomial(N, n) > std::log(limit) + 1e-9) {
    throw InstanceTooLarge("C(" + std::to_string(N) + ", " + std::to_string(n) +
                           ") exceeds the enumeration guard of " + std::to_string(static_cast<long long>(limit)));
  }
}

/// Calls fn(indices) for every n-subset of {0, ..., N-1} in lexicographic order.
template <class Fn>
void for_each_subset(std::size_t N, std::size_t n, Fn&& fn) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  while (true) {
    fn(std::span<const std::size_t>(idx));
    // advance to the next combination
    std::size_t i = n;
    while (i > 0 && idx[i - 1] == N - n + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// Calls fn(sum) with sum_{k in S} values[k] for every n-subset S (depth-first).
template <class Fn>
void for_each_subset_sum(std::span<const double> values, std::size_t n, Fn&& fn) {
  const std::size_t N = values.size();
  auto rec = [&](auto&& self, std::size_t start, std::size_t left, double partial) -> void {
    if (left == 0) {
      fn(partial);
      return;
    }
    for (std::size_t k = start; k + left <= N; ++k) self(self, k + 1, left - 1, partial + values[k]);
  };
  rec(rec, 0, n, 0.0);
}

}  // namespace fpld::detail
