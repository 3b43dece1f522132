// Copyright 2026 The greedylab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace greedylab {

/// C(n, k), saturating at SIZE_MAX.
inline std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::size_t num = n - k + i;
    // r * num / i is exact at every step; guard the multiplication.
    if (r > std::numeric_limits<std::size_t>::max() / num)
      return std::numeric_limits<std::size_t>::max();
    r = r * num / i;
  }
  return r;
}

/// Calls fn(span of k increasing offsets in [0, n)) for every k-combination in
/// lexicographic order. fn returns false to stop early. Returns false if
/// stopped.
template <class Fn>
bool for_each_combination(std::size_t n, std::size_t k, Fn&& fn) {
  if (k > n) return true;
  std::vector<std::size_t> c(k);
  std::iota(c.begin(), c.end(), std::size_t{0});
  while (true) {
    if (!fn(std::span<const std::size_t>(c))) return false;
    std::size_t i = k;
    while (i > 0 && c[i - 1] == n - k + i - 1) --i;
    if (i == 0) return true;
    ++c[i - 1];
    for (std::size_t j = i; j < k; ++j) c[j] = c[j - 1] + 1;
  }
}

/// Calls fn(digits) for every tuple in {0..radix-1}^length, last digit fastest.
template <class Fn>
bool for_each_tuple(std::size_t radix, std::size_t length, Fn&& fn) {
  std::vector<std::size_t> d(length, 0);
  if (radix == 0 && length > 0) return true;
  while (true) {
    if (!fn(std::span<const std::size_t>(d))) return false;
    std::size_t i = length;
    while (i > 0 && d[i - 1] + 1 == radix) d[--i] = 0;
    if (i == 0) return true;
    ++d[i - 1];
  }
}

}  // namespace greedylab
