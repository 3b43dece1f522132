// Copyright 2026 The greedylab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <exception>
#include <random>
#include <thread>
#include <vector>

#include "greedylab/coeff_vector.hpp"

namespace greedylab {

/// Seeded family of sample vectors in dimension N. Sample i depends only on
/// (spec, i), so any partition of the index range reproduces the same vectors.
struct SampleFamily {
  enum class Mode { exhaustive, random };

  Mode mode = Mode::random;
  Index dimension = 0;
  /// Exhaustive mode: coefficient values per coordinate. Random mode: if
  /// nonempty, coefficients are drawn from it instead of uniform(-2, 2).
  std::vector<double> grid;
  /// Random mode only.
  std::size_t count = 0;
  std::uint64_t seed = 0;
  double zero_probability = 0.25;
  /// Prepend e_1 and e_1 + e_2 (random mode; exhaustive grids contain them
  /// whenever 0 and 1 are grid values).
  bool include_anchors = true;

  static SampleFamily exhaustive(Index dim, std::vector<double> values) {
    SampleFamily f;
    f.mode = Mode::exhaustive;
    f.dimension = dim;
    f.grid = std::move(values);
    return f;
  }

  static SampleFamily random(Index dim, std::size_t count, std::uint64_t seed,
                             std::vector<double> values = {}) {
    SampleFamily f;
    f.mode = Mode::random;
    f.dimension = dim;
    f.count = count;
    f.seed = seed;
    f.grid = std::move(values);
    return f;
  }

  /// {+-2, +-1, +-1/2, 0}
  static std::vector<double> small_grid() { return {-2, -1, -0.5, 0, 0.5, 1, 2}; }
  /// {+-2, +-1, +-1/2, +-1/4, 0}
  static std::vector<double> certification_grid() {
    return {-2, -1, -0.5, -0.25, 0, 0.25, 0.5, 1, 2};
  }

  [[nodiscard]] std::size_t anchors() const {
    return mode == Mode::random && include_anchors ? std::min<std::size_t>(2, dimension) : 0;
  }

  /// Number of samples; saturates at SIZE_MAX for huge exhaustive grids.
  [[nodiscard]] std::size_t size() const {
    if (mode == Mode::random) return anchors() + count;
    std::size_t n = 1;
    for (Index i = 0; i < dimension; ++i) {
      if (n > SIZE_MAX / std::max<std::size_t>(grid.size(), 1)) return SIZE_MAX;
      n *= grid.size();
    }
    return n;
  }

  [[nodiscard]] CoeffVector at(std::size_t i) const {
    std::vector<double> dense(dimension, 0.0);
    if (mode == Mode::exhaustive) {
      // Mixed-radix digits, last coordinate fastest.
      for (Index k = dimension; k > 0; --k) {
        dense[k - 1] = grid[i % grid.size()];
        i /= grid.size();
      }
      return CoeffVector::from_dense(dense);
    }
    if (i < anchors()) {
      for (std::size_t k = 0; k <= i; ++k) dense[k] = 1.0;
      return CoeffVector::from_dense(dense);
    }
    const std::uint64_t j = i - anchors();
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(j),
                      std::uint32_t(j >> 32)};
    std::mt19937_64 gen(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    for (auto& v : dense) {
      if (unit(gen) < zero_probability) continue;
      v = grid.empty() ? coeff(gen) : grid[std::uniform_int_distribution<std::size_t>(0, grid.size() - 1)(gen)];
    }
    return CoeffVector::from_dense(dense);
  }
};

/// Deterministic per-sample generator for auxiliary draws (sets, intervals).
inline std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index, std::uint32_t stream) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(index),
                    std::uint32_t(index >> 32), stream};
  return std::mt19937_64(seq);
}

/// Runs body(i, acc) for i in [0, count) on `workers` threads, each over a
/// contiguous block with its own accumulator, then folds the accumulators in
/// block order with merge(into, from). With an associative merge that keeps
/// the earlier datum on ties, the result does not depend on `workers`.
template <class Acc, class Body, class Merge>
Acc parallel_reduce(std::size_t count, unsigned workers, Acc init, Body&& body, Merge&& merge) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i, init);
    return init;
  }
  std::vector<Acc> partial(workers, init);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) body(i, partial[w]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  Acc out = std::move(partial[0]);
  for (unsigned w = 1; w < workers; ++w) merge(out, partial[w]);
  return out;
}

}  // namespace greedylab
