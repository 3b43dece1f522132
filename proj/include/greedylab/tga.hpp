// Copyright 2026 The greedylab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "greedylab/coeff_vector.hpp"
#include "greedylab/combinatorics.hpp"

namespace greedylab {

struct GreedyOptions {
  /// When set, greedy sets of size m > |supp(x)| range over every choice of
  /// zero coordinates inside {1, ..., dimension}. When unset they are
  /// completed with the smallest positions outside the support.
  std::optional<Index> dimension;
  /// Hard cap on the number of enumerated sets.
  std::size_t cap = 100000;
};

/// min_{n in A} |x_n| >= max_{n not in A} |x_n|.
template <class Scalar>
bool is_greedy_set(const basic_coeff_vector<Scalar>& x, const IndexSet& A) {
  double min_in = std::numeric_limits<double>::infinity();
  for (Index n : A) min_in = std::min(min_in, double(std::abs(x[n])));
  if (A.empty()) return true;
  for (const auto& e : x.entries())
    if (!A.contains(e.index) && double(std::abs(e.value)) > min_in) return false;
  return true;
}

namespace detail {

struct GreedySplit {
  std::vector<Index> forced;  // strictly above the threshold
  std::vector<Index> ties;    // at the threshold, increasing
  std::size_t pick = 0;       // how many ties go into the set
};

/// Splits positions of x around the m-th largest modulus. Requires m <= |supp|.
template <class Scalar>
GreedySplit split_at_threshold(const basic_coeff_vector<Scalar>& x, std::size_t m) {
  GreedySplit g;
  if (m == 0) return g;
  std::vector<double> mod;
  mod.reserve(x.support_size());
  for (const auto& e : x.entries()) mod.push_back(std::abs(e.value));
  std::nth_element(mod.begin(), mod.begin() + (m - 1), mod.end(), std::greater<>());
  const double t = mod[m - 1];
  for (const auto& e : x.entries()) {
    const double a = std::abs(e.value);
    if (a > t)
      g.forced.push_back(e.index);
    else if (a == t)
      g.ties.push_back(e.index);
  }
  g.pick = m - g.forced.size();
  return g;
}

inline std::vector<Index> zero_positions(const IndexSet& support, Index dimension) {
  std::vector<Index> z;
  for (Index n = 1; n <= dimension; ++n)
    if (!support.contains(n)) z.push_back(n);
  return z;
}

inline std::vector<Index> smallest_outside(const IndexSet& support, std::size_t count) {
  std::vector<Index> z;
  for (Index n = 1; z.size() < count; ++n)
    if (!support.contains(n)) z.push_back(n);
  return z;
}

}  // namespace detail

/// G(x, m): every m-set whose smallest coefficient modulus dominates all
/// coefficients outside it, in lexicographic order.
template <class Scalar>
std::vector<IndexSet> greedy_sets(const basic_coeff_vector<Scalar>& x, std::ptrdiff_t m,
                                  const GreedyOptions& opts = {}) {
  if (m < 0) throw domain_error("greedy_sets: m must be nonnegative");
  const auto mm = static_cast<std::size_t>(m);
  const std::size_t s = x.support_size();
  std::vector<IndexSet> out;

  if (mm <= s) {
    const auto g = detail::split_at_threshold(x, mm);
    if (binomial(g.ties.size(), g.pick) > opts.cap)
      throw cap_exceeded("greedy_sets: more than " + std::to_string(opts.cap) + " greedy sets");
    for_each_combination(g.ties.size(), g.pick, [&](auto c) {
      std::vector<Index> v = g.forced;
      for (auto i : c) v.push_back(g.ties[i]);
      out.emplace_back(std::move(v));
      return true;
    });
  } else {
    const IndexSet support = x.support();
    if (!opts.dimension) {
      out.push_back(support.unite(IndexSet(detail::smallest_outside(support, mm - s))));
      return out;
    }
    const Index dim = *opts.dimension;
    if (x.max_index() > dim) throw domain_error("greedy_sets: support exceeds dimension");
    if (mm > dim) throw domain_error("greedy_sets: m exceeds dimension");
    const auto zeros = detail::zero_positions(support, dim);
    if (binomial(zeros.size(), mm - s) > opts.cap)
      throw cap_exceeded("greedy_sets: more than " + std::to_string(opts.cap) + " greedy sets");
    for_each_combination(zeros.size(), mm - s, [&](auto c) {
      std::vector<Index> v = support.items();
      for (auto i : c) v.push_back(zeros[i]);
      out.emplace_back(std::move(v));
      return true;
    });
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Lambda_m(x): the greedy set B with B \ A < A \ B for every other A in
/// G(x, m), i.e. ties at the threshold resolved towards the smallest positions.
template <class Scalar>
IndexSet canonical_greedy_set(const basic_coeff_vector<Scalar>& x, std::ptrdiff_t m) {
  if (m < 0) throw domain_error("canonical_greedy_set: m must be nonnegative");
  const auto mm = static_cast<std::size_t>(m);
  const std::size_t s = x.support_size();
  if (mm > s) {
    const IndexSet support = x.support();
    return support.unite(IndexSet(detail::smallest_outside(support, mm - s)));
  }
  auto g = detail::split_at_threshold(x, mm);
  std::vector<Index> v = std::move(g.forced);
  v.insert(v.end(), g.ties.begin(), g.ties.begin() + static_cast<std::ptrdiff_t>(g.pick));
  return IndexSet(std::move(v));
}

/// P_A(x)
template <class Scalar>
basic_coeff_vector<Scalar> project(const basic_coeff_vector<Scalar>& x, const IndexSet& A) {
  basic_coeff_vector<Scalar> r;
  for (const auto& e : x.entries())
    if (A.contains(e.index)) r.push_back(e.index, e.value);
  return r;
}

/// P_{A^c}(x) = x - P_A(x)
template <class Scalar>
basic_coeff_vector<Scalar> project_complement(const basic_coeff_vector<Scalar>& x,
                                              const IndexSet& A) {
  basic_coeff_vector<Scalar> r;
  for (const auto& e : x.entries())
    if (!A.contains(e.index)) r.push_back(e.index, e.value);
  return r;
}

/// G_m(x) = P_A(x) for a greedy set A.
template <class Scalar>
basic_coeff_vector<Scalar> greedy_sum(const basic_coeff_vector<Scalar>& x, const IndexSet& A) {
  if (!is_greedy_set(x, A)) throw contract_violation("greedy_sum: set is not a greedy set of x");
  return project(x, A);
}

/// S_m(x): projection onto {1, ..., m}.
template <class Scalar>
basic_coeff_vector<Scalar> partial_sum(const basic_coeff_vector<Scalar>& x, std::ptrdiff_t m) {
  if (m < 0) throw domain_error("partial_sum: m must be nonnegative");
  basic_coeff_vector<Scalar> r;
  for (const auto& e : x.entries()) {
    if (e.index > static_cast<Index>(m)) break;
    r.push_back(e.index, e.value);
  }
  return r;
}

/// 1_A
inline CoeffVector indicator(const IndexSet& A) {
  CoeffVector r;
  for (Index n : A) r.push_back(n, 1.0);
  return r;
}

/// 1_{eps A}
template <class Scalar>
basic_coeff_vector<Scalar> indicator(const IndexSet& A, const basic_sign_pattern<Scalar>& eps) {
  basic_coeff_vector<Scalar> r;
  for (Index n : A) {
    if (!eps.contains(n)) throw domain_error("indicator: sign missing for position " + std::to_string(n));
    r.push_back(n, eps.at(n));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Reorderings. A permutation is stored as the list (pi(1), ..., pi(W)) of a
// bijection of {1, ..., W}; the reordered basis is (e_{pi(n)})_n.

inline bool is_permutation_list(const std::vector<Index>& pi) {
  std::vector<char> seen(pi.size() + 1, 0);
  for (Index v : pi) {
    if (v == 0 || v > pi.size() || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

/// Coordinates of x in the reordered basis: x'_n = x_{pi(n)}. Positions past
/// the window are unchanged.
template <class Scalar>
basic_coeff_vector<Scalar> reorder_coordinates(const basic_coeff_vector<Scalar>& x,
                                               const std::vector<Index>& pi) {
  std::vector<typename basic_coeff_vector<Scalar>::entry> out;
  std::vector<Index> inverse(pi.size() + 1, 0);
  for (std::size_t n = 0; n < pi.size(); ++n) inverse[pi[n]] = n + 1;
  for (const auto& e : x.entries())
    out.push_back({e.index <= pi.size() ? inverse[e.index] : e.index, e.value});
  return basic_coeff_vector<Scalar>::from_entries(std::move(out));
}

/// pi^{-1}(B): the positions, in the reordered basis, of the vectors e_b, b in B.
inline IndexSet reordered_positions(const IndexSet& B, const std::vector<Index>& pi) {
  std::vector<Index> inverse(pi.size() + 1, 0);
  for (std::size_t n = 0; n < pi.size(); ++n) inverse[pi[n]] = n + 1;
  std::vector<Index> v;
  for (Index b : B) v.push_back(b <= pi.size() ? inverse[b] : b);
  return IndexSet(std::move(v));
}

/// pi({1, ..., count}): the original positions spanned by the first `count`
/// reordered basis vectors.
inline IndexSet reordered_prefix(const std::vector<Index>& pi, std::size_t count) {
  std::vector<Index> v;
  for (std::size_t n = 1; n <= count; ++n) v.push_back(n <= pi.size() ? pi[n - 1] : n);
  return IndexSet(std::move(v));
}

}  // namespace greedylab
