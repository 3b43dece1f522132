// Copyright 2026 The greedylab Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "greedylab/sampling.hpp"
#include "greedylab/tga.hpp"
#include "oracles.hpp"

using namespace greedylab;

namespace {

IndexSet from_mask(std::uint32_t mask) {
  std::vector<Index> v;
  for (Index i = 0; i < 32; ++i)
    if ((mask >> i) & 1u) v.push_back(i + 1);
  return IndexSet(v);
}

}  // namespace

TEST(GreedySets, Examples) {
  EXPECT_EQ(greedy_sets(CoeffVector{2, -2, 1}, 1), (std::vector<IndexSet>{{1}, {2}}));
  EXPECT_EQ(greedy_sets(CoeffVector{3, 1, 2}, 2), (std::vector<IndexSet>{{1, 3}}));
  EXPECT_EQ(greedy_sets(CoeffVector{1, 1, 1}, 2),
            (std::vector<IndexSet>{{1, 2}, {1, 3}, {2, 3}}));
  EXPECT_THROW(greedy_sets(CoeffVector{1}, -1), domain_error);
}

TEST(GreedySets, MatchesAllSubsetsFilter) {
  // Grid draws give many ties; dimension 10 covers supports up to 10.
  const auto fam = SampleFamily::random(10, 300, 8, {-2, -1, 1, 2});
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const auto x = fam.at(i);
    const auto d = x.dense(10);
    for (std::size_t m = 0; m <= 10; ++m) {
      std::vector<IndexSet> expect;
      for (auto mask : oracle::greedy_masks(d, m)) expect.push_back(from_mask(mask));
      std::sort(expect.begin(), expect.end());
      const auto got = greedy_sets(x, std::ptrdiff_t(m), GreedyOptions{10, 1000000});
      EXPECT_EQ(got, expect) << "sample " << i << " m " << m;
      for (const auto& A : got) EXPECT_TRUE(is_greedy_set(x, A));
    }
  }
}

TEST(GreedySets, CompletionWithoutDimensionUsesSmallestZeros) {
  EXPECT_EQ(greedy_sets(CoeffVector{0, 3, 0, 1}, 3), (std::vector<IndexSet>{{1, 2, 4}}));
}

TEST(GreedySets, CapIsEnforced) {
  CoeffVector x;
  for (Index n = 1; n <= 30; ++n) x.push_back(n, 1.0);
  EXPECT_THROW(greedy_sets(x, 15), cap_exceeded);
}

TEST(CanonicalGreedySet, Examples) {
  EXPECT_EQ(canonical_greedy_set(CoeffVector{1, 1, 1}, 2), (IndexSet{1, 2}));
  EXPECT_EQ(canonical_greedy_set(CoeffVector{2, -2, 1}, 1), (IndexSet{1}));
  EXPECT_EQ(canonical_greedy_set(CoeffVector{0, 5}, 1), (IndexSet{2}));
}

TEST(CanonicalGreedySet, BelongsAndPrecedesOthers) {
  const auto fam = SampleFamily::random(9, 300, 12, {-1, 1, 2});
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const auto x = fam.at(i);
    for (std::ptrdiff_t m = 0; m <= std::ptrdiff_t(x.support_size()); ++m) {
      const auto L = canonical_greedy_set(x, m);
      const auto all = greedy_sets(x, m);
      ASSERT_NE(std::find(all.begin(), all.end(), L), all.end());
      for (const auto& A : all)
        if (A != L) EXPECT_TRUE(L.minus(A).precedes(A.minus(L)));
    }
  }
}

TEST(GreedySets, PermutationStable) {
  std::mt19937_64 gen(3);
  const auto fam = SampleFamily::random(8, 200, 13, {-2, -1, 1, 2});
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const auto x = fam.at(i);
    std::vector<Index> pi(8);
    std::iota(pi.begin(), pi.end(), Index{1});
    std::shuffle(pi.begin(), pi.end(), gen);
    // (x o pi^{-1})_{pi(n)} = x_n
    CoeffVector y;
    for (const auto& e : x.entries()) y.set(pi[e.index - 1], e.value);
    for (std::ptrdiff_t m = 0; m <= 8; ++m) {
      std::vector<IndexSet> mapped;
      for (const auto& A : greedy_sets(x, m, GreedyOptions{8, 100000})) {
        std::vector<Index> v;
        for (Index n : A) v.push_back(pi[n - 1]);
        mapped.emplace_back(v);
      }
      std::sort(mapped.begin(), mapped.end());
      EXPECT_EQ(mapped, greedy_sets(y, m, GreedyOptions{8, 100000}));
    }
  }
}

TEST(Projections, Examples) {
  EXPECT_EQ(project(CoeffVector{1, 2, 3}, IndexSet{2}), (CoeffVector{0, 2, 0}));
  EXPECT_TRUE(project(CoeffVector{1, 2, 3}, IndexSet{}).is_zero());
  EXPECT_EQ(project(CoeffVector{1, 2, 3}, IndexSet{1, 2, 3, 7}), (CoeffVector{1, 2, 3}));
  EXPECT_EQ(greedy_sum(CoeffVector{3, 1, 2}, IndexSet{1, 3}), (CoeffVector{3, 0, 2}));
  EXPECT_EQ(greedy_sum(CoeffVector{1, 1}, IndexSet{2}), (CoeffVector{0, 1}));
  EXPECT_THROW(greedy_sum(CoeffVector{3, 1, 2}, IndexSet{2}), contract_violation);
  EXPECT_EQ(partial_sum(CoeffVector{1, 2, 3}, 2), (CoeffVector{1, 2, 0}));
  EXPECT_TRUE(partial_sum(CoeffVector{1, 2, 3}, 0).is_zero());
  EXPECT_EQ(partial_sum(CoeffVector{1, 2, 3}, 9), (CoeffVector{1, 2, 3}));
}

TEST(Projections, SplitIsExact) {
  const auto fam = SampleFamily::random(12, 200, 14);
  std::mt19937_64 gen(1);
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const auto x = fam.at(i);
    std::vector<Index> v;
    for (Index n = 1; n <= 12; ++n)
      if (gen() & 1u) v.push_back(n);
    const IndexSet A(v);
    EXPECT_EQ(project(x, A) + project_complement(x, A), x);
  }
}

TEST(Indicator, Examples) {
  EXPECT_EQ(indicator(IndexSet{1, 3}), (CoeffVector{1, 0, 1}));
  EXPECT_EQ(indicator(IndexSet{1, 2}, SignPattern(IndexSet{1, 2}, {1.0, -1.0})),
            (CoeffVector{1, -1}));
  EXPECT_TRUE(indicator(IndexSet{}).is_zero());
  EXPECT_THROW(indicator(IndexSet{1, 2}, SignPattern(IndexSet{1}, {1.0})), domain_error);
}

TEST(IndexSet, Relations) {
  EXPECT_TRUE((IndexSet{1, 2}).precedes(IndexSet{3}));
  EXPECT_FALSE((IndexSet{1, 4}).precedes(IndexSet{3}));
  EXPECT_TRUE(IndexSet{}.precedes(IndexSet{1}));
  EXPECT_TRUE((IndexSet{3, 4, 5}).is_interval());
  EXPECT_FALSE((IndexSet{3, 5}).is_interval());
  EXPECT_TRUE((IndexSet{1, 2}).disjoint(IndexSet{3}));
  EXPECT_THROW(IndexSet({0, 1}), domain_error);
}

TEST(Reordering, PositionsAndPrefix) {
  const std::vector<Index> pi{3, 1, 2};
  EXPECT_TRUE(is_permutation_list(pi));
  EXPECT_FALSE(is_permutation_list({1, 1, 2}));
  const CoeffVector x{10, 20, 30};
  const auto y = reorder_coordinates(x, pi);
  // Greedy sets follow the positions.
  for (std::ptrdiff_t m = 0; m <= 3; ++m) {
    const auto L = canonical_greedy_set(x, m);
    EXPECT_TRUE(is_greedy_set(y, reordered_positions(L, pi)));
  }
}
