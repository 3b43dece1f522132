// Copyright 2026 The greedylab Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "greedylab/constants.hpp"
#include "greedylab/constructions.hpp"
#include "oracles.hpp"

using namespace greedylab;

namespace {

constexpr double kTol = 1e-9;

SampleFamily small_exhaustive(Index dim) {
  return SampleFamily::exhaustive(dim, SampleFamily::small_grid());
}

}  // namespace

TEST(QuasiGreedy, LpIsOne) {
  for (double p : {1.0, 2.0}) {
    auto [cq, cl] = estimate_quasi_greedy(NormOracle::lp(p), small_exhaustive(5));
    EXPECT_NEAR(cq.value, 1.0, kTol);
    EXPECT_NEAR(cl.value, 1.0, kTol);
    EXPECT_TRUE(cq.exhaustive);
    EXPECT_EQ(cq.quantity, "C_q");
    EXPECT_EQ(cl.quantity, "C_l");
    EXPECT_EQ(cq.capped, 0u);
  }
}

TEST(QuasiGreedy, MixedModelAtLeastOneWithWitness) {
  const auto inst = build_mixed_instance(1, 2, 16);
  auto [cq, cl] = estimate_quasi_greedy(inst.norm, SampleFamily::random(16, 100, 3));
  EXPECT_GE(cq.value, 1.0 - kTol);
  EXPECT_GE(cl.value, 1.0 - kTol);
  EXPECT_TRUE(cq.witness.contains("x"));
  EXPECT_FALSE(cq.exhaustive);
}

TEST(QuasiGreedy, WitnessReproducesValue) {
  const auto norm = NormOracle::summing();
  auto [cq, cl] = estimate_quasi_greedy(norm, SampleFamily::random(8, 200, 4));
  for (const auto* e : {&cq, &cl}) {
    const auto x = vector_from_json(e->witness.at("x"));
    const auto A = set_from_json(e->witness.at("A"));
    const double num = e == &cq ? norm(project(x, A)) : norm(project_complement(x, A));
    EXPECT_NEAR(num / norm(x), e->value, kTol);
  }
  EXPECT_GT(cq.value, 1.0);  // partial sums are not monotone under projections
}

TEST(Democracy, LpPlainIsOne) {
  for (double p : {1.0, 2.0, 0.5}) {
    auto e = estimate_democracy(NormOracle::lp(p), 6, DemocracyFlavor::plain);
    EXPECT_NEAR(e.value, 1.0, kTol) << p;
  }
}

TEST(Democracy, MatchesOracleForAllFlavors) {
  const std::size_t W = 6, maxCard = 3;
  const auto sp = std::vector<std::size_t>{2, 5};
  struct Case {
    NormOracle norm;
    oracle::Norm dense;
  };
  const std::vector<Case> cases{
      {NormOracle::summing(), [](const oracle::Dense& d) { return oracle::summing(d); }},
      {NormOracle::mixed(1, 2, {2, 5}), [sp](const oracle::Dense& d) { return oracle::mixed(d, 1, 2, sp); }},
      {NormOracle::interval_summing(2), [](const oracle::Dense& d) { return oracle::interval_summing(d, 2); }},
  };
  auto any = [](std::uint32_t, std::uint32_t) { return true; };
  auto disjoint = [](std::uint32_t a, std::uint32_t b) { return (a & b) == 0; };
  auto before = [](std::uint32_t a, std::uint32_t b) {
    return (a & b) == 0 && (31 - __builtin_clz(a)) < __builtin_ctz(b);
  };
  for (const auto& c : cases) {
    DemocracyOptions o;
    o.window = W;
    EXPECT_NEAR(estimate_democracy(c.norm, maxCard, DemocracyFlavor::plain, o).value,
                oracle::democracy(c.dense, W, maxCard, false, any), kTol);
    EXPECT_NEAR(estimate_democracy(c.norm, maxCard, DemocracyFlavor::super, o).value,
                oracle::democracy(c.dense, W, maxCard, true, any), kTol);
    EXPECT_NEAR(estimate_democracy(c.norm, maxCard, DemocracyFlavor::disjoint, o).value,
                oracle::democracy(c.dense, W, maxCard, false, disjoint), kTol);
    EXPECT_NEAR(estimate_democracy(c.norm, maxCard, DemocracyFlavor::disjoint_super, o).value,
                oracle::democracy(c.dense, W, maxCard, true, disjoint), kTol);
    EXPECT_NEAR(estimate_democracy(c.norm, maxCard, DemocracyFlavor::conservative, o).value,
                oracle::democracy(c.dense, W, maxCard, false, before), kTol);
  }
}

TEST(Democracy, MixedSpineAgainstOffSpine) {
  const auto inst = build_mixed_instance(1, 2, 64);
  const IndexSet A(inst.spine);
  const IndexSet B{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(democracy_ratio(inst.norm, A, SignPattern::ones(A), B, SignPattern::ones(B)), 2.0);
  const IndexSet s{7};
  EXPECT_DOUBLE_EQ(democracy_ratio(inst.norm, s, SignPattern::ones(s), s, SignPattern::ones(s)), 1.0);
}

TEST(Democracy, WindowTooSmallForDisjointness) {
  DemocracyOptions o;
  o.window = 5;
  EXPECT_THROW(estimate_democracy(NormOracle::lp(1), 3, DemocracyFlavor::disjoint_super, o), domain_error);
  EXPECT_THROW(estimate_democracy(NormOracle::lp(1), 0, DemocracyFlavor::plain), domain_error);
}

TEST(Democracy, ComplexSignsAreDiscretized) {
  DemocracyOptions o;
  o.field = Field::complex;
  auto e = estimate_democracy(NormOracle::lp(2), 2, DemocracyFlavor::super, o);
  EXPECT_NEAR(e.value, 1.0, kTol);
  EXPECT_FALSE(e.note.empty());
}

TEST(PartialDemocracy, MixedInstanceFails) {
  const auto inst = build_mixed_instance(1, 2, 64);
  auto r = partial_democracy_witness(inst.norm, 4, 64);
  ASSERT_TRUE(r);
  EXPECT_FALSE(r->inconclusive);
  EXPECT_EQ(r->A, (IndexSet{5, 11, 23, 47}));
  EXPECT_GE(r->min_ratio, 2.0 - kTol);
  // One row for every exclusion set {1..d}, d = 47..60.
  EXPECT_EQ(r->rows.size(), 14u);
  for (const auto& row : r->rows) {
    EXPECT_GT(row.B.front(), row.excluded_through);
    EXPECT_EQ(row.B.size(), 4u);
    EXPECT_NEAR(row.ratio, 2.0, kTol);
  }
}

TEST(PartialDemocracy, LpHasNoWitness) {
  for (std::size_t n : {1u, 2u, 3u}) EXPECT_FALSE(partial_democracy_witness(NormOracle::lp(1), n, 12));
}

TEST(PartialDemocracy, Errors) {
  EXPECT_THROW(partial_democracy_witness(NormOracle::lp(1), 0, 12), domain_error);
  auto r = partial_democracy_witness(NormOracle::lp(1), 4, 6);
  ASSERT_TRUE(r);
  EXPECT_TRUE(r->inconclusive);
}

TEST(Unconditionality, LpAndMixedAreOne) {
  for (double p : {1.0, 2.0, 0.5}) {
    auto k = estimate_unconditionality(NormOracle::lp(p), SampleFamily::random(8, 40, 1));
    EXPECT_NEAR(k.value, 1.0, kTol) << p;
    EXPECT_EQ(k.quantity, "K");
  }
  const auto inst = build_mixed_instance(1, 2, 24);
  auto k = estimate_unconditionality(inst.norm, SampleFamily::random(12, 40, 1));
  EXPECT_NEAR(k.value, 1.0, kTol);
}

TEST(Unconditionality, IntervalSummingExceedsOne) {
  auto k = estimate_unconditionality(NormOracle::interval_summing(), SampleFamily::random(16, 6, 2));
  EXPECT_GT(k.value, 1.0);
  ASSERT_TRUE(k.witness.contains("b"));
  // ||a|| / ||b|| with |a_n| <= |b_n| reproduces the value.
  const auto a = vector_from_json(k.witness.at("a"));
  const auto b = vector_from_json(k.witness.at("b"));
  const auto norm = NormOracle::interval_summing();
  EXPECT_NEAR(norm(a) / norm(b), k.value, kTol);
  for (const auto& e : a.entries()) EXPECT_LE(std::abs(e.value), std::abs(b[e.index]));
}

TEST(RatioConstants, L1ExhaustiveIsOne) {
  const auto l1 = NormOracle::lp(1);
  const Benchmark b[] = {Benchmark::tilde, Benchmark::check, Benchmark::tail,
                         Benchmark::prefix_tail, Benchmark::hathat};
  auto v = estimate_greedy_constants(l1, small_exhaustive(4), b, false);
  ASSERT_EQ(v.size(), 5u);
  for (const auto& e : v) {
    EXPECT_NEAR(e.value, 1.0, kTol) << e.quantity;
    EXPECT_TRUE(e.exhaustive);
  }
  EXPECT_EQ(v[0].quantity, "C_a");
  EXPECT_EQ(v[1].quantity, "C_ca");
}

TEST(RatioConstants, PermutationInvariantCheckEqualsTilde) {
  for (double p : {1.0, 2.0, 0.5}) {
    const auto norm = NormOracle::lp(p);
    auto t = estimate_ratio_constant(norm, small_exhaustive(4), Benchmark::tilde);
    auto c = estimate_ratio_constant(norm, small_exhaustive(4), Benchmark::check);
    EXPECT_NEAR(t.value, c.value, kTol) << p;
  }
}

TEST(RatioConstants, QuasiGreedyAndDemocraticGivesOne) {
  const auto norm = NormOracle::lp(2);
  auto [cq, cl] = estimate_quasi_greedy(norm, small_exhaustive(4));
  auto d = estimate_democracy(norm, 4, DemocracyFlavor::plain);
  ASSERT_NEAR(cq.value, 1.0, kTol);
  ASSERT_NEAR(d.value, 1.0, kTol);
  EXPECT_NEAR(estimate_ratio_constant(norm, small_exhaustive(4), Benchmark::tilde).value, 1.0, kTol);
}

TEST(RatioConstants, PerSampleOrdering) {
  // For a fixed (x, m, A) the ratio against sigma~ dominates the one against
  // sigma^, which dominates the one against the tail.
  for (const auto& norm : {NormOracle::summing(), NormOracle::mixed(1, 2, {5}), NormOracle::lp(0.5)}) {
    const auto fam = SampleFamily::random(7, 120, 9);
    for (std::size_t i = 0; i < fam.size(); ++i) {
      const auto x = fam.at(i);
      for (std::ptrdiff_t m = 1; m <= 7; ++m)
        for (const auto& A : greedy_sets(x, m)) {
          const double r = norm(project_complement(x, A));
          const double t = sigma_tilde(x, m, norm).value;
          const double c = sigma_check(x, m, norm).value;
          const double s = tail_norm(x, m, norm);
          if (s < zero_threshold) continue;
          if (t >= zero_threshold) EXPECT_GE(r / t, r / c - kTol);
          if (c >= zero_threshold) EXPECT_GE(r / c, r / s - kTol);
        }
    }
  }
}

TEST(RatioConstants, AnchorsForceAtLeastOne) {
  const Benchmark b[] = {Benchmark::tilde, Benchmark::check, Benchmark::tail, Benchmark::prefix_tail,
                         Benchmark::hathat, Benchmark::min_tilde, Benchmark::min_check};
  for (const auto& norm : {NormOracle::summing(), NormOracle::interval_summing(),
                           NormOracle::mixed(1, 2, {5}), NormOracle::lp(0.5)}) {
    auto v = estimate_greedy_constants(norm, SampleFamily::random(6, 30, 2), b, true);
    for (const auto& e : v) EXPECT_GE(e.value, 1.0 - kTol) << e.quantity;
  }
}

TEST(RatioConstants, ZeroBenchmarkConventions) {
  // x = e_1: at m = 1 the residual and every benchmark vanish; 0/0 is skipped.
  const auto fam = SampleFamily::exhaustive(1, {0.0, 1.0});
  auto v = estimate_ratio_constant(NormOracle::lp(1), fam, Benchmark::tail);
  EXPECT_GT(v.skipped, 0u);
  // A finite residual over a zero benchmark is reported as infinite: with a
  // seminorm blind to e_2, x = (1, 1), m = 1, A = {2} leaves e_1 while the
  // tail is a multiple of e_2.
  auto blind = NormOracle::custom("blind", 1.0, [](const CoeffVector& x) {
    return x.min_index() >= 2 ? 0.0 : norm_lp(x, 1);
  });
  auto w = estimate_ratio_constant(blind, SampleFamily::exhaustive(2, {0.0, 1.0}), Benchmark::tail);
  EXPECT_TRUE(std::isinf(w.value));
}

TEST(RatioConstants, DeterministicAcrossWorkers) {
  const Benchmark b[] = {Benchmark::tilde, Benchmark::check};
  const auto fam = SampleFamily::random(7, 300, 5);
  EstimateOptions o1, o3;
  o3.workers = 3;
  auto a = estimate_greedy_constants(NormOracle::summing(), fam, b, true, o1);
  auto c = estimate_greedy_constants(NormOracle::summing(), fam, b, true, o3);
  ASSERT_EQ(a.size(), c.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].value, c[i].value);
    EXPECT_EQ(a[i].witness.dump(), c[i].witness.dump());
    EXPECT_EQ(a[i].data, c[i].data);
  }
}

TEST(OneDimConstants, BoundFormula) {
  EXPECT_DOUBLE_EQ(prop_1dim_constant(1, 1, 1, 1, 1), 3.0);
  EXPECT_NEAR(prop_1dim_constant(1, 1, 1, 1, 0.5), std::pow(1 + std::sqrt(2.0), 2.0), 1e-12);
}

TEST(OneDimConstants, L1SignAndIntervalLines) {
  const auto l1 = NormOracle::lp(1);
  auto s = estimate_sign_line_constant(l1, small_exhaustive(4));
  auto i = estimate_interval_line_constant(l1, small_exhaustive(4));
  EXPECT_EQ(s.quantity, "C_sign_line");
  EXPECT_EQ(i.quantity, "C_interval_line");
  EXPECT_GE(s.value, 1.0 - kTol);
  EXPECT_LE(s.value, 3.0 + kTol);
  EXPECT_GE(i.value, 1.0 - kTol);
  EXPECT_LE(i.value, 3.0 + kTol);
}
