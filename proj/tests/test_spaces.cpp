// Copyright 2026 The greedylab Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "greedylab/coeff_vector.hpp"
#include "greedylab/sampling.hpp"
#include "greedylab/spaces.hpp"
#include "oracles.hpp"

using namespace greedylab;

namespace {

std::vector<NormOracle> all_models() {
  return {NormOracle::lp(1), NormOracle::lp(2), NormOracle::lp(0.5), NormOracle::lp(INFINITY),
          NormOracle::mixed(1, 2, spine_sequence(1, 2, 2)), NormOracle::interval_summing(2),
          NormOracle::interval_summing(), NormOracle::summing(),
          NormOracle::weighted(1, {1, 2, 3})};
}

}  // namespace

TEST(SpaceConstants, ClosedForms) {
  auto r = space_constants(1.0);
  EXPECT_DOUBLE_EQ(r.A_p, 1.0);
  EXPECT_DOUBLE_EQ(r.B_p, 2.0);
  auto c = space_constants(1.0, Field::complex);
  EXPECT_DOUBLE_EQ(c.A_p, 1.0);
  EXPECT_DOUBLE_EQ(c.B_p, 4.0);
  EXPECT_NEAR(space_constants(0.5).A_p, std::pow(std::sqrt(2.0) - 1.0, -2.0), 1e-12);
  EXPECT_NEAR(space_constants(0.5).A_p, 5.8284, 1e-4);
  EXPECT_THROW(space_constants(0.0), domain_error);
  EXPECT_THROW(space_constants(1.5), domain_error);
}

TEST(NormLp, Examples) {
  EXPECT_DOUBLE_EQ(norm_lp(CoeffVector{3, 2, 1}, 1), 6.0);
  EXPECT_DOUBLE_EQ(norm_lp(CoeffVector{3, 4}, 2), 5.0);
  EXPECT_EQ(norm_lp(CoeffVector{}, 0.3), 0.0);
  EXPECT_THROW(norm_lp(CoeffVector{1}, 0.0), domain_error);
  EXPECT_THROW(norm_lp(CoeffVector{1}, -1.0), domain_error);
}

TEST(NormLp, CompensatedSumIsExact) {
  CoeffVector x;
  for (Index n = 1; n <= 9; ++n) x.push_back(n, 1.0 / 9.0);
  EXPECT_EQ(norm_lp(x, 1), 1.0);
}

TEST(NormLp, MatchesOracleOnRandomVectors) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int t = 0; t < 200; ++t) {
    oracle::Dense d(7);
    for (auto& v : d) v = u(gen);
    const auto x = CoeffVector::from_dense(d);
    for (double p : {0.5, 1.0, 1.5, 2.0, 3.0})
      EXPECT_NEAR(norm_lp(x, p), oracle::lp(d, p), 1e-12 * oracle::lp(d, p));
  }
}

TEST(NormMixed, Examples) {
  const auto s = spine_sequence(1, 2, 4);
  CoeffVector one;
  one.push_back(s[0], 1.0);
  EXPECT_DOUBLE_EQ(norm_mixed(one, 1, 2, s), 1.0);
  CoeffVector on;
  for (auto n : s) on.push_back(n, 1.0);
  EXPECT_DOUBLE_EQ(norm_mixed(on, 1, 2, s), 4.0);
  CoeffVector off{1, 1, 1, 1};
  EXPECT_DOUBLE_EQ(norm_mixed(off, 1, 2, s), 2.0);
  EXPECT_THROW(norm_mixed(off, 2, 2, s), domain_error);
  EXPECT_THROW(norm_mixed(off, 3, 2, s), domain_error);
}

TEST(SpineSequence, Examples) {
  EXPECT_EQ(spine_sequence(1, 2, 4), (std::vector<Index>{5, 11, 23, 47}));
  EXPECT_EQ(spine_sequence(1, 2, 1), (std::vector<Index>{5}));
  EXPECT_THROW(spine_sequence(2, 2, 3), domain_error);
}

TEST(SpineSequence, DefiningInequalities) {
  for (auto [p, q] : {std::pair{1.0, 2.0}, {1.0, 3.0}, {1.5, 2.0}, {2.0, 5.0}}) {
    const auto s = spine_sequence(p, q, 6);
    for (std::size_t m = 1; m <= s.size(); ++m) {
      EXPECT_GT(double(s[m - 1]), std::pow(double(m + 1), q / p));
      if (m < s.size()) EXPECT_GE(s[m], 1 + 2 * s[m - 1]);
      // Minimality: one less breaks one of the two conditions.
      const Index less = s[m - 1] - 1;
      const bool ok_bound = double(less) > std::pow(double(m + 1), q / p);
      const bool ok_gap = m == 1 || less >= 1 + 2 * s[m - 2];
      EXPECT_FALSE(ok_bound && ok_gap);
    }
  }
}

TEST(NormIntervalSumming, Examples) {
  EXPECT_DOUBLE_EQ(norm_interval_summing(CoeffVector{1, 1, 1, 1}, 2), 2.0);
  EXPECT_DOUBLE_EQ(norm_interval_summing(CoeffVector{1, -1, 1, -1}, 2), 2.0);
  EXPECT_DOUBLE_EQ(norm_interval_summing(CoeffVector{1}, 2), 1.0);
  EXPECT_THROW(norm_interval_summing(CoeffVector{1}, 0.5), domain_error);
}

TEST(NormIntervalSumming, MatchesOracleIncludingGaps) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(-2, 2);
  std::bernoulli_distribution zero(0.4);
  for (int t = 0; t < 300; ++t) {
    oracle::Dense d(9);
    for (auto& v : d) v = zero(gen) ? 0.0 : u(gen);
    const auto x = CoeffVector::from_dense(d);
    for (double base : {1.0, 2.0, double(INFINITY)})
      EXPECT_NEAR(norm_interval_summing(x, base), oracle::interval_summing(d, base), 1e-12);
  }
}

TEST(NormSumming, MatchesOracle) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 200; ++t) {
    oracle::Dense d(8);
    for (auto& v : d) v = u(gen);
    EXPECT_NEAR(norm_summing(CoeffVector::from_dense(d)), oracle::summing(d), 1e-12);
  }
}

TEST(NormWeighted, WeightsBeyondListAreOne) {
  EXPECT_DOUBLE_EQ(norm_weighted(CoeffVector{1, 1, 1}, 1, std::vector<double>{2, 3}), 6.0);
  EXPECT_THROW(NormOracle::weighted(1, {0.0}), domain_error);
}

TEST(NormOracle, PTriangleOnSamples) {
  for (const auto& norm : all_models()) {
    const auto fam = SampleFamily::random(10, 300, 21);
    for (std::size_t i = 0; i + 1 < fam.size(); ++i) {
      const auto x = fam.at(i), y = fam.at(i + 1);
      EXPECT_TRUE(check_p_triangle(norm, x, y).holds()) << i;
    }
  }
}

TEST(NormOracle, HomogeneityAndPositivity) {
  for (const auto& norm : all_models()) {
    const auto fam = SampleFamily::random(10, 200, 3);
    for (std::size_t i = 0; i < fam.size(); ++i) {
      const auto x = fam.at(i);
      const double nx = norm(x);
      EXPECT_EQ(nx > 0, !x.is_zero());
      for (double a : {2.0, 0.5, -3.0})
        EXPECT_NEAR(norm(a * x), std::abs(a) * nx, 1e-12 * std::max(1.0, nx));
    }
  }
}

TEST(NormOracle, SignFlipExactForLpAndMixed) {
  const auto fam = SampleFamily::random(10, 200, 4);
  for (const auto& norm : {NormOracle::lp(1), NormOracle::lp(0.5), NormOracle::mixed(1, 2, {5})})
    for (std::size_t i = 0; i < fam.size(); ++i) EXPECT_EQ(norm(-fam.at(i)), norm(fam.at(i)));
}

TEST(NormOracle, TraitsAndConvexity) {
  EXPECT_DOUBLE_EQ(NormOracle::lp(0.5).convexity(), 0.5);
  EXPECT_DOUBLE_EQ(NormOracle::lp(2).convexity(), 1.0);
  EXPECT_TRUE(NormOracle::lp(2).coordinatewise_monotone());
  EXPECT_TRUE(NormOracle::lp(2).permutation_invariant());
  EXPECT_FALSE(NormOracle::summing().coordinatewise_monotone());
  EXPECT_FALSE(NormOracle::mixed(1, 2, {5}).permutation_invariant());
  EXPECT_THROW(NormOracle::mixed(1, 2, {5, 3}), domain_error);
  EXPECT_THROW(NormOracle::lp(0), domain_error);
  auto c = NormOracle::custom("sup", 1.0, [](const CoeffVector& x) { return x.sup_norm(); });
  EXPECT_DOUBLE_EQ(c(CoeffVector{1, -4, 2}), 4.0);
  EXPECT_EQ(c.kind(), NormKind::custom);
  EXPECT_THROW(NormOracle::custom("bad", 2.0, [](const CoeffVector&) { return 0.0; }), domain_error);
}

TEST(Aabw, ChecksHoldOnSamples) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> unit(0, 1), sym(-1, 1);
  for (const auto& norm : {NormOracle::lp(1), NormOracle::lp(0.5), NormOracle::lp(2),
                           NormOracle::summing(), NormOracle::interval_summing(2)}) {
    const auto fam = SampleFamily::random(8, 140, 2);
    for (std::size_t i = 0; i + 7 < fam.size(); i += 7) {
      const auto y = fam.at(i);
      std::vector<CoeffVector> xs;
      for (std::size_t k = 1; k <= 6; ++k) xs.push_back(fam.at(i + k));
      std::vector<double> a(6), b(6);
      for (auto& v : a) v = unit(gen);
      for (auto& v : b) v = sym(gen);
      EXPECT_TRUE(check_aabw_subsets(norm, y, xs, a).holds());
      EXPECT_TRUE(check_aabw_signs(norm, y, xs, b).holds());
      EXPECT_TRUE(check_aabw_real_combination(norm, xs, b).holds());
    }
  }
}

TEST(Aabw, RejectsBadInputs) {
  const auto norm = NormOracle::lp(1);
  std::vector<CoeffVector> xs{CoeffVector{1}};
  std::vector<double> bad{1.5};
  EXPECT_THROW(check_aabw_subsets(norm, CoeffVector{}, xs, bad), domain_error);
  std::vector<double> two{0.1, 0.2};
  EXPECT_THROW(check_aabw_signs(norm, CoeffVector{}, xs, two), domain_error);
}

TEST(VectorText, ParsesAndCanonicalizes) {
  std::istringstream in("1 2 0 0\n# comment\n\n-0.5 0 3\n");
  const auto v = read_vectors(in);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0], (CoeffVector{1, 2}));
  EXPECT_EQ(v[0].max_index(), 2u);
  EXPECT_EQ(v[1], (CoeffVector{-0.5, 0, 3}));
  EXPECT_THROW(parse_vector_line("1 x"), parse_error);
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.0, -2.5})
    EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(INFINITY), "inf");
}
