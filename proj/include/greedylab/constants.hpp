// Copyright 2026 The greedylab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "greedylab/combinatorics.hpp"
#include "greedylab/functionals.hpp"
#include "greedylab/json_io.hpp"
#include "greedylab/sampling.hpp"
#include "greedylab/spaces.hpp"
#include "greedylab/tga.hpp"

namespace greedylab {

/// Lower estimate of a supremum together with the datum attaining it.
struct ConstantEstimate {
  std::string quantity;
  /// NaN when no datum was evaluated.
  double value = std::numeric_limits<double>::quiet_NaN();
  std::optional<std::size_t> m;
  json witness;
  std::size_t data = 0;
  /// 0/0 ratios.
  std::size_t skipped = 0;
  /// Data whose benchmark was only an upper bound.
  std::size_t excluded = 0;
  /// (x, m) pairs dropped because the greedy-set cap was hit.
  std::size_t capped = 0;
  /// Every admissible datum of the model was examined (exhaustive tier).
  bool exhaustive = false;
  std::string note;
};

struct EstimateOptions {
  unsigned workers = 1;
  FunctionalOptions functional;
  std::size_t greedy_cap = 100000;
  /// Per-sample budget of (sign, shrink) patterns in the unconditionality scan.
  std::size_t pattern_cap = std::size_t{1} << 16;
  /// Budget of set / pair enumerations in democracy-type scans.
  std::size_t set_cap = 20'000'000;
};

/// Ratios below this magnitude count as zero.
inline constexpr double zero_threshold = 1e-13;

namespace detail {

struct Sup {
  double value = -std::numeric_limits<double>::infinity();
  std::optional<std::size_t> m;
  json witness;
  std::size_t data = 0, skipped = 0, excluded = 0, capped = 0;

  /// Records num/den; make() builds the witness only when the datum wins.
  template <class Make>
  void offer_ratio(double num, double den, std::size_t mm, Make&& make) {
    double r;
    if (num < zero_threshold && den < zero_threshold) {
      ++skipped;
      return;
    }
    r = den < zero_threshold ? std::numeric_limits<double>::infinity() : num / den;
    ++data;
    if (r > value) {
      value = r;
      m = mm;
      witness = make();
      witness["numerator"] = number_to_json(num);
      witness["denominator"] = number_to_json(den);
    }
  }

  void merge(Sup& o) {
    if (o.value > value) {
      value = o.value;
      m = o.m;
      witness = std::move(o.witness);
    }
    data += o.data;
    skipped += o.skipped;
    excluded += o.excluded;
    capped += o.capped;
  }

  ConstantEstimate finish(std::string quantity, bool exhaustive) const {
    ConstantEstimate e;
    e.quantity = std::move(quantity);
    if (data > 0) e.value = value;
    e.m = m;
    e.witness = witness;
    e.data = data;
    e.skipped = skipped;
    e.excluded = excluded;
    e.capped = capped;
    e.exhaustive = exhaustive && capped == 0 && excluded == 0;
    if (data == 0) e.note = "no data";
    if (capped) e.note += std::string(e.note.empty() ? "" : "; ") + std::to_string(capped) + " (x,m) pairs over the greedy-set cap";
    if (excluded) e.note += std::string(e.note.empty() ? "" : "; ") + std::to_string(excluded) + " data with uncertified benchmark excluded";
    return e;
  }
};

inline void merge_all(std::vector<Sup>& into, std::vector<Sup>& from) {
  for (std::size_t i = 0; i < into.size(); ++i) into[i].merge(from[i]);
}

inline bool family_is_exhaustive(const SampleFamily& fam) {
  return fam.mode == SampleFamily::Mode::exhaustive;
}

inline void require_family(const SampleFamily& fam) {
  if (fam.dimension == 0 || fam.size() == 0) throw domain_error("sample family is empty");
  if (fam.mode == SampleFamily::Mode::exhaustive && fam.grid.empty())
    throw domain_error("exhaustive family needs a nonempty grid");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Greedy ratio constants

/// Benchmark of the ratio ||x - G_m(x)|| / benchmark(x, m).
enum class Benchmark {
  tilde,        // sigma~_m
  check,        // sigma^_m (intervals)
  tail,         // ||x - S_m(x)||
  prefix_tail,  // min_{n <= m} ||x - S_n(x)||
  hathat,       // sigma^^_m
  min_tilde,    // min_{k <= m} sigma~_k
  min_check,    // min_{k <= m} sigma^_k
};

inline std::string benchmark_quantity(Benchmark b) {
  switch (b) {
    case Benchmark::tilde: return "C_a";
    case Benchmark::check: return "C_ca";
    case Benchmark::tail: return "C_pg";
    case Benchmark::prefix_tail: return "C_spg";
    case Benchmark::hathat: return "C_sspg";
    case Benchmark::min_tilde: return "C_a_min";
    case Benchmark::min_check: return "C_ca_min";
  }
  return "?";
}

inline std::optional<Benchmark> parse_benchmark(std::string_view s) {
  if (s == "tilde") return Benchmark::tilde;
  if (s == "check") return Benchmark::check;
  if (s == "tail" || s == "S_m") return Benchmark::tail;
  if (s == "prefix_tail") return Benchmark::prefix_tail;
  if (s == "hathat") return Benchmark::hathat;
  if (s == "min_tilde") return Benchmark::min_tilde;
  if (s == "min_check") return Benchmark::min_check;
  return std::nullopt;
}

/// Value of a benchmark functional at (x, m).
inline FunctionalValue benchmark_value(const CoeffVector& x, std::size_t m, Benchmark b,
                                       const NormOracle& norm, const FunctionalOptions& opts = {}) {
  const auto mm = static_cast<std::ptrdiff_t>(m);
  switch (b) {
    case Benchmark::tilde: return sigma_tilde(x, mm, norm, opts);
    case Benchmark::check: return sigma_check(x, mm, norm);
    case Benchmark::tail: {
      FunctionalValue v;
      v.value = tail_norm(x, mm, norm);
      v.witness.order = m;
      return v;
    }
    case Benchmark::prefix_tail: return best_prefix_tail(x, mm, norm);
    case Benchmark::hathat: return sigma_hathat(x, mm, norm, opts);
    case Benchmark::min_tilde: return min_sigma(x, mm, SigmaKind::tilde, norm, opts);
    case Benchmark::min_check: return min_sigma(x, mm, SigmaKind::check, norm, opts);
  }
  throw domain_error("benchmark_value: unknown benchmark");
}

/// One pass over the family computing, for every sample x, every m in
/// 1..dim (0..dim for the quasi-greedy ratios) and every A in G(x, m) (zero
/// coordinates inside the dimension allowed), the quasi-greedy ratios
/// (optional) and ||x - P_A x|| against each benchmark. Output order: C_q, C_l (if requested), then `benchmarks`.
inline std::vector<ConstantEstimate> estimate_greedy_constants(const NormOracle& norm,
                                                              const SampleFamily& fam,
                                                              std::span<const Benchmark> benchmarks,
                                                              bool quasi_greedy,
                                                              const EstimateOptions& opts = {}) {
  detail::require_family(fam);
  const std::size_t nq = quasi_greedy ? 2 : 0;
  const std::size_t slots = nq + benchmarks.size();
  const Index dim = fam.dimension;
  const GreedyOptions gopts{dim, opts.greedy_cap};

  auto body = [&](std::size_t i, std::vector<detail::Sup>& acc) {
    const CoeffVector x = fam.at(i);
    const double nx = norm(x);
    // sigma values for k = 0..dim, computed on demand for the min variants.
    std::vector<std::optional<FunctionalValue>> tilde(dim + 1), check(dim + 1);
    auto sigma_at = [&](SigmaKind kind, std::size_t k) -> const FunctionalValue& {
      auto& slot = kind == SigmaKind::tilde ? tilde[k] : check[k];
      if (!slot)
        slot = kind == SigmaKind::tilde ? sigma_tilde(x, static_cast<std::ptrdiff_t>(k), norm, opts.functional)
                                        : sigma_check(x, static_cast<std::ptrdiff_t>(k), norm);
      return *slot;
    };
    auto running_min = [&](SigmaKind kind, std::size_t m) {
      FunctionalValue best;
      best.value = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k <= m; ++k) {
        const auto& v = sigma_at(kind, k);
        if (v.value < best.value) {
          best = v;
          best.witness.order = k;
        }
        if (!v.certified) best.certified = false;
      }
      return best;
    };

    if (quasi_greedy) {
      // m = 0: the empty set is the only greedy set; it pins C_l >= 1.
      auto base = [&] { return json{{"x", to_json(x)}, {"m", 0}, {"A", json::array()}}; };
      acc[0].offer_ratio(0.0, nx, 0, base);
      acc[1].offer_ratio(nx, nx, 0, base);
    }
    for (std::size_t m = 1; m <= dim; ++m) {
      std::vector<IndexSet> G;
      try {
        G = greedy_sets(x, static_cast<std::ptrdiff_t>(m), gopts);
      } catch (const cap_exceeded&) {
        for (auto& a : acc) ++a.capped;
        continue;
      }
      std::vector<FunctionalValue> bench;
      bench.reserve(benchmarks.size());
      for (Benchmark b : benchmarks) {
        if (b == Benchmark::tilde) bench.push_back(sigma_at(SigmaKind::tilde, m));
        else if (b == Benchmark::check) bench.push_back(sigma_at(SigmaKind::check, m));
        else if (b == Benchmark::min_tilde) bench.push_back(running_min(SigmaKind::tilde, m));
        else if (b == Benchmark::min_check) bench.push_back(running_min(SigmaKind::check, m));
        else bench.push_back(benchmark_value(x, m, b, norm, opts.functional));
      }
      for (const IndexSet& A : G) {
        const double num = norm(project_complement(x, A));
        auto base = [&] { return json{{"x", to_json(x)}, {"m", m}, {"A", to_json(A)}}; };
        if (quasi_greedy) {
          acc[0].offer_ratio(norm(project(x, A)), nx, m, base);
          acc[1].offer_ratio(num, nx, m, base);
        }
        for (std::size_t b = 0; b < benchmarks.size(); ++b) {
          if (!bench[b].certified) {
            ++acc[nq + b].excluded;
            continue;
          }
          acc[nq + b].offer_ratio(num, bench[b].value, m, [&] {
            json w = base();
            w["benchmark"] = to_json(bench[b].witness);
            return w;
          });
        }
      }
    }
  };

  auto sups = parallel_reduce(fam.size(), opts.workers, std::vector<detail::Sup>(slots), body,
                              detail::merge_all);
  std::vector<ConstantEstimate> out;
  const bool ex = detail::family_is_exhaustive(fam);
  if (quasi_greedy) {
    out.push_back(sups[0].finish("C_q", ex));
    out.push_back(sups[1].finish("C_l", ex));
  }
  for (std::size_t b = 0; b < benchmarks.size(); ++b)
    out.push_back(sups[nq + b].finish(benchmark_quantity(benchmarks[b]), ex));
  return out;
}

/// (C_q, C_l): sup ||G_m x|| / ||x|| and sup ||x - G_m x|| / ||x||.
inline std::pair<ConstantEstimate, ConstantEstimate> estimate_quasi_greedy(
    const NormOracle& norm, const SampleFamily& fam, const EstimateOptions& opts = {}) {
  auto v = estimate_greedy_constants(norm, fam, {}, true, opts);
  return {std::move(v[0]), std::move(v[1])};
}

inline ConstantEstimate estimate_ratio_constant(const NormOracle& norm, const SampleFamily& fam,
                                                Benchmark benchmark, const EstimateOptions& opts = {}) {
  const Benchmark b[] = {benchmark};
  return std::move(estimate_greedy_constants(norm, fam, b, false, opts)[0]);
}

// ---------------------------------------------------------------------------
// Democracy

enum class DemocracyFlavor { plain, super, disjoint, disjoint_super, conservative };

inline std::string democracy_quantity(DemocracyFlavor f) {
  switch (f) {
    case DemocracyFlavor::plain: return "Delta";
    case DemocracyFlavor::super: return "Delta_s";
    case DemocracyFlavor::disjoint: return "Delta_d";
    case DemocracyFlavor::disjoint_super: return "Delta_sd";
    case DemocracyFlavor::conservative: return "Delta_c";
  }
  return "?";
}

struct DemocracyOptions {
  /// Positions {1..window}; 0 means 2 * maxCard.
  Index window = 0;
  Field field = Field::real;
  std::size_t cap = 20'000'000;
};

/// Unit scalars used for sign suprema: {+1, -1}, or 8 equally spaced points
/// of the unit circle.
inline std::vector<std::complex<double>> unit_scalars(Field field) {
  if (field == Field::real) return {1.0, -1.0};
  std::vector<std::complex<double>> u;
  for (int k = 0; k < 8; ++k) u.push_back(std::polar(1.0, k * M_PI / 4));
  return u;
}

/// ||1_{eps A}|| / ||1_{delta B}||.
template <class Scalar>
double democracy_ratio(const NormOracle& norm, const IndexSet& A,
                       const basic_sign_pattern<Scalar>& eps, const IndexSet& B,
                       const basic_sign_pattern<Scalar>& delta) {
  return norm(indicator(A, eps)) / norm(indicator(B, delta));
}

namespace detail {

struct SignedExtremes {
  IndexSet set;
  std::uint64_t mask = 0;
  double max = 0, min = std::numeric_limits<double>::infinity();
  std::vector<std::complex<double>> argmax, argmin;
};

/// Max and min of ||1_{eps A}|| over sign patterns with eps at min(A) fixed to 1
/// (the norm is invariant under a global unimodular factor). Unsigned when
/// `signs` is false.
inline SignedExtremes signed_extremes(const NormOracle& norm, const IndexSet& A, bool signs,
                                      Field field) {
  SignedExtremes e;
  e.set = A;
  for (Index n : A) e.mask |= std::uint64_t{1} << (n - 1);
  const auto units = signs ? unit_scalars(field) : std::vector<std::complex<double>>{1.0};
  for_each_tuple(units.size(), A.size() - 1, [&](std::span<const std::size_t> d) {
    std::vector<std::complex<double>> eps{1.0};
    for (auto k : d) eps.push_back(units[k]);
    double v;
    if (field == Field::real) {
      CoeffVector y;
      std::size_t k = 0;
      for (Index n : A) y.push_back(n, eps[k++].real());
      v = norm(y);
    } else {
      ComplexCoeffVector y;
      std::size_t k = 0;
      for (Index n : A) y.push_back(n, eps[k++]);
      v = norm(y);
    }
    if (v > e.max) {
      e.max = v;
      e.argmax = eps;
    }
    if (v < e.min) {
      e.min = v;
      e.argmin = eps;
    }
    return true;
  });
  return e;
}

inline json signs_to_json(const std::vector<std::complex<double>>& eps, Field field) {
  json a = json::array();
  for (const auto& s : eps) {
    if (field == Field::real) a.push_back(s.real());
    else a.push_back(json::array({s.real(), s.imag()}));
  }
  return a;
}

}  // namespace detail

/// sup ||1_{eps A}|| / ||1_{delta B}|| over nonempty A, B inside {1..window}
/// with |A| <= |B| <= maxCard. Signs are all 1 for the plain, disjoint and
/// conservative flavors; the disjoint flavors require A and B disjoint and the
/// conservative one A < B.
inline ConstantEstimate estimate_democracy(const NormOracle& norm, std::size_t maxCard,
                                           DemocracyFlavor flavor, const DemocracyOptions& opts = {}) {
  if (maxCard == 0) throw domain_error("estimate_democracy: maxCard must be positive");
  const Index W = opts.window ? opts.window : 2 * maxCard;
  if (W > 62) throw domain_error("estimate_democracy: window larger than 62");
  if (maxCard > W) throw domain_error("estimate_democracy: maxCard exceeds window");
  const bool pairwise = flavor == DemocracyFlavor::disjoint ||
                        flavor == DemocracyFlavor::disjoint_super ||
                        flavor == DemocracyFlavor::conservative;
  if (pairwise && W < 2 * maxCard)
    throw domain_error("estimate_democracy: window too small for disjoint sets of size maxCard");
  const bool signs = flavor == DemocracyFlavor::super || flavor == DemocracyFlavor::disjoint_super;

  const std::size_t radix = signs ? unit_scalars(opts.field).size() : 1;
  std::size_t work = 0;
  for (std::size_t k = 1; k <= maxCard; ++k) {
    std::size_t patterns = 1;
    for (std::size_t j = 1; j < k && patterns < opts.cap; ++j) patterns *= radix;
    const std::size_t c = binomial(W, k);
    work += c > opts.cap / std::max<std::size_t>(patterns, 1) ? opts.cap : c * patterns;
    if (work >= opts.cap) throw cap_exceeded("estimate_democracy: enumeration exceeds cap");
  }

  // Sets grouped by cardinality, lexicographic inside each group.
  std::vector<std::vector<detail::SignedExtremes>> by_card(maxCard + 1);
  for (std::size_t k = 1; k <= maxCard; ++k)
    for_each_combination(W, k, [&](std::span<const std::size_t> c) {
      std::vector<Index> v;
      for (auto o : c) v.push_back(o + 1);
      by_card[k].push_back(detail::signed_extremes(norm, IndexSet(std::move(v)), signs, opts.field));
      return true;
    });

  detail::Sup sup;
  auto offer = [&](const detail::SignedExtremes& a, const detail::SignedExtremes& b) {
    sup.offer_ratio(a.max, b.min, b.set.size(), [&] {
      return json{{"A", to_json(a.set)},
                  {"eps", detail::signs_to_json(a.argmax, opts.field)},
                  {"B", to_json(b.set)},
                  {"delta", detail::signs_to_json(b.argmin, opts.field)}};
    });
  };

  if (!pairwise) {
    // Only the largest numerator per |A| and the smallest denominator per |B| matter.
    for (std::size_t a = 1; a <= maxCard; ++a) {
      const auto* num = &by_card[a][0];
      for (const auto& s : by_card[a])
        if (s.max > num->max) num = &s;
      for (std::size_t b = a; b <= maxCard; ++b) {
        const auto* den = &by_card[b][0];
        for (const auto& s : by_card[b])
          if (s.min < den->min) den = &s;
        offer(*num, *den);
      }
    }
  } else {
    std::size_t pairs = 0;
    for (std::size_t a = 1; a <= maxCard; ++a)
      for (std::size_t b = a; b <= maxCard; ++b) {
        const std::size_t c = by_card[a].size() * by_card[b].size();
        pairs += c;
        if (pairs > opts.cap) throw cap_exceeded("estimate_democracy: pair enumeration exceeds cap");
      }
    for (std::size_t a = 1; a <= maxCard; ++a)
      for (const auto& A : by_card[a])
        for (std::size_t b = a; b <= maxCard; ++b)
          for (const auto& B : by_card[b]) {
            if (A.mask & B.mask) continue;
            if (flavor == DemocracyFlavor::conservative && !A.set.precedes(B.set)) continue;
            offer(A, B);
          }
  }
  auto e = sup.finish(democracy_quantity(flavor), true);
  e.witness["window"] = W;
  e.witness["max_card"] = maxCard;
  if (opts.field == Field::complex && signs) e.note = "complex signs discretized to 8 points";
  return e;
}

// ---------------------------------------------------------------------------
// Partial democracy

struct PartialDemocracyRow {
  /// The exclusion set D = {1..excluded_through}.
  Index excluded_through = 0;
  IndexSet B;
  double ratio = 0;
};

struct PartialDemocracyResult {
  IndexSet A;
  double norm_A = 0;
  std::vector<PartialDemocracyRow> rows;
  double min_ratio = std::numeric_limits<double>::infinity();
  /// No exclusion set leaves room for n positions inside the search bound.
  bool inconclusive = false;
  std::string note;
};

/// For the n-set A in {1..bound} with the largest ||1_A|| (or the given A),
/// and every D = {1..d} with max(A) <= d <= bound - n, the smallest ||1_B||
/// over n-sets B inside {d+1..bound}. A general finite D containing A leaves
/// every B beyond max(D) available, so these rows bound every D from below.
/// Returns the rows when all ratios exceed `target`, nothing otherwise.
inline std::optional<PartialDemocracyResult> partial_democracy_witness(
    const NormOracle& norm, std::size_t n, Index bound, double target = 1.0 + 1e-9,
    std::optional<IndexSet> given_A = std::nullopt, std::size_t cap = 20'000'000) {
  if (n == 0) throw domain_error("partial_democracy_witness: n must be positive");
  PartialDemocracyResult res;
  if (bound < 2 * n) {
    res.inconclusive = true;
    res.note = "search bound leaves no room beyond any exclusion set";
    return res;
  }
  auto best_set = [&](Index lo, Index hi, bool largest) {
    const std::size_t len = hi - lo + 1;
    if (binomial(len, n) > cap) throw cap_exceeded("partial_democracy_witness: enumeration exceeds cap");
    IndexSet arg;
    double val = largest ? -1.0 : std::numeric_limits<double>::infinity();
    for_each_combination(len, n, [&](std::span<const std::size_t> c) {
      CoeffVector y;
      for (auto o : c) y.push_back(lo + o, 1.0);
      const double v = norm(y);
      if (largest ? v > val : v < val) {
        val = v;
        arg = y.support();
      }
      return true;
    });
    return std::pair{arg, val};
  };
  if (given_A) {
    if (given_A->size() != n) throw domain_error("partial_democracy_witness: |A| must equal n");
    res.A = *given_A;
    res.norm_A = norm(indicator(res.A));
  } else {
    std::tie(res.A, res.norm_A) = best_set(1, bound, true);
  }
  if (res.A.back() + n > bound) {
    res.inconclusive = true;
    res.note = "search bound leaves no room beyond max(A)";
    return res;
  }
  for (Index d = res.A.back(); d + n <= bound; ++d) {
    auto [B, v] = best_set(d + 1, bound, false);
    const double r = res.norm_A / v;
    res.rows.push_back({d, B, r});
    res.min_ratio = std::min(res.min_ratio, r);
  }
  if (res.min_ratio > target) return res;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Unconditionality

/// sup ||sum a_n e_n|| / ||sum b_n e_n|| over sampled b and |a_n| <= |b_n|.
/// For norms (convexity 1) the ratio is convex in a, so only the vertices
/// a_n = +-b_n are scanned; quasi-norms also scan the shrink factors
/// {0, 1/4, 1/2, 1}. Patterns beyond the per-sample budget are subsampled.
inline ConstantEstimate estimate_unconditionality(const NormOracle& norm, const SampleFamily& fam,
                                                  const EstimateOptions& opts = {}) {
  detail::require_family(fam);
  const bool convex = norm.convexity() >= 1.0;
  static constexpr double shrink[] = {1.0, 0.5, 0.25, 0.0};
  const std::size_t radix = convex ? 2 : 8;

  struct Acc {
    detail::Sup sup;
    std::size_t subsampled = 0;
  };
  auto body = [&](std::size_t i, Acc& acc) {
    const CoeffVector b = fam.at(i);
    const double nb = norm(b);
    const auto& e = b.entries();
    const std::size_t s = e.size();
    if (s == 0) return;
    auto eval = [&](std::span<const std::size_t> d) {
      CoeffVector a;
      for (std::size_t k = 0; k < s; ++k) {
        const double sign = d[k] % 2 ? -1.0 : 1.0;
        const double v = sign * shrink[d[k] / 2] * e[k].value;
        if (v != 0.0) a.push_back(e[k].index, v);
      }
      acc.sup.offer_ratio(norm(a), nb, s, [&] { return json{{"b", to_json(b)}, {"a", to_json(a)}}; });
    };
    std::size_t total = 1;
    bool over = false;
    for (std::size_t k = 0; k < s; ++k) {
      if (total > opts.pattern_cap / radix) {
        over = true;
        break;
      }
      total *= radix;
    }
    if (!over && total <= opts.pattern_cap) {
      for_each_tuple(radix, s, [&](std::span<const std::size_t> d) {
        eval(d);
        return true;
      });
      return;
    }
    ++acc.subsampled;
    auto gen = sample_rng(fam.seed, i, 1);
    std::uniform_int_distribution<std::size_t> digit(0, radix - 1);
    std::vector<std::size_t> d(s);
    for (std::size_t t = 0; t < opts.pattern_cap; ++t) {
      for (auto& x : d) x = digit(gen);
      eval(d);
    }
  };
  auto merge = [](Acc& into, Acc& from) {
    into.sup.merge(from.sup);
    into.subsampled += from.subsampled;
  };
  Acc acc = parallel_reduce(fam.size(), opts.workers, Acc{}, body, merge);
  auto est = acc.sup.finish("K", detail::family_is_exhaustive(fam) && acc.subsampled == 0);
  est.m.reset();
  if (acc.subsampled)
    est.note += std::string(est.note.empty() ? "" : "; ") + std::to_string(acc.subsampled) +
                " samples with subsampled sign patterns";
  return est;
}

// ---------------------------------------------------------------------------
// One-dimensional benchmarks

/// C_l (1 + 2^p C_q^p C_a^p Delta_sd^p)^{1/p}
inline double prop_1dim_constant(double C_l, double C_q, double C_a, double Delta_sd, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw domain_error("prop_1dim_constant: p must lie in (0, 1]");
  return C_l * std::pow(1.0 + std::pow(2.0 * C_q * C_a * Delta_sd, p), 1.0 / p);
}

/// sup over x, m, A in G(x, m) of ||x - P_A x|| divided by
/// inf { ||x - t 1_{eps B}|| : B disjoint from A inside {1..dim}, |B| <= m, eps signs }.
/// Signs are +-1 with eps fixed to 1 at min(B).
inline ConstantEstimate estimate_sign_line_constant(const NormOracle& norm, const SampleFamily& fam,
                                                    const EstimateOptions& opts = {}) {
  detail::require_family(fam);
  const Index dim = fam.dimension;
  const GreedyOptions gopts{dim, opts.greedy_cap};
  auto body = [&](std::size_t i, detail::Sup& acc) {
    const CoeffVector x = fam.at(i);
    for (std::size_t m = 1; m <= dim; ++m) {
      std::vector<IndexSet> G;
      try {
        G = greedy_sets(x, static_cast<std::ptrdiff_t>(m), gopts);
      } catch (const cap_exceeded&) {
        ++acc.capped;
        continue;
      }
      for (const IndexSet& A : G) {
        const std::vector<Index> free = IndexSet::range(1, dim).minus(A).items();
        FunctionalValue best;
        best.value = norm(x);  // B empty
        bool certified = true;
        for (std::size_t k = 1; k <= std::min(m, free.size()); ++k)
          for_each_combination(free.size(), k, [&](std::span<const std::size_t> c) {
            std::vector<Index> v;
            for (auto o : c) v.push_back(free[o]);
            const IndexSet B(std::move(v));
            for_each_tuple(2, k - 1, [&](std::span<const std::size_t> d) {
              std::vector<double> eps{1.0};
              for (auto s : d) eps.push_back(s ? -1.0 : 1.0);
              auto r = dist_to_sign_line(x, B, SignPattern(B, eps), norm, opts.functional);
              if (!r.certified) certified = false;
              if (r.value < best.value) best = std::move(r);
              return true;
            });
            return true;
          });
        if (!certified) {
          ++acc.excluded;
          continue;
        }
        acc.offer_ratio(norm(project_complement(x, A)), best.value, m, [&] {
          return json{{"x", to_json(x)}, {"m", m}, {"A", to_json(A)}, {"line", to_json(best.witness)}};
        });
      }
    }
  };
  auto sup = parallel_reduce(fam.size(), opts.workers, detail::Sup{}, body,
                             [](detail::Sup& a, detail::Sup& b) { a.merge(b); });
  return sup.finish("C_sign_line", detail::family_is_exhaustive(fam));
}

/// sup over x, m of min over A in G(x, m) of ||x - P_A x|| / dist_to_interval_line(x, m, A).
/// Only some greedy set needs to satisfy the inequality, hence the minimum.
inline ConstantEstimate estimate_interval_line_constant(const NormOracle& norm,
                                                        const SampleFamily& fam,
                                                        const EstimateOptions& opts = {}) {
  detail::require_family(fam);
  const Index dim = fam.dimension;
  const GreedyOptions gopts{dim, opts.greedy_cap};
  auto body = [&](std::size_t i, detail::Sup& acc) {
    const CoeffVector x = fam.at(i);
    for (std::size_t m = 1; m <= dim; ++m) {
      std::vector<IndexSet> G;
      try {
        G = greedy_sets(x, static_cast<std::ptrdiff_t>(m), gopts);
      } catch (const cap_exceeded&) {
        ++acc.capped;
        continue;
      }
      double best_ratio = std::numeric_limits<double>::infinity();
      double best_num = 0, best_den = 0;
      const IndexSet* best_A = nullptr;
      FunctionalValue best_line;
      bool certified = true;
      for (const IndexSet& A : G) {
        const double num = norm(project_complement(x, A));
        auto line = dist_to_interval_line(x, static_cast<std::ptrdiff_t>(m), A, norm, opts.functional);
        if (!line.certified) certified = false;
        double r;
        if (num < zero_threshold && line.value < zero_threshold) r = 0.0;
        else r = line.value < zero_threshold ? std::numeric_limits<double>::infinity() : num / line.value;
        if (r < best_ratio) {
          best_ratio = r;
          best_num = num;
          best_den = line.value;
          best_A = &A;
          best_line = std::move(line);
        }
      }
      if (!certified) {
        ++acc.excluded;
        continue;
      }
      acc.offer_ratio(best_num, best_den, m, [&] {
        return json{{"x", to_json(x)}, {"m", m}, {"A", to_json(*best_A)}, {"line", to_json(best_line.witness)}};
      });
    }
  };
  auto sup = parallel_reduce(fam.size(), opts.workers, detail::Sup{}, body,
                             [](detail::Sup& a, detail::Sup& b) { a.merge(b); });
  return sup.finish("C_interval_line", detail::family_is_exhaustive(fam));
}

}  // namespace greedylab
