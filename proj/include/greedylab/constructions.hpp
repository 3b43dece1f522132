// Copyright 2026 The greedylab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "greedylab/constants.hpp"
#include "greedylab/functionals.hpp"
#include "greedylab/json_io.hpp"
#include "greedylab/sampling.hpp"
#include "greedylab/spaces.hpp"
#include "greedylab/tga.hpp"

namespace greedylab {

// ---------------------------------------------------------------------------
// Vector with a bounded sigma~ and a large interval error

struct E1Instance {
  double C = 0;
  std::size_t m = 0;
  double a = 0;
  CoeffVector x;
};

/// m blocks (a, 1/m^2, ..., 1/m^2) with m small entries each, m = 3 and
/// a = (C + 1) / (m - 1), so that a (m - 1) > C.
inline E1Instance build_e1(double C) {
  if (!(C > 1.0) || !std::isfinite(C)) throw domain_error("build_e1: C must be a finite real > 1");
  E1Instance e;
  e.C = C;
  e.m = 3;
  e.a = (C + 1.0) / double(e.m - 1);
  const double small = 1.0 / double(e.m * e.m);
  Index n = 1;
  for (std::size_t b = 0; b < e.m; ++b) {
    e.x.push_back(n++, e.a);
    for (std::size_t k = 0; k < e.m; ++k) e.x.push_back(n++, small);
  }
  return e;
}

struct E1Report {
  FunctionalValue sigma_tilde;
  FunctionalValue sigma_check;
  bool tilde_is_one = false;
  bool check_exceeds_C = false;
  [[nodiscard]] bool pass() const { return tilde_is_one && check_exceeds_C; }
};

/// Evaluates sigma~_m and sigma^_m of the instance in the given norm (l1 in
/// the construction) and checks sigma~_m = 1 and sigma^_m > C.
inline E1Report verify_e1(const E1Instance& e, const NormOracle& norm = NormOracle::lp(1.0),
                          double tol = 1e-12) {
  E1Report r;
  const auto m = static_cast<std::ptrdiff_t>(e.m);
  r.sigma_tilde = sigma_tilde(e.x, m, norm);
  r.sigma_check = sigma_check(e.x, m, norm);
  r.tilde_is_one = r.sigma_tilde.certified && std::abs(r.sigma_tilde.value - 1.0) <= tol;
  r.check_exceeds_C = r.sigma_check.value > e.C + tol;
  return r;
}

inline json to_json(const E1Instance& e) {
  return json{{"C", e.C}, {"m", e.m}, {"a", e.a}, {"x", to_json(e.x)}};
}

// ---------------------------------------------------------------------------
// Interleaved lp x lq instance

struct MixedInstance {
  double p = 1, q = 2;
  Index window = 0;
  /// Spine positions inside the window.
  std::vector<Index> spine;
  NormOracle norm = NormOracle::lp(1.0);
};

inline MixedInstance build_mixed_instance(double p, double q, Index window) {
  if (!(p >= 1.0 && p < q && std::isfinite(q))) throw domain_error("build_mixed_instance: need 1 <= p < q < inf");
  const auto first_two = spine_sequence(p, q, 2);
  if (window < first_two[1]) throw domain_error("build_mixed_instance: window smaller than s_2");
  MixedInstance inst;
  inst.p = p;
  inst.q = q;
  inst.window = window;
  for (std::size_t count = 2;; ++count) {
    auto s = spine_sequence(p, q, count);
    if (s.back() > window) {
      s.pop_back();
      inst.spine = std::move(s);
      break;
    }
  }
  inst.norm = NormOracle::mixed(p, q, inst.spine);
  return inst;
}

/// Chooses an element of G(x, m) uniformly among tie resolutions; zero
/// coordinates inside {1..dim} complete sets larger than the support.
template <class Gen>
IndexSet random_greedy_set(const CoeffVector& x, std::size_t m, Index dim, Gen& gen) {
  const std::size_t s = x.support_size();
  std::vector<Index> v;
  std::vector<Index> pool;
  std::size_t pick;
  if (m <= s) {
    auto g = detail::split_at_threshold(x, m);
    v = std::move(g.forced);
    pool = std::move(g.ties);
    pick = g.pick;
  } else {
    v = x.support().items();
    pool = detail::zero_positions(x.support(), dim);
    pick = m - s;
    if (pick > pool.size()) throw domain_error("random_greedy_set: m exceeds dimension");
  }
  std::shuffle(pool.begin(), pool.end(), gen);
  v.insert(v.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(pick));
  return IndexSet(std::move(v));
}

struct IntervalsCheck {
  bool pass = true;
  double C = 0;
  double worst_ratio = 0;
  json witness;
  std::size_t triples = 0;
  /// Draws with no interval of length m disjoint from A, or 0/0 ratios.
  std::size_t skipped = 0;
  std::size_t violations = 0;
};

struct IntervalsOptions {
  std::size_t max_m = 8;
  unsigned workers = 1;
  std::vector<double> grid = {-2, -1, -0.5, 0.5, 1, 2};
};

/// Samples triples (x, m, A in G(x, m), I of length m disjoint from A, y with
/// supp(y) in I) and checks ||x - P_A x|| <= C ||x - y||. y is P_I(x) or a
/// grid vector on I, each with probability 1/2. Each x of the family yields
/// one triple.
inline IntervalsCheck verify_intervals_plus_1dim(const NormOracle& norm, const SampleFamily& fam, double C,
                                                 const IntervalsOptions& opts = {}) {
  detail::require_family(fam);
  const Index dim = fam.dimension;
  auto body = [&](std::size_t i, IntervalsCheck& acc) {
    const CoeffVector x = fam.at(i);
    auto gen = sample_rng(fam.seed, i, 2);
    const std::size_t m = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(opts.max_m, dim))(gen);
    const IndexSet A = random_greedy_set(x, m, dim, gen);
    std::vector<Index> starts;
    for (Index s = 1; s + m - 1 <= dim; ++s)
      if (IndexInterval{s, m}.to_set().disjoint(A)) starts.push_back(s);
    if (starts.empty()) {
      ++acc.skipped;
      return;
    }
    const IndexInterval I{starts[std::uniform_int_distribution<std::size_t>(0, starts.size() - 1)(gen)], m};
    CoeffVector y;
    const bool projection = std::bernoulli_distribution(0.5)(gen);
    if (projection) {
      y = project(x, I.to_set());
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, opts.grid.size() - 1);
      for (Index n = I.start; n <= I.last(); ++n) y.push_back(n, opts.grid[pick(gen)]);
    }
    const double num = norm(project_complement(x, A));
    const double den = norm(x - y);
    ++acc.triples;
    if (num < zero_threshold && den < zero_threshold) {
      ++acc.skipped;
      return;
    }
    const double r = den < zero_threshold ? std::numeric_limits<double>::infinity() : num / den;
    if (r > C * (1.0 + 1e-12)) {
      acc.pass = false;
      ++acc.violations;
    }
    if (r > acc.worst_ratio) {
      acc.worst_ratio = r;
      acc.witness = json{{"x", to_json(x)}, {"m", m}, {"A", to_json(A)},
                         {"I", {{"start", I.start}, {"length", I.length}}}, {"y", to_json(y)},
                         {"numerator", num}, {"denominator", den}};
    }
  };
  auto merge = [](IntervalsCheck& into, IntervalsCheck& from) {
    into.pass = into.pass && from.pass;
    if (from.worst_ratio > into.worst_ratio) {
      into.worst_ratio = from.worst_ratio;
      into.witness = std::move(from.witness);
    }
    into.triples += from.triples;
    into.skipped += from.skipped;
    into.violations += from.violations;
  };
  IntervalsCheck init;
  init.C = C;
  return parallel_reduce(fam.size(), opts.workers, init, body, merge);
}

struct MixedReport {
  ConstantEstimate unconditionality;
  /// ||1_A|| / ||1_B|| for the first four spine positions against the first
  /// four off-spine positions.
  double spine_vs_offspine = 0;
  std::optional<PartialDemocracyResult> partial_democracy;
  IntervalsCheck intervals;
};

struct MixedReportOptions {
  std::size_t unconditional_samples = 32;
  std::size_t interval_triples = 10000;
  std::size_t democracy_cardinality = 4;
  /// Constant of the intervals check; 0 means 2^{1+1/p}.
  double interval_C = 0;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

inline MixedReport mixed_instance_report(const MixedInstance& inst, const MixedReportOptions& opts = {}) {
  MixedReport r;
  EstimateOptions eo;
  eo.workers = opts.workers;
  auto ufam = SampleFamily::random(inst.window, opts.unconditional_samples, opts.seed);
  ufam.zero_probability = 0.8;
  r.unconditionality = estimate_unconditionality(inst.norm, ufam, eo);

  const std::size_t n = opts.democracy_cardinality;
  if (inst.spine.size() >= n) {
    std::vector<Index> spine(inst.spine.begin(), inst.spine.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<Index> off;
    for (Index k = 1; off.size() < n && k <= inst.window; ++k)
      if (!std::binary_search(inst.spine.begin(), inst.spine.end(), k)) off.push_back(k);
    if (off.size() == n)
      r.spine_vs_offspine = inst.norm(indicator(IndexSet(spine))) / inst.norm(indicator(IndexSet(off)));
    r.partial_democracy = partial_democracy_witness(inst.norm, n, inst.window, 1.0 + 1e-9, IndexSet(spine));
  }

  auto ifam = SampleFamily::random(inst.window, opts.interval_triples, opts.seed + 1,
                                   {-2, -1, -0.5, 0.5, 1, 2});
  ifam.include_anchors = false;
  ifam.zero_probability = 0.7;
  IntervalsOptions io;
  io.workers = opts.workers;
  r.intervals = verify_intervals_plus_1dim(
      inst.norm, ifam, opts.interval_C > 0 ? opts.interval_C : std::pow(2.0, 1.0 + 1.0 / inst.p), io);
  return r;
}

// ---------------------------------------------------------------------------
// Block assembly with a reordering

struct T3Witness {
  CoeffVector y;
  std::size_t m = 0;
  IndexSet A;
  CoeffVector z;
  int k = 0;
};

/// (level k, offset) -> witness with supp(y) = {offset+1, ..., offset+l} and
/// ||y - P_A y|| > 2^k ||y - z||, or nothing.
using T3WitnessSource = std::function<std::optional<T3Witness>(int, Index)>;

inline json to_json(const T3Witness& w) {
  return json{{"y", to_json(w.y)}, {"m", w.m}, {"A", to_json(w.A)}, {"z", to_json(w.z)}, {"k", w.k}};
}

/// Empty string when the witness is admissible at the given level and offset,
/// else the violated requirement.
inline std::string t3_intake_error(const T3Witness& w, int k, Index offset, const NormOracle& norm) {
  const std::size_t s = w.y.support_size();
  if (s == 0 || w.y.min_index() != offset + 1 || w.y.max_index() != offset + s)
    return "supp(y) must be the interval {offset+1, ..., offset+l}";
  if (w.m < 1 || w.m >= s) return "need 1 <= m < l";
  if (w.A.size() != w.m || !is_greedy_set(w.y, w.A) || !w.A.is_subset_of(w.y.support()))
    return "A must be a greedy set of y of size m";
  if (w.z.support_size() != w.m) return "|supp(z)| must equal m";
  if (!w.z.support().is_subset_of(w.y.support())) return "supp(z) must lie in the block";
  const double lhs = norm(project_complement(w.y, w.A));
  const double rhs = std::ldexp(norm(w.y - w.z), k);
  if (!(lhs > rhs)) return "gap ||y - P_A y|| > 2^k ||y - z|| fails";
  return {};
}

/// Structured search for a level-k witness placed after `offset`:
///  1. alternating vectors sum_{j <= 2n} (-1)^{j+1} e_j, A the n positive
///     positions, z half of y on the first n positions;
///  2. full-support grid vectors over {+-1, +-1/2} of small length, every
///     greedy set, z = eta P_S(y) for m-sets S and eta in {1, 1/2}.
/// `budget` bounds the number of candidates of each phase.
inline std::optional<T3Witness> search_t3_witness(const NormOracle& norm, int k, std::size_t budget,
                                                  Index offset = 0) {
  if (k < 1) throw domain_error("search_t3_witness: k must be >= 1");
  const double gap = std::ldexp(1.0, k);
  auto shifted = [&](const std::vector<double>& d) {
    CoeffVector v;
    for (std::size_t j = 0; j < d.size(); ++j)
      if (d[j] != 0.0) v.push_back(offset + j + 1, d[j]);
    return v;
  };

  // Phase 1.
  for (std::size_t n = 1; n <= budget && 2 * n <= 1u << 14; ++n) {
    std::vector<double> y(2 * n), z(2 * n, 0.0);
    std::vector<Index> plus;
    for (std::size_t j = 0; j < 2 * n; ++j) {
      y[j] = j % 2 ? -1.0 : 1.0;
      if (j % 2 == 0) plus.push_back(offset + j + 1);
      if (j < n) z[j] = 0.5 * y[j];
    }
    T3Witness w{shifted(y), n, IndexSet(std::move(plus)), shifted(z), k};
    if (norm(project_complement(w.y, w.A)) > gap * norm(w.y - w.z)) return w;
  }

  // Phase 2.
  static constexpr double values[] = {1.0, -1.0, 0.5, -0.5};
  std::size_t used = 0;
  for (std::size_t len = 2; len <= 6; ++len) {
    std::optional<T3Witness> found;
    for_each_tuple(4, len, [&](std::span<const std::size_t> d) {
      std::vector<double> yd(len);
      for (std::size_t j = 0; j < len; ++j) yd[j] = values[d[j]];
      const CoeffVector y = shifted(yd);
      for (std::size_t m = 1; m < len && !found; ++m) {
        for (const IndexSet& A : greedy_sets(y, static_cast<std::ptrdiff_t>(m))) {
          const double lhs = norm(project_complement(y, A));
          for_each_combination(len, m, [&](std::span<const std::size_t> c) {
            std::vector<Index> S;
            for (auto o : c) S.push_back(offset + o + 1);
            for (double eta : {1.0, 0.5}) {
              CoeffVector z = project(y, IndexSet(S));
              z *= eta;
              if (++used > budget) return false;
              if (lhs > gap * norm(y - z)) {
                found = T3Witness{y, m, A, std::move(z), k};
                return false;
              }
            }
            return true;
          });
          if (found || used > budget) break;
        }
        if (used > budget) break;
      }
      return !found && used <= budget;
    });
    if (found) return found;
    if (used > budget) break;
  }
  return std::nullopt;
}

/// Default source: search_t3_witness with a fixed budget.
inline T3WitnessSource searched_witnesses(const NormOracle& norm, std::size_t budget = 100000) {
  return [norm, budget](int k, Index offset) { return search_t3_witness(norm, k, budget, offset); };
}

struct T3Block {
  T3Witness w;  // rescaled and placed
  int scale_exponent = 0;  // y = 2^{-e} * (source witness)
  std::size_t l = 0;
  Index offset = 0;  // s_{k-1}
  double gap_norm = 0;  // ||y_k - z_k||
};

struct T3Level {
  int i = 0;
  std::size_t s_i = 0;
  std::size_t m_next = 0;
  IndexSet B;  // B_{i+1}
  bool greedy_original = false;
  bool greedy_reordered = false;
  double residual = 0;  // ||x - P_{B_{i+1}} x||
  double gap_norm = 0;  // ||y_{i+1} - z_{i+1}||
  double shifted_error = 0;  // ||x - S_{s_i} x - z_{i+1}||
  bool lower_chain = false;  // residual >= 2^i gap
  bool upper_chain = false;  // shifted_error < 2 gap
  /// sigma^^ in the reordered basis at s_i + m_{i+1} (upper bound) and at s_i + m_i.
  double hathat = 0;
  double hathat_alt = 0;
  bool final_checked = false;
  bool final_holds = false;
  [[nodiscard]] bool pass() const {
    return greedy_original && greedy_reordered && lower_chain && upper_chain &&
           (!final_checked || final_holds);
  }
};

struct T3Assembly {
  std::vector<T3Block> blocks;
  CoeffVector x;
  std::vector<Index> permutation;
  std::vector<T3Level> levels;
  bool valid = false;
  /// Level at which the witness chain broke, if any.
  std::optional<int> failure_level;
  std::string failure;
};

namespace detail {

inline double min_modulus(const CoeffVector& v) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& e : v.entries()) m = std::min(m, std::abs(e.value));
  return m;
}

}  // namespace detail

/// Builds y_1..y_{depth+1} from the source, rescaled by powers of two so that
///   ||y_k|| <= 2^{-k},  ||y_{k+1}|| < 2^{-(k+1)} min_{j<=k} ||y_j - z_j||,
///   max |y_{k+1}| < min |y_k|,  consecutive block supports,
/// then x = sum y_k, B_{i+1} = {1..s_i} u A_{i+1} and the blockwise bijection
/// pi mapping the first m_j positions of block j onto supp(z_j), and verifies
/// each level i = 1..depth.
inline T3Assembly assemble_t3(const T3WitnessSource& source, int depth, const NormOracle& norm,
                              const FunctionalOptions& fopts = {}) {
  if (depth < 1 || depth > 30) throw domain_error("assemble_t3: depth must lie in [1, 30]");
  T3Assembly out;
  Index offset = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= depth + 1; ++k) {
    auto raw = source(k, offset);
    if (!raw) {
      out.failure_level = k;
      out.failure = "no witness at level " + std::to_string(k);
      return out;
    }
    if (auto err = t3_intake_error(*raw, k, offset, norm); !err.empty()) {
      out.failure_level = k;
      out.failure = "level " + std::to_string(k) + ": " + err;
      return out;
    }
    const double ny = norm(raw->y);
    const double maxc = raw->y.sup_norm();
    auto ok = [&](int e) {
      const double c = std::ldexp(1.0, -e);
      if (!(c * ny <= std::ldexp(1.0, -k))) return false;
      if (k > 1) {
        if (!(c * ny < std::ldexp(min_gap, -k))) return false;
        if (!(c * maxc < detail::min_modulus(out.blocks.back().w.y))) return false;
      }
      return true;
    };
    int e = -1100;
    while (e < 1100 && !ok(e)) ++e;
    if (e >= 1100) {
      out.failure_level = k;
      out.failure = "level " + std::to_string(k) + ": no power-of-two scale satisfies the size conditions";
      return out;
    }
    T3Block b;
    b.w = *raw;
    b.w.y *= std::ldexp(1.0, -e);
    b.w.z *= std::ldexp(1.0, -e);
    b.scale_exponent = e;
    b.l = raw->y.support_size();
    b.offset = offset;
    b.gap_norm = norm(b.w.y - b.w.z);
    if (!(b.gap_norm > 0.0) || detail::min_modulus(b.w.y) < std::numeric_limits<double>::min()) {
      out.failure_level = k;
      out.failure = "level " + std::to_string(k) + ": rescaled block underflows";
      return out;
    }
    if (auto err = t3_intake_error(b.w, k, offset, norm); !err.empty()) {
      out.failure_level = k;
      out.failure = "level " + std::to_string(k) + " after rescaling: " + err;
      return out;
    }
    min_gap = std::min(min_gap, b.gap_norm);
    offset += b.l;
    out.blocks.push_back(std::move(b));
  }

  for (const auto& b : out.blocks)
    for (const auto& en : b.w.y.entries()) out.x.push_back(en.index, en.value);

  // pi: on block j, the first m_j positions go to supp(z_j), the rest to the
  // remaining block positions, both in increasing order.
  for (const auto& b : out.blocks) {
    const IndexSet Z = b.w.z.support();
    for (Index n : Z) out.permutation.push_back(n);
    for (Index n = b.offset + 1; n <= b.offset + b.l; ++n)
      if (!Z.contains(n)) out.permutation.push_back(n);
  }
  const CoeffVector x_pi = reorder_coordinates(out.x, out.permutation);

  bool all = true;
  std::size_t s = 0;
  for (int i = 1; i <= depth; ++i) {
    const T3Block& cur = out.blocks[i - 1];
    const T3Block& next = out.blocks[i];
    s += cur.l;
    T3Level L;
    L.i = i;
    L.s_i = s;
    L.m_next = next.w.m;
    L.B = IndexSet::range(1, s).unite(next.w.A);
    L.greedy_original = is_greedy_set(out.x, L.B) && L.B.size() == s + next.w.m;
    L.greedy_reordered = is_greedy_set(x_pi, reordered_positions(L.B, out.permutation));
    L.residual = norm(project_complement(out.x, L.B));
    L.gap_norm = next.gap_norm;
    const CoeffVector shifted_target = partial_sum(out.x, static_cast<std::ptrdiff_t>(s)) + next.w.z;
    L.shifted_error = norm(out.x - shifted_target);
    L.lower_chain = L.residual >= std::ldexp(L.gap_norm, i);
    L.upper_chain = L.shifted_error < 2.0 * L.gap_norm;

    // sigma^^ in the reordered basis: distance to the span of the original
    // vectors e_{pi(1)}, ..., e_{pi(s_i + m_{i+1})}, warm-started at
    // S_{s_i} x + z_{i+1}, which lies in that span.
    const IndexSet span = reordered_prefix(out.permutation, s + next.w.m);
    std::vector<double> warm;
    for (Index n : span) warm.push_back(shifted_target[n]);
    L.hathat = dist_to_coordinate_span(out.x, span, norm, fopts, &warm).value;
    L.hathat_alt = dist_to_coordinate_span(out.x, reordered_prefix(out.permutation, s + cur.w.m), norm, fopts).value;
    if (i >= 2) {
      L.final_checked = true;
      L.final_holds = L.residual > std::ldexp(L.hathat, i - 1);
    }
    all = all && L.pass();
    out.levels.push_back(std::move(L));
  }
  out.valid = all;
  if (!all)
    for (const auto& L : out.levels) {
      if (L.pass()) continue;
      std::string what = !L.greedy_original    ? "B_{i+1} not greedy for x"
                         : !L.greedy_reordered ? "B_{i+1} not greedy in the reordered basis"
                         : !L.lower_chain      ? "||x - P_B x|| >= 2^i ||y - z|| fails"
                         : !L.upper_chain      ? "||x - S_s x - z|| < 2 ||y - z|| fails"
                                               : "final ratio bound fails";
      out.failure = "level " + std::to_string(L.i) + ": " + what;
      break;
    }
  return out;
}

inline json to_json(const T3Assembly& a) {
  json blocks = json::array();
  for (std::size_t k = 0; k < a.blocks.size(); ++k) {
    const auto& b = a.blocks[k];
    blocks.push_back({{"k", k + 1},
                      {"offset", b.offset},
                      {"l", b.l},
                      {"m", b.w.m},
                      {"scale_exponent", b.scale_exponent},
                      {"A", to_json(b.w.A)},
                      {"y", to_json(b.w.y)},
                      {"z", to_json(b.w.z)},
                      {"gap_norm", b.gap_norm}});
  }
  json levels = json::array();
  for (const auto& L : a.levels) {
    json row = {{"i", L.i},
                {"s_i", L.s_i},
                {"m_next", L.m_next},
                {"B", to_json(L.B)},
                {"greedy_original", L.greedy_original},
                {"greedy_reordered", L.greedy_reordered},
                {"residual", L.residual},
                {"gap_norm", L.gap_norm},
                {"shifted_error", L.shifted_error},
                {"hathat", L.hathat},
                {"hathat_alt", L.hathat_alt},
                {"pass", L.pass()}};
    if (L.final_checked) row["ratio"] = L.residual / L.hathat;
    levels.push_back(std::move(row));
  }
  json j = {{"valid", a.valid}, {"blocks", blocks}, {"permutation", a.permutation}, {"levels", levels}};
  if (a.failure_level) j["failure_level"] = *a.failure_level;
  if (!a.failure.empty()) j["failure"] = a.failure;
  return j;
}

}  // namespace greedylab
