// Copyright 2026 The greedylab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "greedylab/coeff_vector.hpp"
#include "greedylab/combinatorics.hpp"
#include "greedylab/spaces.hpp"
#include "greedylab/tga.hpp"

namespace greedylab {

struct FunctionalOptions {
  /// sigma_tilde is brute-forced exactly up to this support size.
  std::size_t exact_support_limit = 20;
  /// Node budget of the branch-and-bound / local search beyond that size.
  std::size_t search_node_cap = 5'000'000;
  /// Relative tolerance of one-dimensional minimizations.
  double line_tolerance = 1e-10;
  /// Relative improvement below which coordinate descent stops.
  double descent_tolerance = 1e-10;
  int descent_max_sweeps = 200;
};

/// Argmin data of a functional. Which fields are meaningful depends on the
/// functional: a set (sigma_tilde, lines), an interval (sigma_check), an order
/// k or n (min-over-index functionals), a scalar t (lines), per-position signs
/// or coefficients aligned with `set`.
struct Witness {
  IndexSet set;
  std::optional<IndexInterval> interval;
  std::optional<std::size_t> order;
  std::optional<double> t;
  std::vector<double> signs;
  std::vector<double> coefficients;
};

struct FunctionalValue {
  double value = 0.0;
  Witness witness;
  /// False when the value is only an upper bound (heuristic search or
  /// descent that did not converge).
  bool certified = true;
  std::string note;
};

enum class SigmaKind { tilde, check };

namespace detail {

/// Golden-section search for the minimum of a unimodal f on [lo, hi].
template <class F>
std::pair<double, double> golden_section(F&& f, double lo, double hi, double rel_tol) {
  constexpr double inv_phi = 0.6180339887498949;
  const double scale = std::max({std::abs(lo), std::abs(hi), std::numeric_limits<double>::min()});
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 400 && (b - a) > rel_tol * scale; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
}

/// Minimizes a function convex in t over the real line, starting from a
/// bracket and widening it while the minimum sits on an edge.
template <class F>
std::pair<double, double> minimize_convex_line(F&& f, double lo, double hi, double rel_tol) {
  auto best = golden_section(f, lo, hi, rel_tol);
  for (int grow = 0; grow < 60; ++grow) {
    const double width = hi - lo;
    const bool at_lo = best.first - lo < 1e-3 * width;
    const bool at_hi = hi - best.first < 1e-3 * width;
    if (!at_lo && !at_hi) break;
    if (at_lo) lo -= width;
    if (at_hi) hi += width;
    auto next = golden_section(f, lo, hi, rel_tol);
    if (next.second < best.second)
      best = next;
    else
      break;
  }
  // Compare against t = 0 so that a flat minimum reports the trivial scalar.
  const double f0 = f(0.0);
  if (f0 <= best.second) return {0.0, f0};
  return best;
}

/// Residual of x after removing the entries whose offsets are listed in
/// `removed` (increasing offsets into x.entries()).
inline void residual_without(const CoeffVector& x, std::span<const std::size_t> removed,
                             CoeffVector& out) {
  out.clear();
  const auto& e = x.entries();
  std::size_t r = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (r < removed.size() && removed[r] == i) {
      ++r;
      continue;
    }
    out.push_back(e[i].index, e[i].value);
  }
}

inline std::vector<Index> offsets_to_positions(const CoeffVector& x,
                                               std::span<const std::size_t> offsets) {
  std::vector<Index> v;
  v.reserve(offsets.size());
  for (auto o : offsets) v.push_back(x.entries()[o].index);
  return v;
}

}  // namespace detail

/// ||x - S_m(x)||
inline double tail_norm(const CoeffVector& x, std::ptrdiff_t m, const NormOracle& norm) {
  return norm(x - partial_sum(x, m));
}

/// sigma~_m(x) = inf { ||x - P_A(x)|| : |A| = m }.
inline FunctionalValue sigma_tilde(const CoeffVector& x, std::ptrdiff_t m, const NormOracle& norm,
                                   const FunctionalOptions& opts = {}) {
  if (m < 0) throw domain_error("sigma_tilde: m must be nonnegative");
  const auto mm = static_cast<std::size_t>(m);
  const std::size_t s = x.support_size();
  FunctionalValue out;
  if (mm == 0) {
    out.value = norm(x);
    return out;
  }
  if (mm >= s) {
    // Every admissible A containing supp(x) leaves nothing behind.
    out.value = norm(CoeffVector{});
    out.witness.set = canonical_greedy_set(x, m);
    return out;
  }

  CoeffVector buf;
  buf.reserve(s);
  if (s <= opts.exact_support_limit) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> arg;
    for_each_combination(s, mm, [&](std::span<const std::size_t> c) {
      detail::residual_without(x, c, buf);
      const double v = norm(buf);
      if (v < best) {
        best = v;
        arg.assign(c.begin(), c.end());
      }
      return true;
    });
    out.value = best;
    out.witness.set = IndexSet(detail::offsets_to_positions(x, arg));
    return out;
  }

  // Large supports. Start from the canonical greedy set, which is optimal for
  // symmetric monotone norms.
  const auto& e = x.entries();
  const IndexSet start = canonical_greedy_set(x, m);
  double best = norm(project_complement(x, start));
  IndexSet best_set = start;
  std::size_t nodes = 0;
  bool exhausted = false;

  if (norm.coordinatewise_monotone()) {
    // Branch and bound over "remove / keep" decisions in position order. The
    // kept entries so far bound the final residual from below.
    std::vector<std::size_t> removed;
    CoeffVector kept;
    kept.reserve(s);
    auto search = [&](auto&& self, std::size_t i) -> void {
      if (exhausted) return;
      if (++nodes > opts.search_node_cap) {
        exhausted = true;
        return;
      }
      const std::size_t left = mm - removed.size();
      if (left == 0) {
        CoeffVector r = kept;
        for (std::size_t j = i; j < s; ++j) r.push_back(e[j].index, e[j].value);
        const double v = norm(r);
        if (v < best) {
          best = v;
          best_set = IndexSet(detail::offsets_to_positions(x, removed));
        }
        return;
      }
      if (s - i < left) return;
      if (norm(kept) >= best) return;
      removed.push_back(i);
      self(self, i + 1);
      removed.pop_back();
      if (s - i - 1 >= left) {
        kept.push_back(e[i].index, e[i].value);
        self(self, i + 1);
        kept.pop_back();
      }
    };
    search(search, 0);
    out.value = best;
    out.witness.set = best_set;
    if (exhausted) {
      out.certified = false;
      out.note = "branch-and-bound node cap reached; best value found";
    }
    return out;
  }

  // Non-monotone norms: pairwise-swap local search from the greedy set.
  bool improved = true;
  while (improved && !exhausted) {
    improved = false;
    const IndexSet outside = x.support().minus(best_set);
    for (Index a : best_set) {
      for (Index b : outside) {
        if (++nodes > opts.search_node_cap) {
          exhausted = true;
          break;
        }
        IndexSet cand = best_set.minus(IndexSet{a}).unite(IndexSet{b});
        const double v = norm(project_complement(x, cand));
        if (v < best) {
          best = v;
          best_set = std::move(cand);
          improved = true;
          break;
        }
      }
      if (improved || exhausted) break;
    }
  }
  out.value = best;
  out.witness.set = best_set;
  out.certified = false;
  out.note = "heuristic local search (support above exact limit, norm not monotone)";
  return out;
}

/// sigma^_m(x) (consecutive) = inf { ||x - P_I(x)|| : I an interval, |I| = m }.
inline FunctionalValue sigma_check(const CoeffVector& x, std::ptrdiff_t m, const NormOracle& norm) {
  if (m < 0) throw domain_error("sigma_check: m must be nonnegative");
  const auto mm = static_cast<std::size_t>(m);
  FunctionalValue out;
  if (mm == 0) {
    out.value = norm(x);
    out.witness.interval = IndexInterval{1, 0};
    return out;
  }
  if (x.is_zero()) {
    out.value = norm(x);
    out.witness.interval = IndexInterval{1, mm};
    return out;
  }
  const Index lo = x.min_index();
  const Index hi = x.max_index();
  // Intervals missing the support hull all leave ||x||; one per side stands
  // in for them.
  std::vector<Index> starts;
  if (lo > mm) starts.push_back(lo - mm);
  for (Index r = lo >= mm ? lo - mm + 1 : 1; r <= hi; ++r) starts.push_back(r);
  starts.push_back(hi + 1);

  double best = std::numeric_limits<double>::infinity();
  IndexInterval arg{};
  CoeffVector buf;
  for (Index r : starts) {
    const IndexInterval I{r, mm};
    buf.clear();
    for (const auto& e : x.entries())
      if (!I.contains(e.index)) buf.push_back(e.index, e.value);
    const double v = norm(buf);
    if (v < best) {
      best = v;
      arg = I;
    }
  }
  out.value = best;
  out.witness.interval = arg;
  out.witness.set = arg.to_set();
  return out;
}

/// min_{0 <= n <= m} ||x - S_n(x)|| with the smallest minimizing n.
inline FunctionalValue best_prefix_tail(const CoeffVector& x, std::ptrdiff_t m,
                                        const NormOracle& norm) {
  if (m < 0) throw domain_error("best_prefix_tail: m must be nonnegative");
  const auto last = std::min<std::size_t>(static_cast<std::size_t>(m), x.max_index());
  FunctionalValue out;
  out.value = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n <= last; ++n) {
    const double v = tail_norm(x, static_cast<std::ptrdiff_t>(n), norm);
    if (v < out.value) {
      out.value = v;
      out.witness.order = n;
    }
  }
  return out;
}

/// dist(x, span{e_n : n in S}). Closed form for coordinatewise monotone norms
/// (keep x on S); otherwise cyclic coordinate descent with two starts (the
/// warm start, or x restricted to S, and zero).
inline FunctionalValue dist_to_coordinate_span(const CoeffVector& x, const IndexSet& S,
                                               const NormOracle& norm,
                                               const FunctionalOptions& opts = {},
                                               const std::vector<double>* warm_start = nullptr) {
  FunctionalValue out;
  if (norm.coordinatewise_monotone() || S.empty()) {
    out.value = norm(project_complement(x, S));
    for (const auto& e : x.entries())
      if (S.contains(e.index)) {
        out.witness.set = out.witness.set.unite(IndexSet{e.index});
        out.witness.coefficients.push_back(e.value);
      }
    return out;
  }
  if (warm_start && warm_start->size() != S.size())
    throw domain_error("dist_to_coordinate_span: warm start must have one value per position");

  const std::vector<Index>& pos = S.items();
  auto run = [&](std::vector<double> a) {
    CoeffVector r = x;
    for (std::size_t k = 0; k < pos.size(); ++k) r.set(pos[k], x[pos[k]] - a[k]);
    double value = norm(r);
    bool converged = false;
    for (int sweep = 0; sweep < opts.descent_max_sweeps; ++sweep) {
      const double before = value;
      for (std::size_t k = 0; k < pos.size(); ++k) {
        const Index n = pos[k];
        const double xn = x[n];
        auto f = [&](double c) {
          r.set(n, xn - c);
          return norm(r);
        };
        const double unit = norm(CoeffVector::from_entries({{n, 1.0}}));
        // For a norm, |c - a_k| > 2 ||r|| / ||e_n|| cannot improve on c = a_k.
        const double radius = 2.0 * value / unit + std::numeric_limits<double>::min();
        auto [c, v] = detail::golden_section(f, a[k] - radius, a[k] + radius, opts.line_tolerance);
        if (v < value) {
          a[k] = c;
          value = v;
        }
        r.set(n, xn - a[k]);
      }
      if (before - value <= opts.descent_tolerance * std::max(value, std::numeric_limits<double>::min())) {
        converged = true;
        break;
      }
    }
    return std::tuple{value, std::move(a), converged};
  };

  std::vector<double> first(pos.size());
  if (warm_start)
    first = *warm_start;
  else
    for (std::size_t k = 0; k < pos.size(); ++k) first[k] = x[pos[k]];
  auto [v1, a1, c1] = run(std::move(first));
  auto [v2, a2, c2] = run(std::vector<double>(pos.size(), 0.0));
  const bool take_second = v2 < v1;
  out.value = take_second ? v2 : v1;
  const auto& a = take_second ? a2 : a1;
  out.certified = take_second ? c2 : c1;
  out.note = out.certified ? "coordinate descent" : "coordinate descent did not converge";
  std::vector<Index> used;
  for (std::size_t k = 0; k < pos.size(); ++k)
    if (a[k] != 0.0) {
      used.push_back(pos[k]);
      out.witness.coefficients.push_back(a[k]);
    }
  out.witness.set = IndexSet(std::move(used));
  return out;
}

/// sigma^^_m(x) = inf { ||x - sum_{n in A} a_n e_n|| : A subset {1..m}, a_n scalars }.
/// The spans are nested, so the infimum is the distance to span{e_1..e_m}.
inline FunctionalValue sigma_hathat(const CoeffVector& x, std::ptrdiff_t m, const NormOracle& norm,
                                    const FunctionalOptions& opts = {}) {
  if (m < 0) throw domain_error("sigma_hathat: m must be nonnegative");
  return dist_to_coordinate_span(x, IndexSet::range(1, static_cast<std::size_t>(m)), norm, opts);
}

/// min_{0 <= k <= m} of sigma~_k or sigma^_k, with the smallest minimizing k
/// in witness.order.
inline FunctionalValue min_sigma(const CoeffVector& x, std::ptrdiff_t m, SigmaKind which,
                                 const NormOracle& norm, const FunctionalOptions& opts = {}) {
  if (m < 0) throw domain_error("min_sigma: m must be nonnegative");
  FunctionalValue best;
  best.value = std::numeric_limits<double>::infinity();
  for (std::ptrdiff_t k = 0; k <= m; ++k) {
    FunctionalValue v = which == SigmaKind::tilde ? sigma_tilde(x, k, norm, opts) : sigma_check(x, k, norm);
    if (v.value < best.value) {
      best = std::move(v);
      best.witness.order = static_cast<std::size_t>(k);
    } else if (!v.certified) {
      best.certified = false;
    }
    if (best.value == 0.0) break;
  }
  return best;
}

/// inf_t ||x - t 1_{eps B}|| with the minimizing t.
inline FunctionalValue dist_to_sign_line(const CoeffVector& x, const IndexSet& B,
                                         const SignPattern& eps, const NormOracle& norm,
                                         const FunctionalOptions& opts = {}) {
  FunctionalValue out;
  out.witness.set = B;
  for (Index n : B) out.witness.signs.push_back(eps.at(n));
  if (B.empty()) {
    out.value = norm(x);
    out.witness.t = 0.0;
    return out;
  }
  const CoeffVector line = indicator(B, eps);
  auto f = [&](double t) { return norm(x - t * line); };

  // c_n = eps_n x_n: the scalar t that zeroes coordinate n.
  std::vector<double> breakpoints;
  for (Index n : B) breakpoints.push_back(eps.at(n) * x[n]);

  const auto lp = norm.lp_exponent();
  if (lp && *lp <= 1.0) {
    // t -> sum |c_n - t|^p is concave (p < 1) or affine (p = 1) between
    // breakpoints, so a breakpoint (or 0) is optimal.
    breakpoints.push_back(0.0);
    std::sort(breakpoints.begin(), breakpoints.end(), [](double a, double b) {
      return std::abs(a) < std::abs(b) || (std::abs(a) == std::abs(b) && a < b);
    });
    out.value = std::numeric_limits<double>::infinity();
    for (double t : breakpoints) {
      const double v = f(t);
      if (v < out.value) {
        out.value = v;
        out.witness.t = t;
      }
    }
    return out;
  }
  if (lp && *lp == 2.0) {
    double t = 0.0;
    for (double c : breakpoints) t += c;
    t /= double(B.size());
    out.value = f(t);
    out.witness.t = t;
    return out;
  }
  const double span = std::max(2.0 * x.sup_norm(), std::numeric_limits<double>::min());
  if (norm.convexity() == 1.0) {
    auto [t, v] = detail::minimize_convex_line(f, -span, span, opts.line_tolerance);
    out.value = v;
    out.witness.t = t;
    return out;
  }
  // Quasi-norm: grid over the bracket plus the breakpoints, then refine
  // around the best grid point.
  std::vector<double> grid = breakpoints;
  constexpr int steps = 400;
  for (int i = 0; i <= steps; ++i) grid.push_back(-span + 2.0 * span * i / steps);
  grid.push_back(0.0);
  double bt = 0.0, bv = std::numeric_limits<double>::infinity();
  for (double t : grid) {
    const double v = f(t);
    if (v < bv) {
      bv = v;
      bt = t;
    }
  }
  const double h = 2.0 * span / steps;
  auto [t, v] = detail::golden_section(f, bt - h, bt + h, opts.line_tolerance);
  out.value = std::min(bv, v);
  out.witness.t = v < bv ? t : bt;
  out.certified = false;
  out.note = "non-convex quasi-norm: grid and refine";
  return out;
}

/// inf { ||x - t 1_I|| : t real, I an interval with I < A or A < I,
///       |I cap supp(x)| <= m }, for A in G(x, m).
inline FunctionalValue dist_to_interval_line(const CoeffVector& x, std::ptrdiff_t m,
                                             const IndexSet& A, const NormOracle& norm,
                                             const FunctionalOptions& opts = {}) {
  if (m < 0) throw domain_error("dist_to_interval_line: m must be nonnegative");
  if (A.size() != static_cast<std::size_t>(m) || !is_greedy_set(x, A))
    throw contract_violation("dist_to_interval_line: A must belong to G(x, m)");

  FunctionalValue out;
  out.value = norm(x);
  out.witness.interval = IndexInterval{1, 0};
  out.witness.t = 0.0;
  if (x.is_zero()) return out;

  const Index lo = x.min_index();
  const Index hi = x.max_index();
  const IndexSet support = x.support();
  auto admissible = [&](Index a, Index b) {
    const IndexSet I = IndexSet::range(a, b - a + 1);
    if (!(I.precedes(A) || A.precedes(I))) return false;
    return I.intersect(support).size() <= static_cast<std::size_t>(m);
  };
  std::vector<IndexInterval> candidates;
  if (lo > 1 && admissible(lo - 1, lo - 1)) candidates.push_back({lo - 1, 1});
  for (Index a = lo; a <= hi; ++a)
    for (Index b = a; b <= hi; ++b)
      if (admissible(a, b)) candidates.push_back({a, b - a + 1});
  const Index right = std::max(hi, A.empty() ? Index{0} : A.back()) + 1;
  candidates.push_back({right, 1});

  bool certified = true;
  for (const auto& I : candidates) {
    const IndexSet set = I.to_set();
    auto v = dist_to_sign_line(x, set, SignPattern::ones(set), norm, opts);
    certified = certified && v.certified;
    if (v.value < out.value) {
      out.value = v.value;
      out.witness.interval = I;
      out.witness.set = set;
      out.witness.t = v.witness.t;
    }
  }
  out.certified = certified;
  return out;
}

/// One step of the greedy algorithm: Lambda_m(x), the residual and the
/// benchmark functionals at that step.
struct GreedyRecord {
  CoeffVector x;
  std::size_t m = 0;
  IndexSet greedy_set;
  double residual_norm = 0;
  std::optional<double> sigma_tilde, sigma_check, sigma_hathat, tail;
};

inline GreedyRecord greedy_record(const CoeffVector& x, std::ptrdiff_t m, const NormOracle& norm,
                                  bool functionals = true, const FunctionalOptions& opts = {}) {
  GreedyRecord r;
  r.x = x;
  r.m = static_cast<std::size_t>(m);
  r.greedy_set = canonical_greedy_set(x, m);
  r.residual_norm = norm(project_complement(x, r.greedy_set));
  if (functionals) {
    r.sigma_tilde = sigma_tilde(x, m, norm, opts).value;
    r.sigma_check = sigma_check(x, m, norm).value;
    r.sigma_hathat = sigma_hathat(x, m, norm, opts).value;
    r.tail = tail_norm(x, m, norm);
  }
  return r;
}

}  // namespace greedylab
