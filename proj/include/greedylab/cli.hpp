// Copyright 2026 The greedylab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "greedylab/constants.hpp"
#include "greedylab/constructions.hpp"
#include "greedylab/functionals.hpp"
#include "greedylab/json_io.hpp"
#include "greedylab/sampling.hpp"
#include "greedylab/spaces.hpp"
#include "greedylab/tga.hpp"

namespace greedylab::cli {

enum ExitCode : int { exit_ok = 0, exit_usage = 2, exit_cap = 3, exit_math = 4 };

class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// CSV

struct CsvRow {
  std::string experiment;
  std::string space;
  Index dim = 0;
  std::optional<std::size_t> m;
  std::string quantity;
  double value = 0;
  json witness;
};

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string csv_header() { return "experiment,space,dim,m,quantity,value,witness_json\n"; }

inline std::string csv_line(const CsvRow& r) {
  std::string s = csv_field(r.experiment) + ',' + csv_field(r.space) + ',' + std::to_string(r.dim) + ',';
  if (r.m) s += std::to_string(*r.m);
  s += ',' + csv_field(r.quantity) + ',' + format_double(r.value) + ',';
  s += csv_field(r.witness.is_null() ? std::string("null") : r.witness.dump());
  return s + '\n';
}

inline std::string to_csv(const std::vector<CsvRow>& rows) {
  std::string s = csv_header();
  for (const auto& r : rows) s += csv_line(r);
  return s;
}

// ---------------------------------------------------------------------------
// Settings

struct Settings {
  std::string space;
  Index window = 64;
  Index dim = 0;  // 0: command default
  std::string grid = "auto";
  std::size_t samples = 0;  // 0: command default
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string output;
  std::size_t greedy_cap = 100000;
  std::size_t exact_support_limit = 20;
  double line_tolerance = 1e-10;

  // constants
  std::vector<std::string> quantities;
  std::size_t max_card = 0;
  Index democracy_window = 0;
  bool complex_signs = false;
  std::size_t partial_n = 4;

  // functionals / report
  std::string vectors;
  long long m = -1;
  long long max_m = -1;

  // construct / verify
  std::string kind;
  std::string suite;
  double C = 0;  // 0: command default
  double p = 1, q = 2;
  int depth = 0;  // 0: command default
  std::size_t budget = 100000;
  std::size_t triples = 10000;
  std::string instance;
};

struct Result {
  std::vector<CsvRow> rows;
  std::vector<std::string> summary;
  int exit_code = exit_ok;
  /// Alternative output (plot data) replacing the CSV report when set.
  std::optional<std::string> text;
  /// Construction artifact written to Settings::instance.
  std::optional<json> artifact;
};

/// lp:P | mixed:P,Q | interval[:B] | summing | weighted:P:w1,w2,...
inline NormOracle parse_space(const std::string& spec, Index window) {
  auto number = [&](std::string_view s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    double v;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw usage_error("bad number '" + std::string(s) + "' in space '" + spec + "'");
    return v;
  };
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  try {
    if (kind == "lp" && !rest.empty()) return NormOracle::lp(number(rest));
    if (kind == "mixed") {
      const auto comma = rest.find(',');
      if (comma == std::string::npos) throw usage_error("mixed space needs P,Q");
      const double p = number(std::string_view(rest).substr(0, comma));
      const double q = number(std::string_view(rest).substr(comma + 1));
      return build_mixed_instance(p, q, window).norm;
    }
    if (kind == "interval") return NormOracle::interval_summing(rest.empty() ? INFINITY : number(rest));
    if (kind == "summing" && rest.empty()) return NormOracle::summing();
    if (kind == "weighted") {
      const auto c2 = rest.find(':');
      if (c2 == std::string::npos) throw usage_error("weighted space needs P:w1,w2,...");
      std::vector<double> w;
      std::string_view ws = std::string_view(rest).substr(c2 + 1);
      while (!ws.empty()) {
        const auto c = ws.find(',');
        w.push_back(number(ws.substr(0, c)));
        ws = c == std::string_view::npos ? std::string_view{} : ws.substr(c + 1);
      }
      return NormOracle::weighted(number(std::string_view(rest).substr(0, c2)), std::move(w));
    }
  } catch (const domain_error& e) {
    throw usage_error(std::string("space '") + spec + "': " + e.what());
  }
  throw usage_error("unknown space '" + spec + "'");
}

namespace detail {

inline FunctionalOptions functional_options(const Settings& s) {
  FunctionalOptions f;
  f.exact_support_limit = s.exact_support_limit;
  f.line_tolerance = s.line_tolerance;
  return f;
}

inline EstimateOptions estimate_options(const Settings& s) {
  EstimateOptions e;
  e.workers = s.workers;
  e.functional = functional_options(s);
  e.greedy_cap = s.greedy_cap;
  return e;
}

inline std::string require_space(const Settings& s, const std::string& fallback = "") {
  if (s.space.empty() && fallback.empty()) throw usage_error("--space is required");
  return s.space.empty() ? fallback : s.space;
}

inline SampleFamily make_family(const Settings& s, Index default_dim, std::size_t default_samples) {
  const Index dim = s.dim ? s.dim : default_dim;
  const std::size_t count = s.samples ? s.samples : default_samples;
  std::string grid = s.grid;
  if (grid == "auto") grid = dim <= 6 ? "exhaustive-small" : "random";
  SampleFamily f;
  if (grid == "exhaustive-small" || grid == "exhaustive") {
    f = SampleFamily::exhaustive(dim, grid == "exhaustive" ? SampleFamily::certification_grid()
                                                           : SampleFamily::small_grid());
    if (f.size() > 100'000'000) throw usage_error("exhaustive grid too large for dim " + std::to_string(dim));
  } else if (grid == "random") {
    f = SampleFamily::random(dim, count, s.seed);
  } else if (grid == "random-grid") {
    f = SampleFamily::random(dim, count, s.seed, SampleFamily::small_grid());
  } else {
    throw usage_error("unknown grid '" + s.grid + "'");
  }
  if (dim == 0) throw usage_error("--dim must be positive");
  return f;
}

inline std::string tier(const SampleFamily& f) {
  return f.mode == SampleFamily::Mode::exhaustive ? "exhaustive" : "random";
}

inline CsvRow estimate_row(const std::string& experiment, const std::string& space, Index dim,
                           const ConstantEstimate& e, const std::string& tier_name) {
  json w = e.witness.is_object() ? e.witness : json::object();
  w["tier"] = tier_name;
  w["data"] = e.data;
  if (e.skipped) w["skipped"] = e.skipped;
  if (!e.note.empty()) w["note"] = e.note;
  return {experiment, space, dim, e.m, e.quantity, e.value, std::move(w)};
}

inline std::string describe(const ConstantEstimate& e) {
  std::string s = e.quantity + " >= " + format_double(e.value);
  s += e.exhaustive ? " (exhaustive" : " (sampled";
  s += ", " + std::to_string(e.data) + " data)";
  if (!e.note.empty()) s += " [" + e.note + "]";
  return s;
}

inline bool close_to(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace detail

// ---------------------------------------------------------------------------
// constants

inline const std::vector<std::string>& default_constant_quantities() {
  static const std::vector<std::string> q = {"C_q",  "C_l",    "K",     "Delta", "Delta_s",
                                             "Delta_d", "Delta_sd", "Delta_c", "C_a", "C_ca",
                                             "C_pg", "C_spg", "C_sspg"};
  return q;
}

inline Result cmd_constants(const Settings& s) {
  Result res;
  const std::string space = detail::require_space(s);
  const NormOracle norm = parse_space(space, s.window);
  const SampleFamily fam = detail::make_family(s, 6, 200);
  const auto eo = detail::estimate_options(s);
  const std::string ex = "constants";
  const std::string t = detail::tier(fam);
  auto want = s.quantities.empty() ? default_constant_quantities() : s.quantities;

  auto wanted = [&](const std::string& q) { return std::find(want.begin(), want.end(), q) != want.end(); };
  for (const auto& q : want) {
    static const std::vector<std::string> known = {
        "C_q", "C_l", "K", "Delta", "Delta_s", "Delta_d", "Delta_sd", "Delta_c", "C_a", "C_ca", "C_pg",
        "C_spg", "C_sspg", "C_a_min", "C_ca_min", "C_sign_line", "C_interval_line", "partial_democracy"};
    if (std::find(known.begin(), known.end(), q) == known.end()) throw usage_error("unknown quantity '" + q + "'");
  }

  std::vector<ConstantEstimate> ests;
  {
    const bool qg = wanted("C_q") || wanted("C_l");
    std::vector<Benchmark> bs;
    for (Benchmark b : {Benchmark::tilde, Benchmark::check, Benchmark::tail, Benchmark::prefix_tail,
                        Benchmark::hathat, Benchmark::min_tilde, Benchmark::min_check})
      if (wanted(benchmark_quantity(b))) bs.push_back(b);
    if (qg || !bs.empty()) {
      auto v = estimate_greedy_constants(norm, fam, bs, qg, eo);
      for (auto& e : v)
        if (wanted(e.quantity)) ests.push_back(std::move(e));
    }
  }
  if (wanted("K")) ests.push_back(estimate_unconditionality(norm, fam, eo));
  {
    const Index W = s.democracy_window ? s.democracy_window : std::min<Index>(fam.dimension, 16);
    const std::size_t card = s.max_card ? s.max_card : std::max<std::size_t>(1, std::min<std::size_t>(W / 2, 4));
    DemocracyOptions dopt;
    dopt.window = W;
    dopt.field = s.complex_signs ? Field::complex : Field::real;
    for (auto f : {DemocracyFlavor::plain, DemocracyFlavor::super, DemocracyFlavor::disjoint,
                   DemocracyFlavor::disjoint_super, DemocracyFlavor::conservative}) {
      if (!wanted(democracy_quantity(f))) continue;
      const bool pairwise = f != DemocracyFlavor::plain && f != DemocracyFlavor::super;
      if (pairwise && W < 2 * card) {
        res.summary.push_back(democracy_quantity(f) + " skipped: window " + std::to_string(W) +
                              " too small for disjoint sets of size " + std::to_string(card));
        continue;
      }
      ests.push_back(estimate_democracy(norm, card, f, dopt));
    }
  }
  if (wanted("C_sign_line")) ests.push_back(estimate_sign_line_constant(norm, fam, eo));
  if (wanted("C_interval_line")) ests.push_back(estimate_interval_line_constant(norm, fam, eo));

  bool capped = false;
  for (const auto& e : ests) {
    const bool democracy = e.quantity.rfind("Delta", 0) == 0;
    res.rows.push_back(detail::estimate_row(ex, norm.name(), fam.dimension, e, democracy ? "exhaustive" : t));
    res.summary.push_back(detail::describe(e));
    if (e.capped && fam.mode == SampleFamily::Mode::exhaustive) capped = true;
  }

  const bool partial = norm.kind() == NormKind::mixed && (s.quantities.empty() || wanted("partial_democracy"));
  if (partial) {
    const auto spine = norm.spine();
    std::optional<IndexSet> A;
    if (spine.size() >= s.partial_n) A = IndexSet(std::vector<Index>(spine.begin(), spine.begin() + static_cast<std::ptrdiff_t>(s.partial_n)));
    auto w = partial_democracy_witness(norm, s.partial_n, s.window, 1.0 + 1e-9, A);
    if (!w) {
      res.summary.push_back("partial democracy: no failure witness for n = " + std::to_string(s.partial_n));
    } else if (w->inconclusive) {
      res.summary.push_back("partial democracy: inconclusive (" + w->note + ")");
    } else {
      for (const auto& row : w->rows)
        res.rows.push_back({ex, norm.name(), s.window, s.partial_n, "partial_democracy", row.ratio,
                            json{{"A", to_json(w->A)}, {"D_through", row.excluded_through}, {"B", to_json(row.B)}}});
      res.rows.push_back({ex, norm.name(), s.window, s.partial_n, "partial_democracy_min", w->min_ratio,
                          json{{"A", to_json(w->A)}, {"rows", w->rows.size()}}});
      res.summary.push_back("partial democracy fails: ratio >= " + format_double(w->min_ratio) +
                            " for every exclusion set up to " + std::to_string(s.window));
    }
  }
  if (capped) {
    res.summary.push_back("certification tier: greedy-set cap exceeded");
    res.exit_code = exit_cap;
  }
  return res;
}

// ---------------------------------------------------------------------------
// functionals / report

inline std::vector<CoeffVector> load_vectors(const std::string& path) {
  if (path.empty()) throw usage_error("--vectors is required");
  try {
    if (path == "-") return read_vectors(std::cin);
    std::ifstream in(path);
    if (!in) throw usage_error("cannot open '" + path + "'");
    return read_vectors(in);
  } catch (const parse_error& e) {
    throw usage_error(std::string("vector file: ") + e.what());
  }
}

inline Result cmd_functionals(const Settings& s) {
  Result res;
  const NormOracle norm = parse_space(detail::require_space(s), s.window);
  if (s.m < 0) throw usage_error("--m must be a nonnegative integer");
  const auto vs = load_vectors(s.vectors);
  const auto fo = detail::functional_options(s);
  const auto m = static_cast<std::ptrdiff_t>(s.m);
  std::size_t violations = 0;
  for (std::size_t v = 0; v < vs.size(); ++v) {
    const CoeffVector& x = vs[v];
    struct Named {
      const char* name;
      FunctionalValue value;
    };
    std::vector<Named> vals;
    vals.push_back({"sigma_tilde", sigma_tilde(x, m, norm, fo)});
    vals.push_back({"sigma_check", sigma_check(x, m, norm)});
    vals.push_back({"sigma_hathat", sigma_hathat(x, m, norm, fo)});
    vals.push_back({"tail", benchmark_value(x, static_cast<std::size_t>(m), Benchmark::tail, norm, fo)});
    vals.push_back({"prefix_tail", best_prefix_tail(x, m, norm)});
    vals.push_back({"min_sigma_tilde", min_sigma(x, m, SigmaKind::tilde, norm, fo)});
    vals.push_back({"min_sigma_check", min_sigma(x, m, SigmaKind::check, norm, fo)});
    for (const auto& [name, fv] : vals) {
      json w = {{"vector", v + 1}, {"x", to_json(x)}, {"witness", to_json(fv.witness)}};
      if (!fv.certified) w["certified"] = false;
      res.rows.push_back({"functionals", norm.name(), x.max_index(), static_cast<std::size_t>(m), name, fv.value, w});
    }
    const double t = vals[0].value.value, c = vals[1].value.value, tail = vals[3].value.value;
    const InequalityCheck a{t, c}, b{c, tail};
    for (const auto& [chk, what] : {std::pair{a, "sigma_tilde <= sigma_check"}, std::pair{b, "sigma_check <= tail"}}) {
      if (chk.holds()) continue;
      ++violations;
      res.rows.push_back({"functionals", norm.name(), x.max_index(), static_cast<std::size_t>(m), "VIOLATION",
                          chk.lhs - chk.rhs,
                          json{{"vector", v + 1}, {"inequality", what}, {"lhs", chk.lhs}, {"rhs", chk.rhs}}});
    }
  }
  res.summary.push_back(std::to_string(vs.size()) + " vectors, " + std::to_string(violations) + " chain violations");
  if (violations) res.exit_code = exit_math;
  return res;
}

/// Plot data: one line per (vector, m).
inline Result cmd_report(const Settings& s) {
  Result res;
  const NormOracle norm = parse_space(detail::require_space(s), s.window);
  const auto vs = load_vectors(s.vectors);
  const auto fo = detail::functional_options(s);
  std::string out = "vector,m,sigma_tilde,sigma_check,sigma_hathat,prefix_tail,tail,tga_residual\n";
  for (std::size_t v = 0; v < vs.size(); ++v) {
    const CoeffVector& x = vs[v];
    const long long last = s.max_m >= 0 ? s.max_m : static_cast<long long>(x.max_index());
    for (long long mm = 0; mm <= last; ++mm) {
      const auto m = static_cast<std::ptrdiff_t>(mm);
      const double tga = norm(project_complement(x, canonical_greedy_set(x, m)));
      out += std::to_string(v + 1) + ',' + std::to_string(mm) + ',' +
             format_double(sigma_tilde(x, m, norm, fo).value) + ',' + format_double(sigma_check(x, m, norm).value) +
             ',' + format_double(sigma_hathat(x, m, norm, fo).value) + ',' +
             format_double(best_prefix_tail(x, m, norm).value) + ',' + format_double(tail_norm(x, m, norm)) + ',' +
             format_double(tga) + '\n';
    }
  }
  res.text = std::move(out);
  res.summary.push_back(std::to_string(vs.size()) + " vectors");
  return res;
}

// ---------------------------------------------------------------------------
// construct

namespace detail {

inline void construct_e1(const Settings& s, Result& res) {
  if (!(s.C > 1.0)) throw usage_error("construct e1: --C must exceed 1");
  const auto inst = build_e1(s.C);
  const auto rep = verify_e1(inst);
  const std::string ex = "construct_e1";
  const std::string space = "lp:1";
  const Index dim = inst.x.max_index();
  const json base = {{"instance", to_json(inst)}};
  auto with = [&](const FunctionalValue& f) {
    json w = base;
    w["witness"] = to_json(f.witness);
    return w;
  };
  res.rows.push_back({ex, space, dim, inst.m, "sigma_tilde", rep.sigma_tilde.value, with(rep.sigma_tilde)});
  res.rows.push_back({ex, space, dim, inst.m, "sigma_check", rep.sigma_check.value, with(rep.sigma_check)});
  const double ratio = rep.sigma_check.value / rep.sigma_tilde.value;
  res.rows.push_back({ex, space, dim, inst.m, "check_over_tilde", ratio, base});
  res.artifact = json{{"kind", "e1"}, {"instance", to_json(inst)},
                      {"sigma_tilde", rep.sigma_tilde.value}, {"sigma_check", rep.sigma_check.value}};
  if (rep.pass()) {
    res.summary.push_back("PASS e1 C=" + format_double(s.C) + ": sigma_tilde = " + format_double(rep.sigma_tilde.value) +
                          ", sigma_check = " + format_double(rep.sigma_check.value) + " > C");
  } else {
    res.summary.push_back(std::string("FAIL e1: ") + (!rep.tilde_is_one ? "sigma_tilde != 1" : "sigma_check <= C"));
    res.exit_code = exit_math;
  }
}

/// Shared by `construct mixed` and `verify example4`.
inline void mixed_checks(const Settings& s, Result& res, const std::string& ex) {
  const Index window = s.window;
  MixedInstance inst;
  try {
    inst = build_mixed_instance(s.p, s.q, window);
  } catch (const domain_error& e) {
    throw usage_error(e.what());
  }
  const double C = s.C > 0 ? s.C : std::pow(2.0, 1.0 + 1.0 / s.p);
  MixedReportOptions mo;
  mo.seed = s.seed;
  mo.workers = s.workers;
  mo.interval_triples = s.triples;
  mo.democracy_cardinality = s.partial_n;
  mo.interval_C = C;
  const auto rep = mixed_instance_report(inst, mo);
  const std::string space = inst.norm.name();

  bool spine_ok = !inst.spine.empty();
  for (std::size_t k = 0; k < inst.spine.size(); ++k) {
    const double bound = std::pow(double(k + 2), s.q / s.p);
    if (!(double(inst.spine[k]) > bound)) spine_ok = false;
    if (k + 1 < inst.spine.size() && inst.spine[k + 1] < 2 * inst.spine[k] + 1) spine_ok = false;
  }
  const bool k_ok = detail::close_to(rep.unconditionality.value, 1.0, 1e-9);
  const double expected = std::pow(double(s.partial_n), 1.0 / s.p - 1.0 / s.q);
  const bool pd_ok = rep.partial_democracy && !rep.partial_democracy->inconclusive &&
                     rep.partial_democracy->min_ratio >= expected * (1.0 - 1e-12);

  res.rows.push_back({ex, space, window, std::nullopt, "spine_length", double(inst.spine.size()),
                      json{{"spine", inst.spine}}});
  res.rows.push_back(estimate_row(ex, space, window, rep.unconditionality, "random"));
  res.rows.push_back({ex, space, window, s.partial_n, "spine_vs_offspine", rep.spine_vs_offspine, nullptr});
  if (rep.partial_democracy && !rep.partial_democracy->inconclusive) {
    const auto& pd = *rep.partial_democracy;
    json rows = json::array();
    for (const auto& r : pd.rows) rows.push_back({{"D_through", r.excluded_through}, {"B", to_json(r.B)}, {"ratio", r.ratio}});
    res.rows.push_back({ex, space, window, s.partial_n, "partial_democracy_min", pd.min_ratio,
                        json{{"A", to_json(pd.A)}, {"rows", rows}}});
  }
  res.rows.push_back({ex, space, window, std::nullopt, "intervals_worst_ratio", rep.intervals.worst_ratio,
                      rep.intervals.witness});
  res.rows.push_back({ex, space, window, std::nullopt, "intervals_violations", double(rep.intervals.violations),
                      json{{"C", C}, {"triples", rep.intervals.triples}, {"skipped", rep.intervals.skipped}}});

  auto line = [&](bool ok, const std::string& what) {
    res.summary.push_back((ok ? "PASS " : "FAIL ") + what);
    if (!ok) res.exit_code = exit_math;
  };
  std::string sp;
  for (auto v : inst.spine) sp += (sp.empty() ? "" : ",") + std::to_string(v);
  line(spine_ok, "spine (" + sp + ") satisfies s_k > (k+1)^(q/p) and s_{k+1} >= 2 s_k + 1");
  line(k_ok, "unconditionality estimate " + format_double(rep.unconditionality.value) + " = 1");
  line(pd_ok, "partial democracy fails: min ratio " +
                  (rep.partial_democracy ? format_double(rep.partial_democracy->min_ratio) : std::string("none")) +
                  " >= " + format_double(expected));
  line(rep.intervals.pass, "intervals plus one-dimensional bound with C = " + format_double(C) + ": worst ratio " +
                               format_double(rep.intervals.worst_ratio) + " over " +
                               std::to_string(rep.intervals.triples) + " triples");
  res.artifact = json{{"kind", "mixed"}, {"p", s.p}, {"q", s.q}, {"window", window}, {"spine", inst.spine}};
}

inline void construct_t3(const Settings& s, Result& res) {
  const NormOracle norm = parse_space(s.space.empty() ? "summing" : s.space, s.window);
  const int depth = s.depth ? s.depth : 4;
  if (depth < 1 || depth > 30) throw usage_error("--depth must lie in [1, 30]");
  const auto a = assemble_t3(searched_witnesses(norm, s.budget), depth, norm, functional_options(s));
  res.artifact = to_json(a);
  const std::string ex = "construct_t3";
  const Index dim = a.x.max_index();
  for (const auto& L : a.levels) {
    const std::size_t idx = L.s_i + L.m_next;
    json w = {{"i", L.i}, {"B", to_json(L.B)}, {"residual", L.residual}, {"gap_norm", L.gap_norm},
              {"shifted_error", L.shifted_error}, {"hathat", L.hathat}, {"hathat_alt", L.hathat_alt}};
    res.rows.push_back({ex, norm.name(), dim, idx, "residual_over_gap", L.residual / L.gap_norm, w});
    res.rows.push_back({ex, norm.name(), dim, idx, "shifted_error_over_gap", L.shifted_error / L.gap_norm, w});
    if (L.final_checked) res.rows.push_back({ex, norm.name(), dim, idx, "residual_over_hathat", L.residual / L.hathat, w});
    std::string msg = "level " + std::to_string(L.i) + ": residual/gap = " + format_double(L.residual / L.gap_norm);
    if (L.final_checked)
      msg += ", residual/hathat = " + format_double(L.residual / L.hathat) + " vs 2^(i-1) = " +
             format_double(std::ldexp(1.0, L.i - 1));
    res.summary.push_back((L.pass() ? "PASS " : "FAIL ") + msg);
  }
  if (a.valid) {
    res.summary.push_back("PASS assembly depth " + std::to_string(depth));
  } else {
    res.summary.push_back("FAIL assembly: " + a.failure);
    res.exit_code = exit_math;
  }
}

}  // namespace detail

inline Result cmd_construct(const Settings& s) {
  Result res;
  if (s.kind == "e1") detail::construct_e1(s, res);
  else if (s.kind == "mixed") detail::mixed_checks(s, res, "construct_mixed");
  else if (s.kind == "t3") detail::construct_t3(s, res);
  else throw usage_error("unknown construction '" + s.kind + "' (e1|mixed|t3)");
  return res;
}

// ---------------------------------------------------------------------------
// verify

namespace detail {

struct FirstViolation {
  std::size_t count = 0;
  json witness;
  void add(json w) {
    if (count++ == 0) witness = std::move(w);
  }
  void merge(FirstViolation& o) {
    if (count == 0) witness = std::move(o.witness);
    count += o.count;
  }
};

inline void verify_chain(const Settings& s, Result& res) {
  const std::string space = require_space(s);
  const NormOracle norm = parse_space(space, s.window);
  Settings t = s;
  if (t.grid == "auto") t.grid = "random";
  const SampleFamily fam = make_family(t, 10, 1000);
  const auto fo = functional_options(s);
  const bool lp = norm.kind() == NormKind::lp;
  enum { chain, hathat, identity, schauder, monotone, n_checks };
  static const char* names[] = {"chain_violations", "hathat_violations", "prefix_identity_violations",
                                "schauder_violations", "monotonicity_violations"};

  auto body = [&](std::size_t i, std::vector<FirstViolation>& acc) {
    const CoeffVector x = fam.at(i);
    double prev = norm(x);
    for (std::size_t m = 0; m <= fam.dimension; ++m) {
      const auto mm = static_cast<std::ptrdiff_t>(m);
      const double t = sigma_tilde(x, mm, norm, fo).value;
      const double c = sigma_check(x, mm, norm).value;
      const double tail = tail_norm(x, mm, norm);
      const double h = sigma_hathat(x, mm, norm, fo).value;
      auto w = [&](const char* what, double l, double r) {
        return json{{"x", to_json(x)}, {"m", m}, {"inequality", what}, {"lhs", l}, {"rhs", r}};
      };
      if (!InequalityCheck{t, c}.holds()) acc[chain].add(w("sigma_tilde <= sigma_check", t, c));
      if (!InequalityCheck{c, tail}.holds()) acc[chain].add(w("sigma_check <= tail", c, tail));
      if (!InequalityCheck{h, tail}.holds()) acc[hathat].add(w("sigma_hathat <= tail", h, tail));
      if (lp && !close_to(h, tail, 1e-9)) acc[identity].add(w("sigma_hathat == tail", h, tail));
      if (lp && !InequalityCheck{tail, 2.0 * h}.holds()) acc[schauder].add(w("tail <= 2 sigma_hathat", tail, 2 * h));
      if (!InequalityCheck{t, prev}.holds()) acc[monotone].add(w("sigma_tilde_m <= sigma_tilde_{m-1}", t, prev));
      prev = t;
    }
  };
  auto merge = [](std::vector<FirstViolation>& a, std::vector<FirstViolation>& b) {
    for (std::size_t k = 0; k < a.size(); ++k) a[k].merge(b[k]);
  };
  auto acc = parallel_reduce(fam.size(), s.workers, std::vector<FirstViolation>(n_checks), body, merge);
  std::size_t total = 0;
  for (int k = 0; k < n_checks; ++k) {
    if (!lp && (k == identity || k == schauder)) continue;
    res.rows.push_back({"verify_chain", norm.name(), fam.dimension, std::nullopt, names[k], double(acc[k].count),
                        acc[k].witness});
    total += acc[k].count;
  }
  res.summary.push_back((total ? "FAIL" : "PASS") + std::string(" chain: ") + std::to_string(fam.size()) +
                        " vectors, dim " + std::to_string(fam.dimension) + ", " + std::to_string(total) + " violations");
  if (total) res.exit_code = exit_math;
}

inline void verify_aabw(const Settings& s, Result& res) {
  const NormOracle norm = parse_space(require_space(s), s.window);
  const Index dim = s.dim ? s.dim : 6;
  const std::size_t count = s.samples ? s.samples : 1000;
  enum { tri, subsets, signs, comb, n_checks };
  static const char* names[] = {"p_triangle_violations", "aabw_subsets_violations", "aabw_signs_violations",
                                "aabw_combination_violations"};
  auto body = [&](std::size_t i, std::vector<FirstViolation>& acc) {
    auto gen = sample_rng(s.seed, i, 3);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0), unit(0.0, 1.0), sym(-1.0, 1.0);
    auto vec = [&] {
      std::vector<double> d(dim);
      for (auto& v : d) v = unit(gen) < 0.25 ? 0.0 : coeff(gen);
      return CoeffVector::from_dense(d);
    };
    const CoeffVector y = vec();
    const std::size_t J = std::uniform_int_distribution<std::size_t>(1, 6)(gen);
    std::vector<CoeffVector> xs;
    for (std::size_t k = 0; k < J; ++k) xs.push_back(vec());
    std::vector<double> a01(J), a11(J);
    for (auto& v : a01) v = unit(gen);
    for (auto& v : a11) v = sym(gen);
    auto w = [&](const char* what, const InequalityCheck& c) {
      json xj = json::array();
      for (const auto& v : xs) xj.push_back(to_json(v));
      return json{{"sample", i}, {"check", what}, {"y", to_json(y)}, {"xs", xj}, {"lhs", c.lhs}, {"rhs", c.rhs}};
    };
    if (auto c = check_p_triangle(norm, y, xs[0]); !c.holds()) acc[tri].add(w("p_triangle", c));
    if (auto c = check_aabw_subsets(norm, y, xs, a01); !c.holds()) acc[subsets].add(w("subsets", c));
    if (auto c = check_aabw_signs(norm, y, xs, a11); !c.holds()) acc[signs].add(w("signs", c));
    if (auto c = check_aabw_real_combination(norm, xs, a11); !c.holds()) acc[comb].add(w("combination", c));
  };
  auto merge = [](std::vector<FirstViolation>& a, std::vector<FirstViolation>& b) {
    for (std::size_t k = 0; k < a.size(); ++k) a[k].merge(b[k]);
  };
  auto acc = parallel_reduce(count, s.workers, std::vector<FirstViolation>(n_checks), body, merge);
  std::size_t total = 0;
  for (int k = 0; k < n_checks; ++k) {
    res.rows.push_back({"verify_aabw", norm.name(), dim, std::nullopt, names[k], double(acc[k].count), acc[k].witness});
    total += acc[k].count;
  }
  res.summary.push_back((total ? "FAIL" : "PASS") + std::string(" convexity checks: ") + std::to_string(count) +
                        " samples, " + std::to_string(total) + " violations");
  if (total) res.exit_code = exit_math;
}

inline void verify_prop1dim(const Settings& s, Result& res) {
  const std::string space = s.space.empty() ? "lp:1" : s.space;
  const NormOracle norm = parse_space(space, s.window);
  const SampleFamily fam = make_family(s, 6, 200);
  const auto eo = estimate_options(s);
  const std::string ex = "verify_prop1dim";
  const std::string t = tier(fam);
  const Benchmark tilde[] = {Benchmark::tilde};
  auto g = estimate_greedy_constants(norm, fam, tilde, true, eo);
  const Index W = std::min<Index>(fam.dimension, 16);
  const std::size_t card = std::max<std::size_t>(1, std::min<std::size_t>(W / 2, 4));
  DemocracyOptions dopt;
  dopt.window = W;
  const auto dsd = estimate_democracy(norm, card, DemocracyFlavor::disjoint_super, dopt);
  const double p = norm.convexity();
  const double bound = prop_1dim_constant(g[1].value, g[0].value, g[2].value, dsd.value, p);
  const auto line = estimate_sign_line_constant(norm, fam, eo);
  const auto interval = estimate_interval_line_constant(norm, fam, eo);
  for (const auto& e : g) res.rows.push_back(estimate_row(ex, norm.name(), fam.dimension, e, t));
  res.rows.push_back(estimate_row(ex, norm.name(), fam.dimension, dsd, "exhaustive"));
  res.rows.push_back({ex, norm.name(), fam.dimension, std::nullopt, "C_bound", bound,
                      json{{"C_l", g[1].value}, {"C_q", g[0].value}, {"C_a", g[2].value}, {"Delta_sd", dsd.value}, {"p", p}}});
  res.rows.push_back(estimate_row(ex, norm.name(), fam.dimension, line, t));
  res.rows.push_back(estimate_row(ex, norm.name(), fam.dimension, interval, t));
  const bool ok = line.value >= 1.0 - 1e-9 && line.value <= bound * (1.0 + 1e-9);
  res.summary.push_back(describe(line));
  res.summary.push_back(describe(interval));
  res.summary.push_back((ok ? "PASS" : "FAIL") + std::string(" sign-line constant ") + format_double(line.value) +
                        " within [1, " + format_double(bound) + "]");
  if (!ok) res.exit_code = exit_math;
}

inline void verify_theorem_t1(const Settings& s, Result& res) {
  const std::string space = s.space.empty() ? "lp:1" : s.space;
  const NormOracle norm = parse_space(space, s.window);
  const SampleFamily fam = make_family(s, 6, 200);
  const std::string ex = "verify_theorem_t1";
  const Benchmark bs[] = {Benchmark::tilde, Benchmark::check, Benchmark::min_tilde, Benchmark::min_check};
  auto e = estimate_greedy_constants(norm, fam, bs, false, estimate_options(s));
  for (const auto& v : e) res.rows.push_back(estimate_row(ex, norm.name(), fam.dimension, v, tier(fam)));
  const double a = e[0].value, ca = e[1].value, amin = e[2].value, camin = e[3].value;
  auto check = [&](bool ok, const std::string& what) {
    res.summary.push_back((ok ? "PASS " : "FAIL ") + what);
    if (!ok) res.exit_code = exit_math;
  };
  auto ge = [](double l, double r) { return l >= r - 1e-9 * std::max(1.0, std::abs(r)); };
  check(ge(a, ca), "C_a " + format_double(a) + " >= C_ca " + format_double(ca));
  check(ge(amin, a), "C_a_min " + format_double(amin) + " >= C_a " + format_double(a));
  check(ge(camin, ca), "C_ca_min " + format_double(camin) + " >= C_ca " + format_double(ca));
  if (norm.convexity() >= 1.0 && ca <= 1.0 + 1e-9)
    check(a <= 1.0 + 1e-9, "1-CAG with p = 1 gives C_a = " + format_double(a) + " = 1");
}

}  // namespace detail

inline Result cmd_verify(const Settings& s) {
  Result res;
  if (s.suite == "chain") detail::verify_chain(s, res);
  else if (s.suite == "prop1dim") detail::verify_prop1dim(s, res);
  else if (s.suite == "theorem-t1") detail::verify_theorem_t1(s, res);
  else if (s.suite == "example4") detail::mixed_checks(s, res, "verify_example4");
  else if (s.suite == "aabw") detail::verify_aabw(s, res);
  else throw usage_error("unknown suite '" + s.suite + "' (chain|prop1dim|theorem-t1|example4|aabw)");
  return res;
}

// ---------------------------------------------------------------------------
// Entry point

/// Writes the CSV (or plot data) to `out` or to --output, the summary to
/// `err`, and returns the exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"greedylab: thresholding greedy algorithm experiments"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option values; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  Settings s;

  auto common = [&](CLI::App* c) {
    c->add_option("--window", s.window, "Index window of the mixed model and of partial democracy");
    c->add_option("--seed", s.seed, "Seed of sampled families");
    c->add_option("--workers", s.workers, "Worker threads (GREEDYLAB_WORKERS overrides)")->check(CLI::PositiveNumber);
    c->add_option("--output,-o", s.output, "Write the CSV here instead of stdout");
    c->add_option("--greedy-cap", s.greedy_cap, "Maximum number of greedy sets per (x, m)");
    c->add_option("--exact-support-limit", s.exact_support_limit, "Support size up to which sigma~ is brute-forced");
    c->add_option("--line-tolerance", s.line_tolerance, "Relative tolerance of one-dimensional minimizations");
  };
  auto family = [&](CLI::App* c) {
    c->add_option("--space", s.space, "lp:P | mixed:P,Q | interval[:B] | summing | weighted:P:w1,...");
    c->add_option("--dim", s.dim, "Dimension of the sample family");
    c->add_option("--grid", s.grid, "auto | exhaustive-small | exhaustive | random | random-grid");
    c->add_option("--samples", s.samples, "Number of random samples");
  };

  auto* constants = app.add_subcommand("constants", "Estimate greedy-type constants");
  common(constants);
  family(constants);
  constants->add_option("--quantities", s.quantities, "Subset of constants to estimate")->delimiter(',');
  constants->add_option("--max-card", s.max_card, "Largest cardinality in democracy scans");
  constants->add_option("--democracy-window", s.democracy_window, "Index window of democracy scans");
  constants->add_flag("--complex-signs", s.complex_signs, "Use 8 unit-circle points for sign suprema");
  constants->add_option("--partial-n", s.partial_n, "Cardinality of the partial democracy witness");

  auto* functionals = app.add_subcommand("functionals", "Evaluate the error functionals on vectors");
  common(functionals);
  functionals->add_option("--space", s.space, "Norm model");
  functionals->add_option("--vectors", s.vectors, "Vector file, one vector per line ('-' for stdin)");
  functionals->add_option("--m", s.m, "Approximation order")->required();

  auto* construct = app.add_subcommand("construct", "Build and verify a construction");
  common(construct);
  construct->add_option("kind", s.kind, "e1 | mixed | t3")->required();
  construct->add_option("--space", s.space, "Norm model (t3; default summing)");
  construct->add_option("--C", s.C, "Target constant");
  construct->add_option("--p", s.p, "Exponent of the spine factor (mixed)");
  construct->add_option("--q", s.q, "Exponent of the off-spine factor (mixed)");
  construct->add_option("--depth", s.depth, "Assembly depth (t3)");
  construct->add_option("--budget", s.budget, "Witness search budget (t3)");
  construct->add_option("--triples", s.triples, "Sampled triples (mixed)");
  construct->add_option("--partial-n", s.partial_n, "Cardinality of the partial democracy witness (mixed)");
  construct->add_option("--instance", s.instance, "Write the constructed instance as JSON here");

  auto* verify = app.add_subcommand("verify", "Run a property suite");
  common(verify);
  family(verify);
  verify->add_option("suite", s.suite, "chain | prop1dim | theorem-t1 | example4 | aabw")->required();
  verify->add_option("--C", s.C, "Constant of the intervals plus one-dimensional bound (example4)");
  verify->add_option("--p", s.p, "Spine exponent (example4)");
  verify->add_option("--q", s.q, "Off-spine exponent (example4)");
  verify->add_option("--triples", s.triples, "Sampled triples (example4)");
  verify->add_option("--partial-n", s.partial_n, "Cardinality of the partial democracy witness (example4)");

  auto* report = app.add_subcommand("report", "Plot data: functionals against m");
  common(report);
  report->add_option("--space", s.space, "Norm model");
  report->add_option("--vectors", s.vectors, "Vector file ('-' for stdin)");
  report->add_option("--max-m", s.max_m, "Largest m (default: last support position)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  if (const char* env = std::getenv("GREEDYLAB_WORKERS"); env && *env) {
    unsigned w = 0;
    const std::string_view sv(env);
    auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), w);
    if (ec != std::errc{} || ptr != sv.data() + sv.size() || w == 0) {
      err << "error: GREEDYLAB_WORKERS must be a positive integer\n";
      return exit_usage;
    }
    s.workers = w;
  }

  Result res;
  try {
    if (*constants) res = cmd_constants(s);
    else if (*functionals) res = cmd_functionals(s);
    else if (*construct) res = cmd_construct(s);
    else if (*verify) res = cmd_verify(s);
    else res = cmd_report(s);
  } catch (const usage_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const parse_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const cap_exceeded& e) {
    err << "error: " << e.what() << '\n';
    return exit_cap;
  } catch (const domain_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const contract_violation& e) {
    err << "error: " << e.what() << '\n';
    return exit_math;
  }

  const std::string body = res.text ? *res.text : to_csv(res.rows);
  if (s.output.empty()) {
    out << body;
  } else {
    std::ofstream f(s.output, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << s.output << "'\n";
      return exit_usage;
    }
    f << body;
  }
  if (res.artifact && !s.instance.empty()) {
    std::ofstream f(s.instance, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << s.instance << "'\n";
      return exit_usage;
    }
    f << res.artifact->dump(2) << '\n';
  }
  for (const auto& line : res.summary) err << line << '\n';
  return res.exit_code;
}

}  // namespace greedylab::cli
