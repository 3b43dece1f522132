// Copyright 2026 The greedylab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "greedylab/coeff_vector.hpp"

namespace greedylab {

enum class Field { real, complex };

/// Convexity constants of a p-Banach space.
struct SpaceParams {
  double p = 1.0;
  Field field = Field::real;
  double A_p = 1.0;
  double B_p = 2.0;
};

/// A_p = (2^p - 1)^(-1/p); B_p = 2^(1/p) A_p over the reals, 4^(1/p) A_p over
/// the complex numbers.
inline SpaceParams space_constants(double p, Field field = Field::real) {
  if (!(p > 0.0 && p <= 1.0))
    throw domain_error("space_constants: p must lie in (0, 1]");
  SpaceParams s;
  s.p = p;
  s.field = field;
  s.A_p = p == 1.0 ? 1.0 : std::pow(std::pow(2.0, p) - 1.0, -1.0 / p);
  s.B_p = std::pow(field == Field::real ? 2.0 : 4.0, 1.0 / p) * s.A_p;
  return s;
}

// ---------------------------------------------------------------------------
// Norm models

/// (sum |x_n|^p)^(1/p); p = inf gives the sup norm.
template <class Scalar>
double norm_lp(const basic_coeff_vector<Scalar>& x, double p) {
  if (!(p > 0.0)) throw domain_error("norm_lp: p must be positive");
  if (x.is_zero()) return 0.0;
  if (std::isinf(p)) return x.sup_norm();
  if (p == 1.0) {
    // Compensated (Neumaier) sum, so that e.g. nine copies of 1/9 give 1.
    double s = 0.0, c = 0.0;
    for (const auto& e : x.entries()) {
      const double v = std::abs(e.value);
      const double t = s + v;
      c += std::abs(s) >= v ? (s - t) + v : (v - t) + s;
      s = t;
    }
    return s + c;
  }
  // Scaled by the largest modulus so that tiny or huge vectors do not
  // under/overflow in the powers.
  const double m = x.sup_norm();
  double s = 0.0;
  if (p == 2.0) {
    for (const auto& e : x.entries()) {
      const double r = std::abs(e.value) / m;
      s += r * r;
    }
    return m * std::sqrt(s);
  }
  for (const auto& e : x.entries()) s += std::pow(std::abs(e.value) / m, p);
  return m * std::pow(s, 1.0 / p);
}

/// Interleaved l_p x l_q: coordinates at spine positions form the l_p factor,
/// all other coordinates the l_q factor; the norm is the max of the two.
template <class Scalar>
double norm_mixed(const basic_coeff_vector<Scalar>& x, double p, double q,
                  std::span<const Index> spine) {
  if (!(p >= 1.0 && p < q)) throw domain_error("norm_mixed: need 1 <= p < q");
  basic_coeff_vector<Scalar> on, off;
  auto s = spine.begin();
  for (const auto& e : x.entries()) {
    while (s != spine.end() && *s < e.index) ++s;
    if (s != spine.end() && *s == e.index)
      on.push_back(e.index, e.value);
    else
      off.push_back(e.index, e.value);
  }
  return std::max(norm_lp(on, p), norm_lp(off, q));
}

/// Smallest integer sequence with s_m > (m+1)^(q/p) and s_{m+1} >= 1 + 2 s_m.
inline std::vector<Index> spine_sequence(double p, double q, std::size_t count) {
  if (!(p >= 1.0 && p < q)) throw domain_error("spine_sequence: need 1 <= p < q");
  std::vector<Index> s;
  s.reserve(count);
  for (std::size_t m = 1; m <= count; ++m) {
    const long double bound = std::pow(static_cast<long double>(m + 1),
                                       static_cast<long double>(q) / p);
    // Treat bounds within rounding distance of an integer as that integer;
    // the inequality is strict.
    const long double nearest = std::round(bound);
    Index above = std::abs(bound - nearest) <= 1e-9L * bound
                      ? static_cast<Index>(nearest) + 1
                      : static_cast<Index>(std::floor(bound)) + 1;
    if (!s.empty()) above = std::max(above, 2 * s.back() + 1);
    s.push_back(above);
  }
  return s;
}

/// max( ||x||_base , sup_I |sum_{k in I} x_k| / |I|^(1/2) ).
template <class Scalar>
double norm_interval_summing(const basic_coeff_vector<Scalar>& x, double base) {
  if (!(base >= 1.0)) throw domain_error("norm_interval_summing: base must be >= 1");
  double best = norm_lp(x, base);
  const auto& e = x.entries();
  // Interval sums only change at support positions, and for a fixed sum the
  // shortest interval is the worst, so endpoints range over the support.
  for (std::size_t i = 0; i < e.size(); ++i) {
    Scalar sum(0);
    for (std::size_t j = i; j < e.size(); ++j) {
      sum += e[j].value;
      const double len = double(e[j].index - e[i].index + 1);
      best = std::max(best, double(std::abs(sum)) / std::sqrt(len));
    }
  }
  return best;
}

/// max( ||x||_inf , sup_n |sum_{k<=n} x_k| ).
template <class Scalar>
double norm_summing(const basic_coeff_vector<Scalar>& x) {
  double best = 0.0;
  Scalar sum(0);
  for (const auto& e : x.entries()) {
    sum += e.value;
    best = std::max({best, double(std::abs(e.value)), double(std::abs(sum))});
  }
  return best;
}

/// (sum w_n |x_n|^p)^(1/p); positions past the weight list carry weight 1.
template <class Scalar>
double norm_weighted(const basic_coeff_vector<Scalar>& x, double p,
                     std::span<const double> weights) {
  if (!(p > 0.0)) throw domain_error("norm_weighted: p must be positive");
  if (x.is_zero()) return 0.0;
  const double m = x.sup_norm();
  double s = 0.0;
  for (const auto& e : x.entries()) {
    const double w = e.index <= weights.size() ? weights[e.index - 1] : 1.0;
    s += w * std::pow(std::abs(e.value) / m, p);
  }
  return m * std::pow(s, 1.0 / p);
}

// ---------------------------------------------------------------------------
// NormOracle

enum class NormKind { lp, mixed, interval_summing, summing, weighted, custom };

/// Declared structure of a user-composed oracle.
struct CustomNormTraits {
  bool coordinatewise_monotone = false;
  bool permutation_invariant = false;
};

/// A quasi-norm on finitely supported sequences together with its declared
/// p-convexity exponent. Immutable after construction; safe to share across
/// threads.
class NormOracle {
 public:
  using RealFunction = std::function<double(const CoeffVector&)>;

  using CustomTraits = CustomNormTraits;

  static NormOracle lp(double p) {
    if (!(p > 0.0)) throw domain_error("lp oracle: p must be positive");
    return NormOracle(LpModel{p});
  }

  static NormOracle mixed(double p, double q, std::vector<Index> spine) {
    if (!(p >= 1.0 && p < q)) throw domain_error("mixed oracle: need 1 <= p < q");
    if (!std::is_sorted(spine.begin(), spine.end()) ||
        std::adjacent_find(spine.begin(), spine.end()) != spine.end())
      throw domain_error("mixed oracle: spine must be strictly increasing");
    return NormOracle(MixedModel{p, q, std::make_shared<const std::vector<Index>>(std::move(spine))});
  }

  static NormOracle interval_summing(double base = std::numeric_limits<double>::infinity()) {
    if (!(base >= 1.0)) throw domain_error("interval_summing oracle: base must be >= 1");
    return NormOracle(IntervalModel{base});
  }

  static NormOracle summing() { return NormOracle(SummingModel{}); }

  static NormOracle weighted(double p, std::vector<double> weights) {
    if (!(p > 0.0)) throw domain_error("weighted oracle: p must be positive");
    for (double w : weights)
      if (!(w > 0.0) || !std::isfinite(w))
        throw domain_error("weighted oracle: weights must be positive");
    return NormOracle(WeightedModel{p, std::make_shared<const std::vector<double>>(std::move(weights))});
  }

  /// User-composed oracle. `convexity` is the declared p of the p-triangle
  /// inequality. Complex vectors are not supported by custom oracles.
  static NormOracle custom(std::string name, double convexity, RealFunction fn,
                           CustomTraits traits = {}) {
    if (!(convexity > 0.0 && convexity <= 1.0))
      throw domain_error("custom oracle: convexity must lie in (0, 1]");
    if (!fn) throw domain_error("custom oracle: empty function");
    return NormOracle(CustomModel{std::move(name), convexity,
                                  std::make_shared<const RealFunction>(std::move(fn)), traits});
  }

  template <class Scalar>
  double operator()(const basic_coeff_vector<Scalar>& x) const {
    return std::visit([&](const auto& m) { return m.eval(x); }, model_);
  }

  [[nodiscard]] NormKind kind() const {
    return static_cast<NormKind>(model_.index());
  }

  /// Declared exponent p of ||x+y||^p <= ||x||^p + ||y||^p.
  [[nodiscard]] double convexity() const {
    return std::visit([](const auto& m) { return m.convexity(); }, model_);
  }

  /// |x_n| <= |y_n| for all n implies ||x|| <= ||y||.
  [[nodiscard]] bool coordinatewise_monotone() const {
    switch (kind()) {
      case NormKind::lp:
      case NormKind::mixed:
      case NormKind::weighted:
        return true;
      case NormKind::custom:
        return std::get<CustomModel>(model_).traits.coordinatewise_monotone;
      default:
        return false;
    }
  }

  /// The norm is invariant under any reordering of positions.
  [[nodiscard]] bool permutation_invariant() const {
    if (kind() == NormKind::lp) return true;
    if (kind() == NormKind::custom)
      return std::get<CustomModel>(model_).traits.permutation_invariant;
    return false;
  }

  /// Exponent of the lp model, if this is one.
  [[nodiscard]] std::optional<double> lp_exponent() const {
    if (const auto* m = std::get_if<LpModel>(&model_)) return m->p;
    return std::nullopt;
  }

  /// Spine of the mixed model (empty for other kinds).
  [[nodiscard]] std::span<const Index> spine() const {
    if (const auto* m = std::get_if<MixedModel>(&model_)) return *m->spine;
    return {};
  }

  /// Canonical text spec, e.g. "lp:1", "mixed:1,2", "interval:inf", "summing".
  [[nodiscard]] std::string name() const {
    return std::visit([](const auto& m) { return m.name(); }, model_);
  }

 private:
  struct LpModel {
    double p;
    template <class S>
    double eval(const basic_coeff_vector<S>& x) const { return norm_lp(x, p); }
    double convexity() const { return std::min(p, 1.0); }
    std::string name() const { return "lp:" + format_double(p); }
  };
  struct MixedModel {
    double p, q;
    std::shared_ptr<const std::vector<Index>> spine;
    template <class S>
    double eval(const basic_coeff_vector<S>& x) const { return norm_mixed(x, p, q, *spine); }
    double convexity() const { return 1.0; }
    std::string name() const { return "mixed:" + format_double(p) + "," + format_double(q); }
  };
  struct IntervalModel {
    double base;
    template <class S>
    double eval(const basic_coeff_vector<S>& x) const { return norm_interval_summing(x, base); }
    double convexity() const { return 1.0; }
    std::string name() const { return "interval:" + format_double(base); }
  };
  struct SummingModel {
    template <class S>
    double eval(const basic_coeff_vector<S>& x) const { return norm_summing(x); }
    double convexity() const { return 1.0; }
    std::string name() const { return "summing"; }
  };
  struct WeightedModel {
    double p;
    std::shared_ptr<const std::vector<double>> weights;
    template <class S>
    double eval(const basic_coeff_vector<S>& x) const { return norm_weighted(x, p, *weights); }
    double convexity() const { return std::min(p, 1.0); }
    std::string name() const {
      std::string s = "weighted:" + format_double(p) + ":";
      for (std::size_t i = 0; i < weights->size(); ++i)
        s += (i ? "," : "") + format_double((*weights)[i]);
      return s;
    }
  };
  struct CustomModel {
    std::string label;
    double p;
    std::shared_ptr<const RealFunction> fn;
    CustomTraits traits;
    template <class S>
    double eval(const basic_coeff_vector<S>& x) const {
      if constexpr (is_complex_v<S>) {
        throw domain_error("custom oracle '" + label + "' is real-only");
      } else {
        return (*fn)(x);
      }
    }
    double convexity() const { return p; }
    std::string name() const { return label; }
  };

  using Model = std::variant<LpModel, MixedModel, IntervalModel, SummingModel,
                             WeightedModel, CustomModel>;

  explicit NormOracle(Model m) : model_(std::move(m)) {}

  Model model_;
};

// ---------------------------------------------------------------------------
// Convexity property checks

/// One sampled instance of an inequality lhs <= rhs.
struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;

  [[nodiscard]] bool holds(double tol = 1e-12) const {
    return lhs <= rhs + tol * std::max(1.0, std::abs(rhs));
  }
};

/// ||x+y||^p <= ||x||^p + ||y||^p with the oracle's declared p.
inline InequalityCheck check_p_triangle(const NormOracle& norm, const CoeffVector& x,
                                        const CoeffVector& y) {
  const double p = norm.convexity();
  return {std::pow(norm(x + y), p), std::pow(norm(x), p) + std::pow(norm(y), p)};
}

namespace detail {

inline CoeffVector combination(const CoeffVector& y, std::span<const CoeffVector> xs,
                               std::span<const double> coeffs) {
  CoeffVector r = y;
  for (std::size_t n = 0; n < xs.size(); ++n)
    if (coeffs[n] != 0.0) r = r + coeffs[n] * xs[n];
  return r;
}

inline void check_family(std::span<const CoeffVector> xs, std::span<const double> a) {
  if (xs.size() != a.size())
    throw domain_error("convexity check: one coefficient per vector required");
  if (xs.size() > 20) throw cap_exceeded("convexity check: |J| > 20");
}

}  // namespace detail

/// ||y + sum a_n x_n|| <= A_p max_{A subset J} ||y + sum_{n in A} x_n||, 0 <= a_n <= 1.
inline InequalityCheck check_aabw_subsets(const NormOracle& norm, const CoeffVector& y,
                                          std::span<const CoeffVector> xs,
                                          std::span<const double> a) {
  detail::check_family(xs, a);
  for (double v : a)
    if (v < 0.0 || v > 1.0) throw domain_error("check_aabw_subsets: need 0 <= a_n <= 1");
  const double Ap = space_constants(norm.convexity()).A_p;
  double sup = 0.0;
  std::vector<double> pick(xs.size());
  for (std::uint32_t mask = 0; mask < (1u << xs.size()); ++mask) {
    for (std::size_t n = 0; n < xs.size(); ++n) pick[n] = (mask >> n) & 1u ? 1.0 : 0.0;
    sup = std::max(sup, norm(detail::combination(y, xs, pick)));
  }
  return {norm(detail::combination(y, xs, a)), Ap * sup};
}

/// ||y + sum a_n x_n|| <= A_p max_{eps = +-1} ||y + sum eps_n x_n||, |a_n| <= 1.
inline InequalityCheck check_aabw_signs(const NormOracle& norm, const CoeffVector& y,
                                        std::span<const CoeffVector> xs,
                                        std::span<const double> a) {
  detail::check_family(xs, a);
  for (double v : a)
    if (std::abs(v) > 1.0) throw domain_error("check_aabw_signs: need |a_n| <= 1");
  const double Ap = space_constants(norm.convexity()).A_p;
  double sup = 0.0;
  std::vector<double> eps(xs.size());
  for (std::uint32_t mask = 0; mask < (1u << xs.size()); ++mask) {
    for (std::size_t n = 0; n < xs.size(); ++n) eps[n] = (mask >> n) & 1u ? -1.0 : 1.0;
    sup = std::max(sup, norm(detail::combination(y, xs, eps)));
  }
  return {norm(detail::combination(y, xs, a)), Ap * sup};
}

/// ||sum a_n x_n|| <= B_p max_{A subset J} ||sum_{n in A} x_n||, |a_n| <= 1.
inline InequalityCheck check_aabw_real_combination(const NormOracle& norm,
                                                   std::span<const CoeffVector> xs,
                                                   std::span<const double> a) {
  detail::check_family(xs, a);
  for (double v : a)
    if (std::abs(v) > 1.0)
      throw domain_error("check_aabw_real_combination: need |a_n| <= 1");
  const double Bp = space_constants(norm.convexity()).B_p;
  const CoeffVector zero;
  double sup = 0.0;
  std::vector<double> pick(xs.size());
  for (std::uint32_t mask = 0; mask < (1u << xs.size()); ++mask) {
    for (std::size_t n = 0; n < xs.size(); ++n) pick[n] = (mask >> n) & 1u ? 1.0 : 0.0;
    sup = std::max(sup, norm(detail::combination(zero, xs, pick)));
  }
  return {norm(detail::combination(zero, xs, a)), Bp * sup};
}

}  // namespace greedylab
