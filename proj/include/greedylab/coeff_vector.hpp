// Copyright 2026 The greedylab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <istream>
#include <iterator>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

namespace greedylab {

/// Basis position. Positions are 1-based; 0 is never a valid position.
using Index = std::size_t;

class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A precondition of an operation was violated by its arguments
/// (e.g. a set passed as greedy that is not greedy).
class contract_violation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A combinatorial or resource cap was exceeded.
class cap_exceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

// ---------------------------------------------------------------------------
// IndexSet

/// Sorted, duplicate-free finite set of positions.
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::initializer_list<Index> items) : items_(items) { normalize(); }
  explicit IndexSet(std::vector<Index> items) : items_(std::move(items)) {
    normalize();
  }

  /// {first, ..., first+count-1}
  static IndexSet range(Index first, std::size_t count) {
    std::vector<Index> v(count);
    std::iota(v.begin(), v.end(), first);
    IndexSet s;
    s.items_ = std::move(v);
    return s;
  }

  [[nodiscard]] std::size_t size() const noexcept { return items_.size(); }
  [[nodiscard]] bool empty() const noexcept { return items_.empty(); }
  [[nodiscard]] auto begin() const noexcept { return items_.begin(); }
  [[nodiscard]] auto end() const noexcept { return items_.end(); }
  [[nodiscard]] const std::vector<Index>& items() const noexcept {
    return items_;
  }
  [[nodiscard]] Index front() const { return items_.front(); }
  [[nodiscard]] Index back() const { return items_.back(); }

  [[nodiscard]] bool contains(Index n) const {
    return std::binary_search(items_.begin(), items_.end(), n);
  }

  /// A < B: every element of A precedes every element of B. Vacuous when
  /// either side is empty.
  [[nodiscard]] bool precedes(const IndexSet& other) const {
    if (empty() || other.empty()) return true;
    return back() < other.front();
  }

  [[nodiscard]] bool disjoint(const IndexSet& other) const {
    auto a = items_.begin();
    auto b = other.items_.begin();
    while (a != items_.end() && b != other.items_.end()) {
      if (*a == *b) return false;
      if (*a < *b)
        ++a;
      else
        ++b;
    }
    return true;
  }

  [[nodiscard]] bool is_subset_of(const IndexSet& other) const {
    return std::includes(other.items_.begin(), other.items_.end(),
                         items_.begin(), items_.end());
  }

  /// True for the empty set and for sets of consecutive positions.
  [[nodiscard]] bool is_interval() const {
    return empty() || back() - front() + 1 == size();
  }

  [[nodiscard]] IndexSet unite(const IndexSet& other) const {
    IndexSet r;
    std::set_union(items_.begin(), items_.end(), other.items_.begin(),
                   other.items_.end(), std::back_inserter(r.items_));
    return r;
  }

  [[nodiscard]] IndexSet minus(const IndexSet& other) const {
    IndexSet r;
    std::set_difference(items_.begin(), items_.end(), other.items_.begin(),
                        other.items_.end(), std::back_inserter(r.items_));
    return r;
  }

  [[nodiscard]] IndexSet intersect(const IndexSet& other) const {
    IndexSet r;
    std::set_intersection(items_.begin(), items_.end(), other.items_.begin(),
                          other.items_.end(), std::back_inserter(r.items_));
    return r;
  }

  friend bool operator==(const IndexSet&, const IndexSet&) = default;
  /// Lexicographic order on the sorted element lists.
  friend auto operator<=>(const IndexSet& a, const IndexSet& b) {
    return a.items_ <=> b.items_;
  }

 private:
  void normalize() {
    std::sort(items_.begin(), items_.end());
    items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
    if (!items_.empty() && items_.front() == 0)
      throw domain_error("IndexSet: positions are 1-based");
  }

  std::vector<Index> items_;
};

/// {start, ..., start+length-1}; length 0 is the empty interval.
struct IndexInterval {
  Index start = 1;
  std::size_t length = 0;

  [[nodiscard]] bool empty() const noexcept { return length == 0; }
  [[nodiscard]] Index last() const noexcept { return start + length - 1; }
  [[nodiscard]] bool contains(Index n) const noexcept {
    return length > 0 && n >= start && n <= last();
  }
  [[nodiscard]] IndexSet to_set() const { return IndexSet::range(start, length); }

  friend bool operator==(const IndexInterval&, const IndexInterval&) = default;
};

// ---------------------------------------------------------------------------
// CoeffVector

/// Finitely supported coefficient sequence x = sum_n x_n e_n. Only nonzero
/// coefficients are stored, in increasing position order.
template <class Scalar>
class basic_coeff_vector {
 public:
  using scalar_type = Scalar;
  struct entry {
    Index index;
    Scalar value;
    friend bool operator==(const entry&, const entry&) = default;
  };

  basic_coeff_vector() = default;

  /// Dense initializer, position 1 first.
  basic_coeff_vector(std::initializer_list<Scalar> dense)
      : basic_coeff_vector(from_dense(std::span<const Scalar>(dense.begin(),
                                                               dense.size()))) {}

  static basic_coeff_vector from_dense(std::span<const Scalar> dense) {
    basic_coeff_vector x;
    for (std::size_t i = 0; i < dense.size(); ++i)
      if (dense[i] != Scalar(0)) x.entries_.push_back({i + 1, dense[i]});
    return x;
  }

  /// Entries need not be sorted; duplicates are rejected, zeros dropped.
  static basic_coeff_vector from_entries(std::vector<entry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const entry& a, const entry& b) { return a.index < b.index; });
    basic_coeff_vector x;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      if (e.index == 0) throw domain_error("CoeffVector: positions are 1-based");
      if (i > 0 && entries[i - 1].index == e.index)
        throw domain_error("CoeffVector: duplicate position");
      if (e.value != Scalar(0)) x.entries_.push_back(e);
    }
    return x;
  }

  [[nodiscard]] const std::vector<entry>& entries() const noexcept {
    return entries_;
  }
  [[nodiscard]] bool is_zero() const noexcept { return entries_.empty(); }
  [[nodiscard]] std::size_t support_size() const noexcept {
    return entries_.size();
  }
  /// Largest position in the support, 0 for the zero vector.
  [[nodiscard]] Index max_index() const noexcept {
    return entries_.empty() ? 0 : entries_.back().index;
  }
  [[nodiscard]] Index min_index() const noexcept {
    return entries_.empty() ? 0 : entries_.front().index;
  }

  [[nodiscard]] IndexSet support() const {
    std::vector<Index> v;
    v.reserve(entries_.size());
    for (const auto& e : entries_) v.push_back(e.index);
    return IndexSet(std::move(v));
  }

  /// e_n^*(x)
  [[nodiscard]] Scalar operator[](Index n) const {
    auto it = find(n);
    return it != entries_.end() && it->index == n ? it->value : Scalar(0);
  }

  void set(Index n, Scalar value) {
    if (n == 0) throw domain_error("CoeffVector: positions are 1-based");
    auto it = find(n);
    if (it != entries_.end() && it->index == n) {
      if (value == Scalar(0))
        entries_.erase(it);
      else
        it->value = value;
    } else if (value != Scalar(0)) {
      entries_.insert(it, entry{n, value});
    }
  }

  /// Appends a coefficient past max_index(); used to build vectors in order.
  void push_back(Index n, Scalar value) {
    if (n == 0 || n <= max_index())
      throw domain_error("CoeffVector::push_back: positions must increase");
    if (value != Scalar(0)) entries_.push_back({n, value});
  }

  void pop_back() { entries_.pop_back(); }
  void clear() noexcept { entries_.clear(); }
  void reserve(std::size_t n) { entries_.reserve(n); }

  /// ||x||_inf = max_n |e_n^*(x)|
  [[nodiscard]] double sup_norm() const {
    double m = 0.0;
    for (const auto& e : entries_) m = std::max(m, double(std::abs(e.value)));
    return m;
  }

  [[nodiscard]] std::vector<Scalar> dense(Index dimension) const {
    std::vector<Scalar> d(dimension, Scalar(0));
    for (const auto& e : entries_)
      if (e.index <= dimension) d[e.index - 1] = e.value;
    return d;
  }

  basic_coeff_vector& operator*=(Scalar a) {
    if (a == Scalar(0)) {
      entries_.clear();
      return *this;
    }
    for (auto& e : entries_) e.value *= a;
    std::erase_if(entries_, [](const entry& e) { return e.value == Scalar(0); });
    return *this;
  }

  friend basic_coeff_vector operator*(Scalar a, basic_coeff_vector x) {
    x *= a;
    return x;
  }

  friend basic_coeff_vector operator+(const basic_coeff_vector& x,
                                      const basic_coeff_vector& y) {
    return combine(x, y, Scalar(1));
  }
  friend basic_coeff_vector operator-(const basic_coeff_vector& x,
                                      const basic_coeff_vector& y) {
    return combine(x, y, Scalar(-1));
  }
  friend basic_coeff_vector operator-(basic_coeff_vector x) {
    for (auto& e : x.entries_) e.value = -e.value;
    return x;
  }

  friend bool operator==(const basic_coeff_vector&,
                         const basic_coeff_vector&) = default;

 private:
  auto find(Index n) {
    return std::lower_bound(
        entries_.begin(), entries_.end(), n,
        [](const entry& e, Index key) { return e.index < key; });
  }
  auto find(Index n) const {
    return std::lower_bound(
        entries_.begin(), entries_.end(), n,
        [](const entry& e, Index key) { return e.index < key; });
  }

  static basic_coeff_vector combine(const basic_coeff_vector& x,
                                    const basic_coeff_vector& y, Scalar sign) {
    basic_coeff_vector r;
    r.entries_.reserve(x.entries_.size() + y.entries_.size());
    auto a = x.entries_.begin();
    auto b = y.entries_.begin();
    while (a != x.entries_.end() || b != y.entries_.end()) {
      if (b == y.entries_.end() || (a != x.entries_.end() && a->index < b->index)) {
        r.entries_.push_back(*a++);
      } else if (a == x.entries_.end() || b->index < a->index) {
        r.entries_.push_back({b->index, sign * b->value});
        ++b;
      } else {
        Scalar v = a->value + sign * b->value;
        if (v != Scalar(0)) r.entries_.push_back({a->index, v});
        ++a;
        ++b;
      }
    }
    return r;
  }

  std::vector<entry> entries_;
};

using CoeffVector = basic_coeff_vector<double>;
using ComplexCoeffVector = basic_coeff_vector<std::complex<double>>;

// ---------------------------------------------------------------------------
// SignPattern

/// Unit-modulus scalars attached to positions (epsilon, delta).
template <class Scalar>
class basic_sign_pattern {
 public:
  basic_sign_pattern() = default;

  /// All +1 on `set`.
  static basic_sign_pattern ones(const IndexSet& set) {
    basic_sign_pattern s;
    for (Index n : set) s.signs_.push_back({n, Scalar(1)});
    return s;
  }

  /// signs[k] is attached to the k-th smallest element of `set`.
  basic_sign_pattern(const IndexSet& set, std::span<const Scalar> signs) {
    if (signs.size() != set.size())
      throw domain_error("SignPattern: one sign per position required");
    std::size_t k = 0;
    for (Index n : set) {
      if (std::abs(std::abs(signs[k]) - 1.0) > 1e-12)
        throw domain_error("SignPattern: signs must have modulus 1");
      signs_.push_back({n, signs[k++]});
    }
  }

  basic_sign_pattern(const IndexSet& set, std::initializer_list<Scalar> signs)
      : basic_sign_pattern(set, std::span<const Scalar>(signs.begin(), signs.size())) {}

  [[nodiscard]] bool contains(Index n) const { return lookup(n) != nullptr; }

  [[nodiscard]] Scalar at(Index n) const {
    const auto* s = lookup(n);
    if (s == nullptr) throw domain_error("SignPattern: no sign at position");
    return *s;
  }

  [[nodiscard]] IndexSet domain() const {
    std::vector<Index> v;
    for (const auto& [n, s] : signs_) v.push_back(n);
    return IndexSet(std::move(v));
  }

  [[nodiscard]] std::vector<Scalar> values() const {
    std::vector<Scalar> v;
    for (const auto& [n, s] : signs_) v.push_back(s);
    return v;
  }

 private:
  const Scalar* lookup(Index n) const {
    auto it = std::lower_bound(
        signs_.begin(), signs_.end(), n,
        [](const std::pair<Index, Scalar>& e, Index key) { return e.first < key; });
    return it != signs_.end() && it->first == n ? &it->second : nullptr;
  }

  std::vector<std::pair<Index, Scalar>> signs_;
};

using SignPattern = basic_sign_pattern<double>;
using ComplexSignPattern = basic_sign_pattern<std::complex<double>>;

// ---------------------------------------------------------------------------
// Vector text format: one vector per line, whitespace-separated decimal
// coefficients, position 1 first. Blank lines and lines starting with '#'
// carry no vector.

inline CoeffVector parse_vector_line(std::string_view line) {
  std::vector<double> dense;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i == line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    std::string_view token = line.substr(i, j - i);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v))
      throw parse_error("invalid coefficient '" + std::string(line.substr(i, j - i)) + "'");
    dense.push_back(v);
    i = j;
  }
  return CoeffVector::from_dense(dense);
}

inline bool is_vector_line(std::string_view line) {
  auto p = line.find_first_not_of(" \t\r");
  return p != std::string_view::npos && line[p] != '#';
}

inline std::vector<CoeffVector> read_vectors(std::istream& in) {
  std::vector<CoeffVector> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!is_vector_line(line)) continue;
    try {
      out.push_back(parse_vector_line(line));
    } catch (const parse_error& e) {
      throw parse_error("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

/// Dense line through max_index(); the zero vector is written as "0".
inline std::string format_vector(const CoeffVector& x) {
  if (x.is_zero()) return "0";
  std::string s;
  for (const double v : x.dense(x.max_index())) {
    if (!s.empty()) s += ' ';
    s += format_double(v);
  }
  return s;
}

}  // namespace greedylab
