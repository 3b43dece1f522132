// Copyright 2026 The greedylab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "greedylab/coeff_vector.hpp"
#include "greedylab/functionals.hpp"

namespace greedylab {

using json = nlohmann::json;

/// Non-finite doubles are not representable in JSON; they are written as the
/// strings "inf", "-inf", "nan".
inline json number_to_json(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

inline double number_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    return NAN;
  }
  return j.get<double>();
}

/// Dense coefficient list through the last nonzero position.
inline json to_json(const CoeffVector& x) {
  json a = json::array();
  for (double v : x.dense(x.max_index())) a.push_back(v);
  return a;
}

inline CoeffVector vector_from_json(const json& j) {
  std::vector<double> d = j.get<std::vector<double>>();
  return CoeffVector::from_dense(d);
}

inline json to_json(const IndexSet& s) { return json(s.items()); }

inline IndexSet set_from_json(const json& j) { return IndexSet(j.get<std::vector<Index>>()); }

inline json to_json(const Witness& w) {
  json j = json::object();
  j["set"] = to_json(w.set);
  if (w.interval) j["interval"] = {{"start", w.interval->start}, {"length", w.interval->length}};
  if (w.order) j["order"] = *w.order;
  if (w.t) j["t"] = *w.t;
  if (!w.signs.empty()) j["signs"] = w.signs;
  if (!w.coefficients.empty()) j["coefficients"] = w.coefficients;
  return j;
}

inline Witness witness_from_json(const json& j) {
  Witness w;
  w.set = set_from_json(j.at("set"));
  if (j.contains("interval"))
    w.interval = IndexInterval{j["interval"].at("start").get<Index>(), j["interval"].at("length").get<std::size_t>()};
  if (j.contains("order")) w.order = j["order"].get<std::size_t>();
  if (j.contains("t")) w.t = j["t"].get<double>();
  if (j.contains("signs")) w.signs = j["signs"].get<std::vector<double>>();
  if (j.contains("coefficients")) w.coefficients = j["coefficients"].get<std::vector<double>>();
  return w;
}

}  // namespace greedylab
