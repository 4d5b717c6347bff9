// SPDX-License-Identifier: Apache-2.0
#pragma once

/*
 * JSON forms of maps. Scalars are strings in the scalar grammar.
 *
 *   {"kind":"pl","slopes":[..],"breakpoints":[..],"anchor":[x,y]}
 *   {"kind":"equivariant","period":T,"cell":{"slopes":[..],"breakpoints":[..],"anchor":["0",y0]}}
 *   {"kind":"orbit-conjugator","base":{..}}            ("x0" only when nonzero)
 *   {"kind":"inverse","base":{..}}
 *   {"kind":"composite","factors":[..]}                (factors[0] applied last)
 */

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "plrev/error.hpp"
#include "plrev/lazymap.hpp"
#include "plrev/plmap.hpp"
#include "plrev/scalar.hpp"

namespace plrev {

using json = nlohmann::json;

inline json scalar_to_json(const Scalar& s) { return s.str(); }

inline Scalar scalar_from_json(const json& j) {
  if (!j.is_string()) fail(errc::parse_error, "expected a scalar string, got " + j.dump());
  return parse_scalar(j.get<std::string>());
}

inline json scalars_to_json(const std::vector<Scalar>& xs) {
  json out = json::array();
  for (const auto& x : xs) out.push_back(scalar_to_json(x));
  return out;
}

inline std::vector<Scalar> scalars_from_json(const json& j) {
  if (!j.is_array()) fail(errc::parse_error, "expected an array of scalars, got " + j.dump());
  std::vector<Scalar> out;
  for (const auto& x : j) out.push_back(scalar_from_json(x));
  return out;
}

namespace detail {

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    fail(errc::parse_error, std::string("missing field '") + key + "'");
  return j.at(key);
}

inline void expect_keys(const json& j, std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) fail(errc::parse_error, "unexpected field '" + k + "'");
  }
}

inline json pieces_to_json(const std::vector<Scalar>& slopes, const std::vector<Scalar>& bps,
                           const Scalar& x0, const Scalar& y0) {
  return {{"slopes", scalars_to_json(slopes)},
          {"breakpoints", scalars_to_json(bps)},
          {"anchor", json::array({scalar_to_json(x0), scalar_to_json(y0)})}};
}

inline PLMap pieces_from_json(const json& j) {
  const json& anchor = field(j, "anchor");
  if (!anchor.is_array() || anchor.size() != 2) fail(errc::parse_error, "anchor must be [x, y]");
  return PLMap::from_pieces(scalars_from_json(field(j, "breakpoints")),
                            scalars_from_json(field(j, "slopes")), scalar_from_json(anchor[0]),
                            scalar_from_json(anchor[1]));
}

}  // namespace detail

inline json map_to_json(const LazyPLMap& m) {
  switch (m.kind()) {
    case LazyPLMap::Kind::finite: {
      const PLMap& f = *m.as_finite();
      json j = detail::pieces_to_json(f.slopes(), f.breakpoints(), f.anchor().first, f.anchor().second);
      j["kind"] = "pl";
      return j;
    }
    case LazyPLMap::Kind::equivariant: {
      const EquivariantPLMap& e = *m.as_equivariant();
      std::vector<Scalar> knots(e.knots().begin() + 1, e.knots().end());
      return {{"kind", "equivariant"},
              {"period", scalar_to_json(e.period())},
              {"cell", detail::pieces_to_json(e.slopes(), knots, Scalar(0), e.y0())}};
    }
    case LazyPLMap::Kind::conjugator: {
      const OrbitConjugator& c = *m.as_conjugator();
      json j = {{"kind", "orbit-conjugator"}, {"base", map_to_json(c.base)}};
      if (!c.x0.is_zero()) j["x0"] = scalar_to_json(c.x0);
      return j;
    }
    case LazyPLMap::Kind::inverse:
      return {{"kind", "inverse"}, {"base", map_to_json(*m.inverted_base())}};
    case LazyPLMap::Kind::composite: {
      json fs = json::array();
      for (const auto& f : *m.factors()) fs.push_back(map_to_json(f));
      return {{"kind", "composite"}, {"factors", fs}};
    }
  }
  fail(errc::internal_verification_failed, "unknown map kind");
}

/// Identical subtrees decode to one shared node, so that repeated conjugators
/// share their orbit tables and cancel against their inverses.
using MapInterner = std::map<std::string, LazyPLMap>;

inline LazyPLMap map_from_json(const json& j, MapInterner& seen);

namespace detail {

inline LazyPLMap decode_map(const json& j, MapInterner& seen) {
  const json& kind = field(j, "kind");
  if (!kind.is_string()) fail(errc::parse_error, "map kind must be a string");
  std::string k = kind.get<std::string>();
  if (k == "pl") {
    expect_keys(j, {"kind", "slopes", "breakpoints", "anchor"});
    return pieces_from_json(j);
  }
  if (k == "equivariant") {
    expect_keys(j, {"kind", "period", "cell"});
    const json& cell = field(j, "cell");
    expect_keys(cell, {"slopes", "breakpoints", "anchor"});
    PLMap c = pieces_from_json(cell);
    return EquivariantPLMap::from_cell(scalar_from_json(field(j, "period")), c.breakpoints(),
                                       c.slopes(), c(Scalar(0)));
  }
  if (k == "orbit-conjugator") {
    expect_keys(j, {"kind", "base", "x0"});
    LazyPLMap base = map_from_json(field(j, "base"), seen);
    Scalar x0 = j.contains("x0") ? scalar_from_json(j.at("x0")) : Scalar(0);
    Displacement d = fixed_point_free_displacement(base);
    if (d.direction < 0) fail(errc::has_fixed_point, "orbit base must move points upward");
    return LazyPLMap::conjugator(base, x0, d.delta);
  }
  if (k == "inverse") {
    expect_keys(j, {"kind", "base"});
    return lazy_invert(map_from_json(field(j, "base"), seen));
  }
  if (k == "composite") {
    expect_keys(j, {"kind", "factors"});
    const json& fs = field(j, "factors");
    if (!fs.is_array() || fs.empty()) fail(errc::parse_error, "composite needs a factor list");
    std::vector<LazyPLMap> out;
    for (const auto& f : fs) out.push_back(map_from_json(f, seen));
    return lazy_compose_all(out);
  }
  fail(errc::parse_error, "unknown map kind '" + k + "'");
}

}  // namespace detail

inline LazyPLMap map_from_json(const json& j, MapInterner& seen) {
  std::string key = j.dump();
  if (auto it = seen.find(key); it != seen.end()) return it->second;
  LazyPLMap m = detail::decode_map(j, seen);
  seen.emplace(std::move(key), m);
  return m;
}

inline LazyPLMap map_from_json(const json& j) {
  MapInterner seen;
  return map_from_json(j, seen);
}

}  // namespace plrev
