// SPDX-License-Identifier: Apache-2.0
#pragma once

/*
 * Text grammar for maps; the printers in plmap.hpp / lazymap.hpp emit it.
 *
 *   map   := pl | eq | tw | orbit | inv | comp
 *   pl    := 'pl{' 'slopes=' list 'bp=' list 'anchor=(' scalar ',' scalar ')' '}'
 *   eq    := 'eq{' 'period=' scalar 'cell=' pl '}'
 *   tw    := 'tw{' 'T=' scalar 'cell=' pl '}'
 *   orbit := 'orbit{' 'base=' map [ 'x0=' scalar ] '}'
 *   inv   := 'inv{' map '}'
 *   comp  := 'comp{' map { map } '}'
 *   list  := '[' [ scalar { ',' scalar } ] ']'
 *
 * In `eq` the cell breakpoints are the knots inside (0, T) and the value at 0
 * is read off the cell. Whitespace is free between tokens.
 */

#include <string>
#include <string_view>
#include <vector>

#include "plrev/detail/cursor.hpp"
#include "plrev/error.hpp"
#include "plrev/lazymap.hpp"
#include "plrev/plmap.hpp"
#include "plrev/scalar.hpp"

namespace plrev {

namespace detail {

inline std::vector<Scalar> parse_list(Cursor& cur) {
  std::vector<Scalar> out;
  cur.expect("[");
  cur.skip_ws();
  if (cur.consume("]")) return out;
  while (true) {
    out.push_back(parse_scalar(cur));
    cur.skip_ws();
    if (cur.consume("]")) return out;
    cur.expect(",");
  }
}

inline PLMap parse_pl(Cursor& cur) {
  cur.expect("pl{");
  cur.expect("slopes=");
  std::vector<Scalar> slopes = parse_list(cur);
  cur.expect("bp=");
  std::vector<Scalar> bps = parse_list(cur);
  cur.expect("anchor=(");
  Scalar x = parse_scalar(cur);
  cur.expect(",");
  Scalar y = parse_scalar(cur);
  cur.expect(")");
  cur.expect("}");
  return PLMap::from_pieces(std::move(bps), std::move(slopes), x, y);
}

inline LazyPLMap parse_lazy(Cursor& cur) {
  cur.skip_ws();
  if (cur.consume("eq{")) {
    cur.expect("period=");
    Scalar period = parse_scalar(cur);
    cur.expect("cell=");
    PLMap cell = parse_pl(cur);
    cur.expect("}");
    return EquivariantPLMap::from_cell(period, cell.breakpoints(), cell.slopes(), cell(Scalar(0)));
  }
  if (cur.consume("tw{")) {
    cur.expect("T=");
    Scalar period = parse_scalar(cur);
    cur.expect("cell=");
    PLMap cell = parse_pl(cur);
    cur.expect("}");
    return make_twisted(cell, period);
  }
  if (cur.consume("orbit{")) {
    cur.expect("base=");
    LazyPLMap base = parse_lazy(cur);
    Scalar x0(0);
    cur.skip_ws();
    if (cur.consume("x0=")) x0 = parse_scalar(cur);
    cur.expect("}");
    Displacement d = fixed_point_free_displacement(base);
    if (d.direction < 0) fail(errc::has_fixed_point, "orbit base must move points upward");
    return LazyPLMap::conjugator(base, x0, d.delta);
  }
  if (cur.consume("inv{")) {
    LazyPLMap base = parse_lazy(cur);
    cur.expect("}");
    return lazy_invert(base);
  }
  if (cur.consume("comp{")) {
    std::vector<LazyPLMap> fs;
    do {
      fs.push_back(parse_lazy(cur));
      cur.skip_ws();
    } while (!cur.consume("}"));
    return lazy_compose_all(fs);
  }
  if (cur.peek() == 'p') return parse_pl(cur);
  cur.error("expected a map (pl, eq, tw, orbit, inv or comp)");
}

}  // namespace detail

inline LazyPLMap parse_map(std::string_view text) {
  detail::Cursor cur(text);
  LazyPLMap m = detail::parse_lazy(cur);
  cur.skip_ws();
  if (!cur.at_end()) cur.error("trailing characters after map");
  return m;
}

/// Parses a map that must have finitely many breakpoints.
inline PLMap parse_pl_map(std::string_view text) {
  LazyPLMap m = parse_map(text);
  if (const PLMap* f = m.as_finite()) return *f;
  fail(errc::precondition_failed, "expected a map with finitely many breakpoints");
}

}  // namespace plrev
