// SPDX-License-Identifier: Apache-2.0
#pragma once

/*
 * The signature Gamma_f(x) = sign(f(x) - x) of a PLF map, as a finite
 * sequence over {-1, 0, +1}, and the conjugacy / reversibility decisions it
 * supports inside the full homeomorphism group of the line.
 *
 * The region list partitions the line into fixed components (label 0; points
 * or closed intervals) and bump domains (label +-1), in spatial order. The
 * reduced signature is the region list with isolated fixed points dropped;
 * it determines the region list, since two consecutive nonzero entries are
 * always separated by an isolated fixed point.
 */

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "plrev/error.hpp"
#include "plrev/plmap.hpp"

namespace plrev {

struct Region {
  Interval span;  // closed for fixed components, open for bumps
  int label = 0;  // -1, 0, +1

  bool is_isolated_point() const { return label == 0 && span.is_point(); }
  friend bool operator==(const Region&, const Region&) = default;
};

struct ReducedSignature {
  std::vector<int> entries;

  bool is_palindrome() const {
    return std::equal(entries.begin(), entries.begin() + entries.size() / 2, entries.rbegin());
  }
  ReducedSignature negated() const {
    ReducedSignature r = *this;
    for (int& e : r.entries) e = -e;
    return r;
  }
  ReducedSignature reversed() const {
    return ReducedSignature{{entries.rbegin(), entries.rend()}};
  }
  /// Printed form, e.g. `[+1,+1]`.
  std::string str() const {
    std::string out = "[";
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (i) out += ",";
      out += entries[i] > 0 ? "+1" : (entries[i] < 0 ? "-1" : "0");
    }
    return out + "]";
  }
  friend bool operator==(const ReducedSignature&, const ReducedSignature&) = default;
};

/// Reduced signature of f^2 for an orientation-reversing f, with the slot of
/// the fixed point p of f. If `isolated` is false, p lies in the fixed
/// interval at entries[mark]; otherwise p is an isolated fixed point sitting
/// immediately left of entries[mark].
struct MarkedSignature {
  ReducedSignature base;
  std::size_t mark = 0;
  bool isolated = false;

  MarkedSignature negated() const { return {base.negated(), mark, isolated}; }
  /// The signature seen through an orientation-reversing reparametrization.
  MarkedSignature reversed() const {
    std::size_t n = base.entries.size();
    return {base.reversed(), isolated ? n - mark : n - 1 - mark, isolated};
  }
  friend bool operator==(const MarkedSignature&, const MarkedSignature&) = default;
};

/// Fixed components and bumps of f in spatial order.
inline std::vector<Region> signature_regions(const PLMap& f) {
  FixedSet fix = fixed_set(f);
  std::vector<Interval> bumps = bump_domains(f);
  auto bump_label = [&](const Interval& b) {
    Scalar x = b.interior_point();
    return (f(x) - x).sign();
  };
  std::vector<Region> out;
  std::size_t fi = 0, bi = 0;
  // The line starts with a bump iff the first fixed component is bounded below.
  bool bump_next = fix.empty() || fix.items.front().lo.has_value();
  while (fi < fix.items.size() || bi < bumps.size()) {
    if (bump_next && bi < bumps.size()) {
      out.push_back({bumps[bi], bump_label(bumps[bi])});
      ++bi;
    } else if (fi < fix.items.size()) {
      out.push_back({fix.items[fi], 0});
      ++fi;
    }
    bump_next = !bump_next;
  }
  return out;
}

inline ReducedSignature reduced_signature(const PLMap& f) {
  ReducedSignature sig;
  for (const auto& r : signature_regions(f))
    if (!r.is_isolated_point()) sig.entries.push_back(r.label);
  return sig;
}

/// Decides Gamma_f = deg(h) * (Gamma_g o h) exactly: h must carry each region
/// of g back onto the matching region of f (order reversed when h decreases)
/// with labels related by deg(h).
inline bool check_conjugacy_signature(const PLMap& f, const PLMap& g, const PLMap& h) {
  std::vector<Region> rf = signature_regions(f);
  std::vector<Region> rg = signature_regions(g);
  if (rf.size() != rg.size()) return false;
  const int deg = h.degree();
  std::vector<Region> pulled;
  pulled.reserve(rg.size());
  for (const auto& r : rg) {
    Interval span;
    auto lo = r.span.lo ? std::optional<Scalar>(h.inverse_at(*r.span.lo)) : std::nullopt;
    auto hi = r.span.hi ? std::optional<Scalar>(h.inverse_at(*r.span.hi)) : std::nullopt;
    if (deg > 0) {
      span = {lo, hi};
    } else {
      span = {hi, lo};
    }
    pulled.push_back({span, deg * r.label});
  }
  if (deg < 0) std::reverse(pulled.begin(), pulled.end());
  return pulled == rf;
}

inline MarkedSignature marked_signature(const PLMap& f) {
  const Scalar p = reversing_fixed_point(f);
  PLMap f2 = compose(f, f);
  MarkedSignature out;
  for (const auto& r : signature_regions(f2)) {
    if (r.is_isolated_point()) {
      if (*r.span.lo == p) {
        out.mark = out.base.entries.size();
        out.isolated = true;
      }
      continue;
    }
    if (r.label == 0 && r.span.contains_closed(p)) {
      out.mark = out.base.entries.size();
      out.isolated = false;
    }
    out.base.entries.push_back(r.label);
  }
  return out;
}

struct ReversibilityFlags {
  bool by_increasing = false;
  bool by_decreasing = false;
  friend bool operator==(const ReversibilityFlags&, const ReversibilityFlags&) = default;
};

/// Reversibility of a PLF map inside the group of all homeomorphisms.
inline ReversibilityFlags reversible_in_H(const PLMap& f) {
  if (f.is_increasing()) {
    // Gamma_f = -deg(h) Gamma_f o h: order-preserving h forces Gamma_f = 0.
    return {f.is_identity(), reduced_signature(f).is_palindrome()};
  }
  // f^{-1} reversing: need h fixing p with Gamma_{f^2} = deg(h) Gamma_{f^-2} o h.
  MarkedSignature mf = marked_signature(f);
  MarkedSignature mg = marked_signature(invert(f));
  bool by_inc = mf == mg;
  bool by_dec = mf == mg.reversed().negated();
  // h reverses f iff h f reverses f, and the two have opposite degrees.
  bool any = by_inc || by_dec;
  return {any, any};
}

inline bool strongly_reversible_in_H(const PLMap& f) {
  if (!f.is_increasing())
    fail(errc::orientation_error,
         "orientation-reversing maps are strongly reversible iff they are involutions");
  return reduced_signature(f).is_palindrome();
}

}  // namespace plrev
