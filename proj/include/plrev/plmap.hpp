// SPDX-License-Identifier: Apache-2.0
#pragma once

/*
 * Piecewise linear homeomorphisms of the line with finitely many breakpoints.
 *
 * A PLMap is stored as strictly increasing breakpoints, one slope per open
 * piece (left to right) and the value at 0. Every constructor canonicalizes:
 * breakpoints between equal slopes are dropped, so two maps are equal as
 * functions exactly when they compare equal structurally.
 */

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "plrev/error.hpp"
#include "plrev/scalar.hpp"

namespace plrev {

/// Interval of the line; a missing end is infinite. Used both for closed
/// fixed components and for open bump domains.
struct Interval {
  std::optional<Scalar> lo;
  std::optional<Scalar> hi;

  bool is_point() const { return lo && hi && *lo == *hi; }
  bool is_line() const { return !lo && !hi; }

  bool contains_closed(const Scalar& x) const {
    return (!lo || *lo <= x) && (!hi || x <= *hi);
  }
  bool contains_open(const Scalar& x) const { return (!lo || *lo < x) && (!hi || x < *hi); }

  /// Some point strictly inside (or the point itself).
  Scalar interior_point() const {
    if (lo && hi) return (*lo + *hi) / Scalar(2);
    if (lo) return *lo + Scalar(1);
    if (hi) return *hi - Scalar(1);
    return Scalar(0);
  }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Solution set of f(x) = x: sorted, disjoint, non-adjacent components.
struct FixedSet {
  std::vector<Interval> items;

  bool empty() const { return items.empty(); }
  bool contains(const Scalar& x) const {
    return std::any_of(items.begin(), items.end(),
                       [&](const Interval& c) { return c.contains_closed(x); });
  }
  friend bool operator==(const FixedSet&, const FixedSet&) = default;
};

class PLMap {
 public:
  /// The identity map.
  PLMap() : slopes_{Scalar(1)} {}

  static PLMap from_pieces(std::vector<Scalar> breakpoints, std::vector<Scalar> slopes,
                           const Scalar& x0, const Scalar& y0) {
    if (slopes.empty()) fail(errc::empty_slopes, "a map needs at least one slope");
    if (slopes.size() != breakpoints.size() + 1)
      fail(errc::empty_slopes, "expected " + std::to_string(breakpoints.size() + 1) +
                                   " slopes, got " + std::to_string(slopes.size()));
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
      if (!(breakpoints[i - 1] < breakpoints[i]))
        fail(errc::unsorted_breakpoints, breakpoints[i - 1].str() + " >= " + breakpoints[i].str());
    int sign = slopes.front().sign();
    for (const auto& s : slopes) {
      if (s.sign() == 0) fail(errc::zero_slope, "slopes must be nonzero");
      if (s.sign() != sign) fail(errc::mixed_slope_signs, "slopes must share one sign");
    }

    PLMap f;
    f.slopes_ = {std::move(slopes[0])};
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
      if (slopes[i + 1] == f.slopes_.back()) continue;
      f.breakpoints_.push_back(std::move(breakpoints[i]));
      f.slopes_.push_back(std::move(slopes[i + 1]));
    }

    // Values at breakpoints, pinned by the anchor.
    f.values_.assign(f.breakpoints_.size(), Scalar(0));
    for (std::size_t i = 1; i < f.breakpoints_.size(); ++i)
      f.values_[i] = f.values_[i - 1] + f.slopes_[i] * (f.breakpoints_[i] - f.breakpoints_[i - 1]);
    f.y0_ = Scalar(0);
    Scalar offset = y0 - f(x0);
    for (auto& v : f.values_) v += offset;
    f.y0_ += offset;
    f.y0_ = f(Scalar(0));
    return f;
  }

  static PLMap affine(const Scalar& slope, const Scalar& intercept) {
    return from_pieces({}, {slope}, Scalar(0), intercept);
  }
  static PLMap identity() { return PLMap(); }
  static PLMap translation(const Scalar& t) { return affine(Scalar(1), t); }

  const std::vector<Scalar>& breakpoints() const { return breakpoints_; }
  const std::vector<Scalar>& slopes() const { return slopes_; }
  /// Values f(b) at the breakpoints.
  const std::vector<Scalar>& values() const { return values_; }
  /// Canonical anchor (0, f(0)).
  std::pair<Scalar, Scalar> anchor() const { return {Scalar(0), y0_}; }

  int degree() const { return slopes_.front().sign(); }
  bool is_increasing() const { return degree() > 0; }

  Scalar operator()(const Scalar& x) const {
    if (breakpoints_.empty()) return y0_ + slopes_[0] * x;
    std::size_t i = piece_index(x);
    if (i == 0) return values_[0] + slopes_[0] * (x - breakpoints_[0]);
    return values_[i - 1] + slopes_[i] * (x - breakpoints_[i - 1]);
  }

  /// f^{-1}(y) without building the inverse map.
  Scalar inverse_at(const Scalar& y) const {
    if (breakpoints_.empty()) return (y - y0_) / slopes_[0];
    std::size_t i;
    if (is_increasing()) {
      i = static_cast<std::size_t>(
          std::upper_bound(values_.begin(), values_.end(), y) - values_.begin());
    } else {
      i = static_cast<std::size_t>(
          std::partition_point(values_.begin(), values_.end(),
                               [&](const Scalar& v) { return v >= y; }) -
          values_.begin());
    }
    if (i == 0) return breakpoints_[0] + (y - values_[0]) / slopes_[0];
    return breakpoints_[i - 1] + (y - values_[i - 1]) / slopes_[i];
  }

  /// Slope of the piece [b_{i-1}, b_i) containing x (right derivative).
  const Scalar& slope_at(const Scalar& x) const { return slopes_[piece_index(x)]; }

  bool is_identity() const {
    return breakpoints_.empty() && slopes_[0] == Scalar(1) && y0_.is_zero();
  }

  friend bool operator==(const PLMap& f, const PLMap& g) {
    return f.breakpoints_ == g.breakpoints_ && f.slopes_ == g.slopes_ && f.y0_ == g.y0_;
  }

 private:
  std::size_t piece_index(const Scalar& x) const {
    return static_cast<std::size_t>(
        std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) - breakpoints_.begin());
  }

  std::vector<Scalar> breakpoints_;
  std::vector<Scalar> slopes_;
  std::vector<Scalar> values_;
  Scalar y0_{0};
};

namespace detail {

inline void sort_unique(std::vector<Scalar>& xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
}

/// One probe point inside each open piece cut out by `cuts` (sorted, unique).
inline std::vector<Scalar> piece_probes(const std::vector<Scalar>& cuts) {
  std::vector<Scalar> probes;
  if (cuts.empty()) return {Scalar(0)};
  probes.reserve(cuts.size() + 1);
  probes.push_back(cuts.front() - Scalar(1));
  for (std::size_t i = 1; i < cuts.size(); ++i)
    probes.push_back((cuts[i - 1] + cuts[i]) / Scalar(2));
  probes.push_back(cuts.back() + Scalar(1));
  return probes;
}

/// Builds a PLMap that is affine between consecutive cuts, with the slope of
/// each piece read off at an interior probe, passing through (x0, y0).
inline PLMap assemble(std::vector<Scalar> cuts, const std::function<Scalar(const Scalar&)>& slope,
                      const Scalar& x0, const Scalar& y0) {
  std::vector<Scalar> slopes;
  for (const auto& p : piece_probes(cuts)) slopes.push_back(slope(p));
  return PLMap::from_pieces(std::move(cuts), std::move(slopes), x0, y0);
}

}  // namespace detail

/// x -> f(g(x)).
inline PLMap compose(const PLMap& f, const PLMap& g) {
  std::vector<Scalar> cuts = g.breakpoints();
  for (const auto& b : f.breakpoints()) cuts.push_back(g.inverse_at(b));
  detail::sort_unique(cuts);
  return detail::assemble(
      std::move(cuts), [&](const Scalar& x) { return f.slope_at(g(x)) * g.slope_at(x); },
      Scalar(0), f(g(Scalar(0))));
}

inline PLMap invert(const PLMap& f) {
  std::vector<Scalar> cuts = f.values();
  if (!f.is_increasing()) std::reverse(cuts.begin(), cuts.end());
  return detail::assemble(
      std::move(cuts), [&](const Scalar& y) { return f.slope_at(f.inverse_at(y)).inverse(); },
      f(Scalar(0)), Scalar(0));
}

inline bool equals(const PLMap& f, const PLMap& g) { return f == g; }
inline bool is_identity(const PLMap& f) { return f.is_identity(); }
inline bool is_involution(const PLMap& f) { return compose(f, f).is_identity(); }

/// f^n for any integer n.
inline PLMap power(const PLMap& f, long n) {
  PLMap base = n < 0 ? invert(f) : f;
  PLMap out;
  for (long i = 0; i < (n < 0 ? -n : n); ++i) out = compose(base, out);
  return out;
}

/// h f h^{-1}.
inline PLMap conjugate(const PLMap& h, const PLMap& f) { return compose(h, compose(f, invert(h))); }

inline FixedSet fixed_set(const PLMap& f) {
  const auto& bps = f.breakpoints();
  const auto& slopes = f.slopes();
  std::vector<Interval> raw;
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    Interval piece;
    if (i > 0) piece.lo = bps[i - 1];
    if (i < bps.size()) piece.hi = bps[i];
    // On this piece f(x) - x = (m - 1) x + c.
    const Scalar& m = slopes[i];
    Scalar ref = piece.interior_point();
    Scalar c = f(ref) - m * ref;
    if (m == Scalar(1)) {
      if (c.is_zero()) raw.push_back(piece);
      continue;
    }
    Scalar x = -c / (m - Scalar(1));
    if (piece.contains_closed(x)) raw.push_back(Interval{x, x});
  }

  FixedSet out;
  for (auto& c : raw) {
    if (!out.items.empty()) {
      Interval& last = out.items.back();
      if (last.hi && c.lo && *c.lo <= *last.hi) {
        if (!c.hi)
          last.hi.reset();
        else if (*last.hi < *c.hi)
          last.hi = c.hi;
        continue;
      }
    }
    out.items.push_back(std::move(c));
  }
  return out;
}

/// Connected components of the complement of fix(f), in order.
inline std::vector<Interval> bump_domains(const PLMap& f) {
  FixedSet fix = fixed_set(f);
  std::vector<Interval> out;
  if (fix.empty()) return {Interval{}};
  if (fix.items.front().lo) out.push_back(Interval{std::nullopt, fix.items.front().lo});
  for (std::size_t i = 1; i < fix.items.size(); ++i)
    out.push_back(Interval{fix.items[i - 1].hi, fix.items[i].lo});
  if (fix.items.back().hi) out.push_back(Interval{fix.items.back().hi, std::nullopt});
  return out;
}

/// Left-most and right-most gradients (gamma_L, gamma_R).
inline std::pair<Scalar, Scalar> end_slopes(const PLMap& f) {
  return {f.slopes().front(), f.slopes().back()};
}

/// The unique fixed point of an orientation-reversing map.
inline Scalar reversing_fixed_point(const PLMap& f) {
  if (f.is_increasing()) fail(errc::orientation_error, "map is orientation preserving");
  FixedSet fix = fixed_set(f);
  if (fix.items.size() != 1 || !fix.items[0].is_point())
    fail(errc::internal_verification_failed, "decreasing map without a unique fixed point");
  return *fix.items[0].lo;
}

enum class Extreme { min, max };

/// Pointwise min or max of two maps of the same degree.
inline PLMap pl_extreme(const PLMap& f, const PLMap& g, Extreme which) {
  if (f.degree() != g.degree())
    fail(errc::mixed_monotonicity, "pointwise extreme of maps with different degrees");
  std::vector<Scalar> cuts = f.breakpoints();
  cuts.insert(cuts.end(), g.breakpoints().begin(), g.breakpoints().end());
  detail::sort_unique(cuts);

  // f - g is affine on each piece; its zeros become breakpoints.
  std::vector<Scalar> crossings;
  std::vector<Scalar> probes = detail::piece_probes(cuts);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const Scalar& p = probes[i];
    Scalar ds = f.slope_at(p) - g.slope_at(p);
    if (ds.is_zero()) continue;
    Scalar z = p - (f(p) - g(p)) / ds;
    bool inside = (i == 0 || cuts[i - 1] < z) && (i == cuts.size() || z < cuts[i]);
    if (cuts.empty()) inside = true;
    if (inside) crossings.push_back(z);
  }
  cuts.insert(cuts.end(), crossings.begin(), crossings.end());
  detail::sort_unique(cuts);

  auto pick_f = [&](const Scalar& x) {
    auto c = f(x) <=> g(x);
    return which == Extreme::max ? c >= 0 : c <= 0;
  };
  Scalar zero(0);
  return detail::assemble(
      std::move(cuts),
      [&](const Scalar& x) { return pick_f(x) ? f.slope_at(x) : g.slope_at(x); }, zero,
      pick_f(zero) ? f(zero) : g(zero));
}

/// The map equal to `left` on (-inf, p) and to `right` on [p, +inf).
/// Requires left(p) == right(p).
inline PLMap splice(const PLMap& left, const PLMap& right, const Scalar& p) {
  if (left(p) != right(p)) fail(errc::precondition_failed, "splice pieces disagree at " + p.str());
  std::vector<Scalar> cuts;
  for (const auto& b : left.breakpoints())
    if (b < p) cuts.push_back(b);
  cuts.push_back(p);
  for (const auto& b : right.breakpoints())
    if (p < b) cuts.push_back(b);
  return detail::assemble(
      std::move(cuts),
      [&](const Scalar& x) { return x < p ? left.slope_at(x) : right.slope_at(x); }, p,
      right(p));
}

/// x -> f(x) + c.
inline PLMap shifted(const PLMap& f, const Scalar& c) { return compose(PLMap::translation(c), f); }

/// f(x) > g(x) for every real x (exact: checked at all breakpoints and on both rays).
inline bool strictly_dominates(const PLMap& f, const PLMap& g) {
  std::vector<Scalar> cuts = f.breakpoints();
  cuts.insert(cuts.end(), g.breakpoints().begin(), g.breakpoints().end());
  detail::sort_unique(cuts);
  if (cuts.empty()) cuts.push_back(Scalar(0));
  for (const auto& x : cuts)
    if (!(f(x) > g(x))) return false;
  // f - g must not decrease towards +inf nor increase towards -inf.
  Scalar right = f.slopes().back() - g.slopes().back();
  Scalar left = f.slopes().front() - g.slopes().front();
  return right.sign() >= 0 && left.sign() <= 0;
}

inline std::string to_string(const PLMap& f) {
  std::string out = "pl{slopes=[";
  for (std::size_t i = 0; i < f.slopes().size(); ++i)
    out += (i ? "," : "") + f.slopes()[i].str();
  out += "] bp=[";
  for (std::size_t i = 0; i < f.breakpoints().size(); ++i)
    out += (i ? "," : "") + f.breakpoints()[i].str();
  auto [x0, y0] = f.anchor();
  out += "] anchor=(" + x0.str() + "," + y0.str() + ")}";
  return out;
}

}  // namespace plrev
