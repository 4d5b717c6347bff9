// SPDX-License-Identifier: Apache-2.0
#pragma once

/*
 * PL homeomorphisms with a discrete but possibly infinite set of breakpoints.
 *
 * A LazyPLMap is an immutable expression tree over four leaf/node kinds:
 * finite PL maps, translation-equivariant maps, orbit conjugators and
 * composites. Every node evaluates exactly, inverts exactly, and enumerates a
 * finite superset of its breakpoints inside any bounded window. Equality on a
 * window is decided from those candidate sets.
 */

#include <cstddef>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "plrev/error.hpp"
#include "plrev/plmap.hpp"
#include "plrev/scalar.hpp"

namespace plrev {

/// Upper bound on orbit steps and fundamental domains before a construction
/// is declared non-discrete.
inline constexpr std::size_t kLazyStepLimit = 20000;

/// Upper bound on breakpoints enumerated in one window.
inline constexpr std::size_t kLazyBreakpointLimit = 200000;

/// Increasing PL map with g(x + T) = g(x) + T, stored by one cell [0, T):
/// knots 0 = c_0 < c_1 < ... < c_k < T, slope s_i on [c_i, c_{i+1}), and g(0).
class EquivariantPLMap {
 public:
  static EquivariantPLMap from_cell(const Scalar& period, std::vector<Scalar> knots,
                                    std::vector<Scalar> slopes, const Scalar& y0) {
    if (period.sign() <= 0) fail(errc::non_positive_parameter, "period must be positive");
    if (slopes.size() != knots.size() + 1)
      fail(errc::empty_slopes, "expected one more slope than interior knots");
    Scalar prev(0);
    for (const auto& c : knots) {
      if (!(prev < c) || !(c < period))
        fail(errc::unsorted_breakpoints, "cell knots must be strictly inside (0, T)");
      prev = c;
    }
    for (const auto& s : slopes)
      if (s.sign() <= 0) fail(errc::not_monotone, "equivariant maps need positive slopes");

    EquivariantPLMap g;
    g.period_ = period;
    g.knots_ = {Scalar(0)};
    g.slopes_ = {slopes[0]};
    for (std::size_t i = 0; i < knots.size(); ++i) {
      if (slopes[i + 1] == g.slopes_.back()) continue;
      g.knots_.push_back(knots[i]);
      g.slopes_.push_back(slopes[i + 1]);
    }
    g.values_ = {y0};
    for (std::size_t i = 1; i < g.knots_.size(); ++i)
      g.values_.push_back(g.values_[i - 1] + g.slopes_[i - 1] * (g.knots_[i] - g.knots_[i - 1]));
    Scalar end = g.values_.back() + g.slopes_.back() * (period - g.knots_.back());
    if (end != y0 + period)
      fail(errc::endpoint_mismatch, "cell does not close up: g(T-) = " + end.str() +
                                        ", expected " + (y0 + period).str());
    return g;
  }

  /// Builds the map with period T that is affine between consecutive points
  /// of `cuts` (which must contain 0 and T) and agrees with `eval` there.
  template <class Eval>
  static EquivariantPLMap sample(const Scalar& period, std::vector<Scalar> cuts, Eval&& eval) {
    detail::sort_unique(cuts);
    std::vector<Scalar> knots, slopes;
    Scalar prev_x = cuts.front(), prev_y = eval(prev_x);
    Scalar y0 = prev_y;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
      Scalar y = eval(cuts[i]);
      slopes.push_back((y - prev_y) / (cuts[i] - prev_x));
      if (i + 1 < cuts.size()) knots.push_back(cuts[i]);
      prev_x = cuts[i];
      prev_y = y;
    }
    return from_cell(period, std::move(knots), std::move(slopes), y0);
  }

  const Scalar& period() const { return period_; }
  const std::vector<Scalar>& knots() const { return knots_; }
  const std::vector<Scalar>& slopes() const { return slopes_; }
  const std::vector<Scalar>& values() const { return values_; }
  const Scalar& y0() const { return values_.front(); }

  Scalar operator()(const Scalar& x) const {
    Integer n = (x / period_).floor();
    Scalar shift = Scalar(Rational(n)) * period_;
    Scalar r = x - shift;
    std::size_t i = index_of(knots_, r);
    return values_[i] + slopes_[i] * (r - knots_[i]) + shift;
  }

  Scalar inverse_at(const Scalar& y) const {
    Integer n = ((y - y0()) / period_).floor();
    Scalar shift = Scalar(Rational(n)) * period_;
    Scalar r = y - shift;  // in [y0, y0 + T)
    std::size_t i = index_of(values_, r);
    return knots_[i] + (r - values_[i]) / slopes_[i] + shift;
  }

  /// Knot translates c_i + nT inside [lo, hi].
  std::vector<Scalar> candidates(const Scalar& lo, const Scalar& hi) const {
    std::vector<Scalar> out;
    if (hi < lo) return out;
    Integer n0 = (lo / period_).floor(), n1 = (hi / period_).floor();
    if (Integer(n1 - n0) * knots_.size() > kLazyBreakpointLimit)
      fail(errc::non_discrete_breakpoints, "window holds too many knots");
    for (Integer n = n0; n <= n1; ++n) {
      Scalar shift = Scalar(Rational(n)) * period_;
      for (const auto& c : knots_) {
        Scalar x = c + shift;
        if (lo <= x && x <= hi) out.push_back(x);
      }
    }
    return out;
  }

  EquivariantPLMap inverse() const {
    std::vector<Scalar> cuts = {Scalar(0), period_};
    for (const auto& c : candidates(inverse_at(Scalar(0)), inverse_at(period_))) {
      Scalar y = (*this)(c);
      if (Scalar(0) < y && y < period_) cuts.push_back(y);
    }
    return sample(period_, std::move(cuts), [this](const Scalar& y) { return inverse_at(y); });
  }

  /// Extreme values of g(x) - x, attained at knots.
  std::pair<Scalar, Scalar> displacement_range() const {
    Scalar lo = values_[0] - knots_[0], hi = lo;
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      Scalar d = values_[i] - knots_[i];
      lo = min(lo, d);
      hi = max(hi, d);
    }
    return {lo, hi};
  }

  friend bool operator==(const EquivariantPLMap&, const EquivariantPLMap&) = default;

 private:
  static std::size_t index_of(const std::vector<Scalar>& xs, const Scalar& r) {
    auto it = std::upper_bound(xs.begin(), xs.end(), r);
    return static_cast<std::size_t>(it - xs.begin()) - 1;
  }

  Scalar period_{1};
  std::vector<Scalar> knots_{Scalar(0)};
  std::vector<Scalar> slopes_{Scalar(1)};
  std::vector<Scalar> values_{Scalar(0)};
};

/// Smallest common period of two commensurable periods, if any.
inline std::optional<Scalar> common_period(const Scalar& a, const Scalar& b) {
  Scalar r = a / b;
  if (!r.is_rational()) return std::nullopt;
  Rational q = r.a();
  return a * Scalar(Rational(q.get_den()));
}

inline EquivariantPLMap compose(const EquivariantPLMap& f, const EquivariantPLMap& g) {
  auto period = common_period(f.period(), g.period());
  if (!period) fail(errc::precondition_failed, "incommensurable periods");
  std::vector<Scalar> cuts = g.candidates(Scalar(0), *period);
  cuts.push_back(*period);
  for (const auto& y : f.candidates(g(Scalar(0)), g(*period))) cuts.push_back(g.inverse_at(y));
  return EquivariantPLMap::sample(*period, std::move(cuts),
                                  [&](const Scalar& x) { return f(g(x)); });
}

/// Period-2T map solving g(x + T) = g^{-1}(x) + T, from its restriction to
/// [0, T], which must fix both ends.
inline EquivariantPLMap make_twisted(const PLMap& cell, const Scalar& period) {
  if (period.sign() <= 0) fail(errc::non_positive_parameter, "period must be positive");
  if (!cell.is_increasing()) fail(errc::not_monotone, "twisted cell must be increasing");
  if (cell(Scalar(0)) != Scalar(0))
    fail(errc::endpoint_mismatch, "twisted cell must fix 0, got " + cell(Scalar(0)).str());
  if (cell(period) != period)
    fail(errc::endpoint_mismatch, "twisted cell must fix T, got " + cell(period).str());
  std::vector<Scalar> cuts = {Scalar(0), period, period * Scalar(2)};
  for (const auto& b : cell.breakpoints()) {
    if (Scalar(0) < b && b < period) {
      cuts.push_back(b);
      cuts.push_back(cell(b) + period);
    }
  }
  return EquivariantPLMap::sample(period * Scalar(2), std::move(cuts), [&](const Scalar& x) {
    return x < period ? cell(x) : cell.inverse_at(x - period) + period;
  });
}

class LazyPLMap;

namespace detail {
struct LazyNode;
}

/// Conjugator k with k w k^{-1} = x + 1 for an upward w (w(x) > x): affine
/// from [x0, w(x0)) onto [0, 1) and k(w(x)) = k(x) + 1.
struct OrbitConjugator;

class LazyPLMap {
 public:
  enum class Kind { finite, equivariant, conjugator, inverse, composite };

  struct Factor;

  LazyPLMap() : LazyPLMap(PLMap::identity()) {}
  LazyPLMap(PLMap f);  // NOLINT(google-explicit-constructor): finite maps embed implicitly
  LazyPLMap(EquivariantPLMap g);  // NOLINT(google-explicit-constructor)

  static LazyPLMap conjugator(const LazyPLMap& base, const Scalar& x0, const Scalar& delta);

  Kind kind() const;
  const PLMap* as_finite() const;
  const EquivariantPLMap* as_equivariant() const;
  const OrbitConjugator* as_conjugator() const;
  /// The map this node inverts, for Kind::inverse.
  const LazyPLMap* inverted_base() const;
  /// Factors applied right to left, for Kind::composite.
  const std::vector<LazyPLMap>* factors() const;

  Scalar operator()(const Scalar& x) const;
  Scalar inverse_at(const Scalar& y) const;
  /// Finite superset of the breakpoints in [lo, hi].
  std::vector<Scalar> candidates(const Scalar& lo, const Scalar& hi) const;
  int degree() const;
  bool is_increasing() const { return degree() > 0; }

 private:
  explicit LazyPLMap(std::shared_ptr<const detail::LazyNode> node) : node_(std::move(node)) {}
  friend LazyPLMap lazy_invert(const LazyPLMap& g);
  friend LazyPLMap lazy_compose(const LazyPLMap& f, const LazyPLMap& g);

  std::shared_ptr<const detail::LazyNode> node_;
};

struct OrbitConjugator {
  LazyPLMap base;
  Scalar x0;
  Scalar x1;     // base(x0)
  Scalar delta;  // positive lower bound for base(x) - x

  OrbitConjugator(LazyPLMap b, Scalar start, Scalar next, Scalar step)
      : base(std::move(b)), x0(std::move(start)), x1(std::move(next)), delta(std::move(step)),
        tables_(std::make_shared<Tables>()) {
    tables_->up.push_back({x0, x1, {x0}, {Scalar(0)}, Scalar(0)});
  }

  /// k(x) by direct orbit iteration, with the number of steps taken.
  std::pair<Scalar, std::size_t> eval_with_count(const Scalar& x) const {
    Scalar y = x;
    long n = 0;
    std::size_t steps = 0;
    while (y >= x1) {
      y = base.inverse_at(y);
      ++n;
      if (++steps > kLazyStepLimit) fail(errc::non_discrete_breakpoints, "orbit does not reach x0");
    }
    while (y < x0) {
      y = base(y);
      --n;
      if (++steps > kLazyStepLimit) fail(errc::non_discrete_breakpoints, "orbit does not reach x0");
    }
    return {(y - x0) / (x1 - x0) + Scalar(n), steps};
  }

  Scalar operator()(const Scalar& x) const {
    std::lock_guard<std::mutex> lock(tables_->mu);
    return domain_of(x).eval(x);
  }

  Scalar inverse_at(const Scalar& y) const {
    Integer n = y.floor();
    if (abs(Scalar(Rational(n))) > Scalar(static_cast<long>(kLazyStepLimit)))
      fail(errc::non_discrete_breakpoints, "orbit too long");
    std::lock_guard<std::mutex> lock(tables_->mu);
    long i = n.get_si();
    const Domain& d = i >= 0 ? up_domain(static_cast<std::size_t>(i))
                             : down_domain(static_cast<std::size_t>(-i - 1));
    return d.inverse(y);
  }

  /// Breakpoints of k in [lo, hi] plus the fundamental-domain boundaries.
  std::vector<Scalar> candidates(const Scalar& lo, const Scalar& hi) const {
    std::vector<Scalar> out;
    if (hi < lo) return out;
    std::lock_guard<std::mutex> lock(tables_->mu);
    domain_of(lo);
    domain_of(hi);
    auto take = [&](const Domain& d) {
      if (d.end < lo || hi < d.start) return;
      for (const auto& x : d.xs)
        if (lo <= x && x <= hi) out.push_back(x);
    };
    for (const auto& d : tables_->up) take(d);
    for (const auto& d : tables_->down) take(d);
    return out;
  }

 private:
  /// k restricted to [start, end): affine between consecutive xs, with
  /// k(xs[i]) = ks[i] and k(end) = n + 1.
  struct Domain {
    Scalar start, end;
    std::vector<Scalar> xs, ks;
    Scalar n;

    Scalar eval(const Scalar& x) const {
      std::size_t i = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) - 1;
      const Scalar& xr = i + 1 < xs.size() ? xs[i + 1] : end;
      Scalar kr = i + 1 < ks.size() ? ks[i + 1] : n + Scalar(1);
      return ks[i] + (x - xs[i]) * (kr - ks[i]) / (xr - xs[i]);
    }
    Scalar inverse(const Scalar& y) const {
      std::size_t i = static_cast<std::size_t>(std::upper_bound(ks.begin(), ks.end(), y) - ks.begin()) - 1;
      const Scalar& xr = i + 1 < xs.size() ? xs[i + 1] : end;
      Scalar kr = i + 1 < ks.size() ? ks[i + 1] : n + Scalar(1);
      return xs[i] + (y - ks[i]) * (xr - xs[i]) / (kr - ks[i]);
    }
  };

  struct Tables {
    std::mutex mu;
    std::deque<Domain> up;    // n = 0, 1, 2, ...
    std::deque<Domain> down;  // n = -1, -2, ...
  };

  // Sorts the points, merges duplicates and drops points where k has no kink.
  static Domain finish(Scalar start, Scalar end, std::vector<std::pair<Scalar, Scalar>> pts,
                       const Scalar& n) {
    std::sort(pts.begin(), pts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Domain d{std::move(start), std::move(end), {}, {}, n};
    for (auto& [x, k] : pts) {
      if (!d.xs.empty() && d.xs.back() == x) continue;
      d.xs.push_back(std::move(x));
      d.ks.push_back(std::move(k));
    }
    std::vector<Scalar> xs = {d.xs[0]}, ks = {d.ks[0]};
    for (std::size_t i = 1; i < d.xs.size(); ++i) {
      const Scalar& xr = i + 1 < d.xs.size() ? d.xs[i + 1] : d.end;
      Scalar kr = i + 1 < d.ks.size() ? d.ks[i + 1] : n + Scalar(1);
      Scalar left = (d.ks[i] - ks.back()) / (d.xs[i] - xs.back());
      Scalar right = (kr - d.ks[i]) / (xr - d.xs[i]);
      if (left == right) continue;
      xs.push_back(d.xs[i]);
      ks.push_back(d.ks[i]);
    }
    d.xs = std::move(xs);
    d.ks = std::move(ks);
    return d;
  }

  void check_depth() const {
    if (tables_->up.size() + tables_->down.size() > kLazyStepLimit)
      fail(errc::non_discrete_breakpoints, "conjugator needs too many fundamental domains");
  }

  // k(base(x)) = k(x) + 1: push the last upper domain forward.
  const Domain& up_domain(std::size_t i) const {
    auto& up = tables_->up;
    while (up.size() <= i) {
      check_depth();
      const Domain& d = up.back();
      std::vector<std::pair<Scalar, Scalar>> pts;
      for (std::size_t j = 0; j < d.xs.size(); ++j) pts.emplace_back(base(d.xs[j]), d.ks[j] + Scalar(1));
      for (const auto& b : base.candidates(d.start, d.end))
        if (d.start < b && b < d.end) pts.emplace_back(base(b), d.eval(b) + Scalar(1));
      Scalar end = base(d.end);
      up.push_back(finish(d.end, std::move(end), std::move(pts), d.n + Scalar(1)));
    }
    return up[i];
  }

  // k(x) = k(base(x)) - 1: pull the first domain back.
  const Domain& down_domain(std::size_t i) const {
    auto& down = tables_->down;
    while (down.size() <= i) {
      check_depth();
      const Domain& d = down.empty() ? tables_->up.front() : down.back();
      Scalar start = base.inverse_at(d.start);
      std::vector<std::pair<Scalar, Scalar>> pts;
      for (std::size_t j = 0; j < d.xs.size(); ++j)
        pts.emplace_back(base.inverse_at(d.xs[j]), d.ks[j] - Scalar(1));
      for (const auto& b : base.candidates(start, d.start))
        if (start < b && b < d.start) pts.emplace_back(b, d.eval(base(b)) - Scalar(1));
      down.push_back(finish(std::move(start), d.start, std::move(pts), d.n - Scalar(1)));
    }
    return down[i];
  }

  const Domain& domain_of(const Scalar& x) const {
    if (x >= x0) {
      auto& up = tables_->up;
      while (!(x < up.back().end)) up_domain(up.size());
      auto it = std::upper_bound(up.begin(), up.end(), x,
                                 [](const Scalar& v, const Domain& d) { return v < d.start; });
      return *(it - 1);
    }
    auto& down = tables_->down;
    while (down.empty() || x < down.back().start) down_domain(down.size());
    // down is ordered right to left.
    auto it = std::upper_bound(down.begin(), down.end(), x,
                               [](const Scalar& v, const Domain& d) { return v >= d.start; });
    return *it;
  }

  std::shared_ptr<Tables> tables_;
};

namespace detail {

struct InverseNode {
  LazyPLMap base;
};

struct LazyNode {
  std::variant<PLMap, EquivariantPLMap, OrbitConjugator, InverseNode, std::vector<LazyPLMap>> value;
};

}  // namespace detail

inline LazyPLMap::LazyPLMap(PLMap f)
    : node_(std::make_shared<const detail::LazyNode>(detail::LazyNode{std::move(f)})) {}

inline LazyPLMap::LazyPLMap(EquivariantPLMap g)
    : node_(std::make_shared<const detail::LazyNode>(detail::LazyNode{std::move(g)})) {}

inline LazyPLMap LazyPLMap::conjugator(const LazyPLMap& base, const Scalar& x0,
                                       const Scalar& delta) {
  if (!base.is_increasing()) fail(errc::not_monotone, "orbit conjugator base must be increasing");
  if (delta.sign() <= 0) fail(errc::has_fixed_point, "orbit conjugator needs a positive step");
  Scalar x1 = base(x0);
  if (!(x1 > x0)) fail(errc::has_fixed_point, "base does not move x0 upward");
  return LazyPLMap(std::make_shared<const detail::LazyNode>(
      detail::LazyNode{OrbitConjugator(base, x0, x1, delta)}));
}

inline LazyPLMap::Kind LazyPLMap::kind() const { return static_cast<Kind>(node_->value.index()); }

inline const PLMap* LazyPLMap::as_finite() const { return std::get_if<PLMap>(&node_->value); }
inline const EquivariantPLMap* LazyPLMap::as_equivariant() const {
  return std::get_if<EquivariantPLMap>(&node_->value);
}
inline const OrbitConjugator* LazyPLMap::as_conjugator() const {
  return std::get_if<OrbitConjugator>(&node_->value);
}
inline const LazyPLMap* LazyPLMap::inverted_base() const {
  auto* n = std::get_if<detail::InverseNode>(&node_->value);
  return n ? &n->base : nullptr;
}
inline const std::vector<LazyPLMap>* LazyPLMap::factors() const {
  return std::get_if<std::vector<LazyPLMap>>(&node_->value);
}

inline Scalar LazyPLMap::operator()(const Scalar& x) const {
  return std::visit(
      [&](const auto& v) -> Scalar {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, detail::InverseNode>) {
          return v.base.inverse_at(x);
        } else if constexpr (std::is_same_v<T, std::vector<LazyPLMap>>) {
          Scalar y = x;
          for (auto it = v.rbegin(); it != v.rend(); ++it) y = (*it)(y);
          return y;
        } else {
          return v(x);
        }
      },
      node_->value);
}

inline Scalar LazyPLMap::inverse_at(const Scalar& y) const {
  return std::visit(
      [&](const auto& v) -> Scalar {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, detail::InverseNode>) {
          return v.base(y);
        } else if constexpr (std::is_same_v<T, std::vector<LazyPLMap>>) {
          Scalar x = y;
          for (const auto& f : v) x = f.inverse_at(x);
          return x;
        } else {
          return v.inverse_at(y);
        }
      },
      node_->value);
}

inline int LazyPLMap::degree() const {
  return std::visit(
      [&](const auto& v) -> int {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PLMap>) {
          return v.degree();
        } else if constexpr (std::is_same_v<T, detail::InverseNode>) {
          return v.base.degree();
        } else if constexpr (std::is_same_v<T, std::vector<LazyPLMap>>) {
          int d = 1;
          for (const auto& f : v) d *= f.degree();
          return d;
        } else {
          return 1;
        }
      },
      node_->value);
}

inline std::vector<Scalar> LazyPLMap::candidates(const Scalar& lo, const Scalar& hi) const {
  std::vector<Scalar> out;
  if (hi < lo) return out;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PLMap>) {
          for (const auto& b : v.breakpoints())
            if (lo <= b && b <= hi) out.push_back(b);
        } else if constexpr (std::is_same_v<T, detail::InverseNode>) {
          // Breakpoints of g^{-1} are images of breakpoints of g.
          Scalar a = v.base.inverse_at(lo), b = v.base.inverse_at(hi);
          if (b < a) std::swap(a, b);
          for (const auto& c : v.base.candidates(a, b)) out.push_back(v.base(c));
        } else if constexpr (std::is_same_v<T, std::vector<LazyPLMap>>) {
          // Push the window forward factor by factor, pulling candidates back.
          Scalar a = lo, b = hi;
          for (std::size_t k = v.size(); k-- > 0;) {
            for (auto c : v[k].candidates(a, b)) {
              for (std::size_t j = k + 1; j < v.size(); ++j) c = v[j].inverse_at(c);
              out.push_back(c);
            }
            Scalar na = v[k](a), nb = v[k](b);
            if (nb < na) std::swap(na, nb);
            a = na;
            b = nb;
          }
        } else {
          out = v.candidates(lo, hi);
        }
      },
      node_->value);
  if (out.size() > kLazyBreakpointLimit) fail(errc::non_discrete_breakpoints, "too many breakpoints");
  detail::sort_unique(out);
  return out;
}

inline LazyPLMap lazy_invert(const LazyPLMap& g) {
  using Node = detail::LazyNode;
  if (const PLMap* f = g.as_finite()) return LazyPLMap(invert(*f));
  if (const EquivariantPLMap* e = g.as_equivariant()) return LazyPLMap(e->inverse());
  if (const LazyPLMap* b = g.inverted_base()) return *b;
  if (const auto* fs = g.factors()) {
    std::vector<LazyPLMap> out;
    for (auto it = fs->rbegin(); it != fs->rend(); ++it) out.push_back(lazy_invert(*it));
    return LazyPLMap(std::make_shared<const Node>(Node{std::move(out)}));
  }
  return LazyPLMap(std::make_shared<const Node>(Node{detail::InverseNode{g}}));
}

namespace detail {

// Appends m to a right-to-left factor list, merging leaves and cancelling
// a factor against an adjacent inverse of the same node.
inline void push_factor(std::vector<LazyPLMap>& out, const LazyPLMap& m, bool (*cancels)(const LazyPLMap&, const LazyPLMap&)) {
  if (m.as_finite() && m.as_finite()->is_identity()) return;
  if (out.empty()) {
    out.push_back(m);
    return;
  }
  const LazyPLMap& b = out.back();
  if (cancels(b, m)) {
    out.pop_back();
    return;
  }
  if (b.as_finite() && m.as_finite()) {
    LazyPLMap merged(compose(*b.as_finite(), *m.as_finite()));
    out.pop_back();
    push_factor(out, merged, cancels);
    return;
  }
  if (b.as_equivariant() && m.as_equivariant() &&
      common_period(b.as_equivariant()->period(), m.as_equivariant()->period())) {
    LazyPLMap merged(compose(*b.as_equivariant(), *m.as_equivariant()));
    out.pop_back();
    push_factor(out, merged, cancels);
    return;
  }
  out.push_back(m);
}

}  // namespace detail

/// x -> f(g(x)). Finite and commensurable equivariant neighbours collapse to
/// a single leaf and a node next to its own inverse cancels; everything else
/// becomes a flattened composite.
inline LazyPLMap lazy_compose(const LazyPLMap& f, const LazyPLMap& g) {
  using Node = detail::LazyNode;
  auto cancels = [](const LazyPLMap& a, const LazyPLMap& b) {
    const LazyPLMap* ia = a.inverted_base();
    const LazyPLMap* ib = b.inverted_base();
    return (ia && ia->node_ == b.node_) || (ib && ib->node_ == a.node_);
  };
  std::vector<LazyPLMap> out;
  for (const LazyPLMap* m : {&f, &g}) {
    if (const auto* fs = m->factors()) {
      for (const auto& x : *fs) detail::push_factor(out, x, +cancels);
    } else {
      detail::push_factor(out, *m, +cancels);
    }
  }
  if (out.empty()) return LazyPLMap();
  if (out.size() == 1) return out.front();
  return LazyPLMap(std::make_shared<const Node>(Node{std::move(out)}));
}

/// f_0 o f_1 o ... o f_{n-1}.
inline LazyPLMap lazy_compose_all(const std::vector<LazyPLMap>& fs) {
  LazyPLMap out;
  for (auto it = fs.rbegin(); it != fs.rend(); ++it) out = lazy_compose(*it, out);
  return out;
}

/// h f h^{-1}.
inline LazyPLMap lazy_conjugate(const LazyPLMap& h, const LazyPLMap& f) {
  return lazy_compose(h, lazy_compose(f, lazy_invert(h)));
}

inline Scalar lazy_eval(const LazyPLMap& g, const Scalar& x) { return g(x); }

struct Window {
  Scalar lo;
  Scalar hi;
  friend bool operator==(const Window&, const Window&) = default;
};

/// The points at which two PL maps must agree for equality on [lo, hi]:
/// window ends, candidate breakpoints of both maps, and a midpoint per piece.
inline std::vector<Scalar> window_probes(const LazyPLMap& f, const LazyPLMap& g, const Window& w) {
  std::vector<Scalar> cuts = f.candidates(w.lo, w.hi);
  std::vector<Scalar> more = g.candidates(w.lo, w.hi);
  cuts.insert(cuts.end(), more.begin(), more.end());
  cuts.push_back(w.lo);
  cuts.push_back(w.hi);
  detail::sort_unique(cuts);
  std::vector<Scalar> pts = cuts;
  for (std::size_t i = 1; i < cuts.size(); ++i) pts.push_back((cuts[i - 1] + cuts[i]) / Scalar(2));
  return pts;
}

inline bool equals_on_window(const LazyPLMap& f, const LazyPLMap& g, const Window& w) {
  for (const auto& x : window_probes(f, g, w))
    if (f(x) != g(x)) return false;
  return true;
}

/// Genuine breakpoints in [lo, hi]: candidates where the slope changes.
inline std::vector<Scalar> lazy_breakpoints(const LazyPLMap& g, const Window& w) {
  Scalar a = w.lo - Scalar(1), b = w.hi + Scalar(1);
  std::vector<Scalar> cuts = g.candidates(a, b);
  cuts.push_back(a);
  cuts.push_back(b);
  detail::sort_unique(cuts);
  std::vector<Scalar> slopes;
  for (std::size_t i = 1; i < cuts.size(); ++i)
    slopes.push_back((g(cuts[i]) - g(cuts[i - 1])) / (cuts[i] - cuts[i - 1]));
  std::vector<Scalar> out;
  for (std::size_t i = 1; i + 1 < cuts.size(); ++i)
    if (slopes[i - 1] != slopes[i] && w.lo <= cuts[i] && cuts[i] <= w.hi) out.push_back(cuts[i]);
  return out;
}

/// Checks g(x + T) = g^{-1}(x) + T on the window.
inline bool verify_twisted(const LazyPLMap& g, const Scalar& period, const Window& w) {
  LazyPLMap shift = PLMap::translation(period);
  return equals_on_window(lazy_compose(g, shift), lazy_compose(shift, lazy_invert(g)), w);
}

/// Direction and step of a fixed-point-free map: sign of f(x) - x and the
/// infimum of |f(x) - x|.
struct Displacement {
  int direction;
  Scalar delta;
};

inline Displacement fixed_point_free_displacement(const LazyPLMap& f) {
  if (!f.is_increasing()) fail(errc::has_fixed_point, "orientation-reversing maps have a fixed point");
  Scalar lo, hi;
  if (const PLMap* p = f.as_finite()) {
    if (!fixed_set(*p).empty()) fail(errc::has_fixed_point, "map has a fixed point");
    std::vector<Scalar> pts = p->breakpoints();
    if (pts.empty()) pts.push_back(Scalar(0));
    lo = hi = (*p)(pts[0]) - pts[0];
    for (const auto& x : pts) {
      lo = min(lo, (*p)(x) - x);
      hi = max(hi, (*p)(x) - x);
    }
  } else if (const EquivariantPLMap* e = f.as_equivariant()) {
    std::tie(lo, hi) = e->displacement_range();
  } else {
    fail(errc::precondition_failed, "fixed-point test needs a finite or equivariant map");
  }
  if (lo.sign() > 0) return {1, lo};
  if (hi.sign() < 0) return {-1, -hi};
  fail(errc::has_fixed_point, "map has a fixed point");
}

/// k with k f k^{-1} = x + d, where d = +1 when f(x) > x and d = -1 when
/// f(x) < x (then k conjugates f^{-1} to x + 1). The fundamental domain
/// starts at 0.
inline LazyPLMap conjugator_to_translation(const LazyPLMap& f) {
  Displacement d = fixed_point_free_displacement(f);
  LazyPLMap up = d.direction > 0 ? f : lazy_invert(f);
  return LazyPLMap::conjugator(up, Scalar(0), d.delta);
}

inline std::string to_string(const LazyPLMap& g);

inline std::string to_string(const EquivariantPLMap& g) {
  std::string out = "eq{period=" + g.period().str() + " cell=pl{slopes=[";
  for (std::size_t i = 0; i < g.slopes().size(); ++i) out += (i ? "," : "") + g.slopes()[i].str();
  out += "] bp=[";
  for (std::size_t i = 1; i < g.knots().size(); ++i) out += (i > 1 ? "," : "") + g.knots()[i].str();
  out += "] anchor=(0," + g.y0().str() + ")}}";
  return out;
}

inline std::string to_string(const LazyPLMap& g) {
  switch (g.kind()) {
    case LazyPLMap::Kind::finite:
      return to_string(*g.as_finite());
    case LazyPLMap::Kind::equivariant:
      return to_string(*g.as_equivariant());
    case LazyPLMap::Kind::conjugator: {
      const auto& c = *g.as_conjugator();
      return "orbit{base=" + to_string(c.base) + " x0=" + c.x0.str() + "}";
    }
    case LazyPLMap::Kind::inverse:
      return "inv{" + to_string(*g.inverted_base()) + "}";
    case LazyPLMap::Kind::composite: {
      std::string out = "comp{";
      const auto& fs = *g.factors();
      for (std::size_t i = 0; i < fs.size(); ++i) out += (i ? " " : "") + to_string(fs[i]);
      return out + "}";
    }
  }
  return {};
}

}  // namespace plrev
