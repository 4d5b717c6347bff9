// SPDX-License-Identifier: Apache-2.0
#pragma once

/*
 * Constructive factorizations into reversible maps and involutions, the
 * PLE tail construction, and the periodic model pair (f, g = f - 2) that
 * every fixed-point-free factorization is conjugated from.
 *
 * Every constructor re-verifies its result (exactly, on a window for lazy
 * factors) and throws InternalVerificationFailed if the check fails.
 */

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "plrev/error.hpp"
#include "plrev/lazymap.hpp"
#include "plrev/plmap.hpp"
#include "plrev/reversibility.hpp"
#include "plrev/scalar.hpp"

namespace plrev {

/// x -> -p x on [0, inf), -x / p on (-inf, 0).
inline PLMap tau_p(const Scalar& p) {
  if (p.sign() <= 0) fail(errc::non_positive_parameter, "tau_p needs p > 0, got " + p.str());
  return PLMap::from_pieces({Scalar(0)}, {-(Scalar(1) / p), -p}, Scalar(0), Scalar(0));
}

/// x -> -x + t.
inline PLMap sigma_t(const Scalar& t) { return PLMap::affine(Scalar(-1), t); }

inline PLMap eta() { return PLMap::affine(Scalar(-1), Scalar(0)); }

/// sigma_{-5} tau_2 sigma_2 tau_{1/4} sigma_2 tau_2: compactly supported and
/// not the identity.
inline PLMap epstein_example() {
  PLMap k;
  for (const PLMap& m : {sigma_t(-5), tau_p(2), sigma_t(2), tau_p(Scalar(1, 4)), sigma_t(2), tau_p(2)})
    k = compose(k, m);
  return k;
}

/// Increasing, with f(x) = x outside a bounded interval.
inline bool is_compactly_supported(const PLMap& f) {
  if (f.is_identity()) return true;
  if (!f.is_increasing() || f.breakpoints().empty()) return false;
  auto [left, right] = end_slopes(f);
  return left == Scalar(1) && right == Scalar(1) && f.values().front() == f.breakpoints().front() &&
         f.values().back() == f.breakpoints().back();
}

/// Closed hull of the support of a compactly supported map; nullopt for the identity.
inline std::optional<std::pair<Scalar, Scalar>> support_bounds(const PLMap& f) {
  if (!is_compactly_supported(f))
    fail(errc::precondition_failed, to_string(f) + " is not compactly supported");
  if (f.is_identity()) return std::nullopt;
  return std::pair{f.breakpoints().front(), f.breakpoints().back()};
}

/// gamma_R * gamma_L == 1.
inline bool is_PLE(const PLMap& f) {
  auto [left, right] = end_slopes(f);
  return left * right == Scalar(1);
}

struct TailData {
  Scalar lambda;  // right end slope: f(x) = lambda x + u for large x
  Scalar u;
  Scalar v;  // f(x) = x / lambda + v for small x
  Scalar p;
  Scalar q;
  Scalar s;
  bool reflected = false;  // f was decreasing and eta o f was used
};

struct TailMatch {
  PLMap g;  // sigma_s tau_p sigma_1 tau_q
  TailData data;
  PLMap remainder;  // (eta o) f o g^{-1}, compactly supported
};

/// Involutions whose product (listed order) is g.
inline std::vector<PLMap> tail_involutions(const TailData& d) {
  return {sigma_t(d.s), tau_p(d.p), sigma_t(1), tau_p(d.q)};
}

inline TailMatch tail_involution_product(const PLMap& f) {
  if (!is_PLE(f)) fail(errc::not_ple, to_string(f) + " has gamma_R * gamma_L != 1");
  TailData d;
  d.reflected = !f.is_increasing();
  PLMap e = d.reflected ? compose(eta(), f) : f;
  d.lambda = e.slopes().back();
  if (e.breakpoints().empty()) {
    d.u = d.v = e(Scalar(0));
  } else {
    d.u = e.values().back() - d.lambda * e.breakpoints().back();
    d.v = e.values().front() - e.breakpoints().front() / d.lambda;
  }
  d.p = solve_p(d.u - d.v);
  d.q = d.lambda / d.p;
  d.s = d.u - d.p;

  PLMap g;
  for (const PLMap& m : tail_involutions(d)) g = compose(g, m);
  PLMap remainder = compose(e, invert(g));
  if (!is_compactly_supported(remainder))
    fail(errc::internal_verification_failed,
         "tail product does not match " + to_string(f) + ": remainder " + to_string(remainder));
  return {std::move(g), std::move(d), std::move(remainder)};
}

/// The periodic model: f is twisted with T = 8 (so t_8 reverses f), g = f - 2
/// and the period-16 map k satisfies k g k^{-1} = f.
struct ModelPair {
  EquivariantPLMap f;
  EquivariantPLMap g;
  EquivariantPLMap k;
  LazyPLMap f_reverser;
  LazyPLMap g_reverser;
};

inline const ModelPair& model_reversible_pair() {
  static const ModelPair pair = [] {
    PLMap cell = PLMap::from_pieces({Scalar(2)}, {Scalar(3), Scalar(1, 3)}, Scalar(0), Scalar(0));
    EquivariantPLMap f = make_twisted(cell, Scalar(8));
    std::vector<Scalar> knots(f.knots().begin() + 1, f.knots().end());
    EquivariantPLMap g = EquivariantPLMap::from_cell(f.period(), knots, f.slopes(), f.y0() - Scalar(2));
    EquivariantPLMap k = EquivariantPLMap::from_cell(
        Scalar(16), {Scalar(1), Scalar(5)}, {Scalar(2, 3), Scalar(2), Scalar(2, 3)}, Scalar(-2, 3));
    EquivariantPLMap t8 = EquivariantPLMap::from_cell(Scalar(16), {}, {Scalar(1)}, Scalar(8));
    EquivariantPLMap g_rev = compose(k.inverse(), compose(t8, k));
    ModelPair out{f, g, k, PLMap::translation(8), g_rev};

    Window w{Scalar(-32), Scalar(32)};
    bool ok = equals_on_window(lazy_conjugate(k, g), f, w) &&
              equals_on_window(lazy_conjugate(t8, f), f.inverse(), w) &&
              equals_on_window(lazy_conjugate(g_rev, g), g.inverse(), w) &&
              compose(g.inverse(), f).displacement_range().first.sign() > 0;
    if (!ok) fail(errc::internal_verification_failed, "model pair");
    return out;
  }();
  return pair;
}

/// g^{-1} f for the model pair, together with its conjugator to x + 1.
inline const std::pair<LazyPLMap, LazyPLMap>& model_translation() {
  static const std::pair<LazyPLMap, LazyPLMap> out = [] {
    const ModelPair& m = model_reversible_pair();
    LazyPLMap w = compose(m.g.inverse(), m.f);
    return std::pair{w, conjugator_to_translation(w)};
  }();
  return out;
}

enum class Claim { R2, R4, I3, I4, TailMatch, StronglyReversibleSplit };

constexpr std::string_view to_string(Claim c) noexcept {
  switch (c) {
    case Claim::R2: return "R2";
    case Claim::R4: return "R4";
    case Claim::I3: return "I3";
    case Claim::I4: return "I4";
    case Claim::TailMatch: return "TailMatch";
    case Claim::StronglyReversibleSplit: return "StronglyReversibleSplit";
  }
  return "Unknown";
}

enum class WitnessKind { reverser, involution, compact_support };

constexpr std::string_view to_string(WitnessKind k) noexcept {
  switch (k) {
    case WitnessKind::reverser: return "reverser";
    case WitnessKind::involution: return "involution";
    case WitnessKind::compact_support: return "compact_support";
  }
  return "unknown";
}

struct FactorWitness {
  WitnessKind kind;
  LazyPLMap reverser;  // used when kind == reverser
};

struct FactorizationResult {
  Claim claim;
  LazyPLMap subject;
  std::vector<LazyPLMap> factors;  // factors[0] o factors[1] o ...
  std::vector<FactorWitness> witnesses;
  Window window;
};

namespace detail {

inline void widen(Window& w, const LazyPLMap& m) {
  if (const PLMap* f = m.as_finite()) {
    if (f->breakpoints().empty()) return;
    w.lo = min(w.lo, f->breakpoints().front() - Scalar(16));
    w.hi = max(w.hi, f->breakpoints().back() + Scalar(16));
  } else if (const OrbitConjugator* c = m.as_conjugator()) {
    widen(w, c->base);
  } else if (const LazyPLMap* b = m.inverted_base()) {
    widen(w, *b);
  } else if (const auto* fs = m.factors()) {
    for (const auto& x : *fs) widen(w, x);
  }
}

}  // namespace detail

/// [-20, 20] widened to cover every breakpoint of every finite piece (at any
/// depth) by one model period.
inline Window auto_window(const std::vector<LazyPLMap>& maps) {
  Window w{Scalar(-20), Scalar(20)};
  for (const auto& m : maps) detail::widen(w, m);
  return w;
}

inline Window auto_window(const LazyPLMap& subject, const std::vector<LazyPLMap>& factors,
                          const std::vector<FactorWitness>& witnesses = {}) {
  std::vector<LazyPLMap> all = factors;
  all.push_back(subject);
  for (const auto& w : witnesses)
    if (w.kind == WitnessKind::reverser) all.push_back(w.reverser);
  return auto_window(all);
}

inline bool verify_witness(const LazyPLMap& factor, const FactorWitness& wit, const Window& w) {
  switch (wit.kind) {
    case WitnessKind::involution:
      if (const PLMap* f = factor.as_finite()) return is_involution(*f);
      return equals_on_window(lazy_compose(factor, factor), PLMap::identity(), w);
    case WitnessKind::reverser:
      if (factor.as_finite() && wit.reverser.as_finite())
        return verify_reverses(*wit.reverser.as_finite(), *factor.as_finite());
      return equals_on_window(lazy_conjugate(wit.reverser, factor), lazy_invert(factor), w);
    case WitnessKind::compact_support:
      return factor.as_finite() && is_compactly_supported(*factor.as_finite());
  }
  return false;
}

/// Re-runs every check of a result: the factors compose to the subject on
/// the window and each witness holds.
inline bool verify_factorization(const FactorizationResult& r) {
  if (r.factors.size() != r.witnesses.size() || r.factors.empty()) return false;
  if (!equals_on_window(lazy_compose_all(r.factors), r.subject, r.window)) return false;
  for (std::size_t i = 0; i < r.factors.size(); ++i)
    if (!verify_witness(r.factors[i], r.witnesses[i], r.window)) return false;
  return true;
}

namespace detail {

inline FactorizationResult checked(FactorizationResult r) {
  if (!verify_factorization(r))
    fail(errc::internal_verification_failed,
         std::string(to_string(r.claim)) + " factorization of " + to_string(r.subject));
  return r;
}

}  // namespace detail

/// u = c^{-1} g^{-1} c . c^{-1} f c for upward u, where c u c^{-1} = g^{-1} f;
/// u = c^{-1} f^{-1} c . c^{-1} g c for downward u (c built from u^{-1}).
inline FactorizationResult factor_fixed_point_free_R2(const LazyPLMap& u,
                                                      std::optional<Window> window = std::nullopt) {
  Displacement d = fixed_point_free_displacement(u);
  const ModelPair& m = model_reversible_pair();
  const LazyPLMap& k_w = model_translation().second;
  LazyPLMap up = d.direction > 0 ? u : lazy_invert(u);
  LazyPLMap c = lazy_compose(lazy_invert(k_w), conjugator_to_translation(up));
  LazyPLMap ci = lazy_invert(c);
  auto conj = [&](const LazyPLMap& x) { return lazy_conjugate(ci, x); };

  FactorizationResult r{Claim::R2, u, {}, {}, {}};
  if (d.direction > 0) {
    r.factors = {conj(m.g.inverse()), conj(m.f)};
    r.witnesses = {{WitnessKind::reverser, conj(m.g_reverser)},
                   {WitnessKind::reverser, conj(m.f_reverser)}};
  } else {
    r.factors = {conj(m.f.inverse()), conj(m.g)};
    r.witnesses = {{WitnessKind::reverser, conj(m.f_reverser)},
                   {WitnessKind::reverser, conj(m.g_reverser)}};
  }
  r.window = window.value_or(auto_window(u, r.factors, r.witnesses));
  return detail::checked(std::move(r));
}

/// f = g h with g = min(f, id) - 1 and h = g^{-1} f, both fixed-point-free.
inline FactorizationResult factor_R4(const PLMap& f, std::optional<Window> window = std::nullopt) {
  if (!f.is_increasing()) fail(errc::orientation_error, "factor_R4 needs an increasing map");
  PLMap g = shifted(pl_extreme(f, PLMap::identity(), Extreme::min), Scalar(-1));
  PLMap h = compose(invert(g), f);
  FactorizationResult rg = factor_fixed_point_free_R2(g);
  FactorizationResult rh = factor_fixed_point_free_R2(h);
  FactorizationResult r{Claim::R4, f, rg.factors, rg.witnesses, {}};
  r.factors.insert(r.factors.end(), rh.factors.begin(), rh.factors.end());
  r.witnesses.insert(r.witnesses.end(), rh.witnesses.begin(), rh.witnesses.end());
  r.window = window.value_or(auto_window(f, r.factors, r.witnesses));
  return detail::checked(std::move(r));
}

/// An involution sigma with sigma(x) > f(x) everywhere: the mirror of
/// max(f, f^{-1}) + 1.
inline PLMap dominating_involution(const PLMap& f) {
  if (f.is_increasing()) fail(errc::orientation_error, "dominating_involution needs a decreasing map");
  PLMap m = shifted(pl_extreme(f, invert(f), Extreme::max), Scalar(1));
  PLMap sigma = mirror_involution(m);
  if (!strictly_dominates(sigma, f))
    fail(errc::internal_verification_failed, to_string(sigma) + " does not dominate " + to_string(f));
  return sigma;
}

/// f = sigma . k^{-1} rho' k . k^{-1} rho k where sigma f is conjugated to
/// x + 1 = rho' rho by k, rho = -x and rho' = -x + 1.
inline FactorizationResult factor_I3(const PLMap& f, std::optional<Window> window = std::nullopt) {
  if (f.is_increasing()) fail(errc::orientation_error, "factor_I3 needs a decreasing map");
  PLMap sigma = dominating_involution(f);
  PLMap w = compose(sigma, f);
  LazyPLMap k = conjugator_to_translation(w);
  LazyPLMap ki = lazy_invert(k);
  FactorizationResult r{Claim::I3, f,
                        {sigma, lazy_conjugate(ki, sigma_t(1)), lazy_conjugate(ki, eta())},
                        {},
                        {}};
  r.window = window.value_or(auto_window(f, r.factors));
  r.witnesses.assign(3, {WitnessKind::involution, PLMap::identity()});
  return detail::checked(std::move(r));
}

/// f = eta . (factor_I3 of eta o f).
inline FactorizationResult factor_I4(const PLMap& f, std::optional<Window> window = std::nullopt) {
  if (!f.is_increasing()) fail(errc::orientation_error, "factor_I4 needs an increasing map");
  PLMap ef = compose(eta(), f);
  FactorizationResult inner = factor_I3(ef, window);
  FactorizationResult r{Claim::I4, f, {eta()}, {}, {}};
  r.factors.insert(r.factors.end(), inner.factors.begin(), inner.factors.end());
  r.window = window.value_or(auto_window(f, r.factors));
  r.witnesses.assign(4, {WitnessKind::involution, PLMap::identity()});
  return detail::checked(std::move(r));
}

/// f = (eta) . remainder . sigma_s tau_p sigma_1 tau_q with a compactly
/// supported remainder; asserts membership only up to that remainder.
inline FactorizationResult factor_tail(const PLMap& f) {
  TailMatch t = tail_involution_product(f);
  FactorizationResult r{Claim::TailMatch, f, {}, {}, {}};
  if (t.data.reflected) {
    r.factors.push_back(eta());
    r.witnesses.push_back({WitnessKind::involution, PLMap::identity()});
  }
  r.factors.push_back(t.remainder);
  r.witnesses.push_back({WitnessKind::compact_support, PLMap::identity()});
  for (const PLMap& inv : tail_involutions(t.data)) {
    r.factors.push_back(inv);
    r.witnesses.push_back({WitnessKind::involution, PLMap::identity()});
  }
  r.window = auto_window(f, r.factors);
  return detail::checked(std::move(r));
}

/// r = sigma . (sigma r) for an involution sigma reversing r.
inline std::pair<PLMap, PLMap> split_strongly_reversible(const PLMap& r, const PLMap& sigma) {
  if (!is_involution(sigma) || !verify_reverses(sigma, r))
    fail(errc::precondition_failed, to_string(sigma) + " is not an involution reversing " + to_string(r));
  PLMap second = compose(sigma, r);
  if (!is_involution(second) || compose(sigma, second) != r)
    fail(errc::internal_verification_failed, "strongly reversible split of " + to_string(r));
  return {sigma, second};
}

inline FactorizationResult factor_strongly_reversible(const PLMap& r, const PLMap& sigma) {
  auto [a, b] = split_strongly_reversible(r, sigma);
  FactorizationResult out{Claim::StronglyReversibleSplit, r, {a, b}, {}, {}};
  out.window = auto_window(r, out.factors);
  out.witnesses.assign(2, {WitnessKind::involution, PLMap::identity()});
  return detail::checked(std::move(out));
}

}  // namespace plrev
