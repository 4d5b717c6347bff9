// SPDX-License-Identifier: Apache-2.0
#pragma once

/*
 * Certificate emission. A certificate is a JSON object
 *
 *   {"version":1, "claim":..., "subject":map, "evidence":{...},
 *    "window":{"lo":..,"hi":..} | null, "checks":[{"point":..,"expected":..}]}
 *
 * with sorted keys, so identical inputs give byte-identical output. Claims
 * and their evidence:
 *
 *   Reverses                 {"reverser": map}
 *   Involution               {}
 *   StronglyReversible       {"involution": map}
 *   R2 | R4 | I3 | I4        {"factors": [map], "witnesses": [witness]}
 *   TailMatch                as above plus "tail": {lambda,u,v,p,q,s,reflected}
 *   ConjugateToTranslation   {"conjugator": map, "direction": +1 | -1}
 *   PLEMembership            {"gamma_L": s, "gamma_R": s}
 *
 * A witness is {"kind":"reverser","reverser":map}, {"kind":"involution"} or
 * {"kind":"compact_support"}. The window is present exactly for the factor
 * claims and ConjugateToTranslation, and equals [-20, 20] widened by 16
 * around every breakpoint of every finite piece of the subject, the factors
 * and their reversers (or the conjugator).
 */

#include <string>
#include <vector>

#include "plrev/factorization.hpp"
#include "plrev/json_io.hpp"
#include "plrev/lazymap.hpp"
#include "plrev/plmap.hpp"
#include "plrev/reversibility.hpp"

namespace plrev {

inline constexpr int kCertificateVersion = 1;

namespace detail {

/// Probe points: window ends and 0, plus the subject's finite breakpoints
/// (and one step beyond them) that fall inside the window.
inline json make_checks(const LazyPLMap& subject, const std::optional<Window>& w) {
  std::vector<Scalar> pts{Scalar(0)};
  if (w) {
    pts.push_back(w->lo);
    pts.push_back(w->hi);
  }
  if (const PLMap* f = subject.as_finite()) {
    for (const auto& b : f->breakpoints()) pts.push_back(b);
    if (!f->breakpoints().empty()) {
      pts.push_back(f->breakpoints().front() - Scalar(1));
      pts.push_back(f->breakpoints().back() + Scalar(1));
    }
  }
  sort_unique(pts);
  json out = json::array();
  for (const auto& x : pts) {
    if (w && (x < w->lo || w->hi < x)) continue;
    out.push_back({{"point", scalar_to_json(x)}, {"expected", scalar_to_json(subject(x))}});
  }
  return out;
}

inline json window_json(const std::optional<Window>& w) {
  if (!w) return nullptr;
  return {{"lo", scalar_to_json(w->lo)}, {"hi", scalar_to_json(w->hi)}};
}

inline json envelope(std::string_view claim, const LazyPLMap& subject, json evidence,
                     const std::optional<Window>& w) {
  return {{"version", kCertificateVersion},
          {"claim", std::string(claim)},
          {"subject", map_to_json(subject)},
          {"evidence", std::move(evidence)},
          {"window", window_json(w)},
          {"checks", make_checks(subject, w)}};
}

}  // namespace detail

inline json reverses_certificate(const PLMap& f, const PLMap& h) {
  if (!verify_reverses(h, f)) fail(errc::precondition_failed, to_string(h) + " does not reverse " + to_string(f));
  return detail::envelope("Reverses", f, {{"reverser", map_to_json(h)}}, std::nullopt);
}

inline json involution_certificate(const PLMap& f) {
  if (!is_involution(f)) fail(errc::precondition_failed, to_string(f) + " is not an involution");
  return detail::envelope("Involution", f, json::object(), std::nullopt);
}

inline json strongly_reversible_certificate(const PLMap& f, const PLMap& sigma) {
  auto parts = split_strongly_reversible(f, sigma);
  return detail::envelope("StronglyReversible", f, {{"involution", map_to_json(parts.first)}},
                          std::nullopt);
}

inline json conjugate_to_translation_certificate(const LazyPLMap& f) {
  Displacement d = fixed_point_free_displacement(f);
  LazyPLMap k = conjugator_to_translation(f);
  Window w = auto_window(f, {k});
  if (!equals_on_window(lazy_conjugate(k, f), PLMap::translation(d.direction), w))
    fail(errc::internal_verification_failed, "conjugator of " + to_string(f));
  return detail::envelope("ConjugateToTranslation", f,
                          {{"conjugator", map_to_json(k)}, {"direction", d.direction}}, w);
}

inline json ple_certificate(const PLMap& f) {
  if (!is_PLE(f)) fail(errc::not_ple, to_string(f) + " has gamma_R * gamma_L != 1");
  auto [left, right] = end_slopes(f);
  return detail::envelope("PLEMembership", f,
                          {{"gamma_L", scalar_to_json(left)}, {"gamma_R", scalar_to_json(right)}},
                          std::nullopt);
}

inline json witness_json(const FactorWitness& w) {
  json j = {{"kind", std::string(to_string(w.kind))}};
  if (w.kind == WitnessKind::reverser) j["reverser"] = map_to_json(w.reverser);
  return j;
}

inline json certificate(const FactorizationResult& r) {
  if (r.claim == Claim::StronglyReversibleSplit) {
    const PLMap* f = r.subject.as_finite();
    const PLMap* sigma = r.factors.front().as_finite();
    if (!f || !sigma) fail(errc::precondition_failed, "split factors must be finite");
    return strongly_reversible_certificate(*f, *sigma);
  }
  json factors = json::array(), witnesses = json::array();
  for (const auto& f : r.factors) factors.push_back(map_to_json(f));
  for (const auto& w : r.witnesses) witnesses.push_back(witness_json(w));
  json evidence = {{"factors", factors}, {"witnesses", witnesses}};
  if (r.claim == Claim::TailMatch) {
    const PLMap* f = r.subject.as_finite();
    if (!f) fail(errc::precondition_failed, "tail subject must be finite");
    TailData d = tail_involution_product(*f).data;
    evidence["tail"] = {{"lambda", scalar_to_json(d.lambda)}, {"u", scalar_to_json(d.u)},
                        {"v", scalar_to_json(d.v)},           {"p", scalar_to_json(d.p)},
                        {"q", scalar_to_json(d.q)},           {"s", scalar_to_json(d.s)},
                        {"reflected", d.reflected}};
  }
  return detail::envelope(to_string(r.claim), r.subject, std::move(evidence), r.window);
}

}  // namespace plrev
