// SPDX-License-Identifier: Apache-2.0
#pragma once

/*
 * Exact verifiers and constructive witnesses for reversal relations
 * h f h^{-1} = f^{-1}. Every construction re-verifies its output before
 * returning and throws InternalVerificationFailed if that check fails.
 */

#include <optional>
#include <string>

#include "plrev/error.hpp"
#include "plrev/plmap.hpp"

namespace plrev {

struct ReversalWitness {
  PLMap subject;
  PLMap reverser;
  std::optional<PLMap> involution;
};

inline bool verify_reverses(const PLMap& h, const PLMap& f) {
  return conjugate(h, f) == invert(f);
}

/// h^n f h^{-n} == f^{(-1)^n}.
inline bool power_reversal_check(const PLMap& h, const PLMap& f, long n) {
  if (!verify_reverses(h, f)) fail(errc::precondition_failed, "h does not reverse f");
  PLMap expected = (n % 2 == 0) ? f : invert(f);
  return conjugate(power(h, n), f) == expected;
}

/// The involution equal to m on [p, +inf) and to m^{-1} on (-inf, p), where p
/// is the fixed point of the orientation-reversing map m.
inline PLMap mirror_involution(const PLMap& m) {
  if (m.is_increasing()) fail(errc::orientation_error, "mirror_involution needs a decreasing map");
  Scalar p = reversing_fixed_point(m);
  PLMap sigma = splice(invert(m), m, p);
  if (!is_involution(sigma))
    fail(errc::internal_verification_failed, "mirror of " + to_string(m) + " is not an involution");
  return sigma;
}

/// Given a decreasing reverser h of an increasing f, the involution
/// tau = h^{-1} on [p, +inf), h on (-inf, p) also reverses f.
inline PLMap strong_reverser_from_reverser(const PLMap& f, const PLMap& h) {
  if (!f.is_increasing()) fail(errc::precondition_failed, "f must be orientation preserving");
  if (h.is_increasing()) fail(errc::precondition_failed, "h must be orientation reversing");
  if (!verify_reverses(h, f)) fail(errc::precondition_failed, "h does not reverse f");
  PLMap tau = mirror_involution(invert(h));
  if (compose(tau, compose(f, tau)) != invert(f))
    fail(errc::internal_verification_failed, "constructed involution does not reverse f");
  return tau;
}

/// In PL(R) an orientation-reversing map is reversible iff it is an involution.
inline bool reversible_PLminus(const PLMap& f) {
  if (f.is_increasing()) fail(errc::orientation_error, "reversible_PLminus needs a decreasing map");
  return is_involution(f);
}

/// An involution commuting with g^2, for orientation-reversing g.
inline PLMap involution_from_odd_root(const PLMap& g) {
  if (g.is_increasing()) fail(errc::orientation_error, "g must be orientation reversing");
  PLMap tau = mirror_involution(g);
  PLMap g2 = compose(g, g);
  if (compose(tau, compose(g2, tau)) != g2)
    fail(errc::internal_verification_failed, "tau does not commute with g^2");
  return tau;
}

/// Orientation-reversing square root of f built from an involution tau with
/// tau f tau = f and a supplied increasing square root h of f fixing the
/// fixed point of tau: g = h tau on [p, +inf), tau h on (-inf, p).
inline PLMap odd_root_from_involution(const PLMap& f, const PLMap& tau, const PLMap& h) {
  if (!f.is_increasing()) fail(errc::precondition_failed, "f must be orientation preserving");
  if (tau.is_increasing() || !is_involution(tau))
    fail(errc::precondition_failed, "tau must be an orientation-reversing involution");
  if (compose(tau, compose(f, tau)) != f) fail(errc::precondition_failed, "tau f tau != f");
  if (!h.is_increasing() || compose(h, h) != f)
    fail(errc::precondition_failed, "h is not an increasing square root of f");
  Scalar p = reversing_fixed_point(tau);
  if (h(p) != p) fail(errc::precondition_failed, "h does not fix " + p.str());
  PLMap g = splice(compose(tau, h), compose(h, tau), p);
  if (compose(g, g) != f) fail(errc::internal_verification_failed, "g^2 != f");
  return g;
}

}  // namespace plrev
