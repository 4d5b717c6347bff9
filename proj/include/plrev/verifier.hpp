// SPDX-License-Identifier: Apache-2.0
#pragma once

/*
 * Certificate checker. It shares only the scalar, evaluation and decoding
 * code with the prover: every relation is re-checked by evaluating the maps
 * in the certificate, and the tail involutions, the verification window and
 * the probe comparisons are rebuilt here from their definitions.
 */

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "plrev/error.hpp"
#include "plrev/json_io.hpp"
#include "plrev/lazymap.hpp"
#include "plrev/plmap.hpp"
#include "plrev/scalar.hpp"

namespace plrev::verifier {

struct Verdict {
  bool valid = false;
  std::string reason;  // first failing check when invalid
};

namespace detail {

[[noreturn]] inline void reject(const std::string& why) { fail(errc::verification_failed, why); }

inline void require(bool ok, const std::string& why) {
  if (!ok) reject(why);
}

inline const json& get(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) reject(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline void only_keys(const json& j, const std::set<std::string>& keys) {
  require(j.is_object(), "expected an object");
  for (const auto& [k, v] : j.items()) require(keys.count(k) > 0, "unexpected field '" + k + "'");
  for (const auto& k : keys) require(j.contains(k), "missing field '" + k + "'");
}

// Every finite piece, at any depth.
inline void finite_pieces(const LazyPLMap& m, std::vector<PLMap>& out) {
  if (const PLMap* f = m.as_finite()) {
    out.push_back(*f);
  } else if (const OrbitConjugator* c = m.as_conjugator()) {
    finite_pieces(c->base, out);
  } else if (const LazyPLMap* b = m.inverted_base()) {
    finite_pieces(*b, out);
  } else if (const auto* fs = m.factors()) {
    for (const auto& x : *fs) finite_pieces(x, out);
  }
}

inline Window expected_window(const std::vector<LazyPLMap>& maps) {
  Scalar lo(-20), hi(20);
  std::vector<PLMap> pieces;
  for (const auto& m : maps) finite_pieces(m, pieces);
  for (const auto& p : pieces)
    for (const auto& b : p.breakpoints()) {
      if (b - Scalar(16) < lo) lo = b - Scalar(16);
      if (hi < b + Scalar(16)) hi = b + Scalar(16);
    }
  return {lo, hi};
}

// Two PL maps agree on [lo, hi] iff they agree at the window ends, at every
// possible breakpoint of either map and at one point between neighbours.
inline bool agree(const LazyPLMap& a, const LazyPLMap& b, const Window& w) {
  std::vector<Scalar> cuts = a.candidates(w.lo, w.hi);
  for (auto& c : b.candidates(w.lo, w.hi)) cuts.push_back(std::move(c));
  cuts.push_back(w.lo);
  cuts.push_back(w.hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    if (a(cuts[i]) != b(cuts[i])) return false;
    if (i + 1 < cuts.size()) {
      Scalar mid = (cuts[i] + cuts[i + 1]) / Scalar(2);
      if (a(mid) != b(mid)) return false;
    }
  }
  return true;
}

inline LazyPLMap product(const std::vector<LazyPLMap>& fs) {
  LazyPLMap out;
  for (auto it = fs.rbegin(); it != fs.rend(); ++it) out = lazy_compose(*it, out);
  return out;
}

inline const PLMap& finite(const LazyPLMap& m, const std::string& what) {
  const PLMap* f = m.as_finite();
  if (!f) reject(what + " must have finitely many breakpoints");
  return *f;
}

inline PLMap affine(long slope, const Scalar& intercept) {
  return PLMap::from_pieces({}, {Scalar(slope)}, Scalar(0), intercept);
}

// x -> -p x for x >= 0 and -x / p for x < 0, built from its two pieces.
inline PLMap tail_tau(const Scalar& p) {
  return PLMap::from_pieces({Scalar(0)}, {-(Scalar(1) / p), -p}, Scalar(0), Scalar(0));
}

inline bool squares_to_identity(const PLMap& f) { return compose(f, f) == PLMap::identity(); }

inline bool is_reversed_by(const PLMap& f, const PLMap& h) {
  return compose(h, compose(f, invert(h))) == invert(f);
}

inline bool identity_off_compact(const PLMap& f) {
  if (f == PLMap::identity()) return true;
  const auto& bps = f.breakpoints();
  const auto& sl = f.slopes();
  return !bps.empty() && sl.front() == Scalar(1) && sl.back() == Scalar(1) &&
         f(bps.front()) == bps.front() && f(bps.back()) == bps.back();
}

struct Factors {
  std::vector<LazyPLMap> maps;
  std::vector<std::string> kinds;
  std::vector<std::optional<LazyPLMap>> reversers;
};

inline Factors read_factors(const json& ev, MapInterner& seen) {
  const json& fs = get(ev, "factors");
  const json& ws = get(ev, "witnesses");
  require(fs.is_array() && ws.is_array() && fs.size() == ws.size() && !fs.empty(),
          "factors and witnesses must be parallel non-empty lists");
  Factors out;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    out.maps.push_back(map_from_json(fs[i], seen));
    const json& kind = get(ws[i], "kind");
    require(kind.is_string(), "witness kind must be a string");
    std::string k = kind.get<std::string>();
    out.kinds.push_back(k);
    if (k == "reverser") {
      only_keys(ws[i], {"kind", "reverser"});
      out.reversers.push_back(map_from_json(ws[i].at("reverser"), seen));
    } else {
      require(k == "involution" || k == "compact_support", "unknown witness kind '" + k + "'");
      only_keys(ws[i], {"kind"});
      out.reversers.push_back(std::nullopt);
    }
  }
  return out;
}

inline void check_window(const json& cert, const std::vector<LazyPLMap>& maps, std::optional<Window>& w) {
  const json& jw = get(cert, "window");
  if (maps.empty()) {
    require(jw.is_null(), "this claim carries no window");
    w.reset();
    return;
  }
  only_keys(jw, {"lo", "hi"});
  Window got{scalar_from_json(jw.at("lo")), scalar_from_json(jw.at("hi"))};
  Window want = expected_window(maps);
  require(got.lo == want.lo && got.hi == want.hi,
          "window must be [" + want.lo.str() + ", " + want.hi.str() + "]");
  w = got;
}

inline void check_probes(const json& cert, const LazyPLMap& subject, const std::optional<LazyPLMap>& product_map,
                         const std::optional<Window>& w) {
  const json& checks = get(cert, "checks");
  require(checks.is_array() && !checks.empty(), "checks must be a non-empty list");
  for (const auto& c : checks) {
    only_keys(c, {"point", "expected"});
    Scalar x = scalar_from_json(c.at("point"));
    Scalar y = scalar_from_json(c.at("expected"));
    if (w) require(w->lo <= x && x <= w->hi, "probe " + x.str() + " lies outside the window");
    require(subject(x) == y, "subject(" + x.str() + ") != " + y.str());
    if (product_map) require((*product_map)(x) == y, "factor product at " + x.str() + " != " + y.str());
  }
}

inline void check_factor_claim(const std::string& claim, const json& cert, const json& ev,
                               const LazyPLMap& subject, MapInterner& seen) {
  bool tail = claim == "TailMatch";
  only_keys(ev, tail ? std::set<std::string>{"factors", "witnesses", "tail"}
                     : std::set<std::string>{"factors", "witnesses"});
  Factors fs = read_factors(ev, seen);
  std::vector<LazyPLMap> window_maps = fs.maps;
  window_maps.push_back(subject);
  for (const auto& r : fs.reversers)
    if (r) window_maps.push_back(*r);
  std::optional<Window> w;
  check_window(cert, window_maps, w);
  LazyPLMap prod = product(fs.maps);
  check_probes(cert, subject, prod, w);
  // Cheap pointwise witness checks first; the window checks below decide.
  std::size_t n = fs.maps.size();
  for (std::size_t i = 0; i < n; ++i) {
    const LazyPLMap& f = fs.maps[i];
    for (const auto& c : get(cert, "checks")) {
      Scalar x = scalar_from_json(c.at("point"));
      if (fs.reversers[i]) {
        const LazyPLMap& r = *fs.reversers[i];
        require(f(r(f(x))) == r(x), "witness " + std::to_string(i) + " does not reverse its factor at " + x.str());
      } else if (fs.kinds[i] == "involution") {
        require(f(f(x)) == x, "factor " + std::to_string(i) + " is not an involution at " + x.str());
      }
    }
  }
  require(agree(prod, subject, *w), "factor product differs from the subject on the window");

  auto all_kinds = [&](const char* k) {
    for (const auto& x : fs.kinds)
      if (x != k) return false;
    return true;
  };
  if (claim == "R2" || claim == "R4") {
    require(n == (claim == "R2" ? 2U : 4U), claim + " needs " + (claim == "R2" ? "2" : "4") + " factors");
    require(all_kinds("reverser"), claim + " factors need reverser witnesses");
    require(subject.degree() > 0, claim + " subject must be increasing");
    for (std::size_t i = 0; i < n; ++i) {
      const LazyPLMap& f = fs.maps[i];
      const LazyPLMap& r = *fs.reversers[i];
      require(f.degree() > 0, "factor " + std::to_string(i) + " is not increasing");
      require(agree(lazy_compose(r, lazy_compose(f, lazy_invert(r))), lazy_invert(f), *w),
              "witness " + std::to_string(i) + " does not reverse its factor");
    }
    return;
  }
  if (claim == "I3" || claim == "I4") {
    require(n == (claim == "I3" ? 3U : 4U), claim + " has the wrong number of factors");
    require(all_kinds("involution"), claim + " factors need involution witnesses");
    require(subject.degree() == (claim == "I3" ? -1 : 1), claim + " subject has the wrong orientation");
    for (std::size_t i = 0; i < n; ++i)
      require(agree(lazy_compose(fs.maps[i], fs.maps[i]), PLMap::identity(), *w),
              "factor " + std::to_string(i) + " is not an involution on the window");
    return;
  }

  // TailMatch: (eta) . remainder . sigma_s tau_p sigma_1 tau_q, all exact.
  const PLMap& f = finite(subject, "subject");
  const json& t = get(ev, "tail");
  only_keys(t, {"lambda", "u", "v", "p", "q", "s", "reflected"});
  require(t.at("reflected").is_boolean(), "reflected must be a boolean");
  bool reflected = t.at("reflected").get<bool>();
  require(reflected == (f.degree() < 0), "reflected flag does not match the subject's orientation");
  std::size_t lead = reflected ? 1 : 0;
  require(n == lead + 5, "TailMatch has the wrong number of factors");
  std::vector<PLMap> pl;
  for (std::size_t i = 0; i < n; ++i) pl.push_back(finite(fs.maps[i], "factor " + std::to_string(i)));
  PLMap exact;
  for (auto it = pl.rbegin(); it != pl.rend(); ++it) exact = compose(*it, exact);
  require(exact == f, "factor product differs from the subject");
  if (reflected) {
    require(fs.kinds[0] == "involution" && pl[0] == affine(-1, Scalar(0)), "leading factor must be -x");
  }
  require(fs.kinds[lead] == "compact_support", "remainder needs a compact_support witness");
  require(identity_off_compact(pl[lead]), "remainder is not compactly supported");

  Scalar lambda = scalar_from_json(t.at("lambda")), u = scalar_from_json(t.at("u")),
         v = scalar_from_json(t.at("v")), p = scalar_from_json(t.at("p")),
         q = scalar_from_json(t.at("q")), s = scalar_from_json(t.at("s"));
  PLMap e = reflected ? compose(affine(-1, Scalar(0)), f) : f;
  require(e.slopes().back() == lambda && e.slopes().front() * lambda == Scalar(1),
          "end slopes do not match lambda");
  Scalar big = Scalar(1) + (e.breakpoints().empty() ? Scalar(0) : abs(e.breakpoints().front()) + abs(e.breakpoints().back()));
  require(e(big) == lambda * big + u, "right tail intercept is not u");
  require(e(-big) == -big / lambda + v, "left tail intercept is not v");
  require(p.sign() > 0 && (p * p - (u - v) * p - Scalar(1)).is_zero(), "p does not solve p - 1/p = u - v");
  require(q * p == lambda, "q != lambda / p");
  require(s == u - p, "s != u - p");
  std::vector<PLMap> want{affine(-1, s), tail_tau(p), affine(-1, Scalar(1)), tail_tau(q)};
  for (std::size_t i = 0; i < 4; ++i) {
    require(fs.kinds[lead + 1 + i] == "involution", "tail factors need involution witnesses");
    require(pl[lead + 1 + i] == want[i], "tail factor " + std::to_string(i) + " does not match the tail data");
    require(squares_to_identity(pl[lead + 1 + i]), "tail factor is not an involution");
  }
}

inline void check(const json& cert) {
  only_keys(cert, {"version", "claim", "subject", "evidence", "window", "checks"});
  const json& version = cert.at("version");
  require(version.is_number_integer() && version.get<long>() == 1, "unsupported version");
  require(cert.at("claim").is_string(), "claim must be a string");
  std::string claim = cert.at("claim").get<std::string>();
  MapInterner seen;
  LazyPLMap subject = map_from_json(cert.at("subject"), seen);
  const json& ev = cert.at("evidence");
  std::optional<Window> none;

  if (claim == "R2" || claim == "R4" || claim == "I3" || claim == "I4" || claim == "TailMatch") {
    check_factor_claim(claim, cert, ev, subject, seen);
  } else if (claim == "Reverses") {
    only_keys(ev, {"reverser"});
    check_window(cert, {}, none);
    check_probes(cert, subject, std::nullopt, none);
    const PLMap& f = finite(subject, "subject");
    PLMap h = finite(map_from_json(ev.at("reverser"), seen), "reverser");
    require(is_reversed_by(f, h), "h f h^-1 != f^-1");
  } else if (claim == "Involution") {
    only_keys(ev, {});
    check_window(cert, {}, none);
    check_probes(cert, subject, std::nullopt, none);
    require(squares_to_identity(finite(subject, "subject")), "f o f != id");
  } else if (claim == "StronglyReversible") {
    only_keys(ev, {"involution"});
    check_window(cert, {}, none);
    check_probes(cert, subject, std::nullopt, none);
    const PLMap& f = finite(subject, "subject");
    PLMap sigma = finite(map_from_json(ev.at("involution"), seen), "involution");
    require(squares_to_identity(sigma), "sigma o sigma != id");
    require(is_reversed_by(f, sigma), "sigma f sigma != f^-1");
  } else if (claim == "ConjugateToTranslation") {
    only_keys(ev, {"conjugator", "direction"});
    LazyPLMap k = map_from_json(ev.at("conjugator"), seen);
    const json& dir = ev.at("direction");
    require(dir.is_number_integer() && (dir.get<long>() == 1 || dir.get<long>() == -1),
            "direction must be +1 or -1");
    std::optional<Window> w;
    check_window(cert, {subject, k}, w);
    check_probes(cert, subject, std::nullopt, w);
    require(k.degree() > 0, "conjugator must be increasing");
    require(agree(lazy_compose(k, lazy_compose(subject, lazy_invert(k))), affine(1, Scalar(dir.get<long>())), *w),
            "k f k^-1 is not the translation on the window");
  } else if (claim == "PLEMembership") {
    only_keys(ev, {"gamma_L", "gamma_R"});
    check_window(cert, {}, none);
    check_probes(cert, subject, std::nullopt, none);
    const PLMap& f = finite(subject, "subject");
    Scalar gl = scalar_from_json(ev.at("gamma_L")), gr = scalar_from_json(ev.at("gamma_R"));
    require(gl == f.slopes().front() && gr == f.slopes().back(), "end slopes do not match");
    require(gl * gr == Scalar(1), "gamma_L * gamma_R != 1");
  } else {
    reject("unknown claim '" + claim + "'");
  }
}

}  // namespace detail

inline Verdict verify_certificate(const json& cert) {
  try {
    detail::check(cert);
    return {true, ""};
  } catch (const Error& e) {
    return {false, e.what()};
  } catch (const json::exception& e) {
    return {false, std::string("malformed certificate: ") + e.what()};
  }
}

inline Verdict verify_certificate_text(std::string_view bytes) {
  json cert = json::parse(bytes, nullptr, false);
  if (cert.is_discarded()) return {false, "certificate is not valid JSON"};
  return verify_certificate(cert);
}

}  // namespace plrev::verifier
