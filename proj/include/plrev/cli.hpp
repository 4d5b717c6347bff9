// SPDX-License-Identifier: Apache-2.0
#pragma once

/*
 * Subcommand implementations behind the `plrev` tool. Each returns the JSON
 * for stdout, diagnostics for stderr and the exit code: 0 success / valid,
 * 1 a negative answer (not reversed, invalid certificate), 2 an error.
 */

#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "plrev/certificate.hpp"
#include "plrev/error.hpp"
#include "plrev/factorization.hpp"
#include "plrev/json_io.hpp"
#include "plrev/lazymap.hpp"
#include "plrev/parse.hpp"
#include "plrev/plmap.hpp"
#include "plrev/reversibility.hpp"
#include "plrev/signature.hpp"
#include "plrev/verifier.hpp"

namespace plrev::cli {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

inline std::string render(const json& j) { return j.dump(2) + "\n"; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::precondition_failed, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// A map argument: text in the map grammar, a JSON map object, or @file
/// holding either.
inline LazyPLMap load_map(const std::string& arg) {
  std::string text = !arg.empty() && arg[0] == '@' ? read_file(arg.substr(1)) : arg;
  std::size_t i = text.find_first_not_of(" \t\r\n");
  if (i != std::string::npos && text[i] == '{') {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) fail(errc::parse_error, "map argument is not valid JSON");
    return map_from_json(j);
  }
  return parse_map(text);
}

inline PLMap load_finite(const std::string& arg) {
  LazyPLMap m = load_map(arg);
  if (const PLMap* f = m.as_finite()) return *f;
  fail(errc::precondition_failed, "this command needs a map with finitely many breakpoints");
}

/// `lo..hi`.
inline Window parse_window(std::string_view text) {
  std::size_t dots = text.find("..");
  if (dots == std::string_view::npos) fail(errc::parse_error, "window must look like lo..hi");
  Window w{parse_scalar(text.substr(0, dots)), parse_scalar(text.substr(dots + 2))};
  if (!(w.lo < w.hi)) fail(errc::precondition_failed, "window needs lo < hi");
  return w;
}

namespace detail {

inline json interval_json(const Interval& i) {
  return {{"lo", i.lo ? json(i.lo->str()) : json(nullptr)},
          {"hi", i.hi ? json(i.hi->str()) : json(nullptr)}};
}

inline json analyze_finite(const PLMap& f) {
  json fix = json::array(), bumps = json::array();
  for (const auto& c : fixed_set(f).items) fix.push_back(interval_json(c));
  if (f.is_increasing())
    for (const auto& b : bump_domains(f)) bumps.push_back(interval_json(b));
  auto [left, right] = end_slopes(f);
  ReversibilityFlags flags = reversible_in_H(f);
  json report = {{"map", to_string(f)},
                 {"degree", f.degree()},
                 {"breakpoints", scalars_to_json(f.breakpoints())},
                 {"end_slopes", {left.str(), right.str()}},
                 {"fixed_set", fix},
                 {"bumps", bumps},
                 {"signature", reduced_signature(f).entries},
                 {"PLE", is_PLE(f)},
                 {"involution", is_involution(f)},
                 {"reversible_in_H", {{"inc", flags.by_increasing}, {"dec", flags.by_decreasing}}}};
  report["strongly_reversible_in_H"] =
      f.is_increasing() ? strongly_reversible_in_H(f) : is_involution(f);
  return report;
}

inline json analyze_lazy(const LazyPLMap& m) {
  static const char* kinds[] = {"finite", "equivariant", "orbit-conjugator", "inverse", "composite"};
  json report = {{"map", to_string(m)}, {"kind", kinds[static_cast<int>(m.kind())]}, {"degree", m.degree()}};
  if (const EquivariantPLMap* e = m.as_equivariant()) {
    auto [lo, hi] = e->displacement_range();
    report["period"] = e->period().str();
    report["displacement"] = {lo.str(), hi.str()};
    report["fixed_point_free"] = lo.sign() > 0 || hi.sign() < 0;
  }
  return report;
}

template <class F>
Outcome guarded(F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return {2, "", std::string(e.what()) + "\n"};
  } catch (const json::exception& e) {
    return {2, "", std::string("json: ") + e.what() + "\n"};
  }
}

}  // namespace detail

inline Outcome cmd_analyze(const std::string& map) {
  return detail::guarded([&] {
    LazyPLMap m = load_map(map);
    const PLMap* f = m.as_finite();
    return Outcome{0, render(f ? detail::analyze_finite(*f) : detail::analyze_lazy(m)), ""};
  });
}

inline Outcome cmd_eval(const std::string& map, const std::vector<std::string>& points) {
  return detail::guarded([&] {
    LazyPLMap m = load_map(map);
    json values = json::array();
    for (const auto& p : points) {
      Scalar x = parse_scalar(p);
      values.push_back({{"x", x.str()}, {"y", m(x).str()}});
    }
    return Outcome{0, render({{"values", values}}), ""};
  });
}

inline Outcome cmd_dump(const std::string& map, const std::string& window) {
  return detail::guarded([&] {
    LazyPLMap m = load_map(map);
    Window w = parse_window(window);
    json bps = json::array();
    for (const auto& x : lazy_breakpoints(m, w)) bps.push_back({{"x", x.str()}, {"y", m(x).str()}});
    json report = {{"window", {{"lo", w.lo.str()}, {"hi", w.hi.str()}}},
                   {"ends", {{{"x", w.lo.str()}, {"y", m(w.lo).str()}}, {{"x", w.hi.str()}, {"y", m(w.hi).str()}}}},
                   {"breakpoints", bps}};
    return Outcome{0, render(report), ""};
  });
}

/// Exact for finite maps; on the window for lazy ones.
inline Outcome cmd_reverse_check(const std::string& map, const std::string& reverser,
                                 const std::optional<std::string>& window) {
  return detail::guarded([&] {
    LazyPLMap f = load_map(map), h = load_map(reverser);
    json report;
    bool ok;
    if (f.as_finite() && h.as_finite()) {
      ok = verify_reverses(*h.as_finite(), *f.as_finite());
      report["exact"] = true;
      report["involution"] = is_involution(*h.as_finite());
    } else {
      Window w = window ? parse_window(*window) : Window{Scalar(-20), Scalar(20)};
      ok = equals_on_window(lazy_conjugate(h, f), lazy_invert(f), w);
      report["exact"] = false;
      report["window"] = {{"lo", w.lo.str()}, {"hi", w.hi.str()}};
    }
    report["reverses"] = ok;
    return Outcome{ok ? 0 : 1, render(report), ""};
  });
}

inline Outcome cmd_strongify(const std::string& map, const std::string& reverser) {
  return detail::guarded([&] {
    PLMap f = load_finite(map), h = load_finite(reverser);
    if (!verify_reverses(h, f))
      fail(errc::precondition_failed, to_string(h) + " does not reverse " + to_string(f));
    // h f also reverses f, with the opposite orientation.
    PLMap d = h.is_increasing() ? compose(h, f) : h;
    PLMap tau = is_involution(d) ? d : strong_reverser_from_reverser(f, d);
    json report = {{"involution", to_string(tau)},
                   {"certificate", strongly_reversible_certificate(f, tau)}};
    return Outcome{0, render(report), ""};
  });
}

inline const std::vector<std::string>& factor_claims() {
  static const std::vector<std::string> claims{"r2",  "r4",       "i3",     "i4",   "tail",
                                               "ple", "involution", "reverses", "strong", "conj"};
  return claims;
}

inline Outcome cmd_factor(const std::string& map, const std::string& claim,
                          const std::optional<std::string>& reverser) {
  return detail::guarded([&] {
    LazyPLMap m = load_map(map);
    auto need_reverser = [&] {
      if (!reverser) fail(errc::precondition_failed, "claim '" + claim + "' needs --reverser");
      return load_finite(*reverser);
    };
    auto finite = [&] {
      if (const PLMap* f = m.as_finite()) return *f;
      fail(errc::precondition_failed, "claim '" + claim + "' needs a map with finitely many breakpoints");
    };
    json cert;
    if (claim == "r2") {
      cert = certificate(factor_fixed_point_free_R2(m));
    } else if (claim == "r4") {
      cert = certificate(factor_R4(finite()));
    } else if (claim == "i3") {
      cert = certificate(factor_I3(finite()));
    } else if (claim == "i4") {
      cert = certificate(factor_I4(finite()));
    } else if (claim == "tail") {
      cert = certificate(factor_tail(finite()));
    } else if (claim == "ple") {
      cert = ple_certificate(finite());
    } else if (claim == "involution") {
      cert = involution_certificate(finite());
    } else if (claim == "reverses") {
      cert = reverses_certificate(finite(), need_reverser());
    } else if (claim == "strong") {
      cert = strongly_reversible_certificate(finite(), need_reverser());
    } else if (claim == "conj") {
      cert = conjugate_to_translation_certificate(m);
    } else {
      fail(errc::precondition_failed, "unknown claim '" + claim + "'");
    }
    return Outcome{0, render(cert), ""};
  });
}

inline Outcome cmd_verify(std::string_view bytes) {
  verifier::Verdict v = verifier::verify_certificate_text(bytes);
  json report = {{"valid", v.valid}};
  if (!v.valid) report["reason"] = v.reason;
  return {v.valid ? 0 : 1, render(report), v.valid ? "" : v.reason + "\n"};
}

inline Outcome cmd_verify_file(const std::string& path) {
  return detail::guarded([&] {
    std::string bytes = path == "-" ? std::string(std::istreambuf_iterator<char>(std::cin), {})
                                    : read_file(path);
    return cmd_verify(bytes);
  });
}

}  // namespace plrev::cli
