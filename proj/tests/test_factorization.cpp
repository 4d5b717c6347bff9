// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "plrev/factorization.hpp"
#include "support/errors.hpp"
#include "support/generators.hpp"

using namespace plrev;
using testgen::code_of;

namespace {

// Printed formulas for the tail involutions.
Scalar tau_formula(const Scalar& p, const Scalar& x) { return x.sign() >= 0 ? -p * x : -x / p; }
Scalar sigma_formula(const Scalar& t, const Scalar& x) { return t - x; }

Scalar epstein_formula(Scalar x) {
  x = tau_formula(2, x);
  x = sigma_formula(2, x);
  x = tau_formula(Scalar(1, 4), x);
  x = sigma_formula(2, x);
  x = tau_formula(2, x);
  return sigma_formula(-5, x);
}

PLMap max_map() { return PLMap::from_pieces({Scalar(0)}, {Scalar(1, 2), Scalar(2)}, 0, 0); }

// Largest |breakpoint| of a family of maps, plus a margin.
Scalar beyond(const std::vector<PLMap>& maps) {
  Scalar r(10);
  for (const auto& m : maps)
    for (const auto& b : m.breakpoints()) r = max(r, abs(b) + Scalar(10));
  return r;
}

// f and g agree on both tails: two agreeing points on each side beyond every breakpoint.
bool same_tails(const PLMap& f, const PLMap& g) {
  Scalar r = beyond({f, g});
  for (const Scalar& x : {r, r + Scalar(1), -r, -r - Scalar(1)})
    if (f(x) != g(x)) return false;
  return true;
}

void expect_valid(const FactorizationResult& r, std::size_t n) {
  EXPECT_EQ(r.factors.size(), n);
  EXPECT_EQ(r.witnesses.size(), n);
  EXPECT_TRUE(verify_factorization(r)) << to_string(r.subject);
  // Independent product check by direct evaluation at integer and half-integer points.
  for (Scalar x = r.window.lo; x <= r.window.hi; x += Scalar(1, 2)) {
    Scalar y = x;
    for (auto it = r.factors.rbegin(); it != r.factors.rend(); ++it) y = (*it)(y);
    ASSERT_EQ(y, r.subject(x)) << x.str();
  }
}

}  // namespace

TEST(Tail, TauSigmaExamples) {
  EXPECT_EQ(tau_p(2)(Scalar(3)), Scalar(-6));
  EXPECT_EQ(tau_p(2)(Scalar(-3)), Scalar(3, 2));
  EXPECT_EQ(sigma_t(2)(Scalar(5)), Scalar(-3));
  EXPECT_EQ(tau_p(1), eta());
  EXPECT_TRUE(is_involution(tau_p(Scalar(7, 3))));
  EXPECT_TRUE(is_involution(sigma_t(Scalar(-4))));
  EXPECT_EQ(code_of([] { tau_p(0); }), errc::non_positive_parameter);
  EXPECT_EQ(code_of([] { tau_p(-2); }), errc::non_positive_parameter);
}

TEST(Tail, EpsteinExample) {
  PLMap k = epstein_example();
  EXPECT_EQ(k(Scalar(-1)), Scalar(-1, 4));
  EXPECT_FALSE(k.is_identity());
  ASSERT_TRUE(is_compactly_supported(k));
  auto bounds = support_bounds(k);
  ASSERT_TRUE(bounds.has_value());
  auto [lo, hi] = *bounds;
  for (long i = 0; i <= 40; ++i) {
    Scalar d(i, 4);
    EXPECT_EQ(k(lo - d), lo - d);
    EXPECT_EQ(k(hi + d), hi + d);
  }
  for (Scalar x(-20); x <= Scalar(20); x += Scalar(1, 8)) ASSERT_EQ(k(x), epstein_formula(x)) << x.str();
  EXPECT_NE(k((lo + hi) / Scalar(2)), (lo + hi) / Scalar(2));
}

TEST(Tail, IsPLEExamples) {
  EXPECT_TRUE(is_PLE(max_map()));
  EXPECT_FALSE(is_PLE(PLMap::affine(2, 0)));
  EXPECT_TRUE(is_PLE(PLMap::translation(1)));
  EXPECT_TRUE(is_PLE(tau_p(3)));
}

TEST(Tail, MaxMapTailData) {
  TailMatch t = tail_involution_product(max_map());
  EXPECT_EQ(t.data.lambda, Scalar(2));
  EXPECT_EQ(t.data.u, Scalar(0));
  EXPECT_EQ(t.data.v, Scalar(0));
  EXPECT_EQ(t.data.p, Scalar(1));
  EXPECT_EQ(t.data.q, Scalar(2));
  EXPECT_EQ(t.data.s, Scalar(-1));
  EXPECT_FALSE(t.data.reflected);
  for (long x : {100L, 1000L}) {
    EXPECT_EQ(t.g(Scalar(x)), Scalar(2 * x));
    EXPECT_EQ(t.g(Scalar(-x)), Scalar(-x, 2));
  }
  EXPECT_TRUE(is_compactly_supported(t.remainder));
}

TEST(Tail, TranslationTailData) {
  TailMatch t = tail_involution_product(PLMap::translation(1));
  EXPECT_EQ(t.data.p, Scalar(1));
  EXPECT_EQ(t.data.q, Scalar(1));
  EXPECT_EQ(t.data.s, Scalar(0));
  for (long x : {50L, -50L, 500L, -500L}) EXPECT_EQ(t.g(Scalar(x)), Scalar(x + 1));
}

TEST(Tail, GoldenRatioTail) {
  // x below 0, 2x on [0, 1], x + 1 above: u - v = 1.
  PLMap f = PLMap::from_pieces({Scalar(0), Scalar(1)}, {Scalar(1), Scalar(2), Scalar(1)}, 0, 0);
  TailMatch t = tail_involution_product(f);
  const Scalar& p = t.data.p;
  EXPECT_FALSE(p.is_rational());
  EXPECT_TRUE((p * p - p - Scalar(1)).is_zero());
  EXPECT_TRUE(same_tails(f, t.g));
}

TEST(Tail, Errors) {
  EXPECT_EQ(code_of([] { tail_involution_product(PLMap::affine(2, 0)); }), errc::not_ple);
}

TEST(Model, PairValues) {
  const ModelPair& m = model_reversible_pair();
  EXPECT_EQ(m.f(Scalar(2)), Scalar(6));
  EXPECT_EQ(m.f(Scalar(5)), Scalar(7));
  EXPECT_EQ(m.f(Scalar(10)), Scalar(26, 3));
  EXPECT_EQ(m.g(Scalar(2)), Scalar(4));
  EXPECT_EQ(m.k(Scalar(1)), Scalar(0));
  EXPECT_EQ(m.k(Scalar(5)), Scalar(8));
  EXPECT_EQ(m.k(Scalar(17)), Scalar(16));
  for (Scalar x(-40); x <= Scalar(40); x += Scalar(1, 3)) ASSERT_EQ(m.g(x), m.f(x) - Scalar(2));
}

TEST(Model, ReversalsAndConjugacy) {
  const ModelPair& m = model_reversible_pair();
  Window w{Scalar(-32), Scalar(32)};
  LazyPLMap t8 = PLMap::translation(8);
  EXPECT_TRUE(equals_on_window(lazy_conjugate(t8, m.f), m.f.inverse(), w));
  EXPECT_TRUE(equals_on_window(lazy_conjugate(m.g_reverser, m.g), m.g.inverse(), w));
  EXPECT_TRUE(equals_on_window(lazy_conjugate(m.k, m.g), m.f, w));
  EXPECT_FALSE(equals_on_window(lazy_conjugate(m.k, m.f), m.g, w));
  // g^{-1} f moves every probe upward.
  LazyPLMap gf = lazy_compose(lazy_invert(m.g), m.f);
  for (const auto& x : window_probes(gf, gf, w)) EXPECT_GT(gf(x), x) << x.str();
}

TEST(Factor, R2Translations) {
  for (long c : {1L, -1L, 3L}) {
    FactorizationResult r = factor_fixed_point_free_R2(PLMap::translation(c));
    EXPECT_EQ(r.claim, Claim::R2);
    EXPECT_EQ(r.window, (Window{Scalar(-20), Scalar(20)}));
    expect_valid(r, 2);
    for (const auto& wit : r.witnesses) EXPECT_EQ(wit.kind, WitnessKind::reverser);
  }
  EXPECT_EQ(code_of([] { factor_fixed_point_free_R2(PLMap::affine(2, 0)); }), errc::has_fixed_point);
}

TEST(Factor, R4Examples) {
  for (const PLMap& f : {PLMap::identity(), PLMap::affine(2, 0), PLMap::translation(1), max_map()}) {
    FactorizationResult r = factor_R4(f);
    EXPECT_EQ(r.claim, Claim::R4);
    expect_valid(r, 4);
  }
  EXPECT_EQ(code_of([] { factor_R4(eta()); }), errc::orientation_error);
}

TEST(Factor, DominatingInvolutionExamples) {
  for (const PLMap& f : {PLMap::affine(-2, 0), PLMap::affine(-1, -10), eta()}) {
    PLMap s = dominating_involution(f);
    EXPECT_TRUE(is_involution(s));
    // Oracle: sigma - f is positive at every breakpoint and grows on both tails.
    std::vector<Scalar> pts = s.breakpoints();
    pts.insert(pts.end(), f.breakpoints().begin(), f.breakpoints().end());
    Scalar r = beyond({s, f});
    pts.push_back(r);
    pts.push_back(-r);
    for (const auto& x : pts) EXPECT_GT(s(x), f(x));
    EXPECT_GE(s(r + Scalar(1)) - f(r + Scalar(1)), s(r) - f(r));
    EXPECT_GE(s(-r - Scalar(1)) - f(-r - Scalar(1)), s(-r) - f(-r));
  }
  EXPECT_EQ(dominating_involution(eta())(Scalar(0)), Scalar(1));
  EXPECT_EQ(code_of([] { dominating_involution(PLMap::identity()); }), errc::orientation_error);
}

TEST(Factor, I3Examples) {
  for (const PLMap& f : {eta(), PLMap::affine(-2, 0), PLMap::affine(-1, 1)}) {
    FactorizationResult r = factor_I3(f);
    EXPECT_EQ(r.claim, Claim::I3);
    expect_valid(r, 3);
    for (const auto& g : r.factors)
      for (Scalar x(-20); x <= Scalar(20); x += Scalar(1, 2)) ASSERT_EQ(g(g(x)), x);
  }
  EXPECT_EQ(code_of([] { factor_I3(PLMap::identity()); }), errc::orientation_error);
}

TEST(Factor, I4Examples) {
  for (const PLMap& f : {PLMap::identity(), PLMap::affine(2, 0), PLMap::translation(1)}) {
    FactorizationResult r = factor_I4(f);
    EXPECT_EQ(r.claim, Claim::I4);
    expect_valid(r, 4);
    for (const auto& wit : r.witnesses) EXPECT_EQ(wit.kind, WitnessKind::involution);
  }
  EXPECT_EQ(code_of([] { factor_I4(eta()); }), errc::orientation_error);
}

TEST(Factor, TailResult) {
  FactorizationResult r = factor_tail(max_map());
  EXPECT_EQ(r.claim, Claim::TailMatch);
  expect_valid(r, 5);
  FactorizationResult d = factor_tail(tau_p(3));
  expect_valid(d, 6);
  EXPECT_EQ(d.factors.front().as_finite()->slopes(), eta().slopes());
}

TEST(Factor, StronglyReversibleSplit) {
  auto [a, b] = split_strongly_reversible(max_map(), eta());
  EXPECT_EQ(a, eta());
  EXPECT_TRUE(is_involution(b));
  EXPECT_EQ(compose(a, b), max_map());
  auto [c, d] = split_strongly_reversible(PLMap::identity(), eta());
  EXPECT_EQ(c, eta());
  EXPECT_EQ(d, eta());
  EXPECT_EQ(code_of([] { split_strongly_reversible(PLMap::affine(2, 0), eta()); }),
            errc::precondition_failed);
  expect_valid(factor_strongly_reversible(max_map(), eta()), 2);
}

TEST(Factor, TamperedResultsFail) {
  FactorizationResult r = factor_I3(PLMap::affine(-2, 0));
  FactorizationResult bad = r;
  bad.factors[0] = dominating_involution(PLMap::affine(-3, 0));
  EXPECT_FALSE(verify_factorization(bad));
  bad = r;
  bad.subject = PLMap::affine(-2, 1);
  EXPECT_FALSE(verify_factorization(bad));
  bad = r;
  bad.factors.pop_back();
  bad.witnesses.pop_back();
  EXPECT_FALSE(verify_factorization(bad));

  FactorizationResult s = factor_fixed_point_free_R2(PLMap::translation(1));
  bad = s;
  bad.witnesses[0].reverser = PLMap::translation(8);
  EXPECT_FALSE(verify_factorization(bad));
}

TEST(FactorProperties, InvolutionProductsArePLE) {
  testgen::Gen gen(501);
  for (int i = 0; i < 100; ++i) {
    PLMap f;
    long n = gen.integer(2, 6);
    for (long j = 0; j < n; ++j) f = compose(f, gen.involution());
    EXPECT_TRUE(is_PLE(f)) << to_string(f);
    TailMatch t = tail_involution_product(f);
    EXPECT_TRUE(same_tails(t.data.reflected ? compose(eta(), f) : f, t.g));
  }
}

TEST(FactorProperties, TailMatchesRandomPLE) {
  testgen::Gen gen(502);
  int irrational = 0;
  for (int i = 0; i < 100; ++i) {
    PLMap f = gen.ple();
    if (gen.coin()) f = compose(eta(), f);
    TailMatch t = tail_involution_product(f);
    const TailData& d = t.data;
    Scalar c = d.u - d.v;
    EXPECT_TRUE((d.p * d.p - c * d.p - Scalar(1)).is_zero());
    EXPECT_GT(d.p, Scalar(0));
    EXPECT_EQ(d.q, d.lambda / d.p);
    EXPECT_EQ(d.s, d.u - d.p);
    if (!d.p.is_rational()) ++irrational;
    EXPECT_TRUE(same_tails(d.reflected ? compose(eta(), f) : f, t.g)) << to_string(f);
    PLMap g;
    for (const PLMap& m : tail_involutions(d)) {
      EXPECT_TRUE(is_involution(m));
      g = compose(g, m);
    }
    EXPECT_EQ(g, t.g);
  }
  EXPECT_GE(irrational, 10);
}

TEST(FactorProperties, PLEClosedUnderComposition) {
  testgen::Gen gen(503);
  for (int i = 0; i < 100; ++i) {
    PLMap f = gen.ple(), g = gen.ple();
    if (gen.coin()) f = compose(eta(), f);
    ASSERT_TRUE(is_PLE(f) && is_PLE(g));
    EXPECT_TRUE(is_PLE(compose(f, g)));
  }
}

TEST(FactorProperties, DominationObligation) {
  testgen::Gen gen(504);
  for (int i = 0; i < 100; ++i) {
    PLMap f = gen.decreasing();
    PLMap m = shifted(pl_extreme(f, invert(f), Extreme::max), Scalar(1));
    std::vector<Scalar> pts = m.breakpoints();
    pts.insert(pts.end(), f.breakpoints().begin(), f.breakpoints().end());
    for (const auto& b : f.breakpoints()) pts.push_back(f.inverse_at(b));
    Scalar r = beyond({m, f});
    pts.push_back(r);
    pts.push_back(-r);
    for (const auto& x : pts) EXPECT_GE(m(f(x)), x + Scalar(1));
    PLMap s = dominating_involution(f);
    for (const auto& x : pts) EXPECT_GT(s(x), f(x));
  }
}

TEST(FactorProperties, RandomFactorizationsVerify) {
  testgen::Gen gen(505);
  for (int i = 0; i < 6; ++i) {
    PLMap f = gen.increasing(2);
    expect_valid(factor_R4(f), 4);
    expect_valid(factor_I4(f), 4);
    expect_valid(factor_I3(gen.decreasing(2)), 3);
    expect_valid(factor_fixed_point_free_R2(gen.fixed_point_free()), 2);
  }
}
