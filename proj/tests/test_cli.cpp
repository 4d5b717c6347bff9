// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "plrev/cli.hpp"
#include "support/errors.hpp"
#include "support/generators.hpp"
#include "support/mutations.hpp"

using namespace plrev;
using testgen::code_of;

namespace {

const char* kMax = "pl{slopes=[1/2,2] bp=[0] anchor=(0,0)}";

json parse_out(const cli::Outcome& r) {
  EXPECT_EQ(r.code, 0) << r.err;
  return json::parse(r.out);
}

void expect_same_map(const LazyPLMap& a, const LazyPLMap& b) {
  Window w{Scalar(-30), Scalar(30)};
  EXPECT_TRUE(equals_on_window(a, b, w)) << to_string(a) << " vs " << to_string(b);
}

}  // namespace

TEST(Parse, Examples) {
  PLMap m = parse_pl_map(kMax);
  EXPECT_EQ(m, pl_extreme(PLMap::affine(2, 0), PLMap::affine(Scalar(1, 2), 0), Extreme::max));
  EXPECT_TRUE(parse_pl_map("pl{slopes=[1] bp=[] anchor=(0,0)}").is_identity());
  EXPECT_EQ(code_of([] { parse_map("pl{slopes=[1,-2] bp=[0] anchor=(0,0)}"); }), errc::mixed_slope_signs);
  // Anchors need not sit at 0.
  EXPECT_EQ(parse_pl_map("pl{ slopes=[3] bp=[] anchor=(2,1) }"), PLMap::affine(3, -5));
  EXPECT_EQ(parse_pl_map("pl{slopes=[1+1*sqrt(2)] bp=[] anchor=(0,0)}").slopes()[0],
            parse_scalar("1+1*sqrt(2)"));
}

TEST(Parse, ErrorsCarryPosition) {
  try {
    parse_map("pl{slopes=[1]\n bp=[0 anchor=(0,0)}");
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::parse_error);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([] { parse_map("pl{slopes=[1] bp=[] anchor=(0,0)} extra"); }), errc::parse_error);
  EXPECT_EQ(code_of([] { parse_map("xx{}"); }), errc::parse_error);
  EXPECT_EQ(code_of([] { parse_map("pl{slopes=[1,2] bp=[] anchor=(0,0)}"); }), errc::empty_slopes);
}

TEST(Parse, LazyForms) {
  LazyPLMap tw = parse_map("tw{T=8 cell=pl{slopes=[3,1/3] bp=[2] anchor=(0,0)}}");
  EXPECT_EQ(tw(Scalar(2)), Scalar(6));
  EXPECT_EQ(tw(Scalar(10)), Scalar(26, 3));
  LazyPLMap eq = parse_map(to_string(tw));
  ASSERT_NE(eq.as_equivariant(), nullptr);
  EXPECT_EQ(*eq.as_equivariant(), *tw.as_equivariant());
  LazyPLMap k = parse_map("orbit{base=pl{slopes=[1] bp=[] anchor=(0,5)}}");
  EXPECT_EQ(k(Scalar(10)), Scalar(2));
  LazyPLMap c = parse_map("comp{inv{" + to_string(k) + "} " + kMax + "}");
  EXPECT_EQ(c(Scalar(1)), Scalar(10));
  EXPECT_EQ(code_of([] { parse_map("orbit{base=pl{slopes=[2] bp=[] anchor=(0,0)}}"); }),
            errc::has_fixed_point);
}

TEST(ParseProperties, PrintParseRoundTrip) {
  testgen::Gen gen(601);
  for (int i = 0; i < 200; ++i) {
    PLMap f = gen.any();
    if (gen.coin()) f = compose(PLMap::affine(gen.positive_slope(), 0), f);
    std::string text = to_string(f);
    EXPECT_EQ(parse_pl_map(text), f) << text;
    EXPECT_EQ(to_string(parse_map(text)), text);
    EXPECT_EQ(map_from_json(map_to_json(f)).as_finite() ? *map_from_json(map_to_json(f)).as_finite() : PLMap(), f);
  }
  for (int i = 0; i < 60; ++i) {
    EquivariantPLMap e = gen.equivariant();
    std::string text = to_string(LazyPLMap(e));
    EXPECT_EQ(*parse_map(text).as_equivariant(), e) << text;
    EXPECT_EQ(*map_from_json(map_to_json(e)).as_equivariant(), e);
  }
  for (int i = 0; i < 20; ++i) {
    PLMap f = gen.fixed_point_free();
    LazyPLMap k = conjugator_to_translation(f);
    LazyPLMap c = lazy_compose(lazy_invert(k), lazy_compose(gen.equivariant(), k));
    std::string text = to_string(c);
    LazyPLMap back = parse_map(text);
    EXPECT_EQ(to_string(back), text);
    expect_same_map(back, c);
    json j = map_to_json(c);
    LazyPLMap from_json = map_from_json(j);
    EXPECT_EQ(map_to_json(from_json), j);
    expect_same_map(from_json, c);
  }
}

TEST(ParseProperties, FuzzedTextNeverCrashes) {
  testgen::Gen gen(602);
  const std::string alphabet = "pl{}[]()=,/-+*0123456789 sqrtbpanchoeqtwT";
  for (int i = 0; i < 2000; ++i) {
    std::string text = to_string(gen.any());
    long edits = gen.integer(1, 3);
    for (long e = 0; e < edits; ++e) {
      std::size_t at = static_cast<std::size_t>(gen.integer(0, static_cast<long>(text.size()) - 1));
      text[at] = alphabet[static_cast<std::size_t>(gen.integer(0, static_cast<long>(alphabet.size()) - 1))];
    }
    try {
      LazyPLMap m = parse_map(text);
      EXPECT_EQ(to_string(parse_map(to_string(m))), to_string(m));
    } catch (const Error&) {
    }
  }
}

TEST(Cli, AnalyzeExamples) {
  json a = parse_out(cli::cmd_analyze(kMax));
  EXPECT_EQ(a["degree"], 1);
  EXPECT_EQ(a["signature"], json::array({1, 1}));
  EXPECT_EQ(a["PLE"], true);
  EXPECT_EQ(a["reversible_in_H"], (json{{"inc", false}, {"dec", true}}));

  json b = parse_out(cli::cmd_analyze("pl{slopes=[2] bp=[] anchor=(0,0)}"));
  EXPECT_EQ(b["signature"], json::array({-1, 1}));
  EXPECT_EQ(b["reversible_in_H"], (json{{"inc", false}, {"dec", false}}));

  json c = parse_out(cli::cmd_analyze("pl{slopes=[1] bp=[] anchor=(0,0)}"));
  EXPECT_EQ(c["signature"], json::array({0}));
  EXPECT_EQ(c["reversible_in_H"], (json{{"inc", true}, {"dec", true}}));

  json d = parse_out(cli::cmd_analyze("tw{T=8 cell=pl{slopes=[3,1/3] bp=[2] anchor=(0,0)}}"));
  EXPECT_EQ(d["kind"], "equivariant");
  EXPECT_EQ(d["period"], "16");

  cli::Outcome bad = cli::cmd_analyze("pl{slopes=[1,-2] bp=[0] anchor=(0,0)}");
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("MixedSlopeSigns"), std::string::npos);
}

TEST(Cli, EvalDumpAndChecks) {
  json e = parse_out(cli::cmd_eval("tw{T=8 cell=pl{slopes=[3,1/3] bp=[2] anchor=(0,0)}}", {"2", "5", "10", "18"}));
  std::vector<std::string> ys;
  for (const auto& v : e["values"]) ys.push_back(v["y"]);
  EXPECT_EQ(ys, (std::vector<std::string>{"6", "7", "26/3", "22"}));

  json d = parse_out(cli::cmd_dump("orbit{base=pl{slopes=[1,2] bp=[1] anchor=(0,1)}}", "0..16"));
  std::vector<std::string> xs;
  for (const auto& b : d["breakpoints"]) xs.push_back(b["x"]);
  EXPECT_EQ(xs, (std::vector<std::string>{"2", "4", "8", "16"}));
  EXPECT_EQ(cli::cmd_dump(kMax, "3..1").code, 2);

  EXPECT_EQ(cli::cmd_reverse_check(kMax, "pl{slopes=[-1] bp=[] anchor=(0,0)}", std::nullopt).code, 0);
  EXPECT_EQ(cli::cmd_reverse_check("pl{slopes=[2] bp=[] anchor=(0,0)}", "pl{slopes=[-1] bp=[] anchor=(0,0)}",
                                   std::nullopt)
                .code,
            1);
  const std::string tw = "tw{T=8 cell=pl{slopes=[3,1/3] bp=[2] anchor=(0,0)}}";
  EXPECT_EQ(cli::cmd_reverse_check(tw, "pl{slopes=[1] bp=[] anchor=(0,8)}", "-32..32").code, 0);

  json s = parse_out(cli::cmd_strongify(kMax, "pl{slopes=[-1] bp=[] anchor=(0,0)}"));
  EXPECT_EQ(s["involution"], "pl{slopes=[-1] bp=[] anchor=(0,0)}");
  EXPECT_TRUE(verifier::verify_certificate(s["certificate"]).valid);
  // A decreasing reverser that is not an involution is made involutive.
  json s2 = parse_out(cli::cmd_strongify("pl{slopes=[1/4,4] bp=[0] anchor=(0,0)}", "pl{slopes=[-2] bp=[] anchor=(0,0)}"));
  EXPECT_TRUE(is_involution(parse_pl_map(s2["involution"].get<std::string>())));
}

TEST(Cli, FactorThenVerify) {
  for (const auto& [map, claim] : std::vector<std::pair<std::string, std::string>>{
           {"pl{slopes=[-2] bp=[] anchor=(0,0)}", "i3"},
           {"pl{slopes=[1] bp=[] anchor=(0,1)}", "r4"},
           {"pl{slopes=[1] bp=[] anchor=(0,1)}", "r2"},
           {kMax, "i4"},
           {kMax, "tail"},
           {kMax, "ple"},
           {"pl{slopes=[-1] bp=[] anchor=(0,3)}", "involution"},
           {"pl{slopes=[1,3] bp=[2] anchor=(0,1)}", "conj"}}) {
    cli::Outcome f = cli::cmd_factor(map, claim, std::nullopt);
    ASSERT_EQ(f.code, 0) << claim << ": " << f.err;
    cli::Outcome v = cli::cmd_verify(f.out);
    EXPECT_EQ(v.code, 0) << claim << ": " << v.out;
    // Byte-identical on a second run.
    EXPECT_EQ(cli::cmd_factor(map, claim, std::nullopt).out, f.out);
  }
  cli::Outcome rev = cli::cmd_factor(kMax, "reverses", "pl{slopes=[-1] bp=[] anchor=(0,0)}");
  EXPECT_EQ(cli::cmd_verify(rev.out).code, 0);
  EXPECT_EQ(cli::cmd_factor(kMax, "reverses", std::nullopt).code, 2);
  EXPECT_EQ(cli::cmd_factor(kMax, "i3", std::nullopt).code, 2);
  EXPECT_EQ(cli::cmd_factor("pl{slopes=[2] bp=[] anchor=(0,0)}", "tail", std::nullopt).code, 2);
  EXPECT_EQ(cli::cmd_verify("not json").code, 1);
}

TEST(Cli, TamperedSlopeIsRejected) {
  json cert = json::parse(cli::cmd_factor("pl{slopes=[-2] bp=[] anchor=(0,0)}", "i3", std::nullopt).out);
  json bad = cert;
  bad["subject"]["slopes"][0] = "-3";
  verifier::Verdict v = verifier::verify_certificate(bad);
  EXPECT_FALSE(v.valid);
  EXPECT_FALSE(v.reason.empty());
}

TEST(CliProperties, EverySingleFieldMutationFails) {
  std::vector<json> certs;
  certs.push_back(certificate(factor_I3(PLMap::affine(-2, 0))));
  certs.push_back(certificate(factor_R4(PLMap::translation(1))));
  certs.push_back(certificate(factor_I4(parse_pl_map(kMax))));
  certs.push_back(certificate(factor_tail(parse_pl_map("pl{slopes=[1,2,1] bp=[0,1] anchor=(0,0)}"))));
  certs.push_back(certificate(factor_tail(tau_p(3))));
  certs.push_back(reverses_certificate(parse_pl_map(kMax), eta()));
  certs.push_back(involution_certificate(sigma_t(3)));
  certs.push_back(strongly_reversible_certificate(parse_pl_map(kMax), eta()));
  certs.push_back(conjugate_to_translation_certificate(parse_pl_map("pl{slopes=[1,3] bp=[2] anchor=(0,1)}")));
  certs.push_back(ple_certificate(parse_pl_map(kMax)));
  for (const auto& cert : certs) {
    ASSERT_TRUE(verifier::verify_certificate(cert).valid) << cert.dump();
    auto mutations = testgen::single_field_mutations(cert);
    EXPECT_GT(mutations.size(), 3U);
    for (const auto& m : mutations)
      EXPECT_FALSE(verifier::verify_certificate(m.cert).valid) << cert["claim"] << " at " << m.where;
  }
}
