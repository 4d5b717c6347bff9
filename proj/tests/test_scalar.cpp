// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "plrev/scalar.hpp"
#include "support/errors.hpp"
#include "support/generators.hpp"

using namespace plrev;
using plrev::testgen::code_of;

namespace {

Scalar surd(long a, long b, long d) { return Scalar(Rational(a), Rational(b), Integer(d)); }

}  // namespace

TEST(Scalar, DifferenceOfSquares) {
  EXPECT_EQ(surd(1, 1, 5) * surd(1, -1, 5), Scalar(-4));
}

TEST(Scalar, SqrtSquared) { EXPECT_EQ(surd(0, 1, 2) * surd(0, 1, 2), Scalar(2)); }

TEST(Scalar, RationalSum) { EXPECT_EQ(Scalar(3, 2) + Scalar(1, 3), Scalar(11, 6)); }

TEST(Scalar, FieldMismatch) {
  EXPECT_EQ(code_of([] { (void)(surd(1, 1, 2) + surd(1, 1, 3)); }), errc::field_mismatch);
  // A rational operand is compatible with every extension.
  EXPECT_EQ(surd(1, 1, 2) + Scalar(1), surd(2, 1, 2));
}

TEST(Scalar, DivisionByZero) {
  EXPECT_EQ(code_of([] { (void)(Scalar(1) / Scalar(0)); }), errc::division_by_zero);
}

TEST(Scalar, Sign) {
  // 1 - sqrt(2): a > 0 > b and 1^2 < 2 * 1^2.
  EXPECT_EQ(surd(1, -1, 2).sign(), -1);
  EXPECT_EQ(Scalar(0).sign(), 0);
  // -1 + sqrt(5): 5 * 1^2 > 1^2.
  EXPECT_EQ(surd(-1, 1, 5).sign(), 1);
}

TEST(Scalar, SquarefreeReduction) {
  Scalar x = surd(0, 1, 8);  // sqrt(8) = 2 sqrt(2)
  EXPECT_EQ(x, surd(0, 2, 2));
  EXPECT_EQ(x.d(), 2);
  EXPECT_TRUE(surd(3, 5, 9).is_rational());
  EXPECT_EQ(surd(3, 5, 9), Scalar(18));
  EXPECT_EQ(surd(1, 1, 1), Scalar(2));
  EXPECT_EQ(surd(7, 0, 5).d(), 0);
}

TEST(Scalar, LargeRadicandWithTwoBigPrimes) {
  // 1000003 * 1000033 are both beyond the trial-division limit.
  Integer n = Integer(1000003) * Integer(1000033);
  Scalar x(0, 1, n);
  EXPECT_EQ(x.d(), n);
  Scalar y(0, 1, n * 4);
  EXPECT_EQ(y, Scalar(0, 2, n));
}

TEST(Scalar, SolveP) {
  EXPECT_EQ(solve_p(Scalar(0)), Scalar(1));
  EXPECT_EQ(solve_p(Scalar(3, 2)), Scalar(2));
  Scalar golden(Rational(1, 2), Rational(1, 2), Integer(5));
  EXPECT_EQ(solve_p(Scalar(1)), golden);
  EXPECT_TRUE((golden * golden - golden - Scalar(1)).is_zero());
  EXPECT_EQ(code_of([] { (void)solve_p(surd(0, 1, 2)); }), errc::unsupported_coefficient);
}

TEST(Scalar, SolvePPropertyOverRationals) {
  testgen::Gen gen(7);
  for (int i = 0; i < 200; ++i) {
    Scalar c = gen.rational(20, 9);
    Scalar p = solve_p(c);
    EXPECT_GT(p.sign(), 0);
    EXPECT_TRUE((p * p - c * p - Scalar(1)).is_zero()) << c;
    EXPECT_EQ(p - p.inverse(), c);
  }
}

TEST(Scalar, FieldAxiomsInOneExtension) {
  testgen::Gen gen(11);
  for (long d : {2L, 3L, 5L, 7L, 10L}) {
    for (int i = 0; i < 50; ++i) {
      Scalar x(gen.rational().a(), gen.rational().a(), Integer(d));
      Scalar y(gen.rational().a(), gen.rational().a(), Integer(d));
      Scalar z(gen.rational().a(), gen.rational().a(), Integer(d));
      EXPECT_EQ((x + y) + z, x + (y + z));
      EXPECT_EQ((x * y) * z, x * (y * z));
      EXPECT_EQ(x * (y + z), x * y + x * z);
      EXPECT_EQ(x + y, y + x);
      EXPECT_EQ(x * y, y * x);
      EXPECT_TRUE((x - x).is_zero());
      if (!x.is_zero()) {
        EXPECT_EQ(x * x.inverse(), Scalar(1));
      }
      EXPECT_EQ((x * y).sign(), x.sign() * y.sign());
      EXPECT_EQ(x.sign() == 0, x.is_zero());
      // Rebuilding from the canonical triple is the identity.
      EXPECT_EQ(Scalar(x.a(), x.b(), x.d()), x);
    }
  }
}

TEST(Scalar, SignAgreesWithFloatingPointAwayFromZero) {
  testgen::Gen gen(3);
  for (int i = 0; i < 300; ++i) {
    Scalar x(gen.rational().a(), gen.rational().a(), Integer(gen.integer(2, 30)));
    double v = x.to_double();
    if (std::abs(v) > 1e-9) {
      EXPECT_EQ(x.sign(), v > 0 ? 1 : -1) << x;
    }
  }
}

TEST(Scalar, Floor) {
  EXPECT_EQ(Scalar(7, 2).floor(), 3);
  EXPECT_EQ(Scalar(-7, 2).floor(), -4);
  EXPECT_EQ(Scalar(-4).floor(), -4);
  EXPECT_EQ(surd(0, 1, 2).floor(), 1);
  EXPECT_EQ(surd(0, -1, 2).floor(), -2);
  EXPECT_EQ(Scalar(Rational(1, 2), Rational(1, 2), Integer(5)).floor(), 1);
  testgen::Gen gen(5);
  for (int i = 0; i < 300; ++i) {
    Scalar x(gen.rational(50, 7).a(), gen.rational(50, 7).a(), Integer(gen.integer(2, 50)));
    Integer n = x.floor();
    EXPECT_LE(Scalar(Rational(n)), x);
    EXPECT_LT(x, Scalar(Rational(n + 1)));
  }
}

TEST(Scalar, TextRoundTrip) {
  EXPECT_EQ(parse_scalar("1/2+3/2*sqrt(5)"), Scalar(Rational(1, 2), Rational(3, 2), Integer(5)));
  EXPECT_EQ(parse_scalar("-4/6"), Scalar(-2, 3));
  EXPECT_EQ(parse_scalar("sqrt(2)"), surd(0, 1, 2));
  EXPECT_EQ(parse_scalar("1-2*sqrt(12)"), surd(1, -4, 3));
  EXPECT_EQ(parse_scalar("7"), Scalar(7));
  // Leading zeros are decimal, not octal.
  EXPECT_EQ(parse_scalar("017/010"), Scalar(17, 10));
  EXPECT_EQ(parse_scalar("0919"), Scalar(919));
  EXPECT_EQ(surd(1, -1, 2).str(), "1-1*sqrt(2)");
  EXPECT_EQ(Scalar(11, 6).str(), "11/6");

  testgen::Gen gen(9);
  for (int i = 0; i < 300; ++i) {
    Scalar x(gen.rational().a(), gen.rational().a(), Integer(gen.integer(0, 40)));
    EXPECT_EQ(parse_scalar(x.str()), x) << x.str();
  }
}

TEST(Scalar, ParseErrors) {
  EXPECT_EQ(code_of([] { (void)parse_scalar("1/0"); }), errc::parse_error);
  EXPECT_EQ(code_of([] { (void)parse_scalar("abc"); }), errc::parse_error);
  EXPECT_EQ(code_of([] { (void)parse_scalar("1+2*sqrt("); }), errc::parse_error);
  EXPECT_EQ(code_of([] { (void)parse_scalar("3 4"); }), errc::parse_error);
}
