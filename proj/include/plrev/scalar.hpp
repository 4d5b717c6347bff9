// SPDX-License-Identifier: Apache-2.0
#pragma once

/*
 * Exact scalars a + b*sqrt(d) in a real quadratic field Q(sqrt(d)).
 *
 * Canonical form: d is squarefree and d > 1 whenever b != 0; rational values
 * carry b = 0 and d = 0. Equal values therefore have identical (a, b, d)
 * triples and operator== is plain structural comparison.
 *
 * Arithmetic between two irrational scalars with different radicands throws
 * FieldMismatch: there are no nested or mixed radicals.
 */

#include <gmpxx.h>

#include <cmath>
#include <compare>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

#include "plrev/detail/cursor.hpp"
#include "plrev/error.hpp"

namespace plrev {

using Integer = mpz_class;
using Rational = mpq_class;

namespace detail {

// Largest prime tried by trial division when reducing a radicand.
inline constexpr unsigned long kTrialLimit = 1000000UL;

// Returns (s, r) with n = s^2 * r and r squarefree. Requires n >= 0.
inline std::pair<Integer, Integer> squarefree_split(const Integer& n) {
  if (n < 0) fail(errc::unsupported_coefficient, "negative radicand " + n.get_str());
  if (n == 0) return {Integer(0), Integer(0)};
  Integer rest = n, square = 1, free = 1;
  auto strip = [&](const Integer& p) {
    unsigned exp = 0;
    while (mpz_divisible_p(rest.get_mpz_t(), p.get_mpz_t())) {
      rest /= p;
      ++exp;
    }
    for (unsigned i = 0; i + 1 < exp; i += 2) square *= p;
    if (exp % 2 == 1) free *= p;
  };
  strip(Integer(2));
  unsigned long p = 3;
  for (; p <= kTrialLimit; p += 2) {
    Integer pp = p;
    if (pp * pp > rest) break;
    strip(pp);
  }
  if (rest > 1) {
    // Every prime factor of rest now exceeds the trial limit (or rest is prime).
    Integer bound = Integer(kTrialLimit) * kTrialLimit * kTrialLimit;
    if (mpz_perfect_square_p(rest.get_mpz_t())) {
      Integer root;
      mpz_sqrt(root.get_mpz_t(), rest.get_mpz_t());
      square *= root;
    } else if (p <= kTrialLimit || rest < bound) {
      // rest is a prime, or a product of two distinct large primes.
      free *= rest;
    } else {
      fail(errc::unsupported_coefficient,
           "radicand " + n.get_str() + " too large to reduce to squarefree form");
    }
  }
  return {square, free};
}

}  // namespace detail

class Scalar {
 public:
  Scalar() = default;
  Scalar(int n) : a_(n) {}  // NOLINT(google-explicit-constructor)
  Scalar(long n) : a_(n) {}  // NOLINT(google-explicit-constructor)
  Scalar(Rational q) : a_(std::move(q)) { a_.canonicalize(); }  // NOLINT
  Scalar(long num, long den) : a_(num, den) {
    if (den == 0) fail(errc::division_by_zero, "zero denominator");
    a_.canonicalize();
  }

  /// a + b*sqrt(d); d is reduced to its squarefree part.
  Scalar(Rational a, Rational b, const Integer& d) : a_(std::move(a)), b_(std::move(b)) {
    a_.canonicalize();
    b_.canonicalize();
    auto [s, r] = detail::squarefree_split(d);
    if (r <= 1) {
      a_ += b_ * Rational(s);
      b_ = 0;
    } else {
      b_ *= Rational(s);
      d_ = r;
    }
    normalize();
  }

  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }
  const Integer& d() const { return d_; }
  bool is_rational() const { return b_ == 0; }
  bool is_zero() const { return a_ == 0 && b_ == 0; }

  /// Exact sign of a + b*sqrt(d), no floating point.
  int sign() const {
    int sa = sgn(a_), sb = sgn(b_);
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // Opposite signs: compare a^2 against d*b^2.
    Rational lhs = a_ * a_, rhs = b_ * b_ * Rational(d_);
    int c = cmp(lhs, rhs);
    return c > 0 ? sa : (c < 0 ? sb : 0);
  }

  Scalar operator-() const {
    Scalar r = *this;
    r.a_ = -r.a_;
    r.b_ = -r.b_;
    return r;
  }

  friend Scalar operator+(const Scalar& x, const Scalar& y) {
    if (x.is_rational() && y.is_rational()) return Scalar(x.a_ + y.a_);
    Integer d = common_radicand(x, y);
    return make(x.a_ + y.a_, x.b_ + y.b_, d);
  }
  friend Scalar operator-(const Scalar& x, const Scalar& y) {
    if (x.is_rational() && y.is_rational()) return Scalar(x.a_ - y.a_);
    Integer d = common_radicand(x, y);
    return make(x.a_ - y.a_, x.b_ - y.b_, d);
  }
  friend Scalar operator*(const Scalar& x, const Scalar& y) {
    if (x.is_rational() && y.is_rational()) return Scalar(x.a_ * y.a_);
    Integer d = common_radicand(x, y);
    if (d == 0) return make(x.a_ * y.a_, 0, 0);
    return make(x.a_ * y.a_ + Rational(d) * x.b_ * y.b_, x.a_ * y.b_ + x.b_ * y.a_, d);
  }
  friend Scalar operator/(const Scalar& x, const Scalar& y) {
    if (y.is_zero()) fail(errc::division_by_zero, "division of " + x.str() + " by zero");
    if (x.is_rational() && y.is_rational()) return Scalar(x.a_ / y.a_);
    common_radicand(x, y);
    return x * y.inverse();
  }

  Scalar& operator+=(const Scalar& y) { return *this = *this + y; }
  Scalar& operator-=(const Scalar& y) { return *this = *this - y; }
  Scalar& operator*=(const Scalar& y) { return *this = *this * y; }
  Scalar& operator/=(const Scalar& y) { return *this = *this / y; }

  Scalar inverse() const {
    if (is_zero()) fail(errc::division_by_zero, "inverse of zero");
    if (is_rational()) return make(1 / a_, 0, 0);
    Rational norm = a_ * a_ - Rational(d_) * b_ * b_;
    return make(a_ / norm, -b_ / norm, d_);
  }

  friend bool operator==(const Scalar& x, const Scalar& y) {
    return x.a_ == y.a_ && x.b_ == y.b_ && x.d_ == y.d_;
  }
  friend std::strong_ordering operator<=>(const Scalar& x, const Scalar& y) {
    if (x.is_rational() && y.is_rational()) {
      int c = cmp(x.a_, y.a_);
      return c < 0 ? std::strong_ordering::less
                   : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }
    int s = (x - y).sign();
    return s < 0 ? std::strong_ordering::less
                 : (s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  /// Largest integer not exceeding the value.
  Integer floor() const {
    if (is_rational()) {
      Integer r;
      mpz_fdiv_q(r.get_mpz_t(), a_.get_num_mpz_t(), a_.get_den_mpz_t());
      return r;
    }
    // value * D = A + B*sqrt(d) with a common positive denominator D.
    Integer den = lcm(a_.get_den(), b_.get_den());
    Integer A = a_.get_num() * (den / a_.get_den());
    Integer B = b_.get_num() * (den / b_.get_den());
    Integer t = B * B * d_;
    mpz_sqrt(t.get_mpz_t(), t.get_mpz_t());
    Integer approx = B > 0 ? Integer(A + t) : Integer(A - t - 1);
    Integer n;
    mpz_fdiv_q(n.get_mpz_t(), approx.get_mpz_t(), den.get_mpz_t());
    while ((*this - Scalar(Rational(n))).sign() < 0) n -= 1;
    while ((*this - Scalar(Rational(n + 1))).sign() >= 0) n += 1;
    return n;
  }

  /// Textual form: `n`, `n/m`, or `a+b*sqrt(d)` / `a-b*sqrt(d)`.
  std::string str() const {
    if (is_rational()) return a_.get_str();
    std::string out = a_.get_str();
    out += b_ < 0 ? "-" : "+";
    out += Rational(abs(b_)).get_str();
    out += "*sqrt(" + d_.get_str() + ")";
    return out;
  }

  double to_double() const { return a_.get_d() + b_.get_d() * std::sqrt(d_.get_d()); }

  friend std::ostream& operator<<(std::ostream& os, const Scalar& x) { return os << x.str(); }

 private:
  static Scalar make(Rational a, Rational b, Integer d) {
    Scalar r;
    r.a_ = std::move(a);
    r.b_ = std::move(b);
    r.d_ = std::move(d);
    r.normalize();
    return r;
  }

  static Integer common_radicand(const Scalar& x, const Scalar& y) {
    if (x.is_rational()) return y.d_;
    if (y.is_rational()) return x.d_;
    if (x.d_ != y.d_)
      fail(errc::field_mismatch, "sqrt(" + x.d_.get_str() + ") vs sqrt(" + y.d_.get_str() + ")");
    return x.d_;
  }

  void normalize() {
    if (b_ == 0) d_ = 0;
  }

  Rational a_{0};
  Rational b_{0};
  Integer d_{0};
};

inline Scalar abs(const Scalar& x) { return x.sign() < 0 ? -x : x; }
inline const Scalar& min(const Scalar& x, const Scalar& y) { return y < x ? y : x; }
inline const Scalar& max(const Scalar& x, const Scalar& y) { return x < y ? y : x; }

/// Unique positive root of p^2 - c*p - 1 = 0, i.e. p - 1/p = c.
inline Scalar solve_p(const Scalar& c) {
  if (!c.is_rational())
    fail(errc::unsupported_coefficient, "solve_p needs a rational coefficient, got " + c.str());
  // c = n/m: p = (n + sqrt(n^2 + 4m^2)) / (2m).
  const Integer& n = c.a().get_num();
  const Integer& m = c.a().get_den();
  Integer radicand = n * n + 4 * m * m;
  Scalar p(Rational(n, 2 * m), Rational(1, 2 * m), radicand);
  if (p.sign() <= 0 || !(p * p - c * p - Scalar(1)).is_zero())
    fail(errc::internal_verification_failed, "solve_p(" + c.str() + ")");
  return p;
}

namespace detail {

inline Rational parse_rational(Cursor& cur) {
  cur.skip_ws();
  bool negative = false;
  if (cur.peek() == '-' || cur.peek() == '+') negative = cur.get() == '-';
  std::string num = cur.digits();
  if (num.empty()) cur.error("expected integer");
  Integer n(num, 10), m(1);
  cur.skip_ws();
  if (cur.peek() == '/') {
    cur.get();
    cur.skip_ws();
    std::string den = cur.digits();
    if (den.empty()) cur.error("expected denominator");
    m = Integer(den, 10);
    if (m == 0) cur.error("zero denominator");
  }
  Rational q(negative ? Integer(-n) : n, m);
  q.canonicalize();
  return q;
}

inline Integer parse_sqrt(Cursor& cur) {
  cur.expect("sqrt");
  cur.expect("(");
  cur.skip_ws();
  std::string d = cur.digits();
  if (d.empty()) cur.error("expected radicand");
  cur.expect(")");
  return Integer(d, 10);
}

// scalar := rat [ ('+'|'-') rat '*' 'sqrt(' uint ')' ] | [rat '*'] 'sqrt(' uint ')'
inline Scalar parse_scalar(Cursor& cur) {
  cur.skip_ws();
  if (cur.peek() == 's') return Scalar(0, 1, parse_sqrt(cur));
  Rational a = parse_rational(cur);
  cur.skip_ws();
  if (cur.peek() == '*') {
    cur.get();
    return Scalar(0, a, parse_sqrt(cur));
  }
  if (cur.peek() == '+' || cur.peek() == '-') {
    // Only a surd part may follow; anything else ends the scalar.
    Cursor probe = cur;
    Rational b = parse_rational(probe);
    probe.skip_ws();
    if (probe.peek() == '*') {
      cur = probe;
      cur.get();
      return Scalar(a, b, parse_sqrt(cur));
    }
  }
  return Scalar(a);
}

}  // namespace detail

inline Scalar parse_scalar(std::string_view text) {
  detail::Cursor cur(text);
  Scalar s = detail::parse_scalar(cur);
  cur.skip_ws();
  if (!cur.at_end()) cur.error("trailing characters after scalar");
  return s;
}

}  // namespace plrev
