#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

#include "qualprob/errors.hpp"

namespace qualprob {

/// Exact rational number in lowest terms with a positive denominator.
///
/// Backed by GMP's mpq_class; every arithmetic result is canonicalized, so
/// structural equality coincides with numeric equality and zero is 0/1.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t value) : value_(static_cast<long>(value)) {}  // NOLINT
  Rational(std::int64_t numerator, std::int64_t denominator) {
    if (denominator == 0) {
      throw Error(ErrorCode::InvalidDistribution, "zero denominator");
    }
    value_ = mpq_class(mpz_class(static_cast<long>(numerator)),
                       mpz_class(static_cast<long>(denominator)));
    value_.canonicalize();
  }
  explicit Rational(mpq_class value) : value_(std::move(value)) {
    value_.canonicalize();
  }

  /// Parses `n`, `-n` or `n/d`.
  static Rational parse(std::string_view text) {
    std::string s(text);
    mpq_class q;
    if (s.empty() || q.set_str(s, 10) != 0) {
      throw Error(ErrorCode::SyntaxError,
                  "malformed rational '" + s + "'");
    }
    if (q.get_den() == 0) {
      throw Error(ErrorCode::SyntaxError, "zero denominator in '" + s + "'");
    }
    q.canonicalize();
    return Rational(std::move(q));
  }

  const mpq_class& raw() const noexcept { return value_; }
  mpz_class numerator() const { return value_.get_num(); }
  mpz_class denominator() const { return value_.get_den(); }

  int sign() const noexcept { return sgn(value_); }
  bool is_zero() const noexcept { return sign() == 0; }
  bool is_integer() const { return value_.get_den() == 1; }

  /// Canonical text: `num/den`, or just `num` when the denominator is 1.
  std::string str() const { return value_.get_str(10); }

  Rational operator-() const { return Rational(mpq_class(-value_)); }

  Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
  Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
  Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw Error(ErrorCode::DimensionMismatch, "division by zero");
    value_ /= o.value_;
    return *this;
  }

  // this -= a * b without an intermediate Rational.
  void sub_product(const Rational& a, const Rational& b) {
    thread_local mpq_class scratch;
    mpq_mul(scratch.get_mpq_t(), a.value_.get_mpq_t(), b.value_.get_mpq_t());
    mpq_sub(value_.get_mpq_t(), value_.get_mpq_t(), scratch.get_mpq_t());
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return mpq_equal(a.value_.get_mpq_t(), b.value_.get_mpq_t()) != 0;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = cmp(a.value_, b.value_);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
  }

 private:
  mpq_class value_{0};
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

}  // namespace qualprob

template <>
struct std::hash<qualprob::Rational> {
  std::size_t operator()(const qualprob::Rational& r) const {
    return std::hash<std::string>{}(r.str());
  }
};
