#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "ckls/error.hpp"

namespace ckls {

/// Exact rational number in canonical form: the denominator is positive and
/// coprime to the numerator, and zero is 0/1.
class Rational {
public:
  using Integer = boost::multiprecision::cpp_int;

  Rational() = default;
  Rational(std::int64_t value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(const Integer& num, const Integer& den) {
    if (den == 0) throw ZeroDenominator();
    value_ = boost::multiprecision::cpp_rational(num, den);
  }

  /// Parses `[-]digits(/digits)?` or `[-]digits(.digits)?`. Decimals are
  /// converted exactly.
  static Rational parse(std::string_view text);

  Integer numerator() const { return boost::multiprecision::numerator(value_); }
  Integer denominator() const { return boost::multiprecision::denominator(value_); }

  bool is_zero() const { return value_ == 0; }
  int sign() const { return value_.sign(); }
  double to_double() const { return value_.convert_to<double>(); }

  /// `p/q`, or `p` when q = 1.
  std::string to_string() const {
    if (denominator() == 1) return numerator().str();
    return numerator().str() + "/" + denominator().str();
  }

  Rational operator-() const { return Rational(-value_); }
  Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
  Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
  Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw ZeroDenominator();
    value_ /= o.value_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (b.value_ < a.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& q) {
    return os << q.to_string();
  }

private:
  explicit Rational(boost::multiprecision::cpp_rational v) : value_(std::move(v)) {}

  boost::multiprecision::cpp_rational value_;
};

inline Rational Rational::parse(std::string_view text) {
  const std::string original(text);
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && s.front() == '-') {
    negative = true;
    s.remove_prefix(1);
  }
  auto is_digits = [](std::string_view d) {
    if (d.empty()) return false;
    for (char c : d)
      if (c < '0' || c > '9') return false;
    return true;
  };

  // cpp_int reads a leading 0 as an octal prefix
  auto to_integer = [](std::string digits) {
    std::size_t first = digits.find_first_not_of('0');
    return first == std::string::npos ? Integer(0) : Integer(digits.substr(first));
  };

  Integer num;
  Integer den = 1;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view p = s.substr(0, slash);
    std::string_view q = s.substr(slash + 1);
    if (!is_digits(p) || !is_digits(q)) throw MalformedNumber(original);
    num = to_integer(std::string(p));
    den = to_integer(std::string(q));
    if (den == 0) throw ZeroDenominator();
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view whole = s.substr(0, dot);
    std::string_view frac = s.substr(dot + 1);
    if (!is_digits(whole) || !is_digits(frac)) throw MalformedNumber(original);
    num = to_integer(std::string(whole) + std::string(frac));
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  } else {
    if (!is_digits(s)) throw MalformedNumber(original);
    num = to_integer(std::string(s));
  }
  if (negative) num = -num;
  return Rational(num, den);
}

}  // namespace ckls
