#pragma once

#include <compare>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace cusp {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Real exponent of an expansion term x^z (log x)^k.
///
/// Exponents are carried exactly as rationals whenever they arise from
/// rational data through rational operations (including square roots of
/// perfect squares). Otherwise they are doubles, and two exponents are
/// considered equal when they agree to kTolerance relative to max(1, |z|).
/// Deciding "is z - r a root" in the accidental-multiplicity rule depends on
/// that equality being stable, which is why the exact path exists at all.
class Exponent {
 public:
  static constexpr double kTolerance = 1e-12;

  Exponent() : exact_(Rational(0)), value_(0.0) {}
  explicit Exponent(const Rational& q);
  explicit Exponent(long long n) : Exponent(Rational(n)) {}

  static Exponent approximate(double v);

  bool is_exact() const { return exact_.has_value(); }
  const std::optional<Rational>& exact() const { return exact_; }
  double value() const { return value_; }

  Exponent operator+(long long shift) const;
  Exponent operator-(long long shift) const { return *this + (-shift); }
  Exponent operator-(const Exponent& other) const;

  /// Tolerance-aware three-way comparison.
  friend std::strong_ordering compare(const Exponent& a, const Exponent& b);
  friend bool operator==(const Exponent& a, const Exponent& b) {
    return compare(a, b) == 0;
  }
  friend bool operator<(const Exponent& a, const Exponent& b) {
    return compare(a, b) < 0;
  }
  friend bool operator>(const Exponent& a, const Exponent& b) {
    return compare(a, b) > 0;
  }
  friend bool operator<=(const Exponent& a, const Exponent& b) {
    return compare(a, b) <= 0;
  }

  /// Compare against a plain real bound (cutoffs, alpha).
  std::strong_ordering compare_to(double bound) const;

  /// True when this exponent is an integer (exactly, or within tolerance).
  bool is_integer() const;
  /// Nearest integer; only meaningful when is_integer().
  long long nearest_integer() const;

  /// "p/q" for exact values, otherwise the shortest round-trip decimal.
  std::string to_string() const;

 private:
  std::optional<Rational> exact_;
  double value_ = 0.0;
};

/// Converts a finite double into the rational it represents exactly.
Rational exact_rational(double v);

/// Parses "p", "p/q" or a decimal literal into an exact rational.
Rational parse_rational(const std::string& text);

std::string rational_to_string(const Rational& q);

/// Exact square root when q is the square of a rational.
std::optional<Rational> exact_sqrt(const Rational& q);

}  // namespace cusp
