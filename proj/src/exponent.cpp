#include "cusp/exponent.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "cusp/errors.hpp"

namespace cusp {

namespace {

std::strong_ordering compare_values(double a, double b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  if (std::abs(a - b) <= Exponent::kTolerance * scale) {
    return std::strong_ordering::equal;
  }
  return a < b ? std::strong_ordering::less : std::strong_ordering::greater;
}

std::strong_ordering compare_rationals(const Rational& a, const Rational& b) {
  if (a == b) return std::strong_ordering::equal;
  return a < b ? std::strong_ordering::less : std::strong_ordering::greater;
}

}  // namespace

Rational exact_rational(double v) {
  if (!std::isfinite(v)) {
    throw InvalidArgument("exact_rational: value is not finite");
  }
  if (v == 0.0) return Rational(0);
  int exponent = 0;
  const double mantissa = std::frexp(v, &exponent);
  // mantissa * 2^53 is an integer for every finite double.
  const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  BigInt numerator(scaled);
  if (exponent >= 0) {
    numerator <<= exponent;
    return Rational(numerator);
  }
  BigInt denominator(1);
  denominator <<= -exponent;
  return Rational(numerator, denominator);
}

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw InvalidArgument("parse_rational: empty string");
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    const auto integer = [&](const std::string& part) {
      const std::size_t start = (!part.empty() && (part[0] == '+' || part[0] == '-')) ? 1 : 0;
      if (start == part.size() || part.find_first_not_of("0123456789", start) != std::string::npos) {
        throw InvalidArgument("parse_rational: malformed fraction '" + text + "'");
      }
      const auto nz = part.find_first_not_of('0', start);
      BigInt v(nz == std::string::npos ? std::string("0") : part.substr(nz));
      return part[0] == '-' ? BigInt(-v) : v;
    };
    BigInt num = integer(text.substr(0, slash));
    BigInt den = integer(text.substr(slash + 1));
    if (den == 0) throw InvalidArgument("parse_rational: zero denominator in '" + text + "'");
    // boost rejects negative denominators in the two-argument constructor
    if (den < 0) {
      num = -num;
      den = -den;
    }
    return Rational(num, den);
  }
  // Decimal literal: [sign] digits [. digits] [e|E [sign] digits]
  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }
  std::string digits;
  long long decimal_shift = 0;
  bool seen_point = false;
  bool seen_digit = false;
  for (; pos < text.size(); ++pos) {
    const char ch = text[pos];
    if (ch >= '0' && ch <= '9') {
      digits.push_back(ch);
      seen_digit = true;
      if (seen_point) --decimal_shift;
    } else if (ch == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw InvalidArgument("parse_rational: no digits in '" + text + "'");
  if (pos < text.size()) {
    if (text[pos] != 'e' && text[pos] != 'E') {
      throw InvalidArgument("parse_rational: unexpected character in '" + text + "'");
    }
    long long exp10 = 0;
    const char* first = text.data() + pos + 1;
    const char* last = text.data() + text.size();
    if (first < last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, exp10);
    if (ec != std::errc() || ptr != last) {
      throw InvalidArgument("parse_rational: bad exponent in '" + text + "'");
    }
    if (exp10 > 4000 || exp10 < -4000) {
      throw InvalidArgument("parse_rational: exponent out of range in '" + text + "'");
    }
    decimal_shift += exp10;
  }
  // a leading 0 would make the BigInt string constructor read octal
  const auto first_nonzero = digits.find_first_not_of('0');
  BigInt numerator(first_nonzero == std::string::npos ? std::string("0") : digits.substr(first_nonzero));
  if (negative) numerator = -numerator;
  BigInt power(1);
  for (long long i = 0; i < std::abs(decimal_shift); ++i) power *= 10;
  return decimal_shift >= 0 ? Rational(numerator * power) : Rational(numerator, power);
}

std::string rational_to_string(const Rational& q) {
  const BigInt num = boost::multiprecision::numerator(q);
  const BigInt den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::optional<Rational> exact_sqrt(const Rational& q) {
  if (q < 0) return std::nullopt;
  const BigInt num = boost::multiprecision::numerator(q);
  const BigInt den = boost::multiprecision::denominator(q);
  const BigInt rn = boost::multiprecision::sqrt(num);
  const BigInt rd = boost::multiprecision::sqrt(den);
  if (rn * rn != num || rd * rd != den) return std::nullopt;
  return Rational(rn, rd);
}

Exponent::Exponent(const Rational& q) : exact_(q), value_(static_cast<double>(q)) {}

Exponent Exponent::approximate(double v) {
  if (!std::isfinite(v)) throw InvalidArgument("Exponent: value is not finite");
  Exponent e;
  e.exact_.reset();
  e.value_ = v;
  return e;
}

Exponent Exponent::operator+(long long shift) const {
  if (exact_) return Exponent(*exact_ + Rational(shift));
  return approximate(value_ + static_cast<double>(shift));
}

Exponent Exponent::operator-(const Exponent& other) const {
  if (exact_ && other.exact_) return Exponent(*exact_ - *other.exact_);
  return approximate(value_ - other.value_);
}

std::strong_ordering compare(const Exponent& a, const Exponent& b) {
  if (a.exact_ && b.exact_) return compare_rationals(*a.exact_, *b.exact_);
  return compare_values(a.value_, b.value_);
}

std::strong_ordering Exponent::compare_to(double bound) const {
  if (exact_) return compare_rationals(*exact_, exact_rational(bound));
  return compare_values(value_, bound);
}

bool Exponent::is_integer() const {
  if (exact_) return boost::multiprecision::denominator(*exact_) == 1;
  return compare_values(value_, std::round(value_)) == 0;
}

long long Exponent::nearest_integer() const { return std::llround(value_); }

std::string Exponent::to_string() const {
  if (exact_) return rational_to_string(*exact_);
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value_);
  return std::string(buffer, ptr);
}

}  // namespace cusp
