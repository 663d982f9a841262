#include "cusp/chern.hpp"

#include <limits>
#include <string>

#include "cusp/errors.hpp"

namespace cusp::chern {

Rational log_coefficient(const ChernData& data) {
  if (data.n < 2) throw InvalidArgument("log_coefficient: dimension n must be >= 2");
  if (data.td_top == 0) {
    throw InvalidArgument("log_coefficient: td_top = 0, the divisor is not of log general type");
  }
  return -Rational(2 * (data.n - 1), 3) * data.td_mixed / data.td_top;
}

ChernData plane_curve_chern(int d) {
  if (d <= 3) {
    throw InvalidArgument("plane_curve_chern: degree " + std::to_string(d) + " < 4, K + D is not positive");
  }
  const BigInt dd(d);
  return ChernData{2, Rational(-dd * (dd - 3)), Rational(dd * dd)};
}

Rational log_coefficient_plane_curve(int d) { return log_coefficient(plane_curve_chern(d)); }

nlohmann::json rational_to_json(const Rational& q) {
  const BigInt num = boost::multiprecision::numerator(q);
  const BigInt den = boost::multiprecision::denominator(q);
  const BigInt lo(std::numeric_limits<long long>::min());
  const BigInt hi(std::numeric_limits<long long>::max());
  const auto enc = [&](const BigInt& v) -> nlohmann::json {
    if (v >= lo && v <= hi) return v.convert_to<long long>();
    return v.str();
  };
  return {{"num", enc(num)}, {"den", enc(den)}};
}

}  // namespace cusp::chern
