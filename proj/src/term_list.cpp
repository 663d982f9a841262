#include "cusp/term_list.hpp"

#include <cmath>

#include "cusp/errors.hpp"
#include "cusp/exponent.hpp"

namespace cusp {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& s, const std::string& term) {
  try {
    return static_cast<double>(parse_rational(trim(s)));
  } catch (const InvalidArgument&) {
    throw InvalidArgument("term list: bad number '" + s + "' in term '" + term + "'");
  } catch (const std::runtime_error&) {
    throw InvalidArgument("term list: bad number '" + s + "' in term '" + term + "'");
  }
}

}  // namespace

TermList::TermList(std::vector<Term> terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (!std::isfinite(t.a) || !std::isfinite(t.z)) throw InvalidArgument("term list: non-finite entry");
    if (t.k < 0) throw InvalidArgument("term list: log power must be >= 0");
  }
}

TermList TermList::parse(const std::string& text) {
  std::vector<Term> out;
  if (trim(text).empty()) return TermList{};
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item = trim(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (item.empty()) throw InvalidArgument("term list: empty term in '" + text + "'");
    const auto c1 = item.find(':');
    const auto c2 = c1 == std::string::npos ? std::string::npos : item.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos || item.find(':', c2 + 1) != std::string::npos) {
      throw InvalidArgument("term list: expected a:z:k, got '" + item + "'");
    }
    Term t;
    t.a = parse_number(item.substr(0, c1), item);
    t.z = parse_number(item.substr(c1 + 1, c2 - c1 - 1), item);
    const double k = parse_number(item.substr(c2 + 1), item);
    if (k < 0 || k != std::floor(k) || k > 64) {
      throw InvalidArgument("term list: log power must be a small non-negative integer in '" + item + "'");
    }
    t.k = static_cast<int>(k);
    out.push_back(t);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return TermList(std::move(out));
}

double TermList::operator()(double x) const {
  const double lx = std::log(x);
  double sum = 0.0;
  for (const auto& t : terms_) sum += t.a * std::pow(x, t.z) * std::pow(lx, t.k);
  return sum;
}

RadialField TermList::sample(const RadialGrid& grid) const {
  return RadialField::from_function(grid, [this](double x) { return (*this)(x); });
}

double TermList::coefficient(double z, int k) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    if (t.z == z && t.k == k) sum += t.a;
  }
  return sum;
}

std::string TermList::to_string() const {
  std::string out;
  for (const auto& t : terms_) {
    if (!out.empty()) out += ", ";
    out += format_double(t.a) + ":" + format_double(t.z) + ":" + std::to_string(t.k);
  }
  return out;
}

}  // namespace cusp
