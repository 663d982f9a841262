#pragma once

#include <string>
#include <vector>

#include "cusp/radial.hpp"

namespace cusp {

/// a * x^z * (log x)^k
struct Term {
  double a = 0.0;
  double z = 0.0;
  int k = 0;
};

/// Finite sum of terms, written "a:z:k, a:z:k, ..." in configs.
/// Each number may be a decimal or a fraction p/q; an empty string is 0.
class TermList {
 public:
  TermList() = default;
  explicit TermList(std::vector<Term> terms);

  static TermList parse(const std::string& text);

  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  double operator()(double x) const;
  RadialField sample(const RadialGrid& grid) const;

  /// Coefficient of x^z (log x)^k, summing repeated entries.
  double coefficient(double z, int k) const;

  /// Canonical text; parse(to_string()) reproduces the list.
  std::string to_string() const;

 private:
  std::vector<Term> terms_;
};

}  // namespace cusp
