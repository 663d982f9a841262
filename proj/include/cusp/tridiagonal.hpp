#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cusp {

/// Square tridiagonal matrix. Row i holds lower[i] (column i-1), diag[i] and
/// upper[i] (column i+1); lower[0] and upper[n-1] are ignored.
struct Tridiagonal {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  Tridiagonal() = default;
  explicit Tridiagonal(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}

  std::size_t size() const { return diag.size(); }
  std::vector<double> apply(std::span<const double> v) const;
  Tridiagonal transposed() const;
  /// Rows [first, first + count) and the same columns.
  Tridiagonal block(std::size_t first, std::size_t count) const;
};

/// Thomas elimination without pivoting. Throws NumericalFailure on a pivot
/// that vanishes relative to the row scale.
std::vector<double> solve(const Tridiagonal& m, std::vector<double> rhs);

}  // namespace cusp
