#include "cusp/tridiagonal.hpp"

#include <cmath>
#include <string>

#include "cusp/errors.hpp"

namespace cusp {

std::vector<double> Tridiagonal::apply(std::span<const double> v) const {
  const std::size_t n = size();
  if (v.size() != n) throw InvalidArgument("Tridiagonal::apply: size mismatch");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag[i] * v[i];
    if (i > 0) s += lower[i] * v[i - 1];
    if (i + 1 < n) s += upper[i] * v[i + 1];
    out[i] = s;
  }
  return out;
}

Tridiagonal Tridiagonal::transposed() const {
  const std::size_t n = size();
  Tridiagonal t(n);
  t.diag = diag;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    t.upper[i] = lower[i + 1];
    t.lower[i + 1] = upper[i];
  }
  return t;
}

Tridiagonal Tridiagonal::block(std::size_t first, std::size_t count) const {
  if (first + count > size()) throw InvalidArgument("Tridiagonal::block: out of range");
  Tridiagonal b(count);
  for (std::size_t i = 0; i < count; ++i) {
    b.lower[i] = i > 0 ? lower[first + i] : 0.0;
    b.diag[i] = diag[first + i];
    b.upper[i] = i + 1 < count ? upper[first + i] : 0.0;
  }
  return b;
}

std::vector<double> solve(const Tridiagonal& m, std::vector<double> rhs) {
  const std::size_t n = m.size();
  if (rhs.size() != n) throw InvalidArgument("solve: right-hand side size mismatch");
  if (n == 0) return rhs;
  std::vector<double> c(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = i > 0 ? m.lower[i] : 0.0;
    const double pivot = m.diag[i] - (i > 0 ? lo * c[i - 1] : 0.0);
    const double scale = std::abs(m.diag[i]) + std::abs(lo) + (i + 1 < n ? std::abs(m.upper[i]) : 0.0);
    if (!(std::abs(pivot) > 1e-14 * scale) || !std::isfinite(pivot)) {
      throw NumericalFailure("tridiagonal solve: singular pivot at row " + std::to_string(i));
    }
    c[i] = i + 1 < n ? m.upper[i] / pivot : 0.0;
    rhs[i] = (rhs[i] - (i > 0 ? lo * rhs[i - 1] : 0.0)) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
  return rhs;
}

}  // namespace cusp
