#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "cusp/index_algebra.hpp"
#include "cusp/radial.hpp"

namespace cusp::fit {

struct FitWindow {
  double x_lo = 0.0;
  double x_hi = 0.0;
};

/// Deepest two decades of the grid, skipping the 5 nodes nearest t_min.
FitWindow default_window(const RadialGrid& grid);

/// Σ a_{z,k} x^z (log x)^k over the terms of an index set with z <= N.
struct PolyhomFit {
  index::IndexSet index_set;
  std::vector<index::IndexTerm> terms;
  std::vector<double> coefficients;
  double N = 0.0;
  FitWindow window;
  std::size_t samples_used = 0;
  /// sup |r| / x^N over the window, r = samples - expansion
  double residual_sup = 0.0;
  /// sup |r| over the window
  double residual_abs = 0.0;

  double operator()(double x) const;
  /// Coefficient of x^z (log x)^k, 0 when the term is not in the fit.
  double coefficient(double z, int k) const;
};

/// Least squares in t = log x with basis e^{zt} t^k, rows weighted by
/// x^{-z_min}, columns scaled to unit norm and factored by column-pivoted QR.
/// Throws NumericalFailure naming the most collinear pair of terms when the
/// design matrix is numerically rank deficient.
PolyhomFit fit_polyhom(const RadialField& samples, const index::IndexSet& E, FitWindow window);

struct LogTermOptions {
  /// Distance in log x kept clear of t_min, where the left boundary value
  /// excites the decaying x^{-2} mode.
  double boundary_layer = 10.0;
  /// Width in log x of the smallest window; the others are 1.5x and 2x.
  double width = 2.0 * std::numbers::ln10;
};

struct LogTermEstimate {
  double b_tilde = 0.0;
  double b = 0.0;
  double spread = 0.0;
  bool reliable = false;
  std::vector<FitWindow> windows;
  std::vector<double> window_b_tilde;
};

/// Fits b̃ x log x + b x on three nested windows that all start at the
/// deepest admissible point. b̃ is the value on the narrowest window and the
/// spread is the max minus min over the three; the estimate is unreliable
/// when the spread exceeds half of |b̃|.
LogTermEstimate detect_log_term(const RadialField& samples, const LogTermOptions& options = {});

struct RemainderReport {
  double N = 0.0;
  bool saturated = false;
  double slope = std::nan("");
  /// |difference| between the deepest slope and the next one; 0 if only one.
  double slope_spread = 0.0;
  bool passes = false;
  std::vector<FitWindow> windows;  // deepest first
  std::vector<double> window_residual;
  std::vector<bool> window_saturated;
};

/// Refits the index set of `fit` on copies of its window moved by whole
/// decades and reads the decay exponent of the remainder off how sup |r|
/// scales between the two deepest windows above rounding level. The
/// span of a closed index set is dilation invariant, so for a remainder
/// c x^s the ratio is exactly 10^s.
RemainderReport remainder_check(const PolyhomFit& fit, const RadialField& samples, double N);

}  // namespace cusp::fit
