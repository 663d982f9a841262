#include "cusp/expansion_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "cusp/errors.hpp"

namespace cusp::fit {

namespace {

constexpr std::size_t kBoundaryNodes = 5;
constexpr double kRankRatio = 1e-12;

struct WindowNodes {
  std::size_t first = 0;
  std::size_t count = 0;
};

WindowNodes nodes_in(const RadialGrid& grid, FitWindow w) {
  if (!(w.x_lo > 0.0) || !(w.x_hi > w.x_lo)) throw InvalidArgument("fit window: need 0 < x_lo < x_hi");
  const double slack = 1e-12;
  if (w.x_lo < grid.x(0) * (1.0 - slack) || w.x_hi > grid.x(grid.size() - 1) * (1.0 + slack)) {
    throw InvalidArgument("fit window [" + format_double(w.x_lo) + ", " + format_double(w.x_hi) +
                          "] leaves the grid");
  }
  const double t_lo = std::log(w.x_lo) - slack * std::max(1.0, std::abs(std::log(w.x_lo)));
  const double t_hi = std::log(w.x_hi) + slack * std::max(1.0, std::abs(std::log(w.x_hi)));
  WindowNodes out;
  bool started = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.t(i);
    if (t >= t_lo && t <= t_hi) {
      if (!started) out.first = i;
      started = true;
      ++out.count;
    }
  }
  return out;
}

double basis(const index::IndexTerm& term, double t) {
  return std::exp(term.z.value() * t) * std::pow(t, term.k);
}

std::string term_name(const index::IndexTerm& term) {
  return "(" + term.z.to_string() + "," + std::to_string(term.k) + ")";
}

FitWindow shifted(FitWindow w, double decades) {
  const double s = std::pow(10.0, decades);
  return {w.x_lo * s, w.x_hi * s};
}

}  // namespace

FitWindow default_window(const RadialGrid& grid) {
  const double t_lo = grid.t(kBoundaryNodes);
  const double t_hi = std::min(t_lo + 2.0 * std::numbers::ln10, grid.t_max());
  return {std::exp(t_lo), std::exp(t_hi)};
}

double PolyhomFit::operator()(double x) const {
  const double t = std::log(x);
  double s = 0.0;
  for (std::size_t j = 0; j < terms.size(); ++j) s += coefficients[j] * basis(terms[j], t);
  return s;
}

double PolyhomFit::coefficient(double z, int k) const {
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if (terms[j].k == k && terms[j].z.compare_to(z) == 0) return coefficients[j];
  }
  return 0.0;
}

PolyhomFit fit_polyhom(const RadialField& samples, const index::IndexSet& E, FitWindow window) {
  const auto& grid = samples.grid();
  const auto nodes = nodes_in(grid, window);

  PolyhomFit out;
  out.index_set = E;
  out.N = E.cutoff();
  out.window = window;
  out.samples_used = nodes.count;
  for (const auto& term : E.terms()) {
    if (term.z.compare_to(out.N) <= 0) out.terms.push_back(term);
  }
  const std::size_t m = nodes.count;
  const std::size_t p = out.terms.size();
  if (m < 3 * p || m == 0) {
    throw InvalidArgument("fit_polyhom: window holds " + std::to_string(m) + " samples, need at least " +
                          std::to_string(std::max<std::size_t>(1, 3 * p)) + " for " + std::to_string(p) +
                          " terms");
  }

  const double z_min = p > 0 ? out.terms.front().z.value() : 0.0;
  Eigen::MatrixXd A(m, p);
  Eigen::VectorXd y(m);
  for (std::size_t r = 0; r < m; ++r) {
    const double t = grid.t(nodes.first + r);
    const double w = std::exp(-z_min * t);
    y(r) = w * samples[nodes.first + r];
    for (std::size_t j = 0; j < p; ++j) A(r, j) = w * basis(out.terms[j], t);
  }

  Eigen::VectorXd coef = Eigen::VectorXd::Zero(p);
  if (p > 0) {
    Eigen::VectorXd scale(p);
    for (std::size_t j = 0; j < p; ++j) {
      scale(j) = A.col(j).norm();
      if (!(scale(j) > 0.0) || !std::isfinite(scale(j))) {
        throw NumericalFailure("fit_polyhom: basis term " + term_name(out.terms[j]) +
                               " vanishes or overflows on the window");
      }
      A.col(j) /= scale(j);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    const auto& R = qr.matrixR();
    const double r0 = std::abs(R(0, 0));
    const double rmin = std::abs(R(p - 1, p - 1));
    if (!(rmin > kRankRatio * r0)) {
      // Name the pair of columns that are closest to parallel.
      double best = -1.0;
      std::size_t bi = 0;
      std::size_t bj = 1;
      for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i + 1; j < p; ++j) {
          const double c = std::abs(A.col(i).dot(A.col(j)));
          if (c > best) {
            best = c;
            bi = i;
            bj = j;
          }
        }
      }
      std::string msg = "fit_polyhom: design matrix is rank deficient on the window";
      if (p >= 2) {
        msg += "; terms " + term_name(out.terms[bi]) + " and " + term_name(out.terms[bj]) +
               " are collinear (|cos| = " + format_double(best) + ")";
      }
      throw NumericalFailure(msg);
    }
    coef = qr.solve(y);
    for (std::size_t j = 0; j < p; ++j) coef(j) /= scale(j);
  }
  out.coefficients.assign(coef.data(), coef.data() + p);

  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t i = nodes.first + r;
    const double res = samples[i] - out(grid.x(i));
    out.residual_abs = std::max(out.residual_abs, std::abs(res));
    out.residual_sup = std::max(out.residual_sup, std::abs(res) * std::exp(-out.N * grid.t(i)));
  }
  return out;
}

LogTermEstimate detect_log_term(const RadialField& samples, const LogTermOptions& options) {
  const auto& grid = samples.grid();
  if (!(options.boundary_layer >= 0.0) || !(options.width > 0.0)) {
    throw InvalidArgument("detect_log_term: invalid window options");
  }
  const double t_lo = grid.t_min() + options.boundary_layer;
  if (t_lo + 2.0 * options.width > grid.t_max()) {
    throw InvalidArgument("detect_log_term: grid too short for the boundary layer and windows");
  }
  const index::IndexSet E({{Exponent(1), 0}, {Exponent(1), 1}}, 1.0);

  LogTermEstimate out;
  for (double factor : {1.0, 1.5, 2.0}) {
    const FitWindow w{std::exp(t_lo), std::exp(t_lo + factor * options.width)};
    const auto f = fit_polyhom(samples, E, w);
    out.windows.push_back(w);
    out.window_b_tilde.push_back(f.coefficient(1.0, 1));
    if (factor == 1.0) {
      out.b_tilde = f.coefficient(1.0, 1);
      out.b = f.coefficient(1.0, 0);
    }
  }
  const auto [lo, hi] = std::minmax_element(out.window_b_tilde.begin(), out.window_b_tilde.end());
  out.spread = *hi - *lo;
  out.reliable = out.spread <= 0.5 * std::abs(out.b_tilde);
  return out;
}

RemainderReport remainder_check(const PolyhomFit& fit, const RadialField& samples, double N) {
  const auto& grid = samples.grid();
  if (!std::isfinite(N)) throw InvalidArgument("remainder_check: N must be finite");
  const double x_floor = grid.x(kBoundaryNodes) * (1.0 - 1e-12);
  const double x_ceil = grid.x(grid.size() - 1) * (1.0 + 1e-12);

  std::vector<FitWindow> windows;
  for (int d = 0;; --d) {
    const auto w = shifted(fit.window, d);
    if (w.x_lo < x_floor) break;
    windows.push_back(w);
  }
  // Too close to t_min for a pair: move up instead.
  for (int d = 1; windows.size() < 3; ++d) {
    const auto w = shifted(fit.window, d);
    if (w.x_hi > x_ceil) break;
    windows.insert(windows.begin(), w);
  }
  if (windows.size() < 2) throw InvalidArgument("remainder_check: grid too short to move the window by a decade");
  std::reverse(windows.begin(), windows.end());

  RemainderReport out;
  out.N = N;
  out.windows = windows;
  const double eps = std::numeric_limits<double>::epsilon();
  // Rounding in the samples is absolute, on the scale of the whole field.
  const double noise = 1e4 * eps * samples.sup_norm();
  std::vector<std::size_t> live;
  for (std::size_t j = 0; j < windows.size(); ++j) {
    const auto f = fit_polyhom(samples, fit.index_set, windows[j]);
    const bool sat = f.residual_abs <= noise;
    out.window_residual.push_back(f.residual_abs);
    out.window_saturated.push_back(sat);
    if (!sat) live.push_back(j);
  }
  // windows are one decade apart, deepest first
  const auto slope_at = [&](std::size_t a) {
    const auto i = live[a];
    const auto j = live[a + 1];
    const double decades = std::log10(windows[j].x_lo / windows[i].x_lo);
    return std::log10(out.window_residual[j] / out.window_residual[i]) / decades;
  };
  if (live.size() < 2) {
    out.saturated = true;
    out.passes = true;
    return out;
  }
  out.slope = slope_at(0);
  if (live.size() >= 3) out.slope_spread = std::abs(slope_at(1) - out.slope);
  out.passes = out.slope >= N - 0.25;
  return out;
}

}  // namespace cusp::fit
