#include "cusp/model_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cusp/errors.hpp"

namespace cusp::geometry {

namespace {

void check_ab(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidArgument("ModelMetric: a and b must be positive and finite");
  }
}

// One-sided second-order (∂_t² + ∂_t)u at an endpoint; dir = +1 looks right.
double endpoint_operator(std::span<const double> u, std::size_t i, int dir, double h) {
  const auto at = [&](int k) { return u[static_cast<std::size_t>(static_cast<long>(i) + dir * k)]; };
  const double ut = dir * (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
  const double utt = (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / (h * h);
  return utt + ut;
}

}  // namespace

ModelMetric::ModelMetric(double a_, double b_) : a(a_), b(b_) { check_ab(a, b); }

ModelMetric::ModelMetric(double a_, double b_, RadialField phi_) : a(a_), b(b_), phi(std::move(phi_)) {
  check_ab(a, b);
  for (double p : phi->values()) {
    // e^{2φ} must stay a positive finite double.
    if (!(std::abs(p) < 300.0)) throw InvalidArgument("ModelMetric: conformal factor overflows");
  }
}

RadialField ModelMetric::density(const RadialGrid& grid) const {
  check_grid(grid, "ModelMetric::density");
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = std::exp(2.0 * phi_at(i));
  return RadialField(grid, std::move(v));
}

void ModelMetric::check_grid(const RadialGrid& grid, const char* where) const {
  if (phi) require_same_grid(phi->grid(), grid, where);
}

Tridiagonal laplacian_stencil(const ModelMetric& metric, const RadialGrid& grid) {
  metric.check_grid(grid, "laplacian_stencil");
  const std::size_t n = grid.size();
  const double h = grid.h();
  const double lo = std::exp(-0.5 * h) / (2.0 * h * h);
  const double up = std::exp(0.5 * h) / (2.0 * h * h);
  Tridiagonal m(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double kappa = std::exp(-2.0 * metric.phi_at(i)) / metric.a;
    m.lower[i] = kappa * lo;
    m.upper[i] = kappa * up;
    m.diag[i] = -(m.lower[i] + m.upper[i]);
  }
  return m;
}

RadialField cusp_laplacian(const ModelMetric& metric, const RadialField& u) {
  const auto& grid = u.grid();
  const auto m = laplacian_stencil(metric, grid);
  auto out = m.apply(u.values());
  const std::size_t n = grid.size();
  out[0] = 0.5 * std::exp(-2.0 * metric.phi_at(0)) / metric.a * endpoint_operator(u.values(), 0, 1, grid.h());
  out[n - 1] = 0.5 * std::exp(-2.0 * metric.phi_at(n - 1)) / metric.a *
               endpoint_operator(u.values(), n - 1, -1, grid.h());
  return RadialField(grid, std::move(out));
}

RadialField ricci_radial(const ModelMetric& metric, const RadialGrid& grid) {
  metric.check_grid(grid, "ricci_radial");
  std::vector<double> out(grid.size(), -1.0 / metric.a);
  if (metric.phi) {
    const auto lap = cusp_laplacian(metric.model(), *metric.phi);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= 2.0 * lap[i];
  }
  return RadialField(grid, std::move(out));
}

RadialField ricci_relative_to_metric(const ModelMetric& metric, const RadialGrid& grid) {
  auto ric = ricci_radial(metric, grid);
  auto& v = ric.mutable_values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::exp(-2.0 * metric.phi_at(i));
  return ric;
}

BdfTransform bdf_transform(double phi0, std::span<const double> x_values) {
  if (!std::isfinite(phi0)) throw InvalidArgument("bdf_transform: phi0 must be finite");
  BdfTransform out;
  out.bbar = phi0;
  for (std::size_t i = 0; i < x_values.size(); ++i) {
    const double x = x_values[i];
    if (!(x > 0.0) || !(x < 1.0)) {
      throw InvalidArgument("bdf_transform: sample " + std::to_string(i) + " is outside (0, 1)");
    }
    const double q = 1.0 - x * phi0;
    if (!(q > 0.0)) {
      throw InvalidArgument("bdf_transform: rho' >= 1 at sample " + std::to_string(i) +
                            " (1 - x phi0 <= 0)");
    }
    const double xp = x / q;
    out.x.push_back(x);
    out.x_prime.push_back(xp);
    out.btilde.push_back(phi0 * phi0 / q);
    out.dxprime_dx.push_back(1.0 / (q * q));
    out.remainder_ratio = std::max(out.remainder_ratio, std::abs(xp - x * (1.0 + x * phi0)) / (x * x * x));
    out.remainder_bound = std::max(out.remainder_bound, phi0 * phi0 / q);
  }
  return out;
}

double cusp_volume(const ModelMetric& metric, double x_lo, double x_hi) {
  if (!(x_lo >= 0.0) || !(x_hi >= x_lo) || !(x_hi < 1.0)) {
    throw InvalidArgument("cusp_volume: need 0 <= x_lo <= x_hi < 1");
  }
  const double scale = 2.0 * std::numbers::pi * std::sqrt(metric.a * metric.b);
  if (!metric.phi) return scale * (x_hi - x_lo);
  if (x_lo == x_hi) return 0.0;

  const auto& grid = metric.phi->grid();
  const auto xs = grid.xs();
  const double slack = 1e-12;
  if (x_lo < xs.front() * (1.0 - slack) || x_hi > xs.back() * (1.0 + slack)) {
    throw InvalidArgument("cusp_volume: range leaves the grid of the conformal factor");
  }
  const auto g = metric.density(grid);
  // e^{2φ} is taken piecewise linear in x, so constant φ integrates exactly.
  const auto g_at = [&](double x) {
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t j = static_cast<std::size_t>(it - xs.begin());
    j = std::clamp<std::size_t>(j, 1, xs.size() - 1);
    const double w = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return (1.0 - w) * g[j - 1] + w * g[j];
  };
  double sum = 0.0;
  double x_prev = std::max(x_lo, xs.front());
  double g_prev = g_at(x_prev);
  const double x_end = std::min(x_hi, xs.back());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] <= x_prev) continue;
    if (xs[i] >= x_end) break;
    sum += 0.5 * (xs[i] - x_prev) * (g[i] + g_prev);
    x_prev = xs[i];
    g_prev = g[i];
  }
  sum += 0.5 * (x_end - x_prev) * (g_at(x_end) + g_prev);
  return scale * sum;
}

double carlson_griffiths_threshold(const RadialField& h) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0)) throw InvalidArgument("carlson_griffiths: h must be positive (node " + std::to_string(i) + ")");
    // Compare in log space; e^{2/x} overflows deep in the cusp.
    best = std::min(best, 2.0 / h.grid().x(i) - std::log(h[i]));
  }
  return std::exp(best);
}

CarlsonGriffiths carlson_griffiths_radial(double epsilon, const RadialField& h) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument("carlson_griffiths_radial: epsilon must be positive");
  }
  const auto& grid = h.grid();
  const std::size_t n = grid.size();
  std::vector<double> log_h(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(h[i] > 0.0)) {
      throw InvalidArgument("carlson_griffiths_radial: h must be positive (node " + std::to_string(i) + ")");
    }
    log_h[i] = std::log(h[i]);
  }
  const double step = grid.h();
  const auto dlogh = [&](std::size_t i) {
    if (i == 0) return (-3.0 * log_h[0] + 4.0 * log_h[1] - log_h[2]) / (2.0 * step);
    if (i + 1 == n) return (3.0 * log_h[n - 1] - 4.0 * log_h[n - 2] + log_h[n - 3]) / (2.0 * step);
    return (log_h[i + 1] - log_h[i - 1]) / (2.0 * step);
  };

  const double log_eps = std::log(epsilon);
  std::vector<double> dens(n);
  std::vector<double> dev(n);
  std::vector<double> phi(n);
  double dev_over_x = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.x(i);
    const double denom = x * (log_eps + log_h[i]) - 2.0;
    const double numer = 1.0 + 0.5 * x * dlogh(i);
    if (!(denom < 0.0) || numer == 0.0) {
      throw NumericalFailure("carlson_griffiths_radial: density not positive at node " + std::to_string(i) +
                             " (x = " + format_double(x) + ")");
    }
    dens[i] = 4.0 * numer * numer / (denom * denom);
    dev[i] = dens[i] - 1.0;
    phi[i] = 0.5 * std::log(dens[i]);
    dev_over_x = std::max(dev_over_x, std::abs(dev[i]) / x);
  }
  CarlsonGriffiths out{ModelMetric(1.0, 1.0, RadialField(grid, std::move(phi))),
                       RadialField(grid, std::move(dens)), RadialField(grid, std::move(dev)), dev_over_x,
                       carlson_griffiths_threshold(h)};
  return out;
}

}  // namespace cusp::geometry
