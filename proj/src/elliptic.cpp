#include "cusp/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cusp/errors.hpp"

namespace cusp::elliptic {

namespace {

double sup_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void check_linear(const LinearProblem& p) {
  p.metric.check_grid(p.rhs.grid(), "LinearProblem");
  if (!std::isfinite(p.lambda)) throw InvalidArgument("LinearProblem: lambda must be finite");
  if (!std::isfinite(p.bc_left) || !std::isfinite(p.bc_right)) {
    throw InvalidArgument("LinearProblem: boundary values must be finite");
  }
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void normalize(std::vector<double>& v) {
  const double n = norm2(v);
  for (double& x : v) x /= n;
}

// Fixed seed direction; every component nonzero so no singular vector is missed.
std::vector<double> start_vector(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * std::sin(0.37 * static_cast<double>(i) + 0.1);
  normalize(v);
  return v;
}

double least_squares_slope(std::span<const double> xs, std::span<const double> ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

Tridiagonal linear_operator(const LinearProblem& p) {
  check_linear(p);
  const auto& grid = p.rhs.grid();
  auto m = geometry::laplacian_stencil(p.metric, grid).block(1, grid.size() - 2);
  for (double& d : m.diag) d -= p.lambda;
  return m;
}

RadialField solve_linear(const LinearProblem& p) {
  const auto m = linear_operator(p);
  const auto& grid = p.rhs.grid();
  const std::size_t n = grid.size();
  const auto full = geometry::laplacian_stencil(p.metric, grid);
  std::vector<double> rhs(p.rhs.values().begin() + 1, p.rhs.values().end() - 1);
  rhs.front() -= full.lower[1] * p.bc_left;
  rhs.back() -= full.upper[n - 2] * p.bc_right;
  const auto interior = solve(m, std::move(rhs));
  std::vector<double> u(n);
  u[0] = p.bc_left;
  u[n - 1] = p.bc_right;
  std::copy(interior.begin(), interior.end(), u.begin() + 1);
  return RadialField(grid, std::move(u));
}

MongeAmpereResult solve_monge_ampere_radial(const MongeAmpereProblem& p) {
  const auto& grid = p.F.grid();
  p.background.check_grid(grid, "MongeAmpereProblem");
  const auto& opt = p.newton;
  if (opt.max_iter < 1 || !(opt.tol > 0.0) || !(opt.damping_min > 0.0) || !(opt.damping_min <= 1.0)) {
    throw InvalidArgument("MongeAmpereProblem: invalid Newton options");
  }
  const std::size_t n = grid.size();
  const auto lap = geometry::laplacian_stencil(p.background, grid);
  const auto F = p.F.values();

  std::vector<double> u(n, 0.0);
  u[0] = p.bc_left;
  u[n - 1] = p.bc_right;

  // positivity 1 + Δu and log-form residual on interior nodes
  std::vector<double> pos(n - 2);
  std::vector<double> res(n - 2);
  const auto evaluate = [&](const std::vector<double>& v) {
    const auto lv = lap.apply(v);
    double min_pos = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < n; ++i) {
      pos[i - 1] = 1.0 + lv[i];
      min_pos = std::min(min_pos, pos[i - 1]);
      res[i - 1] = pos[i - 1] > 0.0 ? std::log(pos[i - 1]) - v[i] - F[i] : std::numeric_limits<double>::infinity();
    }
    return min_pos;
  };

  MongeAmpereReport report;
  double min_pos = evaluate(u);
  if (!(min_pos > 0.0)) throw NumericalFailure("solve_monge_ampere_radial: initial iterate is not positive");
  double r = sup_abs(res);
  double u_scale = sup_abs(u);

  for (int it = 0; it < opt.max_iter; ++it) {
    if (r <= opt.tol) {
      report.converged = true;
      break;
    }
    auto jac = lap.block(1, n - 2);
    for (std::size_t i = 0; i < n - 2; ++i) {
      const double w = 1.0 / pos[i];
      jac.lower[i] *= w;
      jac.diag[i] = jac.diag[i] * w - 1.0;
      jac.upper[i] *= w;
    }
    std::vector<double> rhs(res);
    for (double& v : rhs) v = -v;
    const auto delta = solve(jac, std::move(rhs));

    // Rounding floor: the full step no longer moves u.
    if (r <= 100.0 * opt.tol &&
        sup_abs(delta) <= 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + u_scale)) {
      report.converged = true;
      break;
    }

    double alpha = 1.0;
    std::vector<double> trial(u);
    for (;;) {
      for (std::size_t i = 1; i + 1 < n; ++i) trial[i] = u[i] + alpha * delta[i - 1];
      const double trial_pos = evaluate(trial);
      const double trial_r = sup_abs(res);
      if (trial_pos > 0.0 && trial_r <= (1.0 - 1e-4 * alpha) * r) {
        report.history.push_back({it, r, alpha, trial_pos});
        u.swap(trial);
        min_pos = trial_pos;
        r = trial_r;
        u_scale = sup_abs(u);
        break;
      }
      alpha *= 0.5;
      if (alpha < opt.damping_min) {
        throw NumericalFailure("solve_monge_ampere_radial: damping floor reached at iteration " +
                               std::to_string(it) + ", residual " + format_double(r));
      }
    }
    report.iterations = it + 1;
  }
  if (!report.converged && r <= opt.tol) report.converged = true;
  if (!report.converged) {
    throw NumericalFailure("solve_monge_ampere_radial: no convergence in " + std::to_string(opt.max_iter) +
                           " iterations, residual " + format_double(r));
  }
  evaluate(u);
  report.residual = r;
  report.min_positivity = min_pos;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    report.product_residual =
        std::max(report.product_residual, std::abs(pos[i - 1] * std::exp(-u[i]) - std::exp(F[i])));
  }
  return {RadialField(grid, std::move(u)), report};
}

IndicialPair left_indicial_roots(const ModelMetric& metric, const RadialGrid& grid, double lambda) {
  metric.check_grid(grid, "left_indicial_roots");
  const double kappa = std::exp(-2.0 * metric.phi_at(0)) / metric.a;
  const double disc = 2.0 * lambda / kappa + 0.25;
  if (disc < 0.0) throw InvalidArgument("left_indicial_roots: complex indicial roots");
  const double s = std::sqrt(disc);
  return {-0.5 - s, -0.5 + s};
}

Tridiagonal conjugated_operator(const LinearProblem& p, double delta) {
  if (!std::isfinite(delta) || delta < 0.0) {
    throw InvalidArgument("weighted_invertibility_probe: delta must be >= 0");
  }
  auto m = linear_operator(p);
  const auto& grid = p.rhs.grid();
  for (std::size_t k = 0; k < m.size(); ++k) {
    const std::size_t i = k + 1;
    if (k > 0) m.lower[k] *= std::exp(delta * (grid.t(i - 1) - grid.t(i)));
    if (k + 1 < m.size()) m.upper[k] *= std::exp(delta * (grid.t(i + 1) - grid.t(i)));
  }
  return m;
}

ProbeReport weighted_invertibility_probe(const LinearProblem& p, double delta) {
  const auto m = conjugated_operator(p, delta);
  const auto mt = m.transposed();
  const std::size_t n = m.size();
  ProbeReport out;
  out.delta = delta;
  out.unknowns = n;
  out.diagonally_dominant = true;
  for (std::size_t k = 0; k < n; ++k) {
    const double off = (k > 0 ? std::abs(m.lower[k]) : 0.0) + (k + 1 < n ? std::abs(m.upper[k]) : 0.0);
    if (!(std::abs(m.diag[k]) > off)) out.diagonally_dominant = false;
  }

  constexpr int kMaxIter = 50000;
  constexpr double kRelTol = 1e-13;

  auto v = start_vector(n);
  double est = 0.0;
  for (int it = 0; it < kMaxIter; ++it) {
    auto w = mt.apply(m.apply(v));
    const double next = norm2(w);
    v.swap(w);
    normalize(v);
    if (it > 10 && std::abs(next - est) <= kRelTol * next) {
      est = next;
      break;
    }
    est = next;
  }
  out.sigma_max = std::sqrt(est);

  v = start_vector(n);
  est = 0.0;
  for (int it = 0; it < kMaxIter; ++it) {
    auto w = solve(m, solve(mt, v));
    const double next = norm2(w);
    v.swap(w);
    normalize(v);
    if (it > 10 && std::abs(next - est) <= kRelTol * next) {
      est = next;
      break;
    }
    est = next;
  }
  out.sigma_min = 1.0 / std::sqrt(est);
  out.condition = out.sigma_max / out.sigma_min;
  return out;
}

SensitivityReport left_boundary_sensitivity(const LinearProblem& p, double perturbation, double fit_span) {
  if (!(perturbation != 0.0) || !std::isfinite(perturbation)) {
    throw InvalidArgument("left_boundary_sensitivity: perturbation must be nonzero");
  }
  const auto& grid = p.rhs.grid();
  if (!(fit_span > 0.0) || grid.t_min() + 1.0 + fit_span > grid.t_max()) {
    throw InvalidArgument("left_boundary_sensitivity: fit span does not fit in the grid");
  }
  const auto base = solve_linear(p);
  LinearProblem shifted = p;
  shifted.bc_left += perturbation;
  const auto moved = solve_linear(shifted);

  SensitivityReport out;
  out.perturbation = perturbation;
  out.expected_exponent = left_indicial_roots(p.metric, grid, p.lambda).lower;
  std::vector<double> ts;
  std::vector<double> logs;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = moved[i] - base[i];
    out.x.push_back(grid.x(i));
    out.change.push_back(d);
    if (i > 0) out.max_change = std::max(out.max_change, std::abs(d));
    const double t = grid.t(i);
    if (t >= grid.t_min() + 1.0 && t <= grid.t_min() + 1.0 + fit_span && d != 0.0) {
      ts.push_back(t);
      logs.push_back(std::log(std::abs(d)));
    }
  }
  if (ts.size() < 3) throw NumericalFailure("left_boundary_sensitivity: change vanished in the fit range");
  out.decay_exponent = least_squares_slope(ts, logs);
  return out;
}

}  // namespace cusp::elliptic
