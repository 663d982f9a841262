#include "cusp/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cusp/errors.hpp"
#include "cusp/tridiagonal.hpp"

namespace cusp::parabolic {

namespace {

double sup_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

template <class F>
double rk4_step(const F& f, double t, double y, double h) {
  const double k1 = f(t, y);
  const double k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
  const double k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
  const double k4 = f(t + h, y + h * k3);
  return y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
}

std::size_t step_count(double T, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("time step must be positive");
  if (!(T >= 0.0) || !std::isfinite(T)) throw InvalidArgument("final time must be >= 0");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(T / dt - 1e-9)));
}

void check_constants(const std::vector<double>& c) {
  for (double ci : c) {
    if (!(ci > 0.0) || !std::isfinite(ci)) throw InvalidArgument("cusp constants must be positive");
  }
}

// Unit-model Laplacian with a reflecting right end; row 0 is left empty.
Tridiagonal flow_stencil(const ModelMetric& model, const RadialGrid& grid) {
  auto m = geometry::laplacian_stencil(model, grid);
  const std::size_t n = grid.size();
  const double h = grid.h();
  const double w = std::cosh(0.5 * h) / (h * h) / model.a;
  m.lower[n - 1] = w;
  m.diag[n - 1] = -w;
  return m;
}

double smooth_step(double s) {
  // C^∞ transition from 1 (s <= 0) to 0 (s >= 1).
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  const auto bump = [](double r) { return r > 0.0 ? std::exp(-1.0 / r) : 0.0; };
  const double a = bump(1.0 - s);
  return a / (a + bump(s));
}

}  // namespace

RadialField omega_t_schedule(const ModelMetric& omega0, const RadialGrid& grid, double t) {
  const auto ric = geometry::ricci_radial(omega0, grid);
  const auto w0 = omega0.density(grid);
  const double decay = std::exp(-t);
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = -ric[i] + decay * (w0[i] + ric[i]);
    if (!(out[i] > 0.0)) {
      throw NumericalFailure("omega_t_schedule: density not positive at node " + std::to_string(i) +
                             ", t = " + format_double(t));
    }
  }
  return RadialField(grid, std::move(out));
}

RadialField cusp_scaled_conformal_factor(const RadialGrid& grid, double c, double t_start, double t_end) {
  if (!(c > 0.0)) throw InvalidArgument("cusp_scaled_conformal_factor: c must be positive");
  if (!(t_start < t_end)) throw InvalidArgument("cusp_scaled_conformal_factor: need t_start < t_end");
  std::vector<double> phi(grid.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    phi[i] = 0.5 * std::log(c) * smooth_step((grid.t(i) - t_start) / (t_end - t_start));
  }
  return RadialField(grid, std::move(phi));
}

double fitted_cusp_constant(const RadialField& metric_density) {
  const std::size_t n = metric_density.size();
  const std::size_t last = std::max<std::size_t>(1, n / 10);
  double sum = 0.0;
  for (std::size_t i = 1; i <= last; ++i) sum += metric_density[i];
  return sum / static_cast<double>(last);
}

FlowResult run_flow(const FlowProblem& p) {
  const auto& grid = p.grid;
  p.omega0.check_grid(grid, "FlowProblem");
  if (!(p.dt > 0.0) || !(p.T >= p.dt) || !(p.dt_min > 0.0) || p.dt_min > p.dt) {
    throw InvalidArgument("FlowProblem: need 0 < dt_min <= dt <= T");
  }
  std::vector<double> targets;
  for (double s : p.sample_times) {
    if (!(s > 0.0) || s > p.T) throw InvalidArgument("FlowProblem: sample times must lie in (0, T]");
    targets.push_back(s);
  }
  targets.push_back(p.T);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  const std::size_t n = grid.size();
  const auto model = p.omega0.model();
  const auto lap = flow_stencil(model, grid);
  const auto w0 = p.omega0.density(grid);
  std::vector<double> log_w0(n);
  for (std::size_t i = 0; i < n; ++i) log_w0[i] = std::log(w0[i]);

  std::vector<double> q(n);    // ω_t + Δu
  std::vector<double> res(n);  // step residual, index 0 unused
  const auto evaluate = [&](const std::vector<double>& u, const std::vector<double>& u_old,
                            const RadialField& wt, double dt) {
    const auto lu = lap.apply(u);
    double min_q = std::numeric_limits<double>::infinity();
    res[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      q[i] = wt[i] + lu[i];
      min_q = std::min(min_q, q[i]);
      res[i] = q[i] > 0.0 ? u[i] - u_old[i] - dt * (std::log(q[i]) - log_w0[i] - u[i])
                          : std::numeric_limits<double>::infinity();
    }
    return min_q;
  };

  const auto make_state = [&](double t, const std::vector<double>& u, const RadialField& wt, double residual) {
    const auto lu = cusp_laplacian(model, RadialField(grid, u));
    std::vector<double> md(n);
    for (std::size_t i = 0; i < n; ++i) md[i] = wt[i] + lu[i];
    // Reflecting right end: use the same row as the solver.
    md[n - 1] = wt[n - 1] + lap.apply(u)[n - 1];
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < n; ++i) margin = std::min(margin, md[i]);
    RadialField mdf(grid, std::move(md));
    const double cc = fitted_cusp_constant(mdf);
    return FlowState{t, RadialField(grid, u), wt, std::move(mdf), margin, cc, residual};
  };

  // One backward Euler step; false on Newton failure or positivity loss.
  const auto try_step = [&](const std::vector<double>& u_old, double t_new, double dt, std::vector<double>& u_new,
                            RadialField& wt, double& residual) {
    wt = omega_t_schedule(p.omega0, grid, t_new);
    // Start from u_old shifted by the boundary increment; Δ ignores the shift,
    // so the guess inherits the positivity of the previous state.
    const double u0 = (u_old[0] + dt * (std::log(wt[0]) - log_w0[0])) / (1.0 + dt);
    u_new = u_old;
    for (double& v : u_new) v += u0 - u_old[0];
    u_new[0] = u0;
    double min_q = evaluate(u_new, u_old, wt, dt);
    if (!(min_q > 0.0)) return false;
    double r = sup_abs(res);
    for (int it = 0; it < p.newton.max_iter; ++it) {
      if (r <= p.newton.tol) {
        residual = r;
        return true;
      }
      Tridiagonal jac = lap.block(1, n - 1);
      std::vector<double> rhs(n - 1);
      for (std::size_t k = 0; k < n - 1; ++k) {
        const double w = dt / q[k + 1];
        jac.lower[k] *= -w;
        jac.upper[k] *= -w;
        jac.diag[k] = 1.0 + dt - w * jac.diag[k];
        rhs[k] = -res[k + 1];
      }
      std::vector<double> delta;
      try {
        delta = solve(jac, std::move(rhs));
      } catch (const NumericalFailure&) {
        return false;
      }
      double alpha = 1.0;
      std::vector<double> trial(u_new);
      for (;;) {
        for (std::size_t i = 1; i < n; ++i) trial[i] = u_new[i] + alpha * delta[i - 1];
        const double tq = evaluate(trial, u_old, wt, dt);
        const double tr = sup_abs(res);
        if (tq > 0.0 && tr <= (1.0 - 1e-4 * alpha) * r) {
          u_new.swap(trial);
          r = tr;
          break;
        }
        alpha *= 0.5;
        if (alpha < p.newton.damping_min) {
          // Accept a step stuck at the rounding floor.
          evaluate(u_new, u_old, wt, dt);
          if (r <= 100.0 * p.newton.tol) {
            residual = r;
            return true;
          }
          return false;
        }
      }
    }
    residual = r;
    return r <= p.newton.tol;
  };

  FlowResult out;
  std::vector<double> u(n, 0.0);
  double t = 0.0;
  {
    auto w_init = omega_t_schedule(p.omega0, grid, 0.0);
    out.states.push_back(make_state(0.0, u, w_init, 0.0));
  }
  out.min_positivity = out.states.front().positivity_margin;

  std::size_t next = 0;
  double dt = p.dt;
  while (next < targets.size()) {
    const double target = targets[next];
    double step = std::min(dt, target - t);
    const bool lands = target - t <= dt * (1.0 + 1e-9);
    if (lands) step = target - t;
    std::vector<double> u_new;
    RadialField wt = RadialField::zeros(grid);
    double residual = 0.0;
    bool ok = false;
    try {
      ok = try_step(u, t + step, step, u_new, wt, residual);
    } catch (const NumericalFailure&) {
      ok = false;
    }
    if (!ok) {
      ++out.rejected_steps;
      dt = step * 0.5;
      if (dt < p.dt_min) {
        throw NumericalFailure("run_flow: step rejected below dt_min at t = " + format_double(t) +
                               ", residual " + format_double(residual));
      }
      continue;
    }
    ++out.steps;
    u.swap(u_new);
    t = lands ? target : t + step;
    dt = p.dt;
    if (lands) {
      auto state = make_state(t, u, wt, residual);
      out.min_positivity = std::min(out.min_positivity, state.positivity_margin);
      out.states.push_back(std::move(state));
      ++next;
    } else {
      double margin = std::numeric_limits<double>::infinity();
      for (std::size_t i = 1; i < n; ++i) margin = std::min(margin, q[i]);
      out.min_positivity = std::min(out.min_positivity, margin);
    }
  }
  return out;
}

double cusp_constant_evolution(double c0, double t) {
  if (!(c0 > 0.0)) throw InvalidArgument("cusp_constant_evolution: c0 must be positive");
  return 1.0 + std::exp(-t) * (c0 - 1.0);
}

double cusp_constant_rk4(double c0, double t, double dt) {
  if (!(c0 > 0.0)) throw InvalidArgument("cusp_constant_rk4: c0 must be positive");
  const std::size_t steps = step_count(t, dt);
  const double h = t / static_cast<double>(steps);
  const auto f = [](double, double c) { return 1.0 - c; };
  double c = c0;
  for (std::size_t k = 0; k < steps; ++k) c = rk4_step(f, static_cast<double>(k) * h, c, h);
  return c;
}

double restricted_ode_source(const std::vector<double>& c, double t) {
  check_constants(c);
  double s = 0.0;
  for (double ci : c) s += std::log((1.0 + std::exp(-t) * (ci - 1.0)) / ci);
  return s;
}

double restricted_ode_value(const std::vector<double>& c, double t) {
  check_constants(c);
  if (t == 0.0) return 0.0;
  const auto integrand = [&](double s) { return std::exp(s - t) * restricted_ode_source(c, s); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, t, 15, 1e-12);
}

RestrictedOde restricted_ode_solution(const std::vector<double>& c, double T, double dt) {
  check_constants(c);
  const std::size_t steps = step_count(T, dt);
  const double h = T / static_cast<double>(steps);
  const auto f = [&](double t, double u) { return -u + restricted_ode_source(c, t); };
  RestrictedOde out;
  double u = 0.0;
  out.times.push_back(0.0);
  out.rk4.push_back(0.0);
  out.quadrature.push_back(0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * h;
    u = rk4_step(f, t, u, h);
    const double t_next = k + 1 == steps ? T : static_cast<double>(k + 1) * h;
    out.times.push_back(t_next);
    out.rk4.push_back(u);
    out.quadrature.push_back(restricted_ode_value(c, t_next));
    out.max_discrepancy = std::max(out.max_discrepancy, std::abs(out.rk4.back() - out.quadrature.back()));
  }
  return out;
}

DecayRun decay_run(const DecayProblem& p) {
  if (!(p.gamma >= 0.0) || !std::isfinite(p.gamma)) throw InvalidArgument("decay_certificate: gamma must be >= 0");
  if (!p.g) throw InvalidArgument("decay_certificate: source factor g is missing");
  const auto& grid = p.grid;
  const std::size_t n = grid.size();
  const std::size_t steps = step_count(p.T, p.dt);
  const double h = p.T / static_cast<double>(steps);

  const auto lap = geometry::laplacian_stencil(ModelMetric(), grid).block(1, n - 2);
  Tridiagonal m(n - 2);
  for (std::size_t k = 0; k < n - 2; ++k) {
    m.lower[k] = -h * lap.lower[k];
    m.upper[k] = -h * lap.upper[k];
    m.diag[k] = 1.0 + h - h * lap.diag[k];
  }
  std::vector<double> xg(n - 2);
  std::vector<double> x(n - 2);
  for (std::size_t k = 0; k < n - 2; ++k) {
    x[k] = grid.x(k + 1);
    xg[k] = std::pow(x[k], p.gamma);
  }

  DecayRun out;
  std::vector<double> u(n - 2, 0.0);
  for (std::size_t s = 1; s <= steps; ++s) {
    const double t = s == steps ? p.T : static_cast<double>(s) * h;
    std::vector<double> rhs(n - 2);
    for (std::size_t k = 0; k < n - 2; ++k) rhs[k] = u[k] + h * xg[k] * p.g(x[k], t);
    u = solve(m, std::move(rhs));
    double sup = 0.0;
    for (std::size_t k = 0; k < n - 2; ++k) sup = std::max(sup, std::abs(u[k]) / xg[k]);
    out.times.push_back(t);
    out.sup_ratio.push_back(sup);
  }

  std::vector<double> ts;
  std::vector<double> ls;
  for (std::size_t j = 0; j < out.times.size(); ++j) {
    if (out.sup_ratio[j] > 0.0) {
      ts.push_back(out.times[j]);
      ls.push_back(std::log(out.sup_ratio[j]));
    }
  }
  if (ts.size() >= 2) {
    const double nn = static_cast<double>(ts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t j = 0; j < ts.size(); ++j) {
      sx += ts[j];
      sy += ls[j];
      sxx += ts[j] * ts[j];
      sxy += ts[j] * ls[j];
    }
    out.c = std::max(0.0, (nn * sxy - sx * sy) / (nn * sxx - sx * sx));
  }
  for (std::size_t j = 0; j < out.times.size(); ++j) {
    out.K = std::max(out.K, out.sup_ratio[j] * std::exp(-out.c * out.times[j]));
  }
  return out;
}

DecayCertificate decay_certificate(const DecayProblem& p, double stability_tol) {
  DecayCertificate out;
  out.coarse = decay_run(p);
  DecayProblem fine = p;
  fine.grid = p.grid.refined();
  out.refined = decay_run(fine);
  if (out.coarse.K > 0.0) {
    out.refinement_change = std::abs(out.refined.K - out.coarse.K) / out.coarse.K;
  } else {
    out.refinement_change = out.refined.K;
  }
  out.grid_stable = out.refinement_change < stability_tol;
  return out;
}

}  // namespace cusp::parabolic
