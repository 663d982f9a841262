#pragma once

#include <functional>
#include <vector>

#include "cusp/elliptic.hpp"
#include "cusp/model_geometry.hpp"
#include "cusp/radial.hpp"

namespace cusp::parabolic {

using elliptic::NewtonOptions;
using geometry::ModelMetric;

/// Density of ω_t = -Ric(ω₀) + e^{-t}(ω₀ + Ric(ω₀)) relative to the model
/// area form. Throws NumericalFailure if it is not positive everywhere.
RadialField omega_t_schedule(const ModelMetric& omega0, const RadialGrid& grid, double t);

/// φ = ½ log(c)·χ(t) with χ = 1 for t <= t_start, 0 for t >= t_end and a
/// C^∞ step in between, so e^{2φ} equals c near the cusp.
RadialField cusp_scaled_conformal_factor(const RadialGrid& grid, double c, double t_start, double t_end);

struct FlowProblem {
  ModelMetric omega0;
  RadialGrid grid = RadialGrid::default_grid();
  double T = 1.0;
  double dt = 1e-2;
  double dt_min = 1e-8;
  /// Times in (0, T] at which states are recorded; t = 0 and T always are.
  std::vector<double> sample_times;
  NewtonOptions newton{30, 1e-13, std::ldexp(1.0, -20)};
};

struct FlowState {
  double t = 0.0;
  RadialField u;
  RadialField omega_t_density;
  /// ω_t + i∂∂̄u relative to the model area form.
  RadialField metric_density;
  /// min of metric_density over nodes 1 .. n-1
  double positivity_margin = 0.0;
  /// Mean of metric_density over the deepest 10% of nodes.
  double cusp_constant = 0.0;
  /// sup of the backward Euler residual of the last step
  double newton_residual = 0.0;
};

struct FlowResult {
  std::vector<FlowState> states;
  int steps = 0;
  int rejected_steps = 0;
  double min_positivity = 0.0;
};

/// Backward Euler in time with a Newton solve per step for
/// ∂u/∂t = log((ω_t + Δu)/ω₀) - u, u(0) = 0. The left node follows the
/// restricted equation du/dt = log(ω_t/ω₀) - u evaluated there with the same
/// scheme; the right end is reflecting (∂_t u = 0). Failed or non-positive
/// steps are retried with dt halved down to dt_min.
FlowResult run_flow(const FlowProblem& p);

/// Mean of the density over nodes 1 .. max(1, n/10).
double fitted_cusp_constant(const RadialField& metric_density);

/// 1 + e^{-t}(c0 - 1).
double cusp_constant_evolution(double c0, double t);
/// RK4 for dc/dt = 1 - c with step close to dt landing exactly on t.
double cusp_constant_rk4(double c0, double t, double dt);

/// Σ log((1 + e^{-t}(c_i - 1)) / c_i)
double restricted_ode_source(const std::vector<double>& c, double t);
/// e^{-t} ∫₀ᵗ e^s source(s) ds by adaptive Gauss–Kronrod.
double restricted_ode_value(const std::vector<double>& c, double t);

struct RestrictedOde {
  std::vector<double> times;
  std::vector<double> quadrature;
  std::vector<double> rk4;
  double max_discrepancy = 0.0;
};

RestrictedOde restricted_ode_solution(const std::vector<double>& c, double T, double dt);

/// ∂u/∂t = Δu - u + x^γ g(x, t), u(0) = 0, zero Dirichlet data.
struct DecayProblem {
  RadialGrid grid = RadialGrid::default_grid();
  double gamma = 1.0;
  std::function<double(double x, double t)> g;
  double T = 1.0;
  double dt = 1e-2;
};

struct DecayRun {
  std::vector<double> times;
  std::vector<double> sup_ratio;  // sup |u| / x^γ per time slice
  double K = 0.0;
  double c = 0.0;
};

struct DecayCertificate {
  DecayRun coarse;
  DecayRun refined;
  double refinement_change = 0.0;
  bool grid_stable = false;
};

/// Implicit Euler run; c is the least squares slope of log S(t), clamped at
/// 0, and K = max S(t) e^{-ct}, so S(t) <= K e^{ct} on every slice.
DecayRun decay_run(const DecayProblem& p);

/// Runs on the grid and its refinement and compares K.
DecayCertificate decay_certificate(const DecayProblem& p, double stability_tol = 0.02);

}  // namespace cusp::parabolic
