#pragma once

#include <cmath>
#include <vector>

#include "cusp/model_geometry.hpp"
#include "cusp/radial.hpp"
#include "cusp/tridiagonal.hpp"

namespace cusp::elliptic {

using geometry::ModelMetric;

/// (Δ - λ)u = f with Dirichlet data at both ends of the rhs grid.
struct LinearProblem {
  ModelMetric metric;
  double lambda = 1.0;
  RadialField rhs;
  double bc_left = 0.0;
  double bc_right = 0.0;
};

/// Interior block of Δ - λ (unknowns 1 .. n-2).
Tridiagonal linear_operator(const LinearProblem& p);

RadialField solve_linear(const LinearProblem& p);

struct NewtonOptions {
  int max_iter = 60;
  double tol = 1e-11;
  double damping_min = std::ldexp(1.0, -20);
};

/// (1 + Δu) e^{-u} = e^F, Δ the ∂̄-Laplacian of the background.
struct MongeAmpereProblem {
  ModelMetric background;
  RadialField F;
  double bc_left = 0.0;
  double bc_right = 0.0;
  NewtonOptions newton;
};

struct NewtonIterate {
  int iteration = 0;
  double residual = 0.0;  // sup |log(1 + Δu) - u - F| before the step
  double step = 0.0;      // accepted damping factor
  double min_positivity = 0.0;
};

struct MongeAmpereReport {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;          // log form, interior sup
  double product_residual = 0.0;  // sup |(1 + Δu) e^{-u} - e^F|
  double min_positivity = 0.0;    // min (1 + Δu) over interior nodes
  std::vector<NewtonIterate> history;
};

struct MongeAmpereResult {
  RadialField u;
  MongeAmpereReport report;
};

/// Damped Newton on log(1 + Δu) - u = F. The Jacobian diag(1/(1+Δu))Δ - 1
/// is tridiagonal. Steps are halved until 1 + Δu > 0 and the sup residual
/// drops; falling below damping_min throws NumericalFailure.
MongeAmpereResult solve_monge_ampere_radial(const MongeAmpereProblem& p);

/// Roots of (κ/2)(z² + z) = λ with κ the left-end coefficient e^{-2φ}/a.
struct IndicialPair {
  double lower;
  double upper;
};
IndicialPair left_indicial_roots(const ModelMetric& metric, const RadialGrid& grid, double lambda);

struct ProbeReport {
  double delta = 0.0;
  std::size_t unknowns = 0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double condition = 0.0;
  bool diagonally_dominant = false;
};

/// x^{-δ} (Δ - λ) x^{δ} on the interior unknowns.
Tridiagonal conjugated_operator(const LinearProblem& p, double delta);

/// Extreme singular values of the conjugated operator by power and inverse
/// power iteration on MᵀM.
ProbeReport weighted_invertibility_probe(const LinearProblem& p, double delta);

struct SensitivityReport {
  double perturbation = 0.0;
  /// Slope of log|Δu| against log x just above the left end.
  double decay_exponent = 0.0;
  /// The negative indicial root, the exponent a left-end disturbance follows.
  double expected_exponent = 0.0;
  double max_change = 0.0;
  std::vector<double> x;
  std::vector<double> change;
};

/// Re-solves with bc_left shifted by `perturbation` and measures how fast the
/// difference dies away from the left end, over `fit_span` units of log x.
SensitivityReport left_boundary_sensitivity(const LinearProblem& p, double perturbation,
                                            double fit_span = 10.0);

}  // namespace cusp::elliptic
