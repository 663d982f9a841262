#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cusp/radial.hpp"
#include "cusp/tridiagonal.hpp"

namespace cusp::geometry {

/// g = e^{2φ} (a dx²/x² + b x² dθ²), circle symmetric.
///
/// Densities throughout are taken relative to the model area form
/// √(ab) dx∧dθ, so the model itself has density 1 and the conformal
/// metric has density e^{2φ}.
struct ModelMetric {
  double a = 1.0;
  double b = 1.0;
  std::optional<RadialField> phi;

  ModelMetric() = default;
  ModelMetric(double a_, double b_);
  ModelMetric(double a_, double b_, RadialField phi_);

  static ModelMetric poincare() { return ModelMetric(); }

  /// The same a, b without the conformal factor.
  ModelMetric model() const { return ModelMetric(a, b); }

  double phi_at(std::size_t i) const { return phi ? (*phi)[i] : 0.0; }
  /// e^{2φ} on the grid.
  RadialField density(const RadialGrid& grid) const;
  /// Throws InvalidArgument if the metric carries a φ on another grid.
  void check_grid(const RadialGrid& grid, const char* where) const;
};

/// Rows of the radial ∂̄-Laplacian (e^{-2φ}/(2a))(∂_t² + ∂_t) in conservative
/// form. Interior rows only; the first and last rows are left zero because
/// solvers impose their own boundary conditions there.
///
/// The stencil is exactly self-adjoint for the weights e^{t_i} e^{2φ_i}
/// (the discrete area form) and annihilates constants.
Tridiagonal laplacian_stencil(const ModelMetric& metric, const RadialGrid& grid);

/// Δu on every node. Endpoints use second-order one-sided differences and
/// are meant for diagnostics only.
RadialField cusp_laplacian(const ModelMetric& metric, const RadialField& u);

/// Ricci density relative to the model area form: -1/a - 2 Δ_model φ.
RadialField ricci_radial(const ModelMetric& metric, const RadialGrid& grid);
/// Ricci density relative to the metric's own area form.
RadialField ricci_relative_to_metric(const ModelMetric& metric, const RadialGrid& grid);

/// x' = -1/(log ρ + phi0) for ρ' = e^{phi0} ρ, written as
/// x' = x (1 + x·bbar + x²·btilde).
struct BdfTransform {
  double bbar = 0.0;
  std::vector<double> x;
  std::vector<double> x_prime;
  std::vector<double> btilde;
  std::vector<double> dxprime_dx;
  /// max |x' - x(1 + x phi0)| / x³ over the samples.
  double remainder_ratio = 0.0;
  /// max phi0² / (1 - x phi0), the bound the ratio must respect.
  double remainder_bound = 0.0;
};

BdfTransform bdf_transform(double phi0, std::span<const double> x_values);

/// 2π √(ab) (x_hi - x_lo) for metrics without a conformal factor. With a
/// conformal factor the density √(ab) e^{2φ} is integrated on its grid,
/// which must cover [x_lo, x_hi].
double cusp_volume(const ModelMetric& metric, double x_lo, double x_hi);

struct CarlsonGriffiths {
  ModelMetric metric;     // a = b = 1, e^{2φ} = density
  RadialField density;    // relative to the standard cusp form
  RadialField deviation;  // density - 1
  double deviation_over_x = 0.0;  // max |density - 1| / x
  double epsilon_threshold = 0.0;
};

/// Largest ε for which ε h ‖ρ‖² stays below 1 on the grid, min e^{2/x}/h.
double carlson_griffiths_threshold(const RadialField& h);

/// Cusp part of the Carlson–Griffiths form for ‖s‖² = h ρ²:
/// density 4 (1 + ½ x ∂_t log h)² / (x (log ε + log h) - 2)².
CarlsonGriffiths carlson_griffiths_radial(double epsilon, const RadialField& h);

}  // namespace cusp::geometry
