#pragma once

#include <nlohmann/json.hpp>

#include "cusp/exponent.hpp"

namespace cusp::chern {

/// Intersection numbers on a smooth divisor D of an n-fold:
/// td_top = ∫_D c₁(TD)^{n-1}, td_mixed = ∫_D c₁(TD)^{n-2} ∪ c₁(ND).
struct ChernData {
  int n = 2;
  Rational td_top;
  Rational td_mixed;
};

/// b̃ = -(2(n-1)/3) td_mixed / td_top, exactly.
Rational log_coefficient(const ChernData& data);

/// Smooth plane curve of degree d in CP²: td_top = -d(d-3), td_mixed = d².
ChernData plane_curve_chern(int d);

/// 2d / (3(d-3)).
Rational log_coefficient_plane_curve(int d);

/// {"num": p, "den": q} with p, q as JSON integers when they fit in 64 bits,
/// as decimal strings otherwise.
nlohmann::json rational_to_json(const Rational& q);

}  // namespace cusp::chern
