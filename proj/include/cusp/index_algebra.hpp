#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cusp/exponent.hpp"

namespace cusp::index {

/// One allowed expansion term x^z (log x)^k.
struct IndexTerm {
  Exponent z;
  int k = 0;

  IndexTerm() = default;
  IndexTerm(Exponent z_, int k_);

  friend bool operator==(const IndexTerm& a, const IndexTerm& b) {
    return a.k == b.k && a.z == b.z;
  }
};

/// Orders terms by (z, k) using the tolerance-aware exponent comparison.
bool term_less(const IndexTerm& a, const IndexTerm& b);

/// Finite enumeration of an index set up to a cutoff order N.
///
/// Terms are kept sorted ascending by (z, k) and free of duplicates. The type
/// does not force the closure rules (raw pole sets are not closed); use
/// closure() to obtain the smallest closed set and is_closed() to check.
/// Every set produced here is a truncation of an infinite object.
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::vector<IndexTerm> terms, double cutoff);

  static IndexSet empty(double cutoff) { return IndexSet({}, cutoff); }

  double cutoff() const { return cutoff_; }
  std::span<const IndexTerm> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_empty() const { return terms_.empty(); }

  bool contains(const Exponent& z, int k) const;
  bool contains(const IndexTerm& t) const { return contains(t.z, t.k); }
  /// Every term of `other` (with z <= this cutoff) is present here.
  bool includes(const IndexSet& other) const;

  /// Both closure rules hold within the cutoff.
  bool is_closed() const;

  /// Smallest exponent present; requires a non-empty set.
  const Exponent& min_exponent() const;

  friend bool operator==(const IndexSet& a, const IndexSet& b) {
    return a.cutoff_ == b.cutoff_ && a.terms_ == b.terms_;
  }

 private:
  std::vector<IndexTerm> terms_;
  double cutoff_ = 0.0;
};

/// Smallest index set containing `terms` that is closed under integer shifts
/// of z and decrements of k, enumerated up to `cutoff`.
IndexSet closure(std::span<const IndexTerm> terms, double cutoff);
inline IndexSet closure(const IndexSet& set) { return closure(set.terms(), set.cutoff()); }

/// E ∪ F together with the log-stacking terms (z, l1 + l2 + 1) at shared
/// exponents, re-closed. Both sets must carry the same cutoff.
IndexSet extended_union(const IndexSet& e, const IndexSet& f);

struct SpectrumEntry {
  Rational nu;
  int multiplicity = 1;
};

/// Boundary model family Δ_D + (c/2)(-τ² + iτ) - λ, described by the shift λ,
/// the cusp constant c and the spectrum {-ν_j} of the divisor Laplacian.
class IndicialFamily {
 public:
  IndicialFamily(Rational lambda, Rational c, std::vector<SpectrumEntry> spectrum);
  /// Convenience constructor; every double is converted to the rational it
  /// represents, so the exact path is used whenever the data allows it.
  IndicialFamily(double lambda, double c, const std::vector<double>& nus);

  const Rational& lambda() const { return lambda_; }
  const Rational& c() const { return c_; }
  std::span<const SpectrumEntry> spectrum() const { return spectrum_; }

 private:
  Rational lambda_;
  Rational c_;
  std::vector<SpectrumEntry> spectrum_;
};

struct IndicialRoot {
  Exponent z;
  int order = 1;  // 2 only for the double root z = -1/2
  std::size_t eigenvalue_index = 0;
  int multiplicity = 1;
};

struct SpecB {
  std::vector<IndicialRoot> roots;  // ascending in z
  /// Eigenvalues whose quadratic has a negative discriminant. Their complex
  /// roots are excluded from every index set built here.
  std::size_t complex_root_eigenvalues = 0;
};

/// Real roots z of (z + 1/2)² = 2(λ + ν)/c + 1/4, one pair per eigenvalue.
SpecB spec_b_roots(const IndicialFamily& family);

/// Raw pole set: (z, k) with z a real root, z > alpha, k < pole order.
IndexSet index_set_Eplus(const IndicialFamily& family, double alpha, double cutoff);

/// Index set including accidental multiplicities from integer-spaced roots.
IndexSet index_set_hatEplus(const IndicialFamily& family, double alpha, double cutoff);

nlohmann::json to_json(const IndexSet& set);
IndexSet index_set_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SpecB& roots);

}  // namespace cusp::index
