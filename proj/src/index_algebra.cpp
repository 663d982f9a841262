#include "cusp/index_algebra.hpp"

#include <algorithm>
#include <cmath>

#include "cusp/errors.hpp"

namespace cusp::index {

namespace {

void canonicalize(std::vector<IndexTerm>& terms, double cutoff) {
  std::erase_if(terms, [cutoff](const IndexTerm& t) { return t.z.compare_to(cutoff) > 0; });
  std::sort(terms.begin(), terms.end(), term_less);
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
}

Exponent exponent_from_json(const nlohmann::json& term) {
  if (term.contains("z_exact")) {
    return Exponent(parse_rational(term.at("z_exact").get<std::string>()));
  }
  const auto& z = term.at("z");
  if (z.is_number_integer()) return Exponent(z.get<long long>());
  return Exponent::approximate(z.get<double>());
}

nlohmann::json exponent_to_json(const Exponent& z) {
  nlohmann::json j;
  j["z"] = z.value();
  if (z.is_exact()) j["z_exact"] = rational_to_string(*z.exact());
  return j;
}

}  // namespace

IndexTerm::IndexTerm(Exponent z_, int k_) : z(std::move(z_)), k(k_) {
  if (k < 0) throw InvalidArgument("IndexTerm: log power k must be non-negative");
}

bool term_less(const IndexTerm& a, const IndexTerm& b) {
  const auto c = compare(a.z, b.z);
  if (c != 0) return c < 0;
  return a.k < b.k;
}

IndexSet::IndexSet(std::vector<IndexTerm> terms, double cutoff)
    : terms_(std::move(terms)), cutoff_(cutoff) {
  if (!std::isfinite(cutoff)) throw InvalidArgument("IndexSet: cutoff must be finite");
  canonicalize(terms_, cutoff_);
}

bool IndexSet::contains(const Exponent& z, int k) const {
  return std::binary_search(terms_.begin(), terms_.end(), IndexTerm(z, k), term_less);
}

bool IndexSet::includes(const IndexSet& other) const {
  return std::all_of(other.terms_.begin(), other.terms_.end(), [this](const IndexTerm& t) {
    return t.z.compare_to(cutoff_) > 0 || contains(t);
  });
}

bool IndexSet::is_closed() const {
  for (const auto& t : terms_) {
    if (t.k > 0 && !contains(t.z, t.k - 1)) return false;
    const Exponent shifted = t.z + 1;
    if (shifted.compare_to(cutoff_) <= 0 && !contains(shifted, t.k)) return false;
  }
  return true;
}

const Exponent& IndexSet::min_exponent() const {
  if (terms_.empty()) throw InvalidArgument("IndexSet::min_exponent: set is empty");
  return terms_.front().z;
}

IndexSet closure(std::span<const IndexTerm> terms, double cutoff) {
  std::vector<IndexTerm> out;
  for (const auto& t : terms) {
    for (Exponent z = t.z; z.compare_to(cutoff) <= 0; z = z + 1) {
      for (int j = 0; j <= t.k; ++j) out.emplace_back(z, j);
    }
  }
  return IndexSet(std::move(out), cutoff);
}

IndexSet extended_union(const IndexSet& e, const IndexSet& f) {
  if (e.cutoff() != f.cutoff()) {
    throw InvalidArgument("extended_union: index sets have different cutoffs");
  }
  std::vector<IndexTerm> out(e.terms().begin(), e.terms().end());
  out.insert(out.end(), f.terms().begin(), f.terms().end());
  for (const auto& a : e.terms()) {
    for (const auto& b : f.terms()) {
      if (a.z == b.z) out.emplace_back(a.z, a.k + b.k + 1);
    }
  }
  return closure(out, e.cutoff());
}

IndicialFamily::IndicialFamily(Rational lambda, Rational c, std::vector<SpectrumEntry> spectrum)
    : lambda_(std::move(lambda)), c_(std::move(c)), spectrum_(std::move(spectrum)) {
  if (c_ <= 0) throw InvalidArgument("IndicialFamily: cusp constant c must be positive");
  if (spectrum_.empty()) throw InvalidArgument("IndicialFamily: spectrum must not be empty");
  for (std::size_t j = 0; j < spectrum_.size(); ++j) {
    if (spectrum_[j].nu < 0) throw InvalidArgument("IndicialFamily: eigenvalues nu must be >= 0");
    if (spectrum_[j].multiplicity < 1) {
      throw InvalidArgument("IndicialFamily: multiplicities must be >= 1");
    }
    if (j > 0 && spectrum_[j].nu <= spectrum_[j - 1].nu) {
      throw InvalidArgument("IndicialFamily: spectrum must be strictly increasing");
    }
  }
}

IndicialFamily::IndicialFamily(double lambda, double c, const std::vector<double>& nus)
    : IndicialFamily(exact_rational(lambda), exact_rational(c), [&nus] {
        std::vector<SpectrumEntry> s;
        for (double nu : nus) s.push_back({exact_rational(nu), 1});
        return s;
      }()) {}

SpecB spec_b_roots(const IndicialFamily& family) {
  SpecB out;
  const Rational quarter(1, 4);
  const Rational half(1, 2);
  for (std::size_t j = 0; j < family.spectrum().size(); ++j) {
    const auto& entry = family.spectrum()[j];
    const Rational disc = 2 * (family.lambda() + entry.nu) / family.c() + quarter;
    if (disc < 0) {
      ++out.complex_root_eigenvalues;
      continue;
    }
    if (disc == 0) {
      out.roots.push_back({Exponent(-half), 2, j, entry.multiplicity});
      continue;
    }
    if (const auto s = exact_sqrt(disc)) {
      out.roots.push_back({Exponent(-half - *s), 1, j, entry.multiplicity});
      out.roots.push_back({Exponent(-half + *s), 1, j, entry.multiplicity});
    } else {
      const double s_val = std::sqrt(static_cast<double>(disc));
      out.roots.push_back({Exponent::approximate(-0.5 - s_val), 1, j, entry.multiplicity});
      out.roots.push_back({Exponent::approximate(-0.5 + s_val), 1, j, entry.multiplicity});
    }
  }
  std::stable_sort(out.roots.begin(), out.roots.end(),
                   [](const IndicialRoot& a, const IndicialRoot& b) { return a.z < b.z; });
  return out;
}

IndexSet index_set_Eplus(const IndicialFamily& family, double alpha, double cutoff) {
  if (cutoff < alpha) throw InvalidArgument("index_set_Eplus: cutoff must be >= alpha");
  std::vector<IndexTerm> out;
  for (const auto& root : spec_b_roots(family).roots) {
    if (root.z.compare_to(alpha) <= 0) continue;
    for (int k = 0; k < root.order; ++k) out.emplace_back(root.z, k);
  }
  return IndexSet(std::move(out), cutoff);
}

IndexSet index_set_hatEplus(const IndicialFamily& family, double alpha, double cutoff) {
  if (cutoff < alpha) throw InvalidArgument("index_set_hatEplus: cutoff must be >= alpha");
  const auto roots = spec_b_roots(family).roots;

  // Total pole order met walking down from z through z - r.
  const auto stacked_order = [&roots](const Exponent& z, long long r) {
    int total = 0;
    for (const auto& w : roots) {
      const Exponent gap = z - w.z;
      if (!gap.is_integer()) continue;
      const long long j = gap.nearest_integer();
      if (j >= 0 && j <= r) total += w.order;
    }
    return total;
  };

  std::vector<IndexTerm> out;
  for (const auto& root : roots) {
    if (root.z.compare_to(alpha) <= 0) continue;
    long long r = 0;
    for (Exponent z = root.z; z.compare_to(cutoff) <= 0; z = z + 1, ++r) {
      const int order = stacked_order(z, r);
      for (int k = 0; k < order; ++k) out.emplace_back(z, k);
    }
  }
  return IndexSet(std::move(out), cutoff);
}

nlohmann::json to_json(const IndexSet& set) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : set.terms()) {
    auto j = exponent_to_json(t.z);
    j["k"] = t.k;
    terms.push_back(std::move(j));
  }
  return {{"cutoff", set.cutoff()}, {"terms", std::move(terms)}};
}

IndexSet index_set_from_json(const nlohmann::json& j) {
  try {
    std::vector<IndexTerm> terms;
    for (const auto& t : j.at("terms")) {
      terms.emplace_back(exponent_from_json(t), t.at("k").get<int>());
    }
    return IndexSet(std::move(terms), j.at("cutoff").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("index set JSON: ") + e.what());
  }
}

nlohmann::json to_json(const SpecB& spec) {
  nlohmann::json roots = nlohmann::json::array();
  for (const auto& r : spec.roots) {
    auto j = exponent_to_json(r.z);
    j["order"] = r.order;
    j["eigenvalue_index"] = r.eigenvalue_index;
    j["multiplicity"] = r.multiplicity;
    roots.push_back(std::move(j));
  }
  return {{"roots", std::move(roots)}, {"complex_root_eigenvalues", spec.complex_root_eigenvalues}};
}

}  // namespace cusp::index
