#include "cusp/radial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cusp/errors.hpp"

namespace cusp {

RadialGrid::RadialGrid(double t_min, double t_max, std::size_t n_nodes)
    : t_min_(t_min), t_max_(t_max), n_(n_nodes), h_(0.0) {
  if (!std::isfinite(t_min) || !std::isfinite(t_max)) {
    throw InvalidArgument("RadialGrid: bounds must be finite");
  }
  if (!(t_min < t_max)) throw InvalidArgument("RadialGrid: need t_min < t_max");
  if (!(t_max < 0.0)) throw InvalidArgument("RadialGrid: need t_max < 0 so that x < 1");
  if (n_nodes < kMinNodes) throw InvalidArgument("RadialGrid: need at least 8 nodes");
  h_ = (t_max - t_min) / static_cast<double>(n_nodes - 1);
}

RadialGrid RadialGrid::default_grid() { return RadialGrid(kDefaultTMin, std::log(0.5), kDefaultNodes); }

double RadialGrid::t(std::size_t i) const {
  // Pin the last node so refinement and CSV round trips reproduce t_max.
  if (i + 1 == n_) return t_max_;
  return t_min_ + static_cast<double>(i) * h_;
}

double RadialGrid::x(std::size_t i) const { return std::exp(t(i)); }

std::vector<double> RadialGrid::ts() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = t(i);
  return out;
}

std::vector<double> RadialGrid::xs() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = x(i);
  return out;
}

RadialGrid RadialGrid::refined() const { return RadialGrid(t_min_, t_max_, 2 * n_ - 1); }

RadialField::RadialField(RadialGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidArgument("RadialField: value count does not match grid size");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InvalidArgument("RadialField: non-finite value at node " + std::to_string(i));
    }
  }
}

RadialField RadialField::zeros(const RadialGrid& grid) { return constant(grid, 0.0); }

RadialField RadialField::constant(const RadialGrid& grid, double value) {
  return RadialField(grid, std::vector<double>(grid.size(), value));
}

RadialField RadialField::from_function(const RadialGrid& grid,
                                       const std::function<double(double)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid.x(i));
  return RadialField(grid, std::move(v));
}

double RadialField::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

void require_same_grid(const RadialGrid& a, const RadialGrid& b, const char* where) {
  if (!(a == b)) throw InvalidArgument(std::string(where) + ": fields live on different grids");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const RadialField& field) {
  out << "x,value\n";
  for (std::size_t i = 0; i < field.size(); ++i) {
    out << format_double(field.grid().x(i)) << ',' << format_double(field[i]) << '\n';
  }
}

void write_csv(const std::string& path, const RadialField& field) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  write_csv(out, field);
}

RadialField read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("field CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,value") throw InvalidArgument("field CSV: header must be 'x,value'");
  std::vector<double> xs;
  std::vector<double> vs;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::istringstream ss(line);
    double x = 0.0;
    double v = 0.0;
    char comma = 0;
    if (!(ss >> x >> comma >> v) || comma != ',') {
      throw InvalidArgument("field CSV: malformed row " + std::to_string(row));
    }
    if (!(x > 0.0)) throw InvalidArgument("field CSV: x must be positive (row " + std::to_string(row) + ")");
    xs.push_back(x);
    vs.push_back(v);
  }
  if (xs.size() < RadialGrid::kMinNodes) throw InvalidArgument("field CSV: too few rows");
  RadialGrid grid(std::log(xs.front()), std::log(xs.back()), xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(std::log(xs[i]) - grid.t(i)) > 1e-9 * std::max(1.0, std::abs(grid.t(i)))) {
      throw InvalidArgument("field CSV: x column is not uniform in log x (row " +
                            std::to_string(i + 2) + ")");
    }
  }
  return RadialField(grid, std::move(vs));
}

RadialField read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  return read_csv(in);
}

}  // namespace cusp
