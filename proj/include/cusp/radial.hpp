#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace cusp {

/// Uniform grid in t = log x on [t_min, t_max], with x = e^t < 1.
class RadialGrid {
 public:
  static constexpr double kDefaultTMin = -40.0;
  static constexpr std::size_t kDefaultNodes = 4096;
  static constexpr std::size_t kMinNodes = 8;

  RadialGrid(double t_min, double t_max, std::size_t n_nodes);

  /// t in [-40, log 0.5] with 4096 nodes.
  static RadialGrid default_grid();

  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  std::size_t size() const { return n_; }
  double h() const { return h_; }

  double t(std::size_t i) const;
  double x(std::size_t i) const;
  std::vector<double> ts() const;
  std::vector<double> xs() const;

  /// Same interval with the spacing halved (2n - 1 nodes, old nodes kept).
  RadialGrid refined() const;

  friend bool operator==(const RadialGrid& a, const RadialGrid& b) {
    return a.t_min_ == b.t_min_ && a.t_max_ == b.t_max_ && a.n_ == b.n_;
  }

 private:
  double t_min_;
  double t_max_;
  std::size_t n_;
  double h_;
};

/// Real samples at every node of a RadialGrid.
class RadialField {
 public:
  RadialField(RadialGrid grid, std::vector<double> values);

  static RadialField zeros(const RadialGrid& grid);
  static RadialField constant(const RadialGrid& grid, double value);
  static RadialField from_function(const RadialGrid& grid, const std::function<double(double)>& f);

  const RadialGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  double sup_norm() const;

 private:
  RadialGrid grid_;
  std::vector<double> values_;
};

/// Throws InvalidArgument unless both fields live on the same grid.
void require_same_grid(const RadialGrid& a, const RadialGrid& b, const char* where);

/// 17 significant digits, the CSV and report format for doubles.
std::string format_double(double v);

/// CSV with header "x,value", ascending x.
void write_csv(std::ostream& out, const RadialField& field);
void write_csv(const std::string& path, const RadialField& field);

/// Reads a CSV written by write_csv. The x column must be log-uniform.
RadialField read_csv(std::istream& in);
RadialField read_csv(const std::string& path);

}  // namespace cusp
