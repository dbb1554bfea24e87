#pragma once

// Piecewise-constant sampled functions on space-time boxes.
//
// A SpaceTimeGrid covers (t_lo, t_hi] x [-L, L]^n with uniform time slabs of
// width tau and spatial cells of width h. Cell values are stored row-major
// with time slowest: index = (slab * cells_x + i0) * cells_x + i1.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hardy/space.hpp"

namespace hardy {

class SpatialGrid {
 public:
  SpatialGrid(int dim, double half_width, double step);

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  double step() const { return step_; }
  int cells_per_axis() const { return cells_; }
  std::size_t size() const;
  double cell_measure() const;

  double center(int i) const { return -half_width_ + (i + 0.5) * step_; }
  double edge(int i) const { return -half_width_ + i * step_; }
  /// Index of the cell containing coordinate v, or -1 when outside the box.
  int locate(double v) const;

  bool operator==(const SpatialGrid&) const = default;

 private:
  int dim_;
  double half_width_;
  double step_;
  int cells_;
};

class SpaceTimeGrid {
 public:
  SpaceTimeGrid(SpatialGrid space, double t_lo, double t_hi, double tau);
  SpaceTimeGrid(int dim, double half_width, double step, double t_lo, double t_hi, double tau)
      : SpaceTimeGrid(SpatialGrid(dim, half_width, step), t_lo, t_hi, tau) {}

  const SpatialGrid& space() const { return space_; }
  int dim() const { return space_.dim(); }
  double t_lo() const { return t_lo_; }
  double t_hi() const { return t_hi_; }
  double tau() const { return tau_; }
  int slabs() const { return slabs_; }

  std::size_t size() const { return static_cast<std::size_t>(slabs_) * space_.size(); }
  std::size_t slab_size() const { return space_.size(); }
  double cell_measure() const { return tau_ * space_.cell_measure(); }

  double slab_lo(int k) const { return t_lo_ + k * tau_; }
  double slab_hi(int k) const { return t_lo_ + (k + 1) * tau_; }
  double slab_center(int k) const { return t_lo_ + (k + 0.5) * tau_; }

  /// Centre of the cell with flat index idx.
  SpacePoint cell_center(std::size_t idx) const;

  bool is_half_space() const { return t_lo_ == 0.0; }
  bool is_symmetric() const { return t_lo_ == -t_hi_; }

  /// Whether the closed box of the grid contains the closure of Q (cap X when
  /// the grid lives on X).
  bool covers(const ParabolicBall& q) const;

  bool operator==(const SpaceTimeGrid&) const = default;

 private:
  SpatialGrid space_;
  double t_lo_;
  double t_hi_;
  double tau_;
  int slabs_;
};

using CellRegion = std::function<bool(const SpacePoint&)>;

class GridFunction {
 public:
  explicit GridFunction(SpaceTimeGrid grid);
  GridFunction(SpaceTimeGrid grid, std::vector<double> values);

  const SpaceTimeGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  std::span<const double> slab(int k) const;
  std::span<double> slab(int k);

  /// Fill every cell from its centre (midpoint sampling).
  static GridFunction sample(const SpaceTimeGrid& grid,
                             const std::function<double(const SpacePoint&)>& fn);

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(double c);
  friend GridFunction operator*(double c, GridFunction f) { return f *= c; }
  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }

  /// True when every nonzero cell satisfies pred at its centre.
  bool support_within(const CellRegion& pred) const;

 private:
  SpaceTimeGrid grid_;
  std::vector<double> values_;
};

double integrate(const GridFunction& f);
double integrate(const GridFunction& f, const CellRegion& region);

/// Discrete L^p norm with the cell measure; p may be +infinity.
double lp_norm(const GridFunction& f, double p);
double lp_norm(const GridFunction& f, double p, const CellRegion& region);

/// Measure of the cells whose centres satisfy region.
double region_measure(const SpaceTimeGrid& grid, const CellRegion& region);

/// Grid over N = (-t_hi, t_hi] with the spatial layout and slab width of an X-grid.
SpaceTimeGrid reflected_grid(const SpaceTimeGrid& half_space_grid);
SpaceTimeGrid half_space_grid(const SpaceTimeGrid& symmetric_grid);

GridFunction even_extend(const GridFunction& f);
GridFunction odd_extend(const GridFunction& f);
GridFunction zero_extend(const GridFunction& f);
GridFunction restrict_to_half_space(const GridFunction& f);
/// g(t, x) = f(-t, x) on a symmetric grid.
GridFunction time_reflect(const GridFunction& f);

/// Copy of f on a larger grid with the same step and slab width whose cells
/// line up with those of f; cells outside the range of f are zero.
GridFunction embed(const GridFunction& f, const SpaceTimeGrid& target);

/// The same step function on a grid whose cells are split `factor` times
/// along every axis (time included).
GridFunction refine(const GridFunction& f, int factor);

// Serialization. Binary layout: six little-endian float64 header fields
// (n, L, h, t_lo, t_hi, tau) followed by row-major float64 values.
void write_binary(const GridFunction& f, std::ostream& os);
GridFunction read_binary(std::istream& is);
void write_binary(const GridFunction& f, const std::string& path);
GridFunction read_binary(const std::string& path);

/// RFC-4180 CSV: header "t,x,value" (or "t,x1,x2,value"), CRLF line endings.
void write_csv(const GridFunction& f, std::ostream& os);

}  // namespace hardy
