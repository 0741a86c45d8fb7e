#pragma once

#include <array>
#include <cstddef>

namespace pfnl {

/// Uniform cell-centered grid on the box [0, L_0] x [0, L_1] (d = 1 or 2).
///
/// Cell k along an axis has its center at (k + 1/2) h. Data laid out on the
/// grid is row-major: the last axis varies fastest.
class Grid {
 public:
  Grid(int dimension, std::array<int, 2> cells, std::array<double, 2> lengths);

  static Grid line(int n, double length = 1.0);
  static Grid square(int n, double length = 1.0);

  int dimension() const { return dimension_; }
  int cells(int axis) const { return cells_[axis]; }
  double length(int axis) const { return lengths_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  double center(int axis, int k) const { return (k + 0.5) * spacing_[axis]; }

  std::size_t size() const;
  double cell_volume() const;
  double domain_volume() const;
  /// Largest spacing over the axes; the resolution constraint uses this.
  double max_spacing() const;

  /// Row-major strides: flat index = i0 * stride(0) + i1 * stride(1).
  std::size_t stride(int axis) const;

  bool operator==(const Grid& other) const = default;

 private:
  int dimension_;
  std::array<int, 2> cells_;
  std::array<double, 2> lengths_;
  std::array<double, 2> spacing_;
};

}  // namespace pfnl
