#include "pfnl/fields.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "pfnl/error.hpp"
#include "pfnl/linear_solvers.hpp"

namespace pfnl {

Grid::Grid(int dimension, std::array<int, 2> cells, std::array<double, 2> lengths)
    : dimension_(dimension), cells_(cells), lengths_(lengths), spacing_{1.0, 1.0} {
  if (dimension != 1 && dimension != 2) {
    throw ValidationError("fields: grid dimension must be 1 or 2, got " + std::to_string(dimension));
  }
  if (dimension == 1) {
    cells_[1] = 1;
    lengths_[1] = 1.0;
  }
  for (int a = 0; a < dimension; ++a) {
    if (cells_[a] < 4) throw ValidationError("fields: need at least 4 cells per axis");
    if (!(lengths_[a] > 0.0) || !std::isfinite(lengths_[a])) {
      throw ValidationError("fields: box lengths must be positive");
    }
    spacing_[a] = lengths_[a] / cells_[a];
  }
}

Grid Grid::line(int n, double length) { return Grid(1, {n, 1}, {length, 1.0}); }
Grid Grid::square(int n, double length) { return Grid(2, {n, n}, {length, length}); }

std::size_t Grid::size() const { return static_cast<std::size_t>(cells_[0]) * cells_[1]; }

double Grid::cell_volume() const { return dimension_ == 1 ? spacing_[0] : spacing_[0] * spacing_[1]; }

double Grid::domain_volume() const { return dimension_ == 1 ? lengths_[0] : lengths_[0] * lengths_[1]; }

double Grid::max_spacing() const { return dimension_ == 1 ? spacing_[0] : std::max(spacing_[0], spacing_[1]); }

std::size_t Grid::stride(int axis) const { return axis == 0 ? static_cast<std::size_t>(cells_[1]) : 1; }

Field::Field(const Grid& grid, double value) : grid_(grid), data_(grid.size(), value) {}

Field::Field(const Grid& grid, std::vector<double> data) : grid_(grid), data_(std::move(data)) {
  if (data_.size() != grid_.size()) throw ValidationError("fields: data length does not match the grid");
}

Field Field::sample(const Grid& grid, const std::function<double(const Point&)>& f) {
  Field out(grid);
  for (int i = 0; i < grid.cells(0); ++i) {
    for (int j = 0; j < grid.cells(1); ++j) {
      const Point x{grid.center(0, i), grid.dimension() == 2 ? grid.center(1, j) : 0.0};
      out.data_[i * grid.stride(0) + j] = f(x);
    }
  }
  return out;
}

bool Field::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void Field::require_same_grid(const Field& other) const {
  if (!(grid_ == other.grid_)) throw ValidationError("fields: grid mismatch");
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Field& Field::axpy(double s, const Field& other) {
  require_same_grid(other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * other.data_[i];
  return *this;
}

namespace {

void require_same_grid(const Field& u, const Field& w) {
  if (!(u.grid() == w.grid())) throw ValidationError("fields: grid mismatch");
}

/// Calls f(i, j) for each interior face normal to `axis`, where i and j are the
/// flat indices of the two adjacent cells.
template <class F>
void for_each_face(const Grid& g, int axis, F&& f) {
  const std::size_t step = g.stride(axis);
  for (int i = 0; i < g.cells(0); ++i) {
    for (int j = 0; j < g.cells(1); ++j) {
      const int k = axis == 0 ? i : j;
      if (k + 1 >= g.cells(axis)) continue;
      const std::size_t a = i * g.stride(0) + j;
      f(a, a + step);
    }
  }
}

}  // namespace

double inner_product(Space space, const Field& u, const Field& w) {
  require_same_grid(u, w);
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += u[i] * w[i];
  double result = sum * u.grid().cell_volume();
  if (space == Space::V) result += gradient_inner(u, w);
  return result;
}

double norm_H(const Field& u) { return std::sqrt(inner_product(Space::H, u, u)); }
double norm_V(const Field& u) { return std::sqrt(inner_product(Space::V, u, u)); }

double gradient_inner(const Field& u, const Field& w) {
  require_same_grid(u, w);
  const Grid& g = u.grid();
  double total = 0.0;
  for (int axis = 0; axis < g.dimension(); ++axis) {
    double sum = 0.0;
    for_each_face(g, axis, [&](std::size_t a, std::size_t b) { sum += (u[b] - u[a]) * (w[b] - w[a]); });
    total += sum / (g.spacing(axis) * g.spacing(axis));
  }
  return total * g.cell_volume();
}

double gradient_norm(const Field& u) { return std::sqrt(gradient_inner(u, u)); }

double norm_W(const Field& u) {
  const Field lap = neumann_laplacian(u);
  return std::sqrt(inner_product(Space::H, lap, lap) + inner_product(Space::H, u, u));
}

double integral(const Field& u) {
  double sum = 0.0;
  for (double v : u.data()) sum += v;
  return sum * u.grid().cell_volume();
}

Field neumann_laplacian(const Field& u) {
  const Grid& g = u.grid();
  Field out(g);
  for (int axis = 0; axis < g.dimension(); ++axis) {
    const double inv_h2 = 1.0 / (g.spacing(axis) * g.spacing(axis));
    for_each_face(g, axis, [&](std::size_t a, std::size_t b) {
      const double flux = (u[b] - u[a]) * inv_h2;
      out[a] += flux;
      out[b] -= flux;
    });
  }
  return out;
}

Field solve_shifted_neumann(std::span<const double> shift, const Field& rhs, double tolerance) {
  const Grid& g = rhs.grid();
  if (shift.size() != g.size()) throw ValidationError("fields: shift length does not match the grid");
  if (g.dimension() == 1) {
    const int n = g.cells(0);
    const double inv_h2 = 1.0 / (g.spacing(0) * g.spacing(0));
    std::vector<double> diag(n), off(n > 1 ? n - 1 : 0, -inv_h2);
    for (int i = 0; i < n; ++i) {
      const int neighbours = (i > 0) + (i + 1 < n);
      diag[i] = shift[i] + neighbours * inv_h2;
    }
    Field out = rhs;
    solve_symmetric_tridiagonal(diag, off, out.data());
    return out;
  }

  std::vector<double> inv_diag(g.size(), 0.0);
  {
    // Diagonal of -Delta_N: count of neighbours per axis over h^2.
    for (std::size_t i = 0; i < g.size(); ++i) inv_diag[i] = shift[i];
    for (int axis = 0; axis < g.dimension(); ++axis) {
      const double inv_h2 = 1.0 / (g.spacing(axis) * g.spacing(axis));
      for_each_face(g, axis, [&](std::size_t a, std::size_t b) {
        inv_diag[a] += inv_h2;
        inv_diag[b] += inv_h2;
      });
    }
    for (double& v : inv_diag) v = 1.0 / v;
  }
  Field out(g);
  auto apply = [&](std::span<const double> x, std::span<double> y) {
    Field xf(g, std::vector<double>(x.begin(), x.end()));
    const Field lap = neumann_laplacian(xf);
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = shift[i] * x[i] - lap[i];
  };
  const int max_it = static_cast<int>(std::max<std::size_t>(1000, 20 * g.size()));
  const CgResult res = conjugate_gradient(apply, rhs.data(), out.data(), tolerance, max_it, inv_diag);
  if (!res.converged) {
    throw SolverError("fields: CG for (shift - Delta_N) did not converge (relative residual " +
                      std::to_string(res.relative_residual) + " after " + std::to_string(res.iterations) +
                      " iterations)");
  }
  return out;
}

Field solve_shifted_neumann(double shift, const Field& rhs, double tolerance) {
  const std::vector<double> s(rhs.size(), shift);
  return solve_shifted_neumann(s, rhs, tolerance);
}

DualField riesz_map(const Field& v) { return DualField(v - neumann_laplacian(v)); }

Field riesz_inverse(const DualField& u, double tolerance) { return solve_shifted_neumann(1.0, u.values(), tolerance); }

double dual_norm(const DualField& u, double tolerance) {
  const Field w = riesz_inverse(u, tolerance);
  const double pairing = inner_product(Space::H, u.values(), w);
  if (pairing >= 0.0) return std::sqrt(pairing);
  if (pairing >= -1e-14 * std::max(1.0, inner_product(Space::H, u.values(), u.values()))) return 0.0;
  throw SolverError("fields: negative V* pairing " + std::to_string(pairing));
}

namespace {

struct Overlap {
  int coarse;
  double weight;
};

/// For each fine cell along one axis, the coarse cells it overlaps together
/// with overlap_length / coarse_spacing.
std::vector<std::vector<Overlap>> overlaps(int n_fine, double h_fine, int n_coarse, double h_coarse) {
  std::vector<std::vector<Overlap>> out(n_fine);
  for (int i = 0; i < n_fine; ++i) {
    const double lo = i * h_fine;
    const double hi = lo + h_fine;
    const int first = std::max(0, static_cast<int>(std::floor(lo / h_coarse)));
    const int last = std::min(n_coarse - 1, static_cast<int>(std::floor(hi / h_coarse)));
    for (int c = first; c <= last; ++c) {
      const double overlap = std::min(hi, (c + 1) * h_coarse) - std::max(lo, c * h_coarse);
      if (overlap > 1e-14 * h_fine) out[i].push_back({c, overlap / h_coarse});
    }
  }
  return out;
}

}  // namespace

Field restrict_to(const Field& fine, const Grid& coarse) {
  const Grid& g = fine.grid();
  if (g.dimension() != coarse.dimension()) throw ValidationError("fields: restriction across dimensions");
  for (int a = 0; a < g.dimension(); ++a) {
    if (std::abs(g.length(a) - coarse.length(a)) > 1e-12 * g.length(a)) {
      throw ValidationError("fields: restriction between different boxes");
    }
  }
  if (g == coarse) return fine;
  const auto w0 = overlaps(g.cells(0), g.spacing(0), coarse.cells(0), coarse.spacing(0));
  const auto w1 = g.dimension() == 2 ? overlaps(g.cells(1), g.spacing(1), coarse.cells(1), coarse.spacing(1))
                                     : std::vector<std::vector<Overlap>>{{Overlap{0, 1.0}}};
  Field out(coarse);
  for (int i = 0; i < g.cells(0); ++i) {
    for (int j = 0; j < g.cells(1); ++j) {
      const double v = fine[i * g.stride(0) + j];
      for (const Overlap& a : w0[i]) {
        for (const Overlap& b : w1[j]) out[a.coarse * coarse.stride(0) + b.coarse] += a.weight * b.weight * v;
      }
    }
  }
  return out;
}

}  // namespace pfnl
