#include "pfnl/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pfnl/error.hpp"

namespace pfnl {

void check_resolution(double eps, const Grid& grid) {
  const double h = grid.max_spacing();
  if (eps < kMinCellsPerEps * h * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "operators: eps = " << eps << " is below " << kMinCellsPerEps << " h = " << kMinCellsPerEps * h
        << "; refine the grid or raise eps";
    throw ResolutionError(msg.str());
  }
}

namespace {

ConvolutionPlan make_plan(const KernelFamily& family, double eps, const Grid& grid) {
  check_resolution(eps, grid);
  if (family.dimension() != grid.dimension()) {
    throw ValidationError("operators: kernel dimension does not match the grid");
  }
  return ConvolutionPlan(grid, evaluate_kernel(family, eps, grid));
}

}  // namespace

NonlocalOperator::NonlocalOperator(const KernelFamily& family, double eps, const Grid& grid)
    : eps_(eps), plan_(make_plan(family, eps, grid)), a_eps_(plan_.apply(Field(grid, 1.0))) {
  for (double a : a_eps_.data()) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("operators: a_eps is not positive");
  }
}

std::vector<double> NonlocalOperator::diagonal() const {
  const double self = plan_.kernel().at(0, 0) * grid().cell_volume();
  std::vector<double> out(a_eps_.data().begin(), a_eps_.data().end());
  for (double& v : out) v -= self;
  return out;
}

Field NonlocalOperator::apply(const Field& u) const {
  Field out = plan_.apply(u);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a_eps_[i] * u[i] - out[i];
  return out;
}

double NonlocalOperator::energy(const Field& u) const { return 0.5 * inner_product(Space::H, apply(u), u); }

Field apply_B_eps(const NonlocalOperator& op, const Field& u) { return op.apply(u); }

double energy_nonlocal(const NonlocalOperator& op, const Field& u) { return op.energy(u); }

FrechetCheck frechet_identity_residual(const NonlocalOperator& op, const Field& u, const Field& v, double delta) {
  if (!(u.grid() == op.grid()) || !(v.grid() == op.grid())) {
    throw ValidationError("operators: fields are not on the operator's grid");
  }
  const Grid& g = op.grid();
  const EvaluatedKernel& k = op.plan().kernel();
  const int n0 = g.cells(0);
  const int n1 = g.cells(1);

  // Only pairs within the kernel table contribute; all other terms vanish.
  double sum = 0.0;
  for (int i0 = 0; i0 < n0; ++i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      const std::size_t a = i0 * g.stride(0) + i1;
      for (int k0 = -k.half_width(0); k0 <= k.half_width(0); ++k0) {
        const int j0 = i0 + k0;
        if (j0 < 0 || j0 >= n0) continue;
        for (int k1 = -k.half_width(1); k1 <= k.half_width(1); ++k1) {
          const int j1 = i1 + k1;
          if (j1 < 0 || j1 >= n1) continue;
          const std::size_t b = j0 * g.stride(0) + j1;
          sum += k.at(k0, k1) * (u[a] - u[b]) * (v[a] - v[b]);
        }
      }
    }
  }
  const double volume = g.cell_volume();

  FrechetCheck out;
  out.pairing = inner_product(Space::H, op.apply(u), v);
  out.double_sum = 0.5 * sum * volume * volume;
  Field plus = u;
  plus.axpy(delta, v);
  Field minus = u;
  minus.axpy(-delta, v);
  out.finite_difference = (op.energy(plus) - op.energy(minus)) / (2.0 * delta);
  out.double_sum_residual = std::abs(out.pairing - out.double_sum);
  out.finite_difference_residual = std::abs(out.pairing - out.finite_difference);
  return out;
}

Field apply_B_local(const Field& u) {
  Field out = neumann_laplacian(u);
  out *= -1.0;
  return out;
}

double energy_local(const Field& u) { return 0.5 * gradient_inner(u, u); }

double bbm_bound_ratio(const NonlocalOperator& op, const Field& u) {
  const double energy = op.energy(u);
  double a_max = 0.0;
  for (double a : op.a_eps().data()) a_max = std::max(a_max, a);
  // Round-off floor of E_eps for a constant field.
  if (!(energy > 1e-12 * a_max * inner_product(Space::H, u, u))) {
    throw DegenerateError("operators: E_eps(u) vanishes, the BBM ratio is undefined for constant u");
  }
  return dual_norm(op.apply(u)) / std::sqrt(energy);
}

PhaseOperator::PhaseOperator(Grid grid, std::shared_ptr<const NonlocalOperator> op)
    : grid_(std::move(grid)), nonlocal_(std::move(op)) {}

PhaseOperator PhaseOperator::local(const Grid& grid) { return PhaseOperator(grid, nullptr); }

PhaseOperator PhaseOperator::nonlocal(std::shared_ptr<const NonlocalOperator> op) {
  if (!op) throw ValidationError("operators: null nonlocal operator");
  Grid g = op->grid();
  return PhaseOperator(std::move(g), std::move(op));
}

std::optional<double> PhaseOperator::eps() const {
  if (nonlocal_) return nonlocal_->eps();
  return std::nullopt;
}

Field PhaseOperator::apply(const Field& u) const { return nonlocal_ ? nonlocal_->apply(u) : apply_B_local(u); }

double PhaseOperator::energy(const Field& u) const { return nonlocal_ ? nonlocal_->energy(u) : energy_local(u); }

std::vector<double> PhaseOperator::diagonal() const {
  if (nonlocal_) return nonlocal_->diagonal();
  std::vector<double> out(grid_.size(), 0.0);
  for (int i = 0; i < grid_.cells(0); ++i) {
    for (int j = 0; j < grid_.cells(1); ++j) {
      double v = 0.0;
      for (int axis = 0; axis < grid_.dimension(); ++axis) {
        const int k = axis == 0 ? i : j;
        const int neighbours = (k > 0) + (k + 1 < grid_.cells(axis));
        v += neighbours / (grid_.spacing(axis) * grid_.spacing(axis));
      }
      out[i * grid_.stride(0) + j] = v;
    }
  }
  return out;
}

}  // namespace pfnl
