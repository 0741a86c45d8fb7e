#include <complex>
#include <cstring>
#include <mutex>

#include <fftw3.h>

#include "pfnl/error.hpp"
#include "pfnl/operators.hpp"

namespace pfnl {

namespace {

// FFTW's planner is not thread-safe; execution of an existing plan on new
// arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int next_fft_size(int minimum) {
  for (int n = minimum;; ++n) {
    int m = n;
    for (int p : {2, 3, 5, 7}) {
      while (m % p == 0) m /= p;
    }
    if (m == 1) return n;
  }
}

struct RealBuffer {
  explicit RealBuffer(std::size_t n) : ptr(fftw_alloc_real(n)) {}
  ~RealBuffer() { fftw_free(ptr); }
  RealBuffer(const RealBuffer&) = delete;
  RealBuffer& operator=(const RealBuffer&) = delete;
  double* ptr;
};

struct ComplexBuffer {
  explicit ComplexBuffer(std::size_t n) : ptr(fftw_alloc_complex(n)) {}
  ~ComplexBuffer() { fftw_free(ptr); }
  ComplexBuffer(const ComplexBuffer&) = delete;
  ComplexBuffer& operator=(const ComplexBuffer&) = delete;
  fftw_complex* ptr;
};

}  // namespace

struct ConvolutionPlan::Impl {
  Impl(const Grid& g, EvaluatedKernel k) : grid(g), kernel(std::move(k)) {
    const int d = grid.dimension();
    padded = {1, 1};
    for (int a = 0; a < d; ++a) padded[a] = next_fft_size(2 * grid.cells(a) - 1);
    real_size = static_cast<std::size_t>(padded[0]) * padded[1];
    complex_size = d == 1 ? static_cast<std::size_t>(padded[0] / 2 + 1)
                          : static_cast<std::size_t>(padded[0]) * (padded[1] / 2 + 1);

    RealBuffer in(real_size);
    ComplexBuffer out(complex_size);
    {
      std::lock_guard lock(planner_mutex());
      if (d == 1) {
        forward = fftw_plan_dft_r2c_1d(padded[0], in.ptr, out.ptr, FFTW_ESTIMATE);
        backward = fftw_plan_dft_c2r_1d(padded[0], out.ptr, in.ptr, FFTW_ESTIMATE);
      } else {
        forward = fftw_plan_dft_r2c_2d(padded[0], padded[1], in.ptr, out.ptr, FFTW_ESTIMATE);
        backward = fftw_plan_dft_c2r_2d(padded[0], padded[1], out.ptr, in.ptr, FFTW_ESTIMATE);
      }
    }
    if (!forward || !backward) throw Error("operators: FFTW planning failed");

    // Kernel wrapped into the padded box: offset k sits at index k mod P.
    std::memset(in.ptr, 0, real_size * sizeof(double));
    const double volume = grid.cell_volume();
    for (int k0 = -kernel.half_width(0); k0 <= kernel.half_width(0); ++k0) {
      for (int k1 = -kernel.half_width(1); k1 <= kernel.half_width(1); ++k1) {
        const int i0 = (k0 + padded[0]) % padded[0];
        const int i1 = (k1 + padded[1]) % padded[1];
        in.ptr[static_cast<std::size_t>(i0) * padded[1] + i1] = kernel.at(k0, k1) * volume;
      }
    }
    fftw_execute_dft_r2c(forward, in.ptr, out.ptr);
    spectrum.resize(complex_size);
    const double scale = 1.0 / static_cast<double>(real_size);
    for (std::size_t i = 0; i < complex_size; ++i) {
      spectrum[i] = std::complex<double>(out.ptr[i][0], out.ptr[i][1]) * scale;
    }
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }

  Impl(const Impl&) = delete;
  Impl& operator=(const Impl&) = delete;

  Field apply(const Field& u) const {
    if (!(u.grid() == grid)) throw ValidationError("operators: field is not on the plan's grid");
    RealBuffer in(real_size);
    ComplexBuffer out(complex_size);
    std::memset(in.ptr, 0, real_size * sizeof(double));
    const int n0 = grid.cells(0);
    const int n1 = grid.cells(1);
    for (int i = 0; i < n0; ++i) {
      for (int j = 0; j < n1; ++j) in.ptr[static_cast<std::size_t>(i) * padded[1] + j] = u[i * grid.stride(0) + j];
    }
    fftw_execute_dft_r2c(forward, in.ptr, out.ptr);
    for (std::size_t i = 0; i < complex_size; ++i) {
      const std::complex<double> v = std::complex<double>(out.ptr[i][0], out.ptr[i][1]) * spectrum[i];
      out.ptr[i][0] = v.real();
      out.ptr[i][1] = v.imag();
    }
    fftw_execute_dft_c2r(backward, out.ptr, in.ptr);
    Field result(grid);
    for (int i = 0; i < n0; ++i) {
      for (int j = 0; j < n1; ++j) result[i * grid.stride(0) + j] = in.ptr[static_cast<std::size_t>(i) * padded[1] + j];
    }
    return result;
  }

  Grid grid;
  EvaluatedKernel kernel;
  std::array<int, 2> padded{};
  std::size_t real_size = 0;
  std::size_t complex_size = 0;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<std::complex<double>> spectrum;
};

ConvolutionPlan::ConvolutionPlan(const Grid& grid, EvaluatedKernel kernel)
    : impl_(std::make_shared<const Impl>(grid, std::move(kernel))) {}

const Grid& ConvolutionPlan::grid() const { return impl_->grid; }
const EvaluatedKernel& ConvolutionPlan::kernel() const { return impl_->kernel; }
std::array<int, 2> ConvolutionPlan::padded_size() const { return impl_->padded; }
Field ConvolutionPlan::apply(const Field& u) const { return impl_->apply(u); }

Field convolve(const ConvolutionPlan& plan, const Field& u) { return plan.apply(u); }

}  // namespace pfnl
