#pragma once
// Data-parallel inner loops shared by the quadrature and the time stepper.
//
// Every kernel has a scalar reference implementation. An AVX2 variant is
// compiled into a separate translation unit and selected at runtime when the
// CPU supports it. Elementwise kernels perform the same IEEE operations in
// the same order as the scalar reference, so they agree bit for bit;
// reductions differ only in summation order.
//
// Setting DECAYLAB_KERNELS=scalar in the environment forces the reference
// path.

#include <cstddef>
#include <span>
#include <string_view>

namespace decaylab::kernels {

struct KernelTable {
  std::string_view name;

  // sum_i w[i] * f[i]
  double (*dot)(const double* w, const double* f, std::size_t n);

  // max_i x[i], min_i x[i]; n >= 1
  double (*max_value)(const double* x, std::size_t n);
  double (*min_value)(const double* x, std::size_t n);

  // out[i] = lo[i]*u[i-1] + di[i]*u[i] + hi[i]*u[i+1] for i in [1, n-2]
  void (*stencil3)(const double* lo, const double* di, const double* hi,
                   const double* u, double* out, std::size_t n);

  // Linearly implicit matrix rows I - dt*diff*A for an operator with rows
  // (lo, di, hi):  a = -(dt*diff)*lo,  b = 1 - (dt*diff)*di,  c = -(dt*diff)*hi
  void (*implicit_rows)(const double* diff, double dt, const double* lo,
                        const double* di, const double* hi, double* a,
                        double* b, double* c, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

// nullptr when the build or the CPU lacks AVX2.
const KernelTable* avx2_table() noexcept;

// Table chosen at first use: AVX2 when available unless overridden by the
// DECAYLAB_KERNELS environment variable.
const KernelTable& active() noexcept;

inline double dot(std::span<const double> w, std::span<const double> f) {
  return active().dot(w.data(), f.data(), w.size());
}
inline double max_value(std::span<const double> x) {
  return active().max_value(x.data(), x.size());
}
inline double min_value(std::span<const double> x) {
  return active().min_value(x.data(), x.size());
}

}  // namespace decaylab::kernels
