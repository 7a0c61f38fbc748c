#include "decaylab/kernels.hpp"

namespace decaylab::kernels {
namespace {

double dot_scalar(const double* w, const double* f, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * f[i];
  return s;
}

double max_scalar(const double* x, std::size_t n) {
  double m = x[0];
  for (std::size_t i = 1; i < n; ++i)
    if (x[i] > m) m = x[i];
  return m;
}

double min_scalar(const double* x, std::size_t n) {
  double m = x[0];
  for (std::size_t i = 1; i < n; ++i)
    if (x[i] < m) m = x[i];
  return m;
}

void stencil3_scalar(const double* lo, const double* di, const double* hi,
                     const double* u, double* out, std::size_t n) {
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double left = lo[i] * u[i - 1];
    const double mid = di[i] * u[i];
    const double right = hi[i] * u[i + 1];
    out[i] = (left + mid) + right;
  }
}

void implicit_rows_scalar(const double* diff, double dt, const double* lo,
                          const double* di, const double* hi, double* a,
                          double* b, double* c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double k = dt * diff[i];
    a[i] = -(k * lo[i]);
    b[i] = 1.0 - k * di[i];
    c[i] = -(k * hi[i]);
  }
}

constexpr KernelTable kScalar{
    "scalar",         dot_scalar,           max_scalar, min_scalar,
    stencil3_scalar,  implicit_rows_scalar,
};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace decaylab::kernels
