#include "decaylab/radial.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "decaylab/errors.hpp"
#include "decaylab/kernels.hpp"

namespace decaylab {

double sphere_area(int n) {
  if (n < 1) throw InputError("dimension must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double ball_volume(int n, double R) { return sphere_area(n) / n * std::pow(R, n); }

RadialGrid RadialGrid::make(int n, double R, int m) {
  if (n < 1) throw InputError("grid: dimension n must be >= 1");
  if (m < 3) throw InputError("grid: need at least 3 nodes");
  if (!(R > 0.0) || !std::isfinite(R)) throw InputError("grid: R must be positive");
  RadialGrid g;
  g.n = n;
  g.R = R;
  g.m = m;
  g.h = R / (m - 1);
  g.omega = sphere_area(n);
  g.weights.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double w = g.omega * std::pow(g.r(i), n - 1) * g.h;
    if (i == 0 || i == m - 1) w *= 0.5;
    g.weights[static_cast<std::size_t>(i)] = w;
  }
  return g;
}

std::vector<double> RadialGrid::nodes() const {
  std::vector<double> r(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) r[static_cast<std::size_t>(i)] = this->r(i);
  r.back() = R;
  return r;
}

RadialProfile RadialProfile::sample(const RadialGrid& g, const std::function<double(double)>& f) {
  RadialProfile p{g, std::vector<double>(static_cast<std::size_t>(g.m))};
  for (int i = 0; i < g.m; ++i) p.values[static_cast<std::size_t>(i)] = f(i == g.m - 1 ? g.R : g.r(i));
  return p;
}

RadialProfile RadialProfile::scaled(double c) const {
  RadialProfile p = *this;
  for (double& v : p.values) v *= c;
  return p;
}

bool RadialProfile::nonincreasing(double tol) const {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[i - 1] + tol) return false;
  return true;
}

LaplacianRows laplacian_rows(const RadialGrid& g) {
  const auto m = static_cast<std::size_t>(g.m);
  LaplacianRows rows{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0),
                     std::vector<double>(m, 0.0)};
  const double ih2 = 1.0 / (g.h * g.h);
  rows.di[0] = -2.0 * g.n * ih2;
  rows.hi[0] = 2.0 * g.n * ih2;
  for (std::size_t i = 1; i + 1 < m; ++i) {
    const double c = (g.n - 1) / (2.0 * static_cast<double>(i));
    rows.lo[i] = (1.0 - c) * ih2;
    rows.di[i] = -2.0 * ih2;
    rows.hi[i] = (1.0 + c) * ih2;
  }
  return rows;
}

double integrate(const RadialGrid& g, const std::vector<double>& f) {
  if (f.size() != g.weights.size()) throw InputError("integrate: size mismatch");
  return kernels::dot(g.weights, f);
}

double lq_quasinorm(const RadialProfile& phi, double q) {
  if (!(q > 0.0)) throw InputError("lq_quasinorm: q must be positive");
  std::vector<double> f(phi.values.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::pow(std::abs(phi.values[i]), q);
  return std::pow(integrate(phi.grid, f), 1.0 / q);
}

std::vector<double> radial_gradient(const RadialProfile& phi) {
  const auto& u = phi.values;
  const std::size_t m = u.size();
  const double h = phi.grid.h;
  std::vector<double> d(m, 0.0);
  for (std::size_t i = 1; i + 1 < m; ++i) d[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
  d[m - 1] = (3.0 * u[m - 1] - 4.0 * u[m - 2] + u[m - 3]) / (2.0 * h);
  return d;
}

double grad_l2_norm(const RadialProfile& phi) {
  auto d = radial_gradient(phi);
  for (double& v : d) v *= v;
  return std::sqrt(integrate(phi.grid, d));
}

SteepnessIntegral steepness_integral(const RadialProfile& phi, const SteepnessFunction& L) {
  std::vector<double> f(phi.values.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(phi.values[i] >= 0.0)) throw InputError("steepness_integral: profile must be nonnegative");
    f[i] = L.eval(phi.values[i]);
  }
  SteepnessIntegral out;
  out.value = integrate(phi.grid, f);
  const int n = phi.grid.n;
  out.tail_proxy = f.back() * ball_volume(n, phi.grid.R) * (std::pow(2.0, n) - 1.0);
  out.tail_flag = out.tail_proxy > kTailRelTolerance * out.value;
  return out;
}

RadialProfile radial_laplacian(const RadialProfile& phi) {
  const auto& g = phi.grid;
  const auto rows = laplacian_rows(g);
  const auto& u = phi.values;
  const std::size_t m = u.size();
  RadialProfile out{g, std::vector<double>(m, 0.0)};
  kernels::active().stencil3(rows.lo.data(), rows.di.data(), rows.hi.data(), u.data(),
                             out.values.data(), m);
  out.values[0] = rows.di[0] * u[0] + rows.hi[0] * u[1];
  if (m >= 4) {
    const double h = g.h;
    const double d2 = (2.0 * u[m - 1] - 5.0 * u[m - 2] + 4.0 * u[m - 3] - u[m - 4]) / (h * h);
    const double d1 = (3.0 * u[m - 1] - 4.0 * u[m - 2] + u[m - 3]) / (2.0 * h);
    out.values[m - 1] = d2 + (g.n - 1) / g.R * d1;
  } else {
    out.values[m - 1] = out.values[m - 2];
  }
  return out;
}

void write_csv(std::ostream& os, const RadialProfile& phi, const char* value_name) {
  os << "r," << value_name << '\n';
  char buf[64];
  for (int i = 0; i < phi.grid.m; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", i == phi.grid.m - 1 ? phi.grid.R : phi.grid.r(i),
                  phi.values[static_cast<std::size_t>(i)]);
    os << buf;
  }
}

}  // namespace decaylab
