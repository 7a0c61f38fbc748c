#pragma once
// Uniform radial grids on [0, R] in ambient dimension n, with trapezoid
// quadrature against the spherical measure omega_n r^{n-1} dr.

#include <functional>
#include <iosfwd>
#include <vector>

#include "decaylab/steepness.hpp"

namespace decaylab {

// omega_n = n |B_1| = 2 pi^{n/2} / Gamma(n/2), the area of the unit sphere.
double sphere_area(int n);
double ball_volume(int n, double R);

struct RadialGrid {
  int n = 1;
  double R = 1.0;
  int m = 3;
  double h = 0.5;
  double omega = 2.0;
  // trapezoid weights omega_n r_i^{n-1} h, halved at both ends
  std::vector<double> weights;

  static RadialGrid make(int n, double R, int m);
  double r(int i) const { return h * i; }
  std::vector<double> nodes() const;
  bool same_nodes(const RadialGrid& o) const { return n == o.n && m == o.m && R == o.R; }
};

struct RadialProfile {
  RadialGrid grid;
  std::vector<double> values;

  static RadialProfile sample(const RadialGrid& g, const std::function<double(double)>& f);
  RadialProfile scaled(double c) const;
  bool nonincreasing(double tol = 0.0) const;
};

// Three-point rows of the discrete radial Laplacian. Row 0 uses the symmetric
// stencil n*2(u1-u0)/h^2; the last row is left zero (Dirichlet node).
struct LaplacianRows {
  std::vector<double> lo, di, hi;
};
LaplacianRows laplacian_rows(const RadialGrid& g);

double lq_quasinorm(const RadialProfile& phi, double q);
double integrate(const RadialGrid& g, const std::vector<double>& f);

// phi' with centered differences, phi'(0) = 0, second-order one-sided at R.
std::vector<double> radial_gradient(const RadialProfile& phi);
double grad_l2_norm(const RadialProfile& phi);

struct SteepnessIntegral {
  double value = 0.0;
  // L(phi(R)) |B_2R \ B_R|, a proxy for the truncated tail
  double tail_proxy = 0.0;
  bool tail_flag = false;
};

inline constexpr double kTailRelTolerance = 1e-8;

SteepnessIntegral steepness_integral(const RadialProfile& phi, const SteepnessFunction& L);

RadialProfile radial_laplacian(const RadialProfile& phi);

void write_csv(std::ostream& os, const RadialProfile& phi, const char* value_name = "value");

}  // namespace decaylab
