#pragma once
// Lower-bound machinery: steady states of -Delta w = w^{1-p}/p on the unit
// ball, the logistic-type ODE y' = (y - y^{p+1})/p, the frame change
// z = (t+1)^{1/p} u, tau = ln(t+1), and the separated sub-solution
// y(tau) w_R(x).

#include <iosfwd>
#include <string>
#include <vector>

#include "decaylab/envelope.hpp"
#include "decaylab/pde.hpp"
#include "decaylab/radial.hpp"

namespace decaylab {

struct SteadyState {
  double p = 1.0;
  int n = 1;
  RadialProfile w1;            // on [0,1]
  std::vector<double> dw1;     // w1' from the integrator, for Hermite interpolation
  double center = 0.0;
  double residual = 0.0;       // max interior residual of the ODE
  int bisection_steps = 0;
  double boundary_value = 0.0; // w(1) of the accepted shot
  // For p > 1 the profile behaves like (1-r)^{2/(p+1)} at the boundary and the
  // discrete shot map jumps there, so bisection may stop on a collapsed
  // bracket with |w(1)| above the tolerance.
  bool bracket_collapsed = false;
  bool converged = false;
};

inline constexpr double kShootingTolerance = 1e-10;
// for p > 1 the profile is singular at r = 1; the residual skips this layer
inline constexpr double kResidualBoundaryLayer = 0.05;

SteadyState solve_steady_state(double p, int n, int grid_m);

// Max residual |w'' + (n-1)/r w' + w^{1-p}/p| on interior nodes by
// fourth-order central differences, skipping r > R(1 - layer).
double steady_residual(const RadialProfile& w, double p, double layer);

// R^{2/p} w1(r/R) on the nodes of w1 stretched to [0, R].
RadialProfile scale_steady_state(const SteadyState& w, double R);
// Same function sampled on an arbitrary grid; zero outside B_R.
RadialProfile scale_steady_state(const SteadyState& w, double R, const RadialGrid& g);
double steady_value(const SteadyState& w, double rho);  // w1(rho) by cubic Hermite interpolation

double y_exact(double tau, double delta, double p);
double y_residual(const std::vector<double>& tau_grid, double delta, double p);

struct ZFrame {
  double p = 1.0;
  std::vector<double> tau;
  std::vector<RadialProfile> z;
  Series sup_norm;
};
ZFrame to_z_frame(const EvolutionRun& run, double p);
std::vector<RadialProfile> from_z_frame(const ZFrame& zf);

// C t^{-1/p} (Lambda^{-1}(c1 ln t))^{2/p}
Series lower_bound_curve(const DecayEnvelope& env, double p, double c1, double C,
                         const std::vector<double>& t_grid);

struct SubsolutionSpec {
  DecayEnvelope env = DecayEnvelope::stretched_exp(1.0, 1.0, 2.0);
  double p = 1.0;
  double c1 = 0.5;
  double tau0 = 1.0;

  static SubsolutionSpec make(const DecayEnvelope& env, double p, double tau0);  // c1 = 1/(2p)
  void validate() const;
  double R0() const { return env.inverse(c1 * tau0); }
  double delta0(const SteadyState& w) const;
};

struct SubsolutionReport {
  double tau0 = 0.0;
  double R0 = 0.0;
  double delta0 = 0.0;
  double margin = 0.0;         // min(z - zsub) over snapshots with tau <= tau0
  double margin_tau = 0.0;
  double center_margin = 0.0;  // z(0, tau) - zsub(0, tau) at the last checked snapshot
  int snapshots_checked = 0;
  bool resolution_warning = false;  // R0 > R/2
  bool passed = false;
};

SubsolutionReport subsolution_check(const EvolutionRun& run, const SubsolutionSpec& spec,
                                    const SteadyState& steady);

}  // namespace decaylab
