#include "decaylab/comparison.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "decaylab/errors.hpp"
#include "decaylab/kernels.hpp"

namespace decaylab {
namespace {

struct Shot {
  bool hit_zero = false;
  double end_value = 0.0;
  std::vector<double> w, dw;
};

// RK4 for (w, w') with w'' = -(n-1)/r w' - w^{1-p}/p, w''(0) = -w^{1-p}/(p n).
Shot shoot(double c, double p, int n, int m, bool keep) {
  const double h = 1.0 / (m - 1);
  auto rhs = [&](double r, double w, double v, bool& bad) -> std::array<double, 2> {
    if (!(w > 0.0)) {
      bad = true;
      return {0.0, 0.0};
    }
    const double src = (p == 1.0 ? 1.0 : std::pow(w, 1.0 - p)) / p;
    if (r == 0.0) return {v, -src / n};
    return {v, -(n - 1) / r * v - src};
  };
  Shot s;
  if (keep) {
    s.w.assign(static_cast<std::size_t>(m), 0.0);
    s.dw.assign(static_cast<std::size_t>(m), 0.0);
    s.w[0] = c;
  }
  double w = c, v = 0.0;
  for (int i = 0; i + 1 < m; ++i) {
    const double r = i * h;
    bool bad = false;
    const auto k1 = rhs(r, w, v, bad);
    const auto k2 = rhs(r + 0.5 * h, w + 0.5 * h * k1[0], v + 0.5 * h * k1[1], bad);
    const auto k3 = rhs(r + 0.5 * h, w + 0.5 * h * k2[0], v + 0.5 * h * k2[1], bad);
    const auto k4 = rhs(r + h, w + h * k3[0], v + h * k3[1], bad);
    if (bad) {
      s.hit_zero = true;
      return s;
    }
    w += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    v += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    if (!(w > 0.0) && i + 2 < m) {
      s.hit_zero = true;
      return s;
    }
    if (keep) {
      s.w[static_cast<std::size_t>(i + 1)] = w;
      s.dw[static_cast<std::size_t>(i + 1)] = v;
    }
  }
  s.end_value = w;
  s.hit_zero = w < 0.0;
  return s;
}

double hermite(double x0, double x1, double f0, double f1, double d0, double d1, double x) {
  const double h = x1 - x0;
  const double s = (x - x0) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * f0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * f1 +
         (s3 - s2) * h * d1;
}

}  // namespace

SteadyState solve_steady_state(double p, int n, int grid_m) {
  if (!(p >= 1.0)) throw InputError("solve_steady_state: p must be >= 1");
  if (n < 1) throw InputError("solve_steady_state: n must be >= 1");
  if (grid_m < 5) throw InputError("solve_steady_state: need at least 5 nodes");

  double lo = 1.0, hi = 1.0;
  int expand = 0;
  while (!shoot(lo, p, n, grid_m, false).hit_zero) {
    lo *= 0.5;
    if (++expand > 200) throw InputError("solve_steady_state: shooting bracket not found (widen bracket)");
  }
  expand = 0;
  while (shoot(hi, p, n, grid_m, false).hit_zero) {
    hi *= 2.0;
    if (++expand > 200) throw InputError("solve_steady_state: shooting bracket not found (widen bracket)");
  }
  SteadyState out;
  out.p = p;
  out.n = n;
  Shot best = shoot(hi, p, n, grid_m, false);
  double best_c = hi;
  int it = 0;
  while (std::abs(best.end_value) > kShootingTolerance && it < 200) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      out.bracket_collapsed = true;
      break;
    }
    Shot s = shoot(mid, p, n, grid_m, false);
    if (s.hit_zero) {
      lo = mid;
    } else {
      hi = mid;
      best = std::move(s);
      best_c = mid;
    }
    ++it;
  }
  out.bisection_steps = it;
  best = shoot(best_c, p, n, grid_m, true);
  out.boundary_value = best.end_value;
  out.w1 = RadialProfile{RadialGrid::make(n, 1.0, grid_m), std::move(best.w)};
  out.dw1 = std::move(best.dw);
  out.center = best_c;
  // residual of the integrated values, before the Dirichlet node is pinned
  out.residual = steady_residual(out.w1, p, p > 1.0 ? kResidualBoundaryLayer : 0.0);
  out.w1.values.back() = 0.0;
  out.converged = std::abs(best.end_value) <= kShootingTolerance || out.bracket_collapsed;
  return out;
}

double steady_residual(const RadialProfile& w, double p, double layer) {
  const auto& g = w.grid;
  const auto& u = w.values;
  const double h = g.h;
  double worst = 0.0;
  for (int i = 2; i + 2 < g.m; ++i) {
    const double r = g.r(i);
    if (r > g.R * (1.0 - layer)) break;
    const auto j = static_cast<std::size_t>(i);
    const double d2 = (-u[j - 2] + 16.0 * u[j - 1] - 30.0 * u[j] + 16.0 * u[j + 1] - u[j + 2]) /
                      (12.0 * h * h);
    const double d1 = (u[j - 2] - 8.0 * u[j - 1] + 8.0 * u[j + 1] - u[j + 2]) / (12.0 * h);
    const double src = (p == 1.0 ? 1.0 : std::pow(u[j], 1.0 - p)) / p;
    worst = std::max(worst, std::abs(d2 + (g.n - 1) / r * d1 + src));
  }
  return worst;
}

RadialProfile scale_steady_state(const SteadyState& w, double R) {
  if (!(R > 0.0)) throw InputError("scale_steady_state: R must be positive");
  RadialProfile out{RadialGrid::make(w.n, R, w.w1.grid.m), w.w1.values};
  const double f = std::pow(R, 2.0 / w.p);
  for (double& v : out.values) v *= f;
  return out;
}

double steady_value(const SteadyState& w, double rho) {
  if (rho <= 0.0) return w.center;
  if (rho >= 1.0) return 0.0;
  const auto& g = w.w1.grid;
  const double x = rho / g.h;
  auto i = static_cast<std::size_t>(x);
  if (i >= w.w1.values.size() - 1) i = w.w1.values.size() - 2;
  const double x0 = g.r(static_cast<int>(i)), x1 = g.r(static_cast<int>(i + 1));
  return std::max(0.0, hermite(x0, x1, w.w1.values[i], w.w1.values[i + 1], w.dw1[i],
                               w.dw1[i + 1], rho));
}

RadialProfile scale_steady_state(const SteadyState& w, double R, const RadialGrid& g) {
  if (!(R > 0.0)) throw InputError("scale_steady_state: R must be positive");
  const double f = std::pow(R, 2.0 / w.p);
  return RadialProfile::sample(g, [&](double r) { return r >= R ? 0.0 : f * steady_value(w, r / R); });
}

double y_exact(double tau, double delta, double p) {
  if (!(delta > 0.0)) throw InputError("y_exact: delta must be positive");
  if (tau == 0.0) return delta;
  // 1 + (delta^{-p} - 1) e^{-tau} keeps delta = 1 exactly on the fixed point
  return std::pow(1.0 + (std::pow(delta, -p) - 1.0) * std::exp(-tau), -1.0 / p);
}

double y_residual(const std::vector<double>& tau_grid, double delta, double p) {
  double worst = 0.0;
  for (double tau : tau_grid) {
    if (!(tau >= 0.0)) throw InputError("y_residual: tau must be nonnegative");
    const double y = y_exact(tau, delta, p);
    const double f = (y - std::pow(y, p + 1.0)) / p;
    const double scale = f == 0.0 ? 1.0 : std::min(1.0, std::abs(y / f));
    const double k = 1e-3 * scale;
    const double d = (y_exact(tau - 2 * k, delta, p) - 8.0 * y_exact(tau - k, delta, p) +
                      8.0 * y_exact(tau + k, delta, p) - y_exact(tau + 2 * k, delta, p)) /
                     (12.0 * k);
    worst = std::max(worst, std::abs(d - f));
  }
  return worst;
}

ZFrame to_z_frame(const EvolutionRun& run, double p) {
  ZFrame zf;
  zf.p = p;
  zf.sup_norm.name = "z_sup_norm";
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    const double t = run.times[k];
    const double f = std::pow(t + 1.0, 1.0 / p);
    RadialProfile z = run.profiles[k];
    for (double& v : z.values) v *= f;
    zf.tau.push_back(std::log1p(t));
    zf.sup_norm.t.push_back(zf.tau.back());
    zf.sup_norm.v.push_back(kernels::max_value(z.values));
    zf.z.push_back(std::move(z));
  }
  return zf;
}

std::vector<RadialProfile> from_z_frame(const ZFrame& zf) {
  std::vector<RadialProfile> out;
  for (std::size_t k = 0; k < zf.z.size(); ++k) {
    const double f = std::exp(-zf.tau[k] / zf.p);
    RadialProfile u = zf.z[k];
    for (double& v : u.values) v *= f;
    out.push_back(std::move(u));
  }
  return out;
}

Series lower_bound_curve(const DecayEnvelope& env, double p, double c1, double C,
                         const std::vector<double>& t_grid) {
  if (!(p * c1 < 1.0) || !(c1 > 0.0)) throw InputError("lower_bound_curve: need 0 < p c1 < 1");
  Series s{"lower_bound", {}, {}};
  for (double t : t_grid) {
    if (!(t > 1.0)) throw InputError("lower_bound_curve: t outside the domain (t > 1)");
    const double R = env.inverse(c1 * std::log(t));
    s.t.push_back(t);
    s.v.push_back(C * std::pow(t, -1.0 / p) * std::pow(R, 2.0 / p));
  }
  return s;
}

SubsolutionSpec SubsolutionSpec::make(const DecayEnvelope& env, double p, double tau0) {
  SubsolutionSpec s;
  s.env = env;
  s.p = p;
  s.c1 = 1.0 / (2.0 * p);
  s.tau0 = tau0;
  s.validate();
  return s;
}

void SubsolutionSpec::validate() const {
  if (!(p >= 1.0)) throw InputError("subsolution: p must be >= 1");
  if (!(c1 > 0.0) || !(p * c1 < 1.0)) throw InputError("subsolution: need 0 < p c1 < 1");
  if (!(tau0 > 0.0)) throw InputError("subsolution: tau0 must be positive");
}

double SubsolutionSpec::delta0(const SteadyState& w) const {
  const double R = R0();
  if (!(R > 0.0)) throw InputError("subsolution: R(tau0) must be positive");
  const double c3 = 1.0 / kernels::max_value(w.w1.values);
  return c3 * std::pow(R, -2.0 / p) * std::exp(-env.Lambda(R));
}

SubsolutionReport subsolution_check(const EvolutionRun& run, const SubsolutionSpec& spec,
                                    const SteadyState& steady) {
  spec.validate();
  if (steady.p != run.spec.p || steady.n != run.grid.n || spec.p != run.spec.p)
    throw InputError("subsolution_check: p and n must match the run");
  const auto& g = run.grid;
  for (int i = 0; i < g.m; ++i) {
    const double r = i == g.m - 1 ? g.R : g.r(i);
    if (run.spec.u0(r) < spec.env.u0(r) * (1.0 - 1e-12))
      throw InputError("subsolution_check: u0 >= exp(-Lambda) fails on the grid");
  }
  SubsolutionReport rep;
  rep.tau0 = spec.tau0;
  rep.R0 = spec.R0();
  rep.delta0 = spec.delta0(steady);
  rep.resolution_warning = rep.R0 > 0.5 * g.R;
  if (!(rep.R0 < g.R)) throw InputError("subsolution_check: B_R(tau0) not contained in the run's ball");
  const auto wR = scale_steady_state(steady, rep.R0, g);
  const double p = run.spec.p;
  rep.margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    const double tau = std::log1p(run.times[k]);
    if (tau > spec.tau0 * (1.0 + 1e-12)) break;
    const double f = std::pow(run.times[k] + 1.0, 1.0 / p);
    const double y = y_exact(tau, rep.delta0, p);
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.m; ++i) {
      const auto j = static_cast<std::size_t>(i);
      m = std::min(m, f * run.profiles[k].values[j] - y * wR.values[j]);
    }
    if (k == 0 && m < 0.0)
      throw InputError("subsolution_check: initial ordering z(.,0) >= zsub(.,0) fails (delta miscomputed)");
    if (m < rep.margin) {
      rep.margin = m;
      rep.margin_tau = tau;
    }
    rep.center_margin = f * run.profiles[k].values[0] - y * wR.values[0];
    ++rep.snapshots_checked;
  }
  rep.passed = rep.margin >= 0.0;
  return rep;
}

}  // namespace decaylab
