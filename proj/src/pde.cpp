#include "decaylab/pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "decaylab/errors.hpp"
#include "decaylab/kernels.hpp"
#include "decaylab/parallel.hpp"

namespace decaylab {
namespace {

double interpolate(const RadialProfile& f, double r) {
  const auto& g = f.grid;
  if (r <= 0.0) return f.values.front();
  if (r >= g.R) return f.values.back();
  const double x = r / g.h;
  auto i = static_cast<std::size_t>(x);
  if (i >= f.values.size() - 1) i = f.values.size() - 2;
  const double w = x - static_cast<double>(i);
  return (1.0 - w) * f.values[i] + w * f.values[i + 1];
}

void power_inplace(const std::vector<double>& u, double p, std::vector<double>& out) {
  if (p == 1.0) {
    std::copy(u.begin(), u.end(), out.begin());
  } else if (p == 2.0) {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] * u[i];
  } else {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::pow(u[i], p);
  }
}

}  // namespace

void ProblemSpec::validate() const {
  if (!(p >= 1.0)) throw InputError("problem: p must be >= 1");
  if (n < 1) throw InputError("problem: n must be >= 1");
  if (envelope.has_value() == sampled.has_value())
    throw InputError("problem: give exactly one of an envelope or a sampled initial datum");
}

double ProblemSpec::u0(double r) const {
  if (envelope) return envelope->u0(r);
  if (r > sampled->grid.R * (1.0 + 1e-12))
    throw InputError("problem: sampled initial datum does not cover the ball");
  return interpolate(*sampled, r);
}

void ApproxParams::validate() const {
  if (!(R > 0.0)) throw InputError("approx: R must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("approx: eps must lie in (0,1)");
  if (m < 3) throw InputError("approx: need at least 3 nodes");
  if (!(dt_init > 0.0) || !(dt_max > 0.0)) throw InputError("approx: time steps must be positive");
  if (!(safety > 0.0 && safety < 1.0)) throw InputError("approx: safety must lie in (0,1)");
}

RadialProfile truncated_initial_datum(const ProblemSpec& spec, const ApproxParams& params) {
  const auto g = params.grid(spec.n);
  return RadialProfile::sample(g, [&](double r) {
    const double cut = std::clamp((params.R - r) / (0.1 * params.R), 0.0, 1.0);
    return spec.u0(r) * cut;
  });
}

Stepper::Stepper(const RadialGrid& g, double p, double eps)
    : grid_(g), p_(p), eps_(eps), rows_(laplacian_rows(g)) {
  const auto m = static_cast<std::size_t>(g.m);
  diff_.resize(m);
  a_.resize(m);
  b_.resize(m);
  c_.resize(m);
  cp_.resize(m);
  dp_.resize(m);
  next_.resize(m);
}

bool Stepper::step(std::vector<double>& u, double dt) {
  const std::size_t m = u.size();
  power_inplace(u, p_, diff_);
  kernels::active().implicit_rows(diff_.data(), dt, rows_.lo.data(), rows_.di.data(),
                                  rows_.hi.data(), a_.data(), b_.data(), c_.data(), m);
  a_[m - 1] = 0.0;
  b_[m - 1] = 1.0;
  c_[m - 1] = 0.0;
  // Thomas elimination; right-hand side is u with the Dirichlet value last
  cp_[0] = c_[0] / b_[0];
  dp_[0] = u[0] / b_[0];
  for (std::size_t i = 1; i < m; ++i) {
    const double d = i + 1 == m ? eps_ : u[i];
    const double den = b_[i] - a_[i] * cp_[i - 1];
    cp_[i] = c_[i] / den;
    dp_[i] = (d - a_[i] * dp_[i - 1]) / den;
  }
  next_[m - 1] = dp_[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) next_[i] = dp_[i] - cp_[i] * next_[i + 1];
  for (std::size_t i = 0; i < m; ++i) {
    const double v = next_[i];
    if (!std::isfinite(v)) return false;
    if (v < eps_) {
      if (eps_ - v > kUndershootTolerance) return false;
      next_[i] = eps_;
    }
  }
  u.swap(next_);
  return true;
}

int Stepper::step_with_retry(std::vector<double>& u, double dt) {
  if (step(u, dt)) return 0;
  for (int halvings = 1; halvings <= kMaxHalvings; ++halvings) {
    const long long pieces = 1LL << halvings;
    const double sub = dt / static_cast<double>(pieces);
    std::vector<double> trial = u;
    bool ok = true;
    for (long long k = 0; k < pieces && ok; ++k) ok = step(trial, sub);
    if (ok) {
      u.swap(trial);
      return halvings;
    }
  }
  throw NumericError("pde_solver", "step", "undershoot or non-finite values persist after 40 step halvings");
}

std::vector<double> log_snapshots(double t_lo, double t_hi, int count) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo) || count < 2) throw InputError("snapshots: bad range");
  return geometric_grid(t_lo, t_hi, count);
}

namespace {

void record_series(EvolutionRun& run, const ObserverSpec& obs) {
  if (obs.sup_norm) run.series["sup_norm"] = sup_norm_series(run);
  if (obs.center_value) run.series["center_value"] = center_series(run);
  for (double q : obs.lq) {
    auto s = lq_series(run, q);
    run.series[s.name] = s;
  }
  for (const auto& ly : obs.lyapunov) {
    auto rep = lyapunov_series(run, ly.L, ly.q);
    run.series[rep.series.name] = rep.series;
  }
}

}  // namespace

EvolutionRun evolve(const ProblemSpec& spec, const ApproxParams& params,
                    const std::vector<double>& snapshot_times, const ObserverSpec& observers,
                    const std::vector<double>* schedule) {
  spec.validate();
  params.validate();
  if (snapshot_times.empty()) throw InputError("evolve: need at least one snapshot time");
  for (std::size_t k = 0; k < snapshot_times.size(); ++k)
    if (!(snapshot_times[k] > (k ? snapshot_times[k - 1] : 0.0)))
      throw InputError("evolve: snapshot times must be positive and strictly increasing");

  EvolutionRun run;
  run.spec = spec;
  run.params = params;
  run.grid = params.grid(spec.n);
  run.kernels = std::string(kernels::active().name);

  auto init = truncated_initial_datum(spec, params);
  for (double v : init.values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("evolve: initial datum must be nonnegative");
  if (!(init.values.front() > 0.0)) throw InputError("evolve: initial datum must be positive");
  if (!init.nonincreasing()) throw InputError("evolve: initial datum must be radially nonincreasing");
  std::vector<double> u = init.values;
  for (double& v : u) v += params.eps;

  run.times.push_back(0.0);
  run.profiles.push_back(RadialProfile{run.grid, u});

  Stepper stepper(run.grid, spec.p, params.eps);
  const double h2 = run.grid.h * run.grid.h;
  double t = 0.0;
  std::size_t next = 0, replay = 0;
  while (next < snapshot_times.size()) {
    const double target = snapshot_times[next];
    double dt;
    bool land;
    if (schedule) {
      if (replay >= schedule->size())
        throw InputError("evolve: replayed schedule ends before the last snapshot");
      dt = (*schedule)[replay++];
      land = t + dt >= target * (1.0 - 1e-12);
    } else {
      const double umax = kernels::max_value(u);
      dt = std::min(params.dt_max, params.safety * h2 / std::pow(umax, spec.p));
      if (run.steps == 0) dt = std::min(dt, params.dt_init);
      land = dt >= target - t;
      if (land) dt = target - t;
    }
    run.halvings += stepper.step_with_retry(u, dt);
    run.dt_steps.push_back(dt);
    ++run.steps;
    t = land ? target : t + dt;
    if (land) {
      run.times.push_back(target);
      run.profiles.push_back(RadialProfile{run.grid, u});
      ++next;
    }
  }
  record_series(run, observers);
  return run;
}

Series sup_norm_series(const EvolutionRun& run) {
  Series s{"sup_norm", run.times, {}};
  for (const auto& pr : run.profiles) s.v.push_back(kernels::max_value(pr.values));
  return s;
}

Series center_series(const EvolutionRun& run) {
  Series s{"center_value", run.times, {}};
  for (const auto& pr : run.profiles) s.v.push_back(pr.values.front());
  return s;
}

Series lq_series(const EvolutionRun& run, double q) {
  char name[64];
  std::snprintf(name, sizeof name, "lq_norm_q%g", q);
  Series s{name, run.times, {}};
  for (const auto& pr : run.profiles) s.v.push_back(lq_quasinorm(pr, q));
  return s;
}

LyapunovReport lyapunov_series(const EvolutionRun& run, const SteepnessFunction& L, double q) {
  const double p = run.spec.p;
  if (!(q > 0.0)) throw InputError("lyapunov_series: q must be positive");
  const double e = 0.5 * (p + q);
  const double smax = std::pow(kernels::max_value(run.profiles.front().values), e);
  if (!(smax < L.s0()))
    throw InputError("lyapunov_series: precondition sup u0^{(p+q)/2} < s0 fails");
  {
    const double hi = std::min(L.s0() * 0.999, std::max(smax, 1e-3));
    const auto grid = geometric_grid(1e-200, hi, 400);
    const auto conv = check_convexity_condition(L, std::max(p, 1.0), q, grid);
    if (!conv.passed())
      throw InputError("lyapunov_series: precondition check_convexity_condition fails for (p, q)");
  }
  LyapunovReport rep;
  char name[64];
  std::snprintf(name, sizeof name, "lyapunov_%s_q%g", to_string(L.kind()).c_str(), q);
  rep.series.name = name;
  rep.series.t = run.times;
  for (const auto& pr : run.profiles) {
    RadialProfile w = pr;
    for (double& v : w.values) v = std::pow(v, e);
    rep.series.v.push_back(steepness_integral(w, L).value);
  }
  rep.worst_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < rep.series.v.size(); ++k) {
    const double prev = rep.series.v[k - 1];
    const double excess = rep.series.v[k] - prev - kLyapunovStepTolerance * (1.0 + std::abs(prev));
    if (excess > rep.worst_increase) {
      rep.worst_increase = excess;
      rep.worst_t = rep.series.t[k];
    }
  }
  if (rep.series.v.size() < 2) rep.worst_increase = 0.0;
  rep.nonincreasing = rep.worst_increase <= 0.0;
  return rep;
}

SemiconvexityReport semiconvexity_check(const EvolutionRun& run, double p) {
  if (run.profiles.size() < 2) throw InputError("semiconvexity_check: need two snapshots");
  if (!(p > 0.0)) throw InputError("semiconvexity_check: p must be positive");
  SemiconvexityReport rep;
  rep.tolerance = 0.05 / p;
  rep.min_value = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < run.profiles.size(); ++k) {
    const double tk = run.times[k];
    if (!(tk > 0.0)) continue;
    const double dt = run.times[k + 1] - tk;
    const auto& a = run.profiles[k].values;
    const auto& b = run.profiles[k + 1].values;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double v = (b[i] - a[i]) / (dt * a[i]) + 1.0 / (p * tk);
      if (v < rep.min_value) {
        rep.min_value = v;
        rep.t_at = tk;
        rep.r_at = run.grid.r(static_cast<int>(i));
      }
    }
  }
  if (!std::isfinite(rep.min_value)) throw InputError("semiconvexity_check: need two snapshots with t > 0");
  rep.passed = rep.min_value >= -rep.tolerance;
  return rep;
}

double linfty_from_lq_constant(int n, double p, double q) {
  const double omega = sphere_area(n);
  const double base = std::pow(2.0, q + n * (p - 1.0) / 2.0) * n /
                      (std::pow(p, n / 2.0) * omega);
  return std::pow(base, 2.0 / (n * p + 2.0 * q));
}

LinftyReport linfty_from_lq_check(const EvolutionRun& run, double q) {
  if (!(q > 0.0)) throw InputError("linfty_from_lq_check: q must be positive");
  const int n = run.grid.n;
  const double p = run.spec.p;
  const double c = linfty_from_lq_constant(n, p, q);
  const double d = n * p + 2.0 * q;
  LinftyReport rep;
  for (std::size_t k = 0; k < run.profiles.size(); ++k) {
    const double t = run.times[k];
    if (!(t > 0.0)) continue;
    const double lhs = kernels::max_value(run.profiles[k].values);
    const double rhs = c * std::pow(t, -n / d) * std::pow(lq_quasinorm(run.profiles[k], q), 2.0 * q / d);
    const double ratio = lhs / rhs;
    if (ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.worst_t = t;
    }
  }
  rep.passed = rep.worst_ratio <= 1.0 + kLinftySlack;
  return rep;
}

namespace {

void note_violation(LadderReport& rep, double amount, const std::string& pair, double t, double r) {
  if (!rep.worst || amount > rep.worst->amount) rep.worst = LadderPairViolation{pair, amount, t, r};
}

double max_rel_diff(const EvolutionRun& a, const EvolutionRun& b, double lo, double hi) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    const double t = a.times[k];
    if (t < lo * (1.0 - 1e-12) || t > hi * (1.0 + 1e-12)) continue;
    const double sa = kernels::max_value(a.profiles[k].values);
    const double sb = kernels::max_value(b.profiles[k].values);
    worst = std::max(worst, std::abs(sa - sb) / sb);
  }
  return worst;
}

}  // namespace

LadderResult minimal_solution_ladder(const ProblemSpec& spec, std::vector<double> eps_list,
                                     std::vector<double> R_list, const GridPolicy& policy,
                                     const ApproxParams& base,
                                     const std::vector<double>& snapshot_times,
                                     const ObserverSpec& observers, int jobs, double window_lo,
                                     double window_hi) {
  if (eps_list.empty() || R_list.empty()) throw InputError("ladder: empty eps or R list");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1])) throw InputError("ladder: eps list must be decreasing");
  for (std::size_t i = 1; i < R_list.size(); ++i)
    if (!(R_list[i] > R_list[i - 1])) throw InputError("ladder: R list must be increasing");

  const std::size_t ne = eps_list.size(), nr = R_list.size();
  std::vector<ApproxParams> params(ne * nr, base);
  for (std::size_t ie = 0; ie < ne; ++ie)
    for (std::size_t ir = 0; ir < nr; ++ir) {
      auto& pa = params[ie * nr + ir];
      pa.eps = eps_list[ie];
      pa.R = R_list[ir];
      if (policy.h > 0.0) {
        const double cells = R_list[ir] / policy.h;
        if (std::abs(cells - std::round(cells)) > 1e-9 * cells)
          throw InputError("ladder: every R must be a multiple of the grid spacing h");
        pa.m = static_cast<int>(std::round(cells)) + 1;
      } else {
        pa.m = policy.m;
      }
    }

  LadderResult res;
  res.runs.resize(ne * nr);
  // the largest datum needs the smallest steps; all members replay its schedule
  const std::size_t ref = nr - 1;
  res.runs[ref] = evolve(spec, params[ref], snapshot_times, observers);
  const std::vector<double> schedule = res.runs[ref].dt_steps;
  std::vector<std::size_t> rest;
  for (std::size_t k = 0; k < ne * nr; ++k)
    if (k != ref) rest.push_back(k);
  parallel_for(rest.size(), jobs, [&](std::size_t j) {
    const std::size_t k = rest[j];
    res.runs[k] = evolve(spec, params[k], snapshot_times, observers, &schedule);
  });
  res.proxy = (ne - 1) * nr + (nr - 1);

  auto& rep = res.report;
  rep.eps_list = eps_list;
  rep.R_list = R_list;
  rep.window_lo = window_lo;
  rep.window_hi = window_hi;
  char pair[128];
  for (std::size_t ir = 0; ir < nr; ++ir)
    for (std::size_t ie = 0; ie + 1 < ne; ++ie) {
      const auto& hi = res.runs[ie * nr + ir];
      const auto& lo = res.runs[(ie + 1) * nr + ir];
      std::snprintf(pair, sizeof pair, "eps %g vs %g at R %g", eps_list[ie], eps_list[ie + 1],
                    R_list[ir]);
      for (std::size_t k = 0; k < hi.times.size(); ++k)
        for (std::size_t i = 0; i < hi.profiles[k].values.size(); ++i) {
          const double v = lo.profiles[k].values[i] - hi.profiles[k].values[i];
          if (v > rep.max_violation_eps) {
            rep.max_violation_eps = v;
            note_violation(rep, v, pair, hi.times[k], hi.grid.r(static_cast<int>(i)));
          }
        }
    }
  for (std::size_t ie = 0; ie < ne; ++ie)
    for (std::size_t ir = 0; ir + 1 < nr; ++ir) {
      const auto& small = res.runs[ie * nr + ir];
      const auto& large = res.runs[ie * nr + ir + 1];
      std::snprintf(pair, sizeof pair, "R %g vs %g at eps %g", R_list[ir], R_list[ir + 1],
                    eps_list[ie]);
      for (std::size_t k = 0; k < small.times.size(); ++k)
        for (std::size_t i = 0; i < small.profiles[k].values.size(); ++i) {
          const double r = small.grid.r(static_cast<int>(i));
          const double v = small.profiles[k].values[i] - interpolate(large.profiles[k], r);
          if (v > rep.max_violation_R) {
            rep.max_violation_R = v;
            note_violation(rep, v, pair, small.times[k], r);
          }
        }
    }
  rep.monotone = rep.max_violation_eps <= kLadderTolerance && rep.max_violation_R <= kLadderTolerance;
  for (std::size_t ie = 0; ie + 1 < ne; ++ie)
    rep.cauchy_eps.push_back(max_rel_diff(res.runs[ie * nr + nr - 1],
                                          res.runs[(ie + 1) * nr + nr - 1], window_lo, window_hi));
  for (std::size_t ir = 0; ir + 1 < nr; ++ir)
    rep.cauchy_R.push_back(max_rel_diff(res.runs[(ne - 1) * nr + ir],
                                        res.runs[(ne - 1) * nr + ir + 1], window_lo, window_hi));
  return res;
}

void write_csv(std::ostream& os, const Series& s) {
  os << "t," << s.name << '\n';
  char buf[64];
  for (std::size_t k = 0; k < s.t.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s.t[k], s.v[k]);
    os << buf;
  }
}

}  // namespace decaylab
