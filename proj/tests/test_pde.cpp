#include "doctest.h"

#include <cmath>

#include "decaylab/errors.hpp"
#include "decaylab/pde.hpp"
#include "support.hpp"

using namespace decaylab;

namespace {

ProblemSpec gaussian(double p, int n) {
  ProblemSpec s;
  s.p = p;
  s.n = n;
  s.envelope = DecayEnvelope::stretched_exp(1.0, 1.0, 2.0);
  return s;
}

ApproxParams small(double R = 10.0, int m = 201, double eps = 1e-6) {
  ApproxParams a;
  a.R = R;
  a.m = m;
  a.eps = eps;
  return a;
}

}  // namespace

TEST_CASE("validation") {
  ProblemSpec s = gaussian(1.0, 1);
  CHECK_NOTHROW(s.validate());
  s.p = 0.5;
  CHECK_THROWS_AS(s.validate(), InputError);
  s = gaussian(1.0, 0);
  CHECK_THROWS_AS(s.validate(), InputError);
  ApproxParams a;
  a.eps = 0.0;
  CHECK_THROWS_AS(a.validate(), InputError);
  CHECK_THROWS_AS(log_snapshots(1.0, 0.5, 4), InputError);
  const auto t = log_snapshots(1.0, 100.0, 3);
  CHECK(t[1] == doctest::Approx(10.0));
}

TEST_CASE("truncated initial datum") {
  const auto spec = gaussian(1.0, 2);
  const auto a = small(10.0, 101, 1e-3);
  const auto u = truncated_initial_datum(spec, a);
  // eps is added by the solver, not here
  CHECK(u.values[0] == 1.0);
  CHECK(u.values.back() == 0.0);
  // cutoff ramp on the outer tenth
  const int i = 95;
  CHECK(u.values[i] == doctest::Approx(spec.u0(u.grid.r(i)) * 0.5));
  CHECK(u.values[80] == spec.u0(u.grid.r(80)));
}

TEST_CASE("stepper keeps the Dirichlet value and positivity") {
  const auto g = RadialGrid::make(1, 5.0, 101);
  Stepper st(g, 1.0, 1e-4);
  std::vector<double> u(g.m);
  for (int i = 0; i < g.m; ++i) u[i] = std::exp(-g.r(i) * g.r(i)) + 1e-4;
  u.back() = 1e-4;
  for (int k = 0; k < 50; ++k) REQUIRE(st.step(u, 0.05));
  CHECK(u.back() == 1e-4);
  for (double v : u) CHECK(v >= 1e-4 - 1e-13);
}

TEST_CASE("sup norm is nonincreasing") {
  const auto run = evolve(gaussian(1.0, 3), small(), log_snapshots(0.01, 10.0, 20));
  const auto sup = sup_norm_series(run);
  for (std::size_t k = 1; k < sup.v.size(); ++k) CHECK(sup.v[k] <= sup.v[k - 1] * (1 + 1e-14));
  CHECK(run.times.front() == 0.0);
  CHECK(run.profiles.size() == run.times.size());
  CHECK(run.series.count("sup_norm"));
  CHECK(run.series.count("center_value"));
}

TEST_CASE("pure ODE oracle: spatially constant data") {
  // u0 + eps = 1 away from the cutoff ramp; the ramp is 45 units from the
  // center, so up to t = 1 the center stays at 1 to machine precision
  ProblemSpec s;
  s.p = 1.0;
  s.n = 1;
  const auto g = RadialGrid::make(1, 50.0, 501);
  s.sampled = RadialProfile::sample(g, [](double) { return 0.5; });
  const auto run = evolve(s, small(50.0, 501, 0.5), log_snapshots(0.1, 1.0, 5));
  for (const auto& prof : run.profiles) CHECK(prof.values[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("property: comparison principle") {
  auto rng = testing::rng("comparison");
  for (int trial = 0; trial < 6; ++trial) {
    const double p = testing::uniform(rng, 1.0, 2.5);
    const int n = 1 + static_cast<int>(rng() % 3);
    const double c_lo = testing::uniform(rng, 0.3, 0.9);
    CAPTURE(p);
    CAPTURE(n);
    auto a = small(8.0, 161, 1e-4);
    const auto snaps = log_snapshots(0.05, 5.0, 6);
    ProblemSpec hi = gaussian(p, n), lo = gaussian(p, n);
    lo.envelope = DecayEnvelope::stretched_exp(c_lo, testing::uniform(rng, 1.0, 2.0), 2.0);
    const auto r_hi = evolve(hi, a, snaps);
    const auto r_lo = evolve(lo, a, snaps, {}, &r_hi.dt_steps);
    for (std::size_t k = 0; k < r_hi.profiles.size(); ++k)
      for (int i = 0; i < r_hi.grid.m; ++i)
        CHECK(r_lo.profiles[k].values[i] <= r_hi.profiles[k].values[i] + 1e-12);
  }
}

TEST_CASE("property: radial monotonicity is preserved") {
  auto rng = testing::rng("radial-monotone");
  for (int trial = 0; trial < 4; ++trial) {
    auto spec = gaussian(testing::uniform(rng, 1.0, 3.0), 1 + static_cast<int>(rng() % 3));
    const auto run = evolve(spec, small(8.0, 161, 1e-5), log_snapshots(0.01, 10.0, 8));
    for (const auto& prof : run.profiles) CHECK(prof.nonincreasing(1e-14));
  }
}

TEST_CASE("replayed schedule reproduces the adaptive run") {
  const auto spec = gaussian(1.0, 2);
  const auto snaps = log_snapshots(0.1, 5.0, 5);
  const auto a = evolve(spec, small(), snaps);
  const auto b = evolve(spec, small(), snaps, {}, &a.dt_steps);
  REQUIRE(a.profiles.size() == b.profiles.size());
  for (std::size_t k = 0; k < a.profiles.size(); ++k) CHECK(a.profiles[k].values == b.profiles[k].values);
}

TEST_CASE("observers and monitors") {
  ObserverSpec obs;
  obs.lq = {1.0, 2.0};
  const auto run = evolve(gaussian(1.0, 1), small(20.0, 401, 1e-10), log_snapshots(0.01, 20.0, 21), obs);
  CHECK(run.series.count("lq_norm_q1"));
  const auto lq = lq_series(run, 2.0);
  CHECK(lq.v.size() == run.times.size());

  const auto ly = lyapunov_series(run, SteepnessFunction::log_type(2, 4), 1.0);
  CHECK(ly.nonincreasing);
  const auto sc = semiconvexity_check(run, 1.0);
  CHECK(sc.min_value >= -0.05);
  for (double q : {1.0, 2.0}) CHECK(linfty_from_lq_check(run, q).passed);
  CHECK(linfty_from_lq_constant(1, 1.0, 1.0) > 0.0);
  // sup u0 exceeds s0 = 1 for M = 2
  CHECK_THROWS_AS(lyapunov_series(run, SteepnessFunction::log_type(2, 2), 1.0), InputError);
}

TEST_CASE("ladder monotonicity on a small problem") {
  GridPolicy gp;
  gp.h = 0.1;
  const auto lad = minimal_solution_ladder(gaussian(1.0, 1), {1e-2, 1e-3}, {5.0, 10.0}, gp, small(),
                                           log_snapshots(0.1, 5.0, 6), {}, 2, 0.1, 5.0);
  CHECK(lad.report.monotone);
  CHECK(lad.report.max_violation_eps <= kLadderTolerance);
  CHECK(lad.report.max_violation_R <= kLadderTolerance);
  CHECK(lad.runs.size() == 4);
  CHECK(lad.runs[lad.proxy].params.eps == 1e-3);
  CHECK(lad.runs[lad.proxy].params.R == 10.0);
  CHECK(lad.report.cauchy_eps.size() == 1);
}
