#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "decaylab/errors.hpp"
#include "decaylab/gn.hpp"
#include "support.hpp"

using namespace decaylab;

TEST_CASE("exponents") {
  CHECK(gn_alpha(3, 2.0) == doctest::Approx(1.0 / 2 - 1.0 / 6));
  CHECK(gn_alpha(1, 2.0) == doctest::Approx(1.0));
  CHECK(gn_alpha(2, 1.0) == doctest::Approx(1.0));
  // 1/q = theta/r + (1-theta)(1/2 - 1/n)
  const double th = classical_theta(3, 2.0, 1.0);
  CHECK(0.5 == doctest::Approx(th / 1.0 + (1 - th) * (0.5 - 1.0 / 3)));
}

TEST_CASE("classical GN ratio is dilation and scale invariant") {
  const auto g = RadialGrid::make(3, 40.0, 8001);
  GNRequest req;
  req.q = 2.0;
  req.r = 1.0;
  const auto make = [&](double c, double w) {
    return RadialProfile::sample(g, [=](double r) { return c * std::exp(-(r / w) * (r / w)); });
  };
  const double base = classical_gn_ratio(make(1.0, 1.0), req);
  CHECK(base > 0.0);
  CHECK(testing::rel_diff(classical_gn_ratio(make(7.0, 1.0), req), base) <= 1e-10);
  CHECK(testing::rel_diff(classical_gn_ratio(make(1.0, 3.0), req), base) <= 1e-4);
}

TEST_CASE("L-weighted ratio and budget") {
  const auto g = RadialGrid::make(3, 40.0, 4001);
  const auto phi = RadialProfile::sample(g, [](double r) { return 0.1 * std::exp(-r * r); });
  GNRequest req;
  req.q = 2.0;
  req.L = SteepnessFunction::log_type(1, 4);
  const auto ev = gn_L_evaluate(phi, req);
  CHECK(ev.ratio > 0.0);
  CHECK(std::isfinite(ev.budget));
  // formula: ||phi||_q / (||grad phi|| L^{-alpha}(||grad phi||^2))
  const double gn = grad_l2_norm(phi);
  const double expect = lq_quasinorm(phi, 2.0) / (gn * std::pow(req.L->eval(gn * gn), -gn_alpha(3, 2.0)));
  CHECK(ev.ratio == doctest::Approx(expect).epsilon(1e-12));
  req.K = 0.5 * ev.budget;
  CHECK_THROWS_AS(gn_L_evaluate(phi, req), PreconditionError);
  GNRequest noL;
  CHECK_THROWS_AS(gn_L_ratio(phi, noL), InputError);
}

TEST_CASE("interpolation ratio") {
  const auto g = RadialGrid::make(2, 30.0, 3001);
  const auto phi = RadialProfile::sample(g, [](double r) { return std::exp(-r * r); });
  GNRequest req;
  req.q = 1.0;
  req.q_star = 2.0;
  req.L = SteepnessFunction::log_type(1, 4);
  CHECK(std::isfinite(interpolation_ratio(phi, req)));
}

TEST_CASE("power integrability is consistent for LogType") {
  // ln^{-4}(M/phi^r) ~ (r r^2)^{-4}: integrable in three dimensions
  const auto g = RadialGrid::make(3, 400.0, 40001);
  const auto phi = RadialProfile::sample(g, [](double r) { return std::exp(-r * r); });
  const auto L = SteepnessFunction::log_type(4, 4);
  const auto rep = power_integrability_check(phi, L, {0.5, 1, 2});
  CHECK_FALSE(rep.base.tail_flag);
  CHECK(rep.consistent);
  CHECK(rep.all_finite);
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.rows[1].value == steepness_integral(phi, L).value);

  // kappa = 1 decays like r^{-2}: not integrable, every member flagged. The
  // proxy needs phi(R) above underflow, hence the smaller ball.
  const auto g20 = RadialGrid::make(3, 20.0, 2001);
  const auto phi20 = RadialProfile::sample(g20, [](double r) { return std::exp(-r * r); });
  const auto slow = power_integrability_check(phi20, SteepnessFunction::log_type(1, 4), {0.5, 1.5});
  CHECK(slow.base.tail_flag);
  for (const auto& row : slow.rows) CHECK(row.tail_flag);
}

TEST_CASE("family scan") {
  FamilySpec fam;
  fam.widths = {1, 2, 4};
  fam.scales.clear();
  for (double w : fam.widths) fam.scales.push_back(std::exp(-w * w));
  GNRequest req;
  req.q = 2.0;
  req.L = SteepnessFunction::log_type(2, 4);
  const auto g = RadialGrid::make(3, 40.0, 4001);
  const auto scan = family_scan(fam, req, g);
  REQUIRE(scan.rows.size() == 3);
  for (std::size_t i = 1; i < scan.rows.size(); ++i) CHECK(scan.rows[i - 1].grad_norm <= scan.rows[i].grad_norm);
  CHECK(scan.ratio_spread >= 1.0);
  CHECK(scan.K >= scan.rows[0].budget);
  // parallel evaluation gives the same rows
  const auto scan4 = family_scan(fam, req, g, 4);
  for (std::size_t i = 0; i < scan.rows.size(); ++i) CHECK(scan.rows[i].ratio == scan4.rows[i].ratio);
  std::ostringstream os;
  write_csv(os, scan);
  CHECK(os.str().rfind("member_id,width,grad_norm,lq_norm,budget,ratio\n", 0) == 0);
  fam.widths = {1, 10};
  fam.scales = {1.0};
  CHECK_THROWS_AS(family_scan(fam, req, g), InputError);
}
