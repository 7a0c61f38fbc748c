#include "decaylab/gn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "decaylab/errors.hpp"
#include "decaylab/parallel.hpp"

namespace decaylab {
namespace {

double sobolev_exponent_bound(int n) {
  return n <= 2 ? std::numeric_limits<double>::infinity() : 2.0 * n / (n - 2.0);
}

const SteepnessFunction& require_L(const GNRequest& req) {
  if (!req.L) throw InputError("GN request: steepness function L is required");
  return *req.L;
}

void check_request(int n, const GNRequest& req) {
  if (!(req.q > 0.0) || !(req.q < sobolev_exponent_bound(n)))
    throw InputError("GN request: need 0 < q < 2n/(n-2)_+");
  if (!(req.alpha_multiplier > 0.0)) throw InputError("GN request: alpha multiplier must be positive");
}

}  // namespace

double gn_alpha(int n, double q) {
  const double alpha = 1.0 / q - (n - 2.0) / (2.0 * n);
  if (!(alpha > 0.0)) throw InputError("GN request: alpha = 1/q - (n-2)/(2n) must be positive");
  return alpha;
}

double classical_theta(int n, double q, double r) {
  const double b = 0.5 - 1.0 / n;
  return (1.0 / q - b) / (1.0 / r - b);
}

double classical_gn_ratio(const RadialProfile& phi, const GNRequest& req) {
  const int n = phi.grid.n;
  if (!(req.r >= 1.0) || !(req.r < req.q)) throw InputError("classical GN: need 1 <= r < q");
  double theta = req.theta;
  const double expected = classical_theta(n, req.q, req.r);
  if (std::isnan(theta)) theta = expected;
  else if (std::abs(theta - expected) > 1e-12 * std::max(1.0, std::abs(expected)))
    throw InputError("classical GN: theta violates 1/q = theta/r + (1-theta)(1/2-1/n)");
  if (!(theta >= 0.0 && theta <= 1.0)) throw InputError("classical GN: theta outside [0,1]");
  const double num = lq_quasinorm(phi, req.q);
  const double den = std::pow(lq_quasinorm(phi, req.r), theta) *
                     std::pow(grad_l2_norm(phi), 1.0 - theta);
  if (!(den > 0.0)) throw InputError("classical GN: zero denominator (trivial profile)");
  return num / den;
}

GNEvaluation gn_L_evaluate(const RadialProfile& phi, const GNRequest& req) {
  const int n = phi.grid.n;
  check_request(n, req);
  const auto& L = require_L(req);
  const double alpha = gn_alpha(n, req.q) * req.alpha_multiplier;
  GNEvaluation ev;
  const auto si = steepness_integral(phi, L);
  ev.budget = si.value;
  ev.tail_flag = si.tail_flag;
  if (si.value > req.K)
    throw PreconditionError("gn_L_ratio: steepness budget violated (integral " +
                            std::to_string(si.value) + " > K " + std::to_string(req.K) + ")");
  ev.grad_norm = grad_l2_norm(phi);
  ev.lq_norm = lq_quasinorm(phi, req.q);
  if (!(ev.grad_norm > 0.0)) throw InputError("gn_L_ratio: zero gradient norm");
  ev.ratio = ev.lq_norm * std::pow(L.eval(ev.grad_norm * ev.grad_norm), alpha) / ev.grad_norm;
  return ev;
}

double gn_L_ratio(const RadialProfile& phi, const GNRequest& req) {
  return gn_L_evaluate(phi, req).ratio;
}

double interpolation_ratio(const RadialProfile& phi, const GNRequest& req) {
  const auto& L = require_L(req);
  if (!(req.q > 0.0) || !(req.q < req.q_star)) throw InputError("interpolation: need 0 < q < q*");
  const auto si = steepness_integral(phi, L);
  if (si.value > req.K) throw PreconditionError("interpolation_ratio: steepness budget violated");
  const double nq = lq_quasinorm(phi, req.q);
  const double ns = lq_quasinorm(phi, req.q_star);
  if (!(ns > 0.0)) throw InputError("interpolation: trivial profile");
  const double l = L.eval(ns * ns);
  const double e = 1.0 / req.q - 1.0 / req.q_star;
  const double factor = l > 0.0 ? std::pow(l, -e) + 1.0 : std::numeric_limits<double>::infinity();
  return nq / (ns * factor);
}

PowerIntegrabilityReport power_integrability_check(const RadialProfile& phi,
                                                   const SteepnessFunction& L,
                                                   const std::vector<double>& r_list) {
  PowerIntegrabilityReport rep;
  rep.base = steepness_integral(phi, L);
  for (double r : r_list) {
    if (!(r > 0.0)) throw InputError("power_integrability_check: exponents must be positive");
    RadialProfile pr = phi;
    for (double& v : pr.values) v = std::pow(v, r);
    const auto si = steepness_integral(pr, L);
    rep.rows.push_back({r, si.value, si.tail_flag});
    rep.all_finite = rep.all_finite && !si.tail_flag && std::isfinite(si.value);
    rep.consistent = rep.consistent && si.tail_flag == rep.base.tail_flag;
  }
  return rep;
}

std::size_t FamilySpec::size() const {
  if (scales.empty() || widths.empty()) return 0;
  if (scales.size() == 1) return widths.size();
  if (widths.size() == 1 || widths.size() == scales.size()) return scales.size();
  throw InputError("family: scale and width lists must have equal length or length 1");
}

double FamilySpec::scale(std::size_t k) const { return scales.size() == 1 ? scales[0] : scales[k]; }
double FamilySpec::width(std::size_t k) const { return widths.size() == 1 ? widths[0] : widths[k]; }

RadialProfile FamilySpec::member(const RadialGrid& g, std::size_t k) const {
  const double c = scale(k), w = width(k);
  if (!(c > 0.0) || !(w > 0.0)) throw InputError("family: scales and widths must be positive");
  if (shape.kind() == EnvelopeKind::Table) throw InputError("family: tabulated shapes unsupported");
  return RadialProfile::sample(g, [&](double r) { return c * shape.u0(r / w); });
}

FamilyScan family_scan(const FamilySpec& fam, const GNRequest& req, const RadialGrid& g,
                       int jobs) {
  const std::size_t count = fam.size();
  if (count == 0) throw InputError("family_scan: empty family");
  check_request(g.n, req);
  const auto& L = require_L(req);
  for (std::size_t k = 0; k < count; ++k)
    if (fam.width(k) > g.R / 5.0) throw InputError("family_scan: member width exceeds R/5");

  FamilyScan scan;
  scan.alpha = gn_alpha(g.n, req.q) * req.alpha_multiplier;
  std::vector<FamilyRow> rows(count);
  parallel_for(count, jobs, [&](std::size_t k) {
    const auto phi = fam.member(g, k);
    auto& row = rows[k];
    row.member_id = k;
    row.scale = fam.scale(k);
    row.width = fam.width(k);
    const auto si = steepness_integral(phi, L);
    row.budget = si.value;
    row.tail_flag = si.tail_flag;
    row.grad_norm = grad_l2_norm(phi);
    row.lq_norm = lq_quasinorm(phi, req.q);
    row.ratio = row.lq_norm * std::pow(L.eval(row.grad_norm * row.grad_norm), scan.alpha) /
                row.grad_norm;
  });

  double max_budget = 0.0;
  for (const auto& row : rows) max_budget = std::max(max_budget, row.budget);
  scan.K = std::isfinite(req.K) ? req.K : 1.05 * max_budget;
  for (auto& row : rows) row.budget_ok = row.budget <= scan.K;

  std::stable_sort(rows.begin(), rows.end(),
                   [](const FamilyRow& a, const FamilyRow& b) { return a.grad_norm < b.grad_norm; });
  scan.rows = rows;

  std::vector<const FamilyRow*> ok;
  for (const auto& row : scan.rows)
    if (row.budget_ok && row.ratio > 0.0 && std::isfinite(row.ratio)) ok.push_back(&row);
  if (ok.empty()) return scan;
  scan.max_ratio = scan.min_ratio = ok.front()->ratio;
  double gmax = ok.front()->grad_norm, gmin = gmax;
  scan.monotone_increasing = true;
  for (std::size_t i = 0; i < ok.size(); ++i) {
    scan.max_ratio = std::max(scan.max_ratio, ok[i]->ratio);
    scan.min_ratio = std::min(scan.min_ratio, ok[i]->ratio);
    gmax = std::max(gmax, ok[i]->grad_norm);
    gmin = std::min(gmin, ok[i]->grad_norm);
    if (i > 0 && !(ok[i]->ratio > ok[i - 1]->ratio)) scan.monotone_increasing = false;
  }
  scan.ratio_spread = scan.max_ratio / scan.min_ratio;
  scan.grad_span = gmax / gmin;
  scan.growth = ok.back()->ratio / ok.front()->ratio;
  if (ok.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto* row : ok) {
      const double x = std::log(row->grad_norm), y = std::log(row->ratio);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double k = static_cast<double>(ok.size());
    const double den = k * sxx - sx * sx;
    scan.loglog_slope = den > 0.0 ? (k * sxy - sx * sy) / den : 0.0;
  } else {
    scan.monotone_increasing = false;
  }
  return scan;
}

void write_csv(std::ostream& os, const FamilyScan& scan) {
  os << "member_id,width,grad_norm,lq_norm,budget,ratio\n";
  char buf[160];
  for (const auto& row : scan.rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", row.member_id,
                  row.width, row.grad_norm, row.lq_norm, row.budget, row.ratio);
    os << buf;
  }
}

}  // namespace decaylab
