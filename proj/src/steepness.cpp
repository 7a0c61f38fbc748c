#include "decaylab/steepness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "decaylab/errors.hpp"

namespace decaylab {
namespace {

constexpr double kUnderflowClamp = 1e-300;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

HypothesisReport make_report(double worst, double s, double lambda, double tol) {
  return HypothesisReport{worst, s, lambda, worst <= tol, tol};
}

}  // namespace

std::string to_string(SteepnessKind kind) {
  switch (kind) {
    case SteepnessKind::PowerLaw: return "PowerLaw";
    case SteepnessKind::LogType: return "LogType";
    case SteepnessKind::DoubleLogType: return "DoubleLogType";
  }
  return "?";
}

SteepnessKind steepness_kind_from_string(const std::string& name) {
  if (name == "PowerLaw") return SteepnessKind::PowerLaw;
  if (name == "LogType") return SteepnessKind::LogType;
  if (name == "DoubleLogType") return SteepnessKind::DoubleLogType;
  throw InputError("unknown steepness kind '" + name + "'");
}

SteepnessFunction::SteepnessFunction(SteepnessKind kind, double r, double kappa, double M,
                                     double s0, double a, double lambda0)
    : kind_(kind), r_(r), kappa_(kappa), M_(M), s0_(s0), a_(a), lambda0_(lambda0) {
  if (!(lambda0 > 0.0)) throw InputError("lambda0 must be positive");
  if (!(a >= 0.0)) throw InputError("hypothesis constant a must be nonnegative");
  switch (kind) {
    case SteepnessKind::PowerLaw:
      if (!(r > 0.0)) throw InputError("PowerLaw exponent r must be positive");
      s0_ = std::numeric_limits<double>::infinity();
      break;
    case SteepnessKind::LogType:
      if (!(kappa > 0.0)) throw InputError("kappa must be positive");
      if (!(M >= 2.0)) throw InputError("LogType requires M >= 2");
      if (std::abs(s0 - M / 2.0) > 1e-12 * M) throw InputError("LogType requires s0 = M/2");
      s0_ = M / 2.0;
      break;
    case SteepnessKind::DoubleLogType:
      if (!(kappa > 0.0)) throw InputError("kappa must be positive");
      if (!(M > std::numbers::e)) throw InputError("DoubleLogType requires M > e");
      if (!(s0 >= 1.0 && s0 < M / std::numbers::e))
        throw InputError("DoubleLogType requires 1 <= s0 < M/e");
      break;
  }
}

SteepnessFunction SteepnessFunction::power_law(double r, double lambda0) {
  return SteepnessFunction(SteepnessKind::PowerLaw, r, 1.0, 0.0, 0.0, 0.0, lambda0);
}

SteepnessFunction SteepnessFunction::log_type(double kappa, double M, double lambda0) {
  if (!(kappa > 0.0) || !(lambda0 > 0.0)) throw InputError("kappa and lambda0 must be positive");
  const double a = kappa <= 1.0 ? kappa : (std::pow(1.0 + lambda0, kappa) - 1.0) / lambda0;
  return SteepnessFunction(SteepnessKind::LogType, 1.0, kappa, M, M / 2.0, a, lambda0);
}

double double_log_hypothesis_constant(double kappa, double c1, double lambda0) {
  if (!(c1 > 0.0)) throw InputError("c1 = ln ln(M/s0) must be positive");
  // lambda -> 0 limit of ((1 + ln(1+lambda)/c1)^kappa - 1)/lambda
  double a = kappa / c1;
  constexpr int kPoints = 20000;
  for (int k = 1; k <= kPoints; ++k) {
    const double lambda = lambda0 * static_cast<double>(k) / kPoints;
    const double v = (std::pow(1.0 + std::log1p(lambda) / c1, kappa) - 1.0) / lambda;
    a = std::max(a, v);
  }
  // grid-to-continuum slack for the sup between nodes
  return a * (1.0 + 1e-6);
}

SteepnessFunction SteepnessFunction::double_log_type(double kappa, double M, double s0,
                                                     double lambda0) {
  if (!(M > std::numbers::e) || !(s0 >= 1.0 && s0 < M / std::numbers::e))
    throw InputError("DoubleLogType requires M > e and 1 <= s0 < M/e");
  const double c1 = std::log(std::log(M / s0));
  const double a = double_log_hypothesis_constant(kappa, c1, lambda0);
  return SteepnessFunction(SteepnessKind::DoubleLogType, 1.0, kappa, M, s0, a, lambda0);
}

SteepnessFunction SteepnessFunction::with_a(double a) const {
  SteepnessFunction copy = *this;
  if (!(a >= 0.0)) throw InputError("hypothesis constant a must be nonnegative");
  copy.a_ = a;
  return copy;
}

double SteepnessFunction::eval(double s) const {
  if (!(s >= 0.0)) throw InputError("steepness function evaluated at negative argument");
  switch (kind_) {
    case SteepnessKind::PowerLaw:
      return std::pow(s, r_);
    case SteepnessKind::LogType:
      if (s < kUnderflowClamp) return 0.0;
      if (s < s0_) return std::pow(std::log(M_ / s), -kappa_);
      return std::pow(std::numbers::ln2, -kappa_);
    case SteepnessKind::DoubleLogType:
      if (s < kUnderflowClamp) return 0.0;
      if (s < s0_) return std::pow(std::log(std::log(M_ / s)), -kappa_);
      return std::pow(std::log(std::log(M_ / s0_)), -kappa_);
  }
  return 0.0;
}

double SteepnessFunction::sup() const {
  if (kind_ == SteepnessKind::PowerLaw) return std::numeric_limits<double>::infinity();
  return eval(s0_);
}

void SteepnessFunction::check_smooth_branch(double s, const char* op) const {
  if (!(s > 0.0) || !(s < s0_))
    throw DomainError(std::string(op) + ": argument outside the smooth branch (0, s0)");
}

double SteepnessFunction::deriv1(double s) const {
  check_smooth_branch(s, "deriv1");
  switch (kind_) {
    case SteepnessKind::PowerLaw:
      return r_ * std::pow(s, r_ - 1.0);
    case SteepnessKind::LogType: {
      const double l = std::log(M_ / s);
      return kappa_ / s * std::pow(l, -kappa_ - 1.0);
    }
    case SteepnessKind::DoubleLogType: {
      const double l = std::log(M_ / s);
      const double ll = std::log(l);
      return kappa_ / (s * l) * std::pow(ll, -kappa_ - 1.0);
    }
  }
  return 0.0;
}

double SteepnessFunction::deriv2(double s) const {
  check_smooth_branch(s, "deriv2");
  switch (kind_) {
    case SteepnessKind::PowerLaw:
      return r_ * (r_ - 1.0) * std::pow(s, r_ - 2.0);
    case SteepnessKind::LogType: {
      const double l = std::log(M_ / s);
      const double s2 = s * s;
      return -kappa_ / s2 * std::pow(l, -kappa_ - 1.0) +
             kappa_ * (kappa_ + 1.0) / s2 * std::pow(l, -kappa_ - 2.0);
    }
    case SteepnessKind::DoubleLogType: {
      const double l = std::log(M_ / s);
      const double ll = std::log(l);
      const double s2 = s * s;
      return -kappa_ / (s2 * l) * std::pow(ll, -kappa_ - 1.0) +
             kappa_ / (s2 * l * l) * std::pow(ll, -kappa_ - 1.0) +
             kappa_ * (kappa_ + 1.0) / (s2 * l * l) * std::pow(ll, -kappa_ - 2.0);
    }
  }
  return 0.0;
}

HypothesisReport check_hypothesis_H(const SteepnessFunction& L, double lambda0, double a,
                                    std::span<const double> s_grid,
                                    std::span<const double> lambda_grid, double tolerance) {
  if (s_grid.empty() || lambda_grid.empty()) throw InputError("check_hypothesis_H: empty grid");
  double worst = -std::numeric_limits<double>::infinity();
  double ws = kNaN, wl = kNaN;
  for (double s : s_grid) {
    if (!(s > 0.0) || !(s < L.s0())) throw InputError("check_hypothesis_H: s outside (0, s0)");
    const double ls = L.eval(s);
    for (double lambda : lambda_grid) {
      if (!(lambda > 0.0) || !(lambda < lambda0))
        throw InputError("check_hypothesis_H: lambda outside (0, lambda0)");
      const double denom = (1.0 + a * lambda) * L.eval(std::pow(s, 1.0 + lambda));
      const double v = denom > 0.0 ? ls / denom - 1.0 : std::numeric_limits<double>::infinity();
      if (v > worst) {
        worst = v;
        ws = s;
        wl = lambda;
      }
    }
  }
  return make_report(worst, ws, wl, tolerance);
}

HypothesisReport check_ratio_bound(const SteepnessFunction& L, double a,
                                   std::span<const double> s_grid, double tolerance) {
  if (s_grid.empty()) throw InputError("check_ratio_bound: empty grid");
  const double upper = std::min(L.s0(), 1.0);
  double worst = -std::numeric_limits<double>::infinity();
  double ws = kNaN;
  for (double s : s_grid) {
    if (!(s > 0.0) || !(s < upper))
      throw InputError("check_ratio_bound: grid point outside (0, min(s0,1))");
    const double lhs = s * L.deriv1(s) / L.eval(s);
    const double rhs = a / std::log(1.0 / s);
    const double v = lhs / rhs - 1.0;
    if (v > worst) {
      worst = v;
      ws = s;
    }
  }
  return make_report(worst, ws, kNaN, tolerance);
}

ConvexityReport check_convexity_condition(const SteepnessFunction& L, double p, double q0,
                                          std::span<const double> s_grid, double tolerance) {
  if (!(p >= 1.0)) throw InputError("check_convexity_condition: p must be >= 1");
  if (!(q0 > 0.0)) throw InputError("check_convexity_condition: q0 must be positive");
  if (s_grid.empty()) throw InputError("check_convexity_condition: empty grid");
  const double threshold = (3.0 * p + q0 - 2.0) / (p + q0);
  double worst_weak = -std::numeric_limits<double>::infinity();
  double worst_strong = -std::numeric_limits<double>::infinity();
  double s_weak = kNaN, s_strong = kNaN;
  for (double s : s_grid) {
    if (!(s > 0.0) || !(s < L.s0()))
      throw InputError("check_convexity_condition: s outside (0, s0)");
    const double d1 = L.deriv1(s);
    const double sd2 = s * L.deriv2(s);
    const double scale = std::abs(d1) + std::abs(sd2);
    if (scale == 0.0) continue;
    // violations normalised by the magnitude of the terms involved
    const double weak = -(sd2 + threshold * d1) / scale;
    const double strong = -(d1 + sd2) / scale;
    if (weak > worst_weak) {
      worst_weak = weak;
      s_weak = s;
    }
    if (strong > worst_strong) {
      worst_strong = strong;
      s_strong = s;
    }
  }
  return ConvexityReport{threshold, make_report(worst_weak, s_weak, kNaN, tolerance),
                         make_report(worst_strong, s_strong, kNaN, tolerance)};
}

HypothesisReport check_dilation_bound(const SteepnessFunction& L, double d, double s_ref,
                                      std::span<const double> s_grid, double tolerance) {
  if (!(d > 0.0 && d < 1.0)) throw InputError("check_dilation_bound: d must lie in (0,1)");
  if (!(s_ref > 0.0 && s_ref < std::min(L.s0(), 1.0)))
    throw InputError("check_dilation_bound: s_ref must lie in (0, min(s0,1))");
  const double c1 = L.a() / std::log(1.0 / s_ref);
  const double factor = std::pow(d, c1);
  double worst = -std::numeric_limits<double>::infinity();
  double ws = kNaN;
  for (double s : s_grid) {
    if (!(s > 0.0 && s < s_ref)) throw InputError("check_dilation_bound: s outside (0, s_ref)");
    const double v = factor * L.eval(s) / L.eval(d * s) - 1.0;
    if (v > worst) {
      worst = v;
      ws = s;
    }
  }
  return make_report(worst, ws, kNaN, tolerance);
}

double transcendental_sup(const SteepnessFunction& L, double beta, double gamma, double delta) {
  if (!(beta > 0.0) || !(gamma > 0.0) || !(delta > 0.0))
    throw InputError("solve_transcendental: beta, gamma, delta must be positive");
  const double target = std::log(delta);
  auto log_map = [&](double log_eta) {
    const double eta = std::exp(log_eta);
    const double l = L.eval(eta);
    if (l <= 0.0) return -std::numeric_limits<double>::infinity();
    return beta * log_eta + gamma * std::log(l);
  };
  double lo = std::log(1e-300);
  double hi = 0.0;
  if (log_map(lo) > target) throw InputError("solve_transcendental: lower end not bracketed");
  int expansions = 0;
  while (log_map(hi) <= target) {
    hi += 10.0;
    if (++expansions > 100) throw InputError("solve_transcendental: upper end not bracketed");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (log_map(mid) <= target) lo = mid;
    else hi = mid;
  }
  return std::exp(lo);
}

namespace {

double bound_shape(const SteepnessFunction& L, double beta, double gamma, double delta) {
  return std::pow(delta, 1.0 / beta) * std::pow(L.eval(delta), -gamma / beta);
}

void check_transcendental_pre(const SteepnessFunction& L, double beta, double gamma,
                              double delta0) {
  if (!(beta > 1.0 / (1.0 + L.lambda0())))
    throw InputError("solve_transcendental: requires beta > 1/(1+lambda0)");
  if (!(gamma > 0.0) || !(delta0 > 0.0))
    throw InputError("solve_transcendental: gamma and delta0 must be positive");
}

}  // namespace

double calibrate_transcendental_constant(const SteepnessFunction& L, double beta, double gamma,
                                         double delta0, std::vector<double>* grid_out,
                                         int points) {
  check_transcendental_pre(L, beta, gamma, delta0);
  const auto grid = geometric_grid(delta0 * 1e-12, delta0, points);
  double c = 0.0;
  for (double d : grid)
    c = std::max(c, transcendental_sup(L, beta, gamma, d) / bound_shape(L, beta, gamma, d));
  if (grid_out) *grid_out = grid;
  return c;
}

TranscendentalResult solve_transcendental(const SteepnessFunction& L, double beta, double gamma,
                                          double delta, double delta0) {
  check_transcendental_pre(L, beta, gamma, delta0);
  if (!(delta > 0.0 && delta <= delta0))
    throw InputError("solve_transcendental: requires 0 < delta <= delta0");
  TranscendentalResult out;
  out.constant = calibrate_transcendental_constant(L, beta, gamma, delta0,
                                                   &out.calibration_deltas);
  out.eta_bruteforce = transcendental_sup(L, beta, gamma, delta);
  out.eta_bound = out.constant * bound_shape(L, beta, gamma, delta);
  return out;
}

std::vector<double> geometric_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw InputError("geometric_grid: bad range");
  std::vector<double> g(static_cast<std::size_t>(count));
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  g.back() = hi;
  return g;
}

std::vector<double> linear_grid(double lo, double hi, int count) {
  if (!(hi >= lo) || count < 1) throw InputError("linear_grid: bad range");
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    g[static_cast<std::size_t>(i)] =
        count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  return g;
}

}  // namespace decaylab
