#include "decaylab/rates.hpp"

#include <cmath>
#include <limits>

#include "decaylab/comparison.hpp"
#include "decaylab/errors.hpp"

namespace decaylab {
namespace {

struct Window {
  std::vector<std::size_t> idx;
};

Window select(const Series& s, double lo, double hi) {
  Window w;
  for (std::size_t k = 0; k < s.t.size(); ++k)
    if (s.t[k] >= lo * (1.0 - 1e-12) && s.t[k] <= hi * (1.0 + 1e-12)) w.idx.push_back(k);
  return w;
}

double bound_shape(const SteepnessFunction& L, double t, double p, double exponent) {
  return std::pow(t, -1.0 / p) * std::pow(L.eval(1.0 / t), -exponent);
}

BoundCheck calibrated_upper(const Series& s, double t0, double t_hi, double slack,
                            const std::string& name, auto&& shape) {
  const auto w = select(s, t0, t_hi);
  if (w.idx.empty()) throw InputError(name + ": no samples in the window");
  BoundCheck b;
  b.name = name;
  b.slack = slack;
  b.t0 = s.t[w.idx.front()];
  b.t_hi = s.t[w.idx.back()];
  b.C = s.v[w.idx.front()] / shape(b.t0);
  b.worst_ratio = 0.0;
  for (std::size_t k : w.idx) {
    const double ratio = s.v[k] / (b.C * shape(s.t[k]));
    if (ratio > b.worst_ratio) {
      b.worst_ratio = ratio;
      b.worst_t = s.t[k];
    }
  }
  b.passed = b.worst_ratio <= 1.0 + slack;
  return b;
}

}  // namespace

std::string to_string(RateModel m) {
  switch (m) {
    case RateModel::PureAlgebraic: return "PureAlgebraic";
    case RateModel::LogCorrected: return "LogCorrected";
    case RateModel::LogLogCorrected: return "LogLogCorrected";
  }
  return "?";
}

RateModel rate_model_from_string(const std::string& s) {
  if (s == "PureAlgebraic") return RateModel::PureAlgebraic;
  if (s == "LogCorrected") return RateModel::LogCorrected;
  if (s == "LogLogCorrected") return RateModel::LogLogCorrected;
  throw InputError("unknown rate model '" + s + "'");
}

RateFit fit_decay(const Series& s, double p, RateModel model, double t_lo, double t_hi) {
  if (!(p > 0.0)) throw InputError("fit_decay: p must be positive");
  const auto w = select(s, t_lo, t_hi);
  if (w.idx.size() < 3) throw InputError("fit_decay: fewer than three samples in the window");
  const double lo = s.t[w.idx.front()], hi = s.t[w.idx.back()];
  if (std::log10(hi / lo) < kMinFitDecades - 1e-12)
    throw InputError("fit_decay: window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                     "] spans fewer than 1.5 decades; refusing to fit");
  std::vector<double> x, y;
  for (std::size_t k : w.idx) {
    const double t = s.t[k], v = s.v[k];
    if (!(v > 0.0)) throw InputError("fit_decay: series values must be positive");
    switch (model) {
      case RateModel::PureAlgebraic:
        x.push_back(std::log(t));
        y.push_back(std::log(v));
        break;
      case RateModel::LogCorrected:
        if (!(t > 1.0)) throw InputError("fit_decay: LogCorrected needs t > 1");
        x.push_back(std::log(std::log(t)));
        y.push_back(std::log(v) + std::log(t) / p);
        break;
      case RateModel::LogLogCorrected:
        if (!(t > std::exp(1.0))) throw InputError("fit_decay: LogLogCorrected needs t > e");
        x.push_back(std::log(std::log(std::log(t))));
        y.push_back(std::log(v) + std::log(t) / p);
        break;
    }
  }
  const double k = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / k, my = sy / k;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InputError("fit_decay: degenerate abscissae");
  const double slope = sxy / sxx;
  const double icpt = my - slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (icpt + slope * x[i]);
    ss += r * r;
  }
  RateFit f;
  f.model = model;
  f.t_lo = lo;
  f.t_hi = hi;
  f.points = static_cast<int>(x.size());
  f.C_fit = std::exp(icpt);
  f.rms_residual = std::sqrt(ss / k);
  if (model == RateModel::PureAlgebraic) {
    f.p_fit = -slope;
    f.sigma = 0.0;
  } else {
    f.p_fit = 1.0 / p;
    f.sigma = slope;
  }
  return f;
}

BoundCheck upper_bound_check(const Series& s, const SteepnessFunction& L, double p, int n,
                             double t0, double t_hi, double slack) {
  const double e = 2.0 / (n * p);
  return calibrated_upper(s, t0, t_hi, slack, "upper_bound",
                          [&](double t) { return bound_shape(L, t, p, e); });
}

BoundCheck lq_upper_bound_check(const Series& s, const SteepnessFunction& L, double p, int n,
                                double q, double t0, double t_hi, double slack) {
  if (!(q > 0.0)) throw InputError("lq_upper_bound_check: q must be positive");
  const double e = (n * p + 2.0 * q) / (n * p * q);
  return calibrated_upper(s, t0, t_hi, slack, "lq_upper_bound",
                          [&](double t) { return bound_shape(L, t, p, e); });
}

BoundCheck upper_curve_check(const Series& s, const Series& curve, double t0, double t_hi,
                             double slack, const std::string& name) {
  if (curve.t.size() != s.t.size()) throw InputError(name + ": curve and series differ in length");
  auto shape = [&](double t) {
    for (std::size_t k = 0; k < curve.t.size(); ++k)
      if (curve.t[k] == t) return curve.v[k];
    throw InputError(name + ": curve not sampled at series time");
  };
  return calibrated_upper(s, t0, t_hi, slack, name, shape);
}

BoundCheck lower_bound_check(const Series& s, const Series& curve, double t0, double t_hi,
                             double slack) {
  if (curve.t.size() != s.t.size()) throw InputError("lower_bound_check: length mismatch");
  const auto w = select(s, t0, t_hi);
  if (w.idx.empty()) throw InputError("lower_bound_check: no samples in the window");
  BoundCheck b;
  b.name = "lower_bound";
  b.slack = slack;
  b.t0 = s.t[w.idx.front()];
  b.t_hi = s.t[w.idx.back()];
  b.C = s.v[w.idx.front()] / curve.v[w.idx.front()];
  b.worst_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k : w.idx) {
    const double ratio = s.v[k] / (b.C * curve.v[k]);
    if (ratio < b.worst_ratio) {
      b.worst_ratio = ratio;
      b.worst_t = s.t[k];
    }
  }
  b.passed = b.worst_ratio >= 1.0 - slack;
  return b;
}

BaselineReport baseline_check(const Series& s, double p, double delta, double t_lo, double t_hi) {
  const auto w = select(s, t_lo, t_hi);
  if (w.idx.size() < 2) throw InputError("baseline_check: too few samples in the window");
  BaselineReport rep;
  rep.delta = delta;
  rep.t_lo = s.t[w.idx.front()];
  rep.t_hi = s.t[w.idx.back()];
  if (std::log10(rep.t_hi / rep.t_lo) < 2.0 - 1e-12)
    throw InputError("baseline_check: window must span at least two decades");
  rep.envelope = calibrated_upper(s, rep.t_lo, rep.t_hi, kRatioSlack, "baseline_envelope",
                                  [&](double t) { return std::pow(t, -1.0 / p + delta); });
  rep.increasing = true;
  double prev = -std::numeric_limits<double>::infinity();
  int count = 0;
  for (std::size_t k : w.idx) {
    if (s.t[k] < rep.t_hi / 10.0 * (1.0 - 1e-12)) continue;
    const double z = std::pow(s.t[k], 1.0 / p) * s.v[k];
    if (!(z > prev)) rep.increasing = false;
    prev = z;
    ++count;
  }
  if (count < 2) rep.increasing = false;
  rep.passed = rep.envelope.passed && rep.increasing;
  return rep;
}

double sandwich_kappa(const DecayEnvelope& env, double p, int n, double delta) {
  const double b = env.kind() == EnvelopeKind::DoubleExp ? env.gamma() : env.beta();
  return n / b + n * p * delta / 2.0;
}

SandwichReport sandwich_report(const EvolutionRun& run, const DecayEnvelope& env,
                               const SteepnessFunction& L, double p, int n, double delta,
                               const SandwichOptions& opt) {
  if (env.kind() == EnvelopeKind::Table) throw InputError("sandwich_report: needs a closed-form envelope");
  if (!(delta > 0.0)) throw InputError("sandwich_report: delta must be positive");
  const double kappa = sandwich_kappa(env, p, n, delta);
  if (std::abs(L.kappa() - kappa) > 1e-9 * kappa)
    throw InputError("sandwich_report: L.kappa must equal n/beta + n p delta/2 = " +
                     std::to_string(kappa));
  const bool dbl = env.kind() == EnvelopeKind::DoubleExp;
  SandwichReport rep;
  rep.delta = delta;
  const Series sup = sup_norm_series(run);
  rep.fit = fit_decay(sup, p, dbl ? RateModel::LogLogCorrected : RateModel::LogCorrected,
                      opt.t_lo, opt.t_hi);
  const double centre = 2.0 / (p * (dbl ? env.gamma() : env.beta()));
  rep.sigma_lo = centre - kExponentSlack;
  rep.sigma_hi = centre + delta + kExponentSlack;
  rep.sigma_ok = rep.fit.sigma >= rep.sigma_lo && rep.fit.sigma <= rep.sigma_hi;
  rep.upper = upper_bound_check(sup, L, p, n, opt.t_calibrate, opt.t_hi, opt.slack);

  Series tail;
  for (std::size_t k = 0; k < sup.t.size(); ++k)
    if (sup.t[k] > 1.0) {
      tail.t.push_back(sup.t[k]);
      tail.v.push_back(sup.v[k]);
    }
  const Series curve = lower_bound_curve(env, p, 1.0 / (2.0 * p), 1.0, tail.t);
  rep.lower = lower_bound_check(tail, curve, opt.t_calibrate, opt.t_hi, opt.slack);
  rep.passed = rep.sigma_ok && rep.upper.passed && rep.lower.passed;
  return rep;
}

}  // namespace decaylab
