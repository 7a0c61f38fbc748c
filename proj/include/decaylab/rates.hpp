#pragma once
// Decay-rate fits and calibrate-then-persist bound checks for norm series.
// Non-constructive constants are calibrated at the first in-window sample;
// the testable content is that the inequality then persists.

#include <limits>
#include <string>
#include <vector>

#include "decaylab/envelope.hpp"
#include "decaylab/pde.hpp"
#include "decaylab/steepness.hpp"

namespace decaylab {

enum class RateModel { PureAlgebraic, LogCorrected, LogLogCorrected };
std::string to_string(RateModel m);
RateModel rate_model_from_string(const std::string& s);

inline constexpr double kDefaultFitStart = 10.0;
inline constexpr double kMinFitDecades = 1.5;
inline constexpr double kRatioSlack = 0.1;
inline constexpr double kExponentSlack = 0.1;

struct RateFit {
  RateModel model = RateModel::LogCorrected;
  double p_fit = 0.0;  // algebraic decay exponent a of v ~ t^{-a}
  double sigma = 0.0;  // (doubly) logarithmic exponent
  double C_fit = 0.0;
  double rms_residual = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  int points = 0;
};

// LogCorrected:    ln(t^{1/p} v) = ln C + sigma ln ln t
// LogLogCorrected: ln(t^{1/p} v) = ln C + sigma ln ln ln t
// PureAlgebraic:   ln v = ln C - a ln t
RateFit fit_decay(const Series& s, double p, RateModel model, double t_lo = kDefaultFitStart,
                  double t_hi = std::numeric_limits<double>::infinity());

struct BoundCheck {
  std::string name;
  double C = 0.0;           // calibrated prefactor
  double t0 = 0.0;          // calibration time
  double t_hi = 0.0;
  double worst_ratio = 0.0; // v/(C f) for upper bounds, same quotient for lower bounds
  double worst_t = 0.0;
  double slack = kRatioSlack;
  bool passed = false;
};

// v <= (1+slack) C t^{-1/p} L^{-2/(np)}(1/t) on (t0, t_hi]
BoundCheck upper_bound_check(const Series& s, const SteepnessFunction& L, double p, int n,
                             double t0, double t_hi = std::numeric_limits<double>::infinity(),
                             double slack = kRatioSlack);
// ||u||_q <= (1+slack) C t^{-1/p} L^{-(np+2q)/(npq)}(1/t)
BoundCheck lq_upper_bound_check(const Series& s, const SteepnessFunction& L, double p, int n,
                                double q, double t0,
                                double t_hi = std::numeric_limits<double>::infinity(),
                                double slack = kRatioSlack);
// v >= (1-slack) C curve(t), curve calibrated at t0
BoundCheck lower_bound_check(const Series& s, const Series& curve, double t0,
                             double t_hi = std::numeric_limits<double>::infinity(),
                             double slack = kRatioSlack);
// generic upper check against a sampled curve (same t as s)
BoundCheck upper_curve_check(const Series& s, const Series& curve, double t0, double t_hi,
                             double slack, const std::string& name);

struct BaselineReport {
  BoundCheck envelope;      // v <= C t^{-1/p+delta}
  bool increasing = false;  // t^{1/p} v increasing over the last decade
  double delta = 0.1;
  double t_lo = 0.0, t_hi = 0.0;
  bool passed = false;
};
BaselineReport baseline_check(const Series& s, double p, double delta = 0.1,
                              double t_lo = kDefaultFitStart,
                              double t_hi = std::numeric_limits<double>::infinity());

struct SandwichOptions {
  double t_lo = kDefaultFitStart;  // fit window
  double t_hi = 1e4;
  double t_calibrate = 100.0;      // start of the bracketing window
  double slack = kRatioSlack;
};

struct SandwichReport {
  RateFit fit;
  double sigma_lo = 0.0, sigma_hi = 0.0;
  bool sigma_ok = false;
  BoundCheck upper;
  BoundCheck lower;
  double delta = 0.0;
  bool passed = false;
};

SandwichReport sandwich_report(const EvolutionRun& run, const DecayEnvelope& env,
                               const SteepnessFunction& L, double p, int n, double delta,
                               const SandwichOptions& opt = {});

// kappa = n/beta + n p delta/2 (beta replaced by gamma for DoubleExp)
double sandwich_kappa(const DecayEnvelope& env, double p, int n, double delta);

}  // namespace decaylab
