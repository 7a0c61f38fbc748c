#pragma once
// Steepness functions L encoding fast spatial decay through the
// integrability of L(u0), together with numeric audits of the
// near-multiplicativity hypothesis and the differential conditions the
// decay estimates need.

#include <span>
#include <string>
#include <vector>

namespace decaylab {

enum class SteepnessKind { PowerLaw, LogType, DoubleLogType };

std::string to_string(SteepnessKind kind);
SteepnessKind steepness_kind_from_string(const std::string& name);

// A steepness function.
//
// PowerLaw:      L(s) = s^r on [0, inf).
// LogType:       L(s) = ln^{-kappa}(M/s) on (0, M/2), ln^{-kappa} 2 above,
//                L(0) = 0.  Requires M >= 2, s0 = M/2.
// DoubleLogType: L(s) = ln^{-kappa} ln(M/s) on (0, s0), constant above,
//                L(0) = 0.  Requires M > e and 1 <= s0 < M/e.
//
// `a` and `lambda0` are the constants of L(s) <= (1 + a*lambda) L(s^{1+lambda})
// for lambda in (0, lambda0).
class SteepnessFunction {
 public:
  static SteepnessFunction power_law(double r, double lambda0 = 1.0);
  // `a` follows the chord/tangent rule: kappa for kappa <= 1, otherwise
  // ((1+lambda0)^kappa - 1)/lambda0.
  static SteepnessFunction log_type(double kappa, double M, double lambda0 = 1.0);
  // `a` is the smallest value meeting (1 + ln(1+lambda)/c1)^kappa <= 1 + a*lambda
  // on a dense lambda grid, c1 = ln ln(M/s0).
  static SteepnessFunction double_log_type(double kappa, double M, double s0,
                                           double lambda0 = 1.0);
  // Raw constructor; validates the kind-specific invariants.
  SteepnessFunction(SteepnessKind kind, double r, double kappa, double M, double s0,
                    double a, double lambda0);

  SteepnessKind kind() const noexcept { return kind_; }
  double r() const noexcept { return r_; }
  double kappa() const noexcept { return kappa_; }
  double M() const noexcept { return M_; }
  // Upper end of the smooth branch; +inf for PowerLaw.
  double s0() const noexcept { return s0_; }
  double a() const noexcept { return a_; }
  double lambda0() const noexcept { return lambda0_; }

  // Returns a copy with a different hypothesis constant.
  SteepnessFunction with_a(double a) const;

  double eval(double s) const;
  // Analytic first derivative on the smooth branch 0 < s < s0.
  double deriv1(double s) const;
  // Analytic second derivative on the smooth branch 0 < s < s0.
  double deriv2(double s) const;
  // sup of L; +inf for PowerLaw.
  double sup() const;

  bool operator==(const SteepnessFunction&) const = default;

 private:
  void check_smooth_branch(double s, const char* op) const;

  SteepnessKind kind_;
  double r_ = 1.0;
  double kappa_ = 1.0;
  double M_ = 0.0;
  double s0_ = 0.0;
  double a_ = 0.0;
  double lambda0_ = 1.0;
};

// Smallest a with (1 + ln(1+lambda)/c1)^kappa <= 1 + a*lambda over a dense
// grid of lambda in (0, lambda0] plus the lambda -> 0 limit kappa/c1. Only a
// sufficient value for the hypothesis, not the optimal one.
double double_log_hypothesis_constant(double kappa, double c1, double lambda0);

struct HypothesisReport {
  double max_violation;  // signed; negative means satisfied with margin
  double worst_s;
  double worst_lambda;   // NaN for checks without a lambda parameter
  bool passed;
  double tolerance;
};

inline constexpr double kHypothesisTolerance = 1e-12;

// max over the grid of L(s)/((1+a*lambda) L(s^{1+lambda})) - 1.
HypothesisReport check_hypothesis_H(const SteepnessFunction& L, double lambda0, double a,
                                    std::span<const double> s_grid,
                                    std::span<const double> lambda_grid,
                                    double tolerance = kHypothesisTolerance);

// Checks s L'(s)/L(s) <= a/ln(1/s); violation measured as lhs/rhs - 1.
HypothesisReport check_ratio_bound(const SteepnessFunction& L, double a,
                                   std::span<const double> s_grid,
                                   double tolerance = kHypothesisTolerance);

struct ConvexityReport {
  double threshold;  // (3p+q0-2)/(p+q0)
  HypothesisReport weak;    // s L'' >= -threshold L'
  HypothesisReport strong;  // d/ds (s L') >= 0
  bool passed() const { return weak.passed && strong.passed; }
};

ConvexityReport check_convexity_condition(const SteepnessFunction& L, double p, double q0,
                                          std::span<const double> s_grid,
                                          double tolerance = kHypothesisTolerance);

// Lower-bound consequence L(d s) >= d^{c1} L(s), c1 = a/ln(1/s_ref), checked
// on a grid inside (0, s_ref) with s_ref < min(s0, 1).
HypothesisReport check_dilation_bound(const SteepnessFunction& L, double d, double s_ref,
                                      std::span<const double> s_grid,
                                      double tolerance = kHypothesisTolerance);

struct TranscendentalResult {
  double eta_bruteforce;  // sup{eta : eta^beta L^gamma(eta) <= delta}
  double eta_bound;       // C delta^{1/beta} L^{-gamma/beta}(delta)
  double constant;        // calibrated C
  std::vector<double> calibration_deltas;
};

// sup{eta > 0 : eta^beta L^gamma(eta) <= delta} by bisection on log(eta).
double transcendental_sup(const SteepnessFunction& L, double beta, double gamma, double delta);

// Calibrates C over a geometric delta grid spanning [delta0*1e-12, delta0]
// (`points` nodes) so that the bound dominates the bisection result there.
double calibrate_transcendental_constant(const SteepnessFunction& L, double beta, double gamma,
                                         double delta0, std::vector<double>* grid_out = nullptr,
                                         int points = 49);

TranscendentalResult solve_transcendental(const SteepnessFunction& L, double beta, double gamma,
                                          double delta, double delta0);

// Geometric grid of `count` points in [lo, hi].
std::vector<double> geometric_grid(double lo, double hi, int count);
std::vector<double> linear_grid(double lo, double hi, int count);

}  // namespace decaylab
