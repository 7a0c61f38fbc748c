#pragma once
// Radial solver for u_t = u^p Delta u on balls B_R with Dirichlet value eps,
// initial datum u0R + eps with u0R = u0 * min(1, (R - r)/(0.1 R)).
//
// Each step solves (I - dt (u_old)^p Delta_h) u_new = u_old, a tridiagonal
// system that is an M-matrix for n <= 3.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "decaylab/envelope.hpp"
#include "decaylab/radial.hpp"
#include "decaylab/steepness.hpp"

namespace decaylab {

struct ProblemSpec {
  double p = 1.0;
  int n = 1;
  std::optional<DecayEnvelope> envelope;
  // alternative to the envelope: samples on [0, sampled->grid.R]
  std::optional<RadialProfile> sampled;

  void validate() const;
  double u0(double r) const;
};

struct ApproxParams {
  double R = 20.0;
  double eps = 1e-3;
  int m = 2001;
  double dt_init = 1e-3;
  double dt_max = 1.0;
  double safety = 0.5;

  void validate() const;
  RadialGrid grid(int n) const { return RadialGrid::make(n, R, m); }
};

inline constexpr double kUndershootTolerance = 1e-13;
inline constexpr int kMaxHalvings = 40;

RadialProfile truncated_initial_datum(const ProblemSpec& spec, const ApproxParams& params);

class Stepper {
 public:
  Stepper(const RadialGrid& g, double p, double eps);

  // Advances u by dt in place. Returns false, leaving u untouched, when the
  // solution undershoots eps by more than kUndershootTolerance or is not finite.
  bool step(std::vector<double>& u, double dt);

  // Splits dt into up to 2^kMaxHalvings substeps until each succeeds; returns
  // the number of halvings used. Throws NumericError past the limit.
  int step_with_retry(std::vector<double>& u, double dt);

 private:
  RadialGrid grid_;
  double p_, eps_;
  LaplacianRows rows_;
  std::vector<double> diff_, a_, b_, c_, cp_, dp_, next_;
};

struct Series {
  std::string name;
  std::vector<double> t, v;
};

struct EvolutionRun {
  ProblemSpec spec;
  ApproxParams params;
  RadialGrid grid;
  std::vector<double> times;             // snapshot times; times[0] = 0
  std::vector<RadialProfile> profiles;   // one per snapshot
  std::vector<double> dt_steps;          // accepted step sizes
  std::map<std::string, Series> series;
  long long steps = 0;
  int halvings = 0;
  std::string kernels;
};

struct ObserverSpec {
  bool sup_norm = true;
  bool center_value = true;
  std::vector<double> lq;
  struct Lyapunov {
    SteepnessFunction L;
    double q;
  };
  std::vector<Lyapunov> lyapunov;
};

// Log-spaced snapshot times in [t_lo, t_hi], count >= 2.
std::vector<double> log_snapshots(double t_lo, double t_hi, int count);

// Marches to the last snapshot time. With `schedule`, the given steps are
// replayed instead of choosing dt adaptively (used to keep ladder members on
// one time grid); schedule steps must land on the same snapshot times.
EvolutionRun evolve(const ProblemSpec& spec, const ApproxParams& params,
                    const std::vector<double>& snapshot_times, const ObserverSpec& observers = {},
                    const std::vector<double>* schedule = nullptr);

Series sup_norm_series(const EvolutionRun& run);
Series center_series(const EvolutionRun& run);
Series lq_series(const EvolutionRun& run, double q);

struct LyapunovReport {
  Series series;
  bool nonincreasing = true;
  double worst_increase = 0.0;  // max of v_{k+1} - v_k - tol_k
  double worst_t = 0.0;
};
inline constexpr double kLyapunovStepTolerance = 1e-8;

LyapunovReport lyapunov_series(const EvolutionRun& run, const SteepnessFunction& L, double q);

struct SemiconvexityReport {
  double min_value = 0.0;
  double t_at = 0.0;
  double r_at = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};
SemiconvexityReport semiconvexity_check(const EvolutionRun& run, double p);

struct LinftyReport {
  double worst_ratio = 0.0;
  double worst_t = 0.0;
  bool passed = false;
};
inline constexpr double kLinftySlack = 1e-6;
double linfty_from_lq_constant(int n, double p, double q);
LinftyReport linfty_from_lq_check(const EvolutionRun& run, double q);

struct GridPolicy {
  // fixed spacing h (m = R/h + 1) when h > 0, otherwise fixed node count m
  double h = 0.0;
  int m = 2001;
};

struct LadderPairViolation {
  std::string pair;
  double amount = 0.0;
  double t = 0.0;
  double r = 0.0;
};

struct LadderReport {
  std::vector<double> eps_list, R_list;
  double max_violation_eps = 0.0;
  double max_violation_R = 0.0;
  std::optional<LadderPairViolation> worst;
  bool monotone = true;
  // relative sup-norm differences of successive levels on the Cauchy window,
  // entry k compares level k with level k+1
  std::vector<double> cauchy_eps;
  std::vector<double> cauchy_R;
  double window_lo = 1.0, window_hi = 100.0;
};
inline constexpr double kLadderTolerance = 1e-8;

struct LadderResult {
  std::vector<EvolutionRun> runs;  // index i_eps * R_list.size() + i_R
  std::size_t proxy = 0;           // (min eps, max R)
  LadderReport report;
};

LadderResult minimal_solution_ladder(const ProblemSpec& spec, std::vector<double> eps_list,
                                     std::vector<double> R_list, const GridPolicy& policy,
                                     const ApproxParams& base,
                                     const std::vector<double>& snapshot_times,
                                     const ObserverSpec& observers = {}, int jobs = 1,
                                     double window_lo = 1.0, double window_hi = 100.0);

void write_csv(std::ostream& os, const Series& s);

}  // namespace decaylab
