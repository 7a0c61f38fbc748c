#pragma once
// Gagliardo-Nirenberg type ratios for radial profiles: the classical
// inequality, its L-weighted variant with
//   alpha = 1/q - (n-2)/(2n),
// and the interpolation estimate between L^q and L^{q*}.

#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "decaylab/envelope.hpp"
#include "decaylab/radial.hpp"
#include "decaylab/steepness.hpp"

namespace decaylab {

inline constexpr double kNoBudget = std::numeric_limits<double>::infinity();

struct GNRequest {
  double q = 2.0;
  double q_star = std::numeric_limits<double>::quiet_NaN();  // interpolation mode
  double r = std::numeric_limits<double>::quiet_NaN();       // classical mode
  double theta = std::numeric_limits<double>::quiet_NaN();   // computed when NaN
  double K = kNoBudget;
  std::optional<SteepnessFunction> L;
  // sharpness probes replace alpha by alpha*alpha_multiplier
  double alpha_multiplier = 1.0;
};

double gn_alpha(int n, double q);
// theta solving 1/q = theta/r + (1-theta)(1/2 - 1/n)
double classical_theta(int n, double q, double r);

double classical_gn_ratio(const RadialProfile& phi, const GNRequest& req);

struct GNEvaluation {
  double ratio = 0.0;
  double grad_norm = 0.0;
  double lq_norm = 0.0;
  double budget = 0.0;  // measured integral of L(phi)
  bool tail_flag = false;
};

// Checks the budget before evaluating; a violation throws PreconditionError.
GNEvaluation gn_L_evaluate(const RadialProfile& phi, const GNRequest& req);
double gn_L_ratio(const RadialProfile& phi, const GNRequest& req);

double interpolation_ratio(const RadialProfile& phi, const GNRequest& req);

struct PowerIntegrabilityRow {
  double r;
  double value;
  bool tail_flag;
};
struct PowerIntegrabilityReport {
  SteepnessIntegral base;
  std::vector<PowerIntegrabilityRow> rows;
  // same finiteness verdict for every exponent (and the base)
  bool consistent = true;
  bool all_finite = true;
};

PowerIntegrabilityReport power_integrability_check(const RadialProfile& phi,
                                                   const SteepnessFunction& L,
                                                   const std::vector<double>& r_list);

// Members phi_k(r) = scale_k exp(-Lambda(r/width_k)). Scale and width lists
// are paired index by index; a list of length one is broadcast.
struct FamilySpec {
  DecayEnvelope shape = DecayEnvelope::stretched_exp(1.0, 1.0, 2.0);
  std::vector<double> scales{1.0};
  std::vector<double> widths{1.0};

  std::size_t size() const;
  double scale(std::size_t k) const;
  double width(std::size_t k) const;
  RadialProfile member(const RadialGrid& g, std::size_t k) const;
};

struct FamilyRow {
  std::size_t member_id = 0;
  double scale = 0.0;
  double width = 0.0;
  double grad_norm = 0.0;
  double lq_norm = 0.0;
  double budget = 0.0;
  double ratio = 0.0;
  bool tail_flag = false;
  bool budget_ok = true;
};

struct FamilyScan {
  std::vector<FamilyRow> rows;  // sorted by grad_norm ascending
  double K = 0.0;
  double alpha = 0.0;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  double ratio_spread = 0.0;  // max/min
  double grad_span = 0.0;     // max/min of grad_norm
  double loglog_slope = 0.0;  // least-squares slope of ln ratio vs ln grad_norm
  bool monotone_increasing = false;  // ratio increasing along the sorted rows
  double growth = 0.0;               // last/first ratio along the sorted rows
};

FamilyScan family_scan(const FamilySpec& fam, const GNRequest& req, const RadialGrid& g,
                       int jobs = 1);

void write_csv(std::ostream& os, const FamilyScan& scan);

}  // namespace decaylab
