#pragma once
// Pointwise decay profiles u0(r) = exp(-Lambda(r)).
//   StretchedExp: Lambda(s) = alpha s^beta - ln c0
//   DoubleExp:    Lambda(s) = alpha exp(beta s^gamma) - ln c0
//   Table:        piecewise linear through (s_i, Lambda_i)

#include <string>
#include <vector>

namespace decaylab {

enum class EnvelopeKind { StretchedExp, DoubleExp, Table };

std::string to_string(EnvelopeKind kind);
EnvelopeKind envelope_kind_from_string(const std::string& name);

struct GrowthReport {
  std::vector<double> s;
  std::vector<double> ratio;  // Lambda(s)/ln s
  bool passed = false;
};

class DecayEnvelope {
 public:
  static DecayEnvelope stretched_exp(double c0, double alpha, double beta);
  static DecayEnvelope double_exp(double c0, double alpha, double beta, double gamma);
  static DecayEnvelope table(std::vector<double> s, std::vector<double> lambda);

  EnvelopeKind kind() const noexcept { return kind_; }
  double c0() const noexcept { return c0_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double gamma() const noexcept { return gamma_; }
  const std::vector<double>& table_s() const noexcept { return ts_; }
  const std::vector<double>& table_lambda() const noexcept { return tl_; }

  double Lambda(double s) const;
  // Throws InputError for sigma outside the range of Lambda.
  double inverse(double sigma) const;
  double u0(double r) const;

  // Lambda(s)/ln s sampled on a geometric grid in [s_lo, s_hi]; passes when
  // the ratio is increasing over the upper half of the grid and its final
  // value is at least `growth` times its value at the midpoint.
  GrowthReport superlog_growth(double s_lo, double s_hi, int count = 64,
                               double growth = 2.0) const;

  bool operator==(const DecayEnvelope&) const = default;

 private:
  DecayEnvelope() = default;

  EnvelopeKind kind_ = EnvelopeKind::StretchedExp;
  double c0_ = 1.0, alpha_ = 1.0, beta_ = 1.0, gamma_ = 1.0;
  std::vector<double> ts_, tl_;
};

}  // namespace decaylab
