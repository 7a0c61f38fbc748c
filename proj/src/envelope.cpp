#include "decaylab/envelope.hpp"

#include <algorithm>
#include <cmath>

#include "decaylab/errors.hpp"
#include "decaylab/steepness.hpp"

namespace decaylab {

std::string to_string(EnvelopeKind kind) {
  switch (kind) {
    case EnvelopeKind::StretchedExp: return "StretchedExp";
    case EnvelopeKind::DoubleExp: return "DoubleExp";
    case EnvelopeKind::Table: return "Table";
  }
  return "?";
}

EnvelopeKind envelope_kind_from_string(const std::string& name) {
  if (name == "StretchedExp") return EnvelopeKind::StretchedExp;
  if (name == "DoubleExp") return EnvelopeKind::DoubleExp;
  if (name == "Table") return EnvelopeKind::Table;
  throw InputError("unknown envelope kind '" + name + "'");
}

DecayEnvelope DecayEnvelope::stretched_exp(double c0, double alpha, double beta) {
  if (!(c0 > 0.0) || !(alpha > 0.0) || !(beta > 0.0))
    throw InputError("StretchedExp envelope needs positive c0, alpha, beta");
  DecayEnvelope e;
  e.kind_ = EnvelopeKind::StretchedExp;
  e.c0_ = c0;
  e.alpha_ = alpha;
  e.beta_ = beta;
  return e;
}

DecayEnvelope DecayEnvelope::double_exp(double c0, double alpha, double beta, double gamma) {
  if (!(c0 > 0.0) || !(alpha > 0.0) || !(beta > 0.0) || !(gamma > 0.0))
    throw InputError("DoubleExp envelope needs positive c0, alpha, beta, gamma");
  DecayEnvelope e;
  e.kind_ = EnvelopeKind::DoubleExp;
  e.c0_ = c0;
  e.alpha_ = alpha;
  e.beta_ = beta;
  e.gamma_ = gamma;
  return e;
}

DecayEnvelope DecayEnvelope::table(std::vector<double> s, std::vector<double> lambda) {
  if (s.size() < 2 || s.size() != lambda.size())
    throw InputError("Table envelope needs matching s and Lambda arrays of length >= 2");
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!(s[i] > s[i - 1]) || !(lambda[i] > lambda[i - 1]))
      throw InputError("Table envelope must be strictly increasing in s and Lambda");
  if (!(s[0] >= 0.0)) throw InputError("Table envelope abscissae must be nonnegative");
  DecayEnvelope e;
  e.kind_ = EnvelopeKind::Table;
  e.ts_ = std::move(s);
  e.tl_ = std::move(lambda);
  return e;
}

double DecayEnvelope::Lambda(double s) const {
  if (!(s >= 0.0)) throw InputError("envelope evaluated at negative radius");
  switch (kind_) {
    case EnvelopeKind::StretchedExp:
      return alpha_ * std::pow(s, beta_) - std::log(c0_);
    case EnvelopeKind::DoubleExp:
      return alpha_ * std::exp(beta_ * std::pow(s, gamma_)) - std::log(c0_);
    case EnvelopeKind::Table: {
      if (s < ts_.front() || s > ts_.back()) throw InputError("Table envelope: s outside table");
      auto it = std::upper_bound(ts_.begin(), ts_.end(), s);
      if (it == ts_.end()) return tl_.back();
      const auto j = static_cast<std::size_t>(it - ts_.begin());
      const double w = (s - ts_[j - 1]) / (ts_[j] - ts_[j - 1]);
      return tl_[j - 1] + w * (tl_[j] - tl_[j - 1]);
    }
  }
  return 0.0;
}

double DecayEnvelope::inverse(double sigma) const {
  switch (kind_) {
    case EnvelopeKind::StretchedExp: {
      const double x = (sigma + std::log(c0_)) / alpha_;
      if (!(x >= 0.0)) throw InputError("envelope inverse: sigma below Lambda(0)");
      return std::pow(x, 1.0 / beta_);
    }
    case EnvelopeKind::DoubleExp: {
      const double x = (sigma + std::log(c0_)) / alpha_;
      if (!(x >= 1.0)) throw InputError("envelope inverse: sigma below Lambda(0)");
      return std::pow(std::log(x) / beta_, 1.0 / gamma_);
    }
    case EnvelopeKind::Table: {
      if (sigma < tl_.front() || sigma > tl_.back())
        throw InputError("envelope inverse: sigma outside table range");
      std::size_t lo = 0, hi = tl_.size() - 1;
      while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (tl_[mid] <= sigma) lo = mid;
        else hi = mid;
      }
      const double w = (sigma - tl_[lo]) / (tl_[hi] - tl_[lo]);
      return ts_[lo] + w * (ts_[hi] - ts_[lo]);
    }
  }
  return 0.0;
}

double DecayEnvelope::u0(double r) const { return std::exp(-Lambda(r)); }

GrowthReport DecayEnvelope::superlog_growth(double s_lo, double s_hi, int count,
                                            double growth) const {
  if (!(s_lo > 1.0) || !(s_hi > s_lo) || count < 4)
    throw InputError("superlog_growth: need 1 < s_lo < s_hi and count >= 4");
  GrowthReport rep;
  rep.s = geometric_grid(s_lo, s_hi, count);
  for (double s : rep.s) rep.ratio.push_back(Lambda(s) / std::log(s));
  const std::size_t half = rep.ratio.size() / 2;
  bool increasing = true;
  for (std::size_t i = half + 1; i < rep.ratio.size(); ++i)
    increasing = increasing && rep.ratio[i] > rep.ratio[i - 1];
  rep.passed = increasing && rep.ratio.back() >= growth * rep.ratio[half];
  return rep;
}

}  // namespace decaylab
