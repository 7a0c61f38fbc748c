#include "decaylab/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "decaylab/errors.hpp"

namespace decaylab::io {
namespace {

double num(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw InputError(std::string("field '") + key + "': expected a number");
  return j.at(key).get<double>();
}

double num_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  return num(j, key);
}

// NaN and infinities are not representable in JSON
json finite(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json to_json(const SteepnessFunction& L) {
  json j;
  j["kind"] = to_string(L.kind());
  if (L.kind() == SteepnessKind::PowerLaw) {
    j["r"] = L.r();
  } else {
    j["kappa"] = L.kappa();
    j["M"] = L.M();
    j["s0"] = L.s0();
  }
  j["a"] = L.a();
  j["lambda0"] = L.lambda0();
  return j;
}

SteepnessFunction steepness_from_json(const json& j) {
  if (!j.is_object()) throw InputError("steepness function must be a JSON object");
  if (!j.contains("kind") || !j.at("kind").is_string())
    throw InputError("field 'kind': expected a string");
  const auto kind = steepness_kind_from_string(j.at("kind").get<std::string>());
  const double lambda0 = num_or(j, "lambda0", 1.0);
  SteepnessFunction L = [&] {
    switch (kind) {
      case SteepnessKind::PowerLaw:
        return SteepnessFunction::power_law(num(j, "r"), lambda0);
      case SteepnessKind::LogType: {
        const double M = num(j, "M");
        if (j.contains("s0") && std::abs(num(j, "s0") - M / 2.0) > 1e-12 * M)
          throw InputError("field 's0': LogType requires s0 = M/2");
        return SteepnessFunction::log_type(num(j, "kappa"), M, lambda0);
      }
      case SteepnessKind::DoubleLogType:
        return SteepnessFunction::double_log_type(num(j, "kappa"), num(j, "M"), num(j, "s0"),
                                                  lambda0);
    }
    throw InputError("unreachable steepness kind");
  }();
  if (j.contains("a")) L = L.with_a(num(j, "a"));
  return L;
}

json to_json(const DecayEnvelope& e) {
  json j;
  j["kind"] = to_string(e.kind());
  switch (e.kind()) {
    case EnvelopeKind::StretchedExp:
      j["c0"] = e.c0();
      j["alpha"] = e.alpha();
      j["beta"] = e.beta();
      break;
    case EnvelopeKind::DoubleExp:
      j["c0"] = e.c0();
      j["alpha"] = e.alpha();
      j["beta"] = e.beta();
      j["gamma"] = e.gamma();
      break;
    case EnvelopeKind::Table:
      j["s"] = e.table_s();
      j["Lambda"] = e.table_lambda();
      break;
  }
  return j;
}

DecayEnvelope envelope_from_json(const json& j) {
  if (!j.is_object()) throw InputError("envelope must be a JSON object");
  if (!j.contains("kind") || !j.at("kind").is_string())
    throw InputError("field 'kind': expected a string");
  switch (envelope_kind_from_string(j.at("kind").get<std::string>())) {
    case EnvelopeKind::StretchedExp:
      return DecayEnvelope::stretched_exp(num_or(j, "c0", 1.0), num(j, "alpha"), num(j, "beta"));
    case EnvelopeKind::DoubleExp:
      return DecayEnvelope::double_exp(num_or(j, "c0", 1.0), num(j, "alpha"), num(j, "beta"),
                                       num(j, "gamma"));
    case EnvelopeKind::Table: {
      if (!j.contains("s") || !j.at("s").is_array() || !j.contains("Lambda") ||
          !j.at("Lambda").is_array())
        throw InputError("field 's'/'Lambda': Table envelope needs two numeric arrays");
      return DecayEnvelope::table(j.at("s").get<std::vector<double>>(),
                                  j.at("Lambda").get<std::vector<double>>());
    }
  }
  throw InputError("unreachable envelope kind");
}

json to_json(const HypothesisReport& r) {
  return json{{"max_violation", finite(r.max_violation)},
              {"worst_s", finite(r.worst_s)},
              {"worst_lambda", finite(r.worst_lambda)},
              {"tolerance", r.tolerance},
              {"passed", r.passed}};
}

json to_json(const ConvexityReport& r) {
  return json{{"threshold", r.threshold},
              {"weak", to_json(r.weak)},
              {"strong", to_json(r.strong)},
              {"passed", r.passed()}};
}

json to_json(const TranscendentalResult& r) {
  return json{{"eta_bruteforce", r.eta_bruteforce},
              {"eta_bound", r.eta_bound},
              {"constant", r.constant},
              {"calibration_deltas", r.calibration_deltas}};
}

json to_json(const FamilyScan& s) {
  json rows = json::array();
  for (const auto& r : s.rows)
    rows.push_back({{"member_id", r.member_id},
                    {"scale", r.scale},
                    {"width", r.width},
                    {"grad_norm", r.grad_norm},
                    {"lq_norm", r.lq_norm},
                    {"budget", r.budget},
                    {"ratio", r.ratio},
                    {"tail_flag", r.tail_flag},
                    {"budget_ok", r.budget_ok}});
  return json{{"K", s.K},
              {"alpha", s.alpha},
              {"max_ratio", s.max_ratio},
              {"min_ratio", s.min_ratio},
              {"ratio_spread", finite(s.ratio_spread)},
              {"grad_span", finite(s.grad_span)},
              {"loglog_slope", s.loglog_slope},
              {"monotone_increasing", s.monotone_increasing},
              {"growth", finite(s.growth)},
              {"rows", rows}};
}

json to_json(const RateFit& f) {
  return json{{"model", to_string(f.model)},
              {"p_fit", f.p_fit},
              {"sigma", f.sigma},
              {"C_fit", f.C_fit},
              {"rms_residual", f.rms_residual},
              {"t_window", {f.t_lo, f.t_hi}},
              {"points", f.points}};
}

json to_json(const BoundCheck& b) {
  return json{{"name", b.name},
              {"C", finite(b.C)},
              {"t0", b.t0},
              {"t_hi", b.t_hi},
              {"worst_ratio", finite(b.worst_ratio)},
              {"worst_t", b.worst_t},
              {"slack", b.slack},
              {"passed", b.passed}};
}

json to_json(const BaselineReport& b) {
  return json{{"envelope", to_json(b.envelope)},
              {"increasing_last_decade", b.increasing},
              {"delta", b.delta},
              {"t_window", {b.t_lo, b.t_hi}},
              {"passed", b.passed}};
}

json to_json(const SandwichReport& s) {
  return json{{"checks", json::array({to_json(s.upper), to_json(s.lower)})},
              {"fit", to_json(s.fit)},
              {"sigma_window", {s.sigma_lo, s.sigma_hi}},
              {"sigma_ok", s.sigma_ok},
              {"delta", s.delta},
              {"pass", s.passed}};
}

json to_json(const LyapunovReport& r) {
  return json{{"series", r.series.name},
              {"nonincreasing", r.nonincreasing},
              {"worst_increase", finite(r.worst_increase)},
              {"worst_t", r.worst_t},
              {"tolerance", kLyapunovStepTolerance}};
}

json to_json(const SemiconvexityReport& r) {
  return json{{"min_value", r.min_value},
              {"t_at", r.t_at},
              {"r_at", r.r_at},
              {"tolerance", r.tolerance},
              {"passed", r.passed}};
}

json to_json(const LinftyReport& r) {
  return json{{"worst_ratio", r.worst_ratio},
              {"worst_t", r.worst_t},
              {"slack", kLinftySlack},
              {"passed", r.passed}};
}

json to_json(const LadderReport& r) {
  json j{{"eps", r.eps_list},
         {"R", r.R_list},
         {"max_violation_eps", r.max_violation_eps},
         {"max_violation_R", r.max_violation_R},
         {"tolerance", kLadderTolerance},
         {"monotone", r.monotone},
         {"cauchy_window", {r.window_lo, r.window_hi}},
         {"cauchy_eps", r.cauchy_eps},
         {"cauchy_R", r.cauchy_R}};
  if (r.worst)
    j["worst"] = {{"pair", r.worst->pair}, {"amount", r.worst->amount}, {"t", r.worst->t},
                  {"r", r.worst->r}};
  return j;
}

json to_json(const SubsolutionReport& r) {
  return json{{"tau0", r.tau0},
              {"R0", r.R0},
              {"delta0", r.delta0},
              {"margin", finite(r.margin)},
              {"margin_tau", r.margin_tau},
              {"center_margin", r.center_margin},
              {"snapshots_checked", r.snapshots_checked},
              {"resolution_warning", r.resolution_warning},
              {"passed", r.passed}};
}

json to_json(const SteadyState& s) {
  return json{{"p", s.p},
              {"n", s.n},
              {"m", s.w1.grid.m},
              {"center", s.center},
              {"residual", s.residual},
              {"boundary_value", s.boundary_value},
              {"bisection_steps", s.bisection_steps},
              {"bracket_collapsed", s.bracket_collapsed},
              {"converged", s.converged}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& contents) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InputError("cannot write " + p.string());
  out << contents;
  if (!out) throw InputError("write failed for " + p.string());
}

CsvTable read_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == ',') {
        out.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur += c;
      }
    }
    out.push_back(cur);
    return out;
  };
  if (!std::getline(in, line) || line.empty()) {
    t.error = "missing header";
    return t;
  }
  t.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != t.header.size()) {
      t.error = "line " + std::to_string(lineno) + ": expected " +
                std::to_string(t.header.size()) + " fields, found " + std::to_string(fields.size());
      return t;
    }
    std::vector<double> row;
    for (const auto& f : fields) {
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (f.empty() || end != f.c_str() + f.size()) {
        t.error = "line " + std::to_string(lineno) + ": non-numeric field '" + f + "'";
        return t;
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace decaylab::io
