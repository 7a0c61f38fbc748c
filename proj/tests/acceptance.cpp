// Acceptance suite: runs the checked-in experiment configs and judges each
// criterion against tolerances fixed here, independent of the thresholds
// written in the configs. Prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <string>

#include "decaylab/experiment.hpp"

using decaylab::io::json;
namespace fs = std::filesystem;

namespace {

constexpr double kSteadyMaxError = 1e-6;
constexpr double kSteadySeconds = 1.0;
constexpr double kOdeResidual = 1e-6;
constexpr double kAuditViolation = 1e-12;
constexpr double kAuditSeconds = 10.0;
constexpr double kLyapunovRelTol = 1e-8;
constexpr double kLadderViolation = 1e-8;
constexpr double kLadderCauchy = 1e-3;
constexpr double kSemiconvexFloor = -0.05;
constexpr double kLinftyRatio = 1.0 + 1e-6;
constexpr double kGnSpread = 3.0;
constexpr double kGnDecades = 2.0;
constexpr double kSharpGrowth = 5.0;
constexpr double kSigmaLo = 0.9, kSigmaHi = 1.6;
constexpr double kRatioSlack = 0.1;
constexpr double kSandwichSeconds = 600.0;
const double kTauMax = std::log(1e4 + 1.0);

struct Run {
  decaylab::ExperimentResult result;
  double seconds = 0.0;
  const json& s() const { return result.summary; }
};

fs::path g_out;
std::map<std::string, Run> g_runs;

const Run& run(const std::string& name) {
  auto it = g_runs.find(name);
  if (it != g_runs.end()) return it->second;
  const auto t0 = std::chrono::steady_clock::now();
  Run r;
  r.result = decaylab::run_experiment(fs::path(DECAYLAB_CONFIG_DIR) / (name + ".json"), g_out / name, 1);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.result.exit_code >= decaylab::kExitConfig)
    throw std::runtime_error(name + ": " + r.result.message);
  return g_runs.emplace(name, std::move(r)).first->second;
}

double num(const json& j) { return j.is_number() ? j.get<double>() : NAN; }

// Every check entry in a summary whose name starts with `prefix`.
std::vector<json> checks(const json& s, const std::string& prefix) {
  std::vector<json> out;
  for (const auto& c : s["checks"])
    if (c["name"].get<std::string>().rfind(prefix, 0) == 0) out.push_back(c);
  return out;
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Verdict c1() {
  const auto& r = run("c01_steady_p1");
  double err = 0.0;
  int cases = 0;
  for (const auto& st : r.s()["steady_states"])
    if (st["p"] == 1.0 && st["m"] == 4001) {
      err = std::max(err, num(st["analytic_max_error"]));
      ++cases;
    }
  return {cases == 3 && err <= kSteadyMaxError && r.seconds < kSteadySeconds,
          fmt("n=1,2,3 max |w1-(1-r^2)/(2n)| = %.2e (<= %.0e), %.2f s (< %.0f s)", err, kSteadyMaxError, r.seconds,
              kSteadySeconds)};
}

Verdict c2() {
  const auto& r = run("c02_ode_oracle");
  double worst = 0.0;
  bool exact = true;
  int rows = 0;
  for (const auto& o : r.s()["ode"]) {
    worst = std::max(worst, num(o["residual"]));
    exact = exact && o["y0_exact"].get<bool>() && o["fixed_point"].get<bool>();
    ++rows;
  }
  return {rows == 9 && worst <= kOdeResidual && exact,
          fmt("%d (p, delta) pairs, max FD residual %.2e (<= %.0e), y(0)=delta and y==1 exact: %s", rows, worst,
              kOdeResidual, exact ? "yes" : "no")};
}

Verdict c3() {
  const auto& r = run("c03_lfunction_audit");
  double worst = -INFINITY;
  int n = 0;
  for (const auto& f : r.s()["functions"]) {
    for (const char* k : {"hypothesis", "ratio_bound"}) {
      worst = std::max(worst, num(f[k]["max_violation"]));
      ++n;
    }
    worst = std::max({worst, num(f["convexity"]["weak"]["max_violation"]),
                      num(f["convexity"]["strong"]["max_violation"])});
    n += 2;
  }
  return {n == 20 && worst <= kAuditViolation && r.seconds < kAuditSeconds,
          fmt("5 functions x (H, ratio, weak+strong convexity): worst signed violation %.2e (<= %.0e), %.2f s",
              worst, kAuditViolation, r.seconds)};
}

Verdict c4() {
  const auto& r = run("c04_lyapunov");
  const auto& ly = r.s()["lyapunov"][0];
  const bool ok = ly["nonincreasing"].get<bool>() && num(ly["tolerance"]) == kLyapunovRelTol &&
                  num(ly["worst_increase"]) <= 0.0;
  return {ok, fmt("worst step increase beyond 1e-8(1+v): %.2e", num(ly["worst_increase"]))};
}

Verdict c5() {
  const auto& l = run("c05_ladder").s()["ladder"];
  const double ve = num(l["max_violation_eps"]), vr = num(l["max_violation_R"]);
  const double ce = num(l["cauchy_eps"].back()), cr = num(l["cauchy_R"].back());
  return {ve <= kLadderViolation && vr <= kLadderViolation && ce < kLadderCauchy && cr < kLadderCauchy,
          fmt("violations eps %.1e, R %.1e (<= 1e-8); last-two-level sup diff eps %.3e, R %.3e (< 1e-3)", ve, vr,
              ce, cr)};
}

Verdict c6() {
  bool ok = true;
  std::string d;
  for (const char* name : {"c06_semiconvexity_p1", "c06_semiconvexity_p2"}) {
    const auto& sc = run(name).s()["semiconvexity"];
    const double coarse = num(sc["min_value"]), fine = num(sc["refined"]["min_value"]);
    const bool improves = std::max(0.0, -fine) <= std::max(0.0, -coarse);
    ok = ok && coarse >= kSemiconvexFloor && fine >= kSemiconvexFloor && improves;
    d += fmt("%s min %.4f -> refined %.4f; ", name + 4, coarse, fine);
  }
  return {ok, d + "floor -0.05, negative part nonincreasing under refinement"};
}

Verdict c7() {
  double worst = 0.0;
  int runs = 0;
  for (const auto& [name, r] : g_runs) {
    if (r.s().value("mode", "") != "pde_decay") continue;
    for (const auto& l : r.s().value("linfty", json::array())) {
      worst = std::max(worst, num(l["worst_ratio"]));
      runs += l["runs"].get<int>();
    }
    if (r.s().contains("refined_linfty_q1")) {
      worst = std::max(worst, num(r.s()["refined_linfty_q1"]["worst_ratio"]));
      ++runs;
    }
  }
  return {runs > 0 && worst <= kLinftyRatio,
          fmt("worst ratio %.4f (<= 1+1e-6) over %d (run, q) pairs of the suite", worst, runs)};
}

Verdict c8() {
  const auto& s = run("c08_gn_scan").s();
  const double spread = num(s["scan"]["ratio_spread"]), span = num(s["scan"]["grad_span"]);
  const double growth = num(s["sharpness"]["growth"]);
  const bool mono = s["sharpness"]["monotone_increasing"].get<bool>();
  return {spread <= kGnSpread && std::log10(span) >= kGnDecades && mono && growth >= kSharpGrowth,
          fmt("max/min ratio %.3f (<= 3), grad norm span %.1f decades (>= 2), sharpness growth %.2fx (>= 5), monotone %s",
              spread, std::log10(span), growth, mono ? "yes" : "no")};
}

Verdict c9() {
  const auto& r = run("c09_sandwich");
  const auto& sw = r.s()["sandwich"];
  const double sigma = num(sw["fit"]["sigma"]);
  const auto& up = sw["checks"][0];
  const auto& lo = sw["checks"][1];
  const double ru = num(up["worst_ratio"]), rl = num(lo["worst_ratio"]);
  const bool window = num(up["t0"]) <= 100.0 * (1 + 1e-9) && num(up["t_hi"]) >= 1e4 * (1 - 1e-9);
  const bool ok = sigma >= kSigmaLo && sigma <= kSigmaHi && ru <= 1 + kRatioSlack && rl >= 1 - kRatioSlack &&
                  window && r.seconds <= kSandwichSeconds;
  return {ok, fmt("sigma %.4f in [0.9, 1.6]; on [100, 1e4] v/upper %.3f (<= 1.1), v/lower %.3f (>= 0.9); %.0f s",
                  sigma, ru, rl, r.seconds)};
}

Verdict c10() {
  const auto& subs = run("c09_sandwich").s()["subsolution"];
  double worst = INFINITY, tau_max = 0.0;
  for (const auto& s : subs) {
    worst = std::min(worst, num(s["margin"]));
    tau_max = std::max(tau_max, num(s["tau0"]));
  }
  return {worst >= 0.0 && tau_max >= kTauMax * (1 - 1e-12),
          fmt("min margin %.2e (>= 0) over tau0 up to %.4f = ln(1e4+1)", worst, tau_max)};
}

Verdict c11() {
  const auto& b = run("c09_sandwich").s()["baseline"];
  const bool inc = b["increasing_last_decade"].get<bool>();
  const double ratio = num(b["envelope"]["worst_ratio"]);
  return {inc && ratio <= 1 + kRatioSlack,
          fmt("t u(0,t) increasing over last decade: %s; v/(C t^{-1+0.1}) worst %.3f (<= 1.1, C fixed at t=%.0f)",
              inc ? "yes" : "no", ratio, num(b["envelope"]["t0"]))};
}

Verdict c12() {
  const auto& fns = run("c12_transcendental").s()["functions"];
  bool ok = true, log_type = false, power = false;
  int rows = 0;
  double worst = 0.0;
  for (const auto& f : fns) {
    const auto kind = f["L"]["kind"].get<std::string>();
    log_type = log_type || kind == "LogType";
    power = power || kind == "PowerLaw";
    for (const auto& row : f["transcendental"]["rows"]) {
      const double q = num(row["eta_bruteforce"]) / num(row["eta_bound"]);
      worst = std::max(worst, q);
      ok = ok && q <= 1.0;
      ++rows;
    }
  }
  return {ok && log_type && power && rows == 28,
          fmt("%d (L, delta) rows, delta in 1e-2..1e-8, worst eta_bf/eta_bound %.6f (<= 1)", rows, worst)};
}

}  // namespace

int main(int argc, char** argv) {
  g_out = argc > 1 ? fs::path(argv[1]) : fs::current_path() / "acceptance_runs";
  struct Criterion {
    const char* label;
    std::function<Verdict()> fn;
  };
  // C7 aggregates over every PDE run of the suite, so it is evaluated last
  const Criterion criteria[] = {
      {"C1  steady-state oracle", c1}, {"C2  ODE oracle", c2},         {"C3  L-function audit", c3},
      {"C4  Lyapunov descent", c4},    {"C5  monotone ladders", c5},   {"C6  semi-convexity", c6},
      {"C7  Linf from Lq", c7},        {"C8  GN boundedness", c8},     {"C9  rate sandwich", c9},
      {"C10 sub-solution", c10},       {"C11 baseline", c11},          {"C12 transcendental bound", c12},
  };
  const int order[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 10, 11, 6};
  Verdict verdicts[12];
  for (int k : order) {
    try {
      verdicts[k] = criteria[k].fn();
    } catch (const std::exception& e) {
      verdicts[k] = {false, std::string("error: ") + e.what()};
    }
    std::fprintf(stderr, "evaluated %s\n", criteria[k].label);
  }
  int failed = 0;
  for (int k = 0; k < 12; ++k) {
    failed += !verdicts[k].pass;
    std::printf("%s %s: %s\n", verdicts[k].pass ? "PASS" : "FAIL", criteria[k].label, verdicts[k].detail.c_str());
  }
  std::printf("%d/12 criteria passed\n", 12 - failed);
  return failed == 0 ? 0 : 1;
}
