#include "decaylab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "decaylab/comparison.hpp"
#include "decaylab/gn.hpp"
#include "decaylab/pde.hpp"
#include "decaylab/rates.hpp"
#include "decaylab/steepness.hpp"

namespace decaylab {
namespace fs = std::filesystem;
using io::json;

namespace {

// ---------------------------------------------------------------- config --

struct Source {
  std::string text;

  int line_of(const std::vector<std::string>& path) const {
    std::size_t pos = 0;
    for (const auto& key : path) {
      if (key.empty() || key[0] == '[') continue;
      const auto found = text.find("\"" + key + "\"", pos);
      if (found == std::string::npos) break;
      pos = found;
    }
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
  }
};

class Node {
 public:
  Node(const json& j, std::vector<std::string> path, const Source& src)
      : j_(&j), path_(std::move(path)), src_(&src) {}

  std::string field(const std::string& key = "") const {
    std::string s;
    for (const auto& p : path_) {
      if (p[0] == '[') s += p;
      else s += (s.empty() ? "" : ".") + p;
    }
    if (!key.empty()) s += (s.empty() ? "" : ".") + key;
    return s.empty() ? "<root>" : s;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    auto p = path_;
    if (!key.empty()) p.push_back(key);
    const int line = src_->line_of(p);
    throw ConfigError(field(key), line,
                      "line " + std::to_string(line) + ", field '" + field(key) + "': " + msg);
  }

  const json& raw() const { return *j_; }
  bool has(const std::string& k) const { return j_->is_object() && j_->contains(k); }

  Node at(const std::string& k) const {
    if (!j_->is_object()) fail("", "expected an object");
    if (!j_->contains(k)) fail(k, "required field missing");
    auto p = path_;
    p.push_back(k);
    return Node(j_->at(k), p, *src_);
  }
  Node index(std::size_t i) const {
    auto p = path_;
    p.push_back("[" + std::to_string(i) + "]");
    return Node(j_->at(i), p, *src_);
  }
  std::size_t size() const { return j_->is_array() ? j_->size() : 0; }
  bool is_array() const { return j_->is_array(); }

  double number(const std::string& k) const {
    const Node n = at(k);
    if (!n.raw().is_number()) fail(k, "expected a number");
    const double v = n.raw().get<double>();
    if (!std::isfinite(v)) fail(k, "expected a finite number");
    return v;
  }
  double number(const std::string& k, double fallback) const { return has(k) ? number(k) : fallback; }
  int integer(const std::string& k) const {
    const Node n = at(k);
    if (!n.raw().is_number_integer()) fail(k, "expected an integer");
    return n.raw().get<int>();
  }
  int integer(const std::string& k, int fallback) const { return has(k) ? integer(k) : fallback; }
  std::string string(const std::string& k) const {
    const Node n = at(k);
    if (!n.raw().is_string()) fail(k, "expected a string");
    return n.raw().get<std::string>();
  }
  bool boolean(const std::string& k, bool fallback) const {
    if (!has(k)) return fallback;
    const Node n = at(k);
    if (!n.raw().is_boolean()) fail(k, "expected true or false");
    return n.raw().get<bool>();
  }
  std::vector<double> numbers(const std::string& k) const {
    const Node n = at(k);
    if (!n.raw().is_array() || n.raw().empty()) fail(k, "expected a non-empty array of numbers");
    std::vector<double> v;
    for (const auto& e : n.raw()) {
      if (!e.is_number()) fail(k, "expected a non-empty array of numbers");
      v.push_back(e.get<double>());
    }
    return v;
  }
  std::vector<double> numbers_or_scalar(const std::string& k) const {
    if (has(k) && at(k).raw().is_number()) return {number(k)};
    return numbers(k);
  }

  // Parses a value with a library factory, reporting its errors at this node.
  template <class F>
  auto parse(F&& f) const {
    try {
      return f(*j_);
    } catch (const InputError& e) {
      if (dynamic_cast<const ConfigError*>(&e)) throw;
      fail("", e.what());
    }
  }

 private:
  const json* j_;
  std::vector<std::string> path_;
  const Source* src_;
};

// ---------------------------------------------------------------- output --

struct Artifacts {
  fs::path dir;
  std::vector<std::string> files;

  void write(const std::string& name, const std::string& contents) {
    io::write_file(dir / name, contents);
    if (std::find(files.begin(), files.end(), name) == files.end()) files.push_back(name);
  }
  template <class T>
  void csv(const std::string& name, const T& value) {
    std::ostringstream os;
    write_csv(os, value);
    write(name, os.str());
  }
};

std::string plot_script(const std::string& csv, const std::string& title, bool logx, bool logy,
                        int ycol = 2, int xcol = 1) {
  std::ostringstream os;
  os << "set datafile separator ','\n"
     << "set key autotitle columnhead\n";
  if (logx) os << "set logscale x\n";
  if (logy) os << "set logscale y\n";
  os << "set title '" << title << "'\n"
     << "set terminal pngcairo size 900,600\n"
     << "set output '" << fs::path(csv).stem().string() << ".png'\n"
     << "plot '" << csv << "' using " << xcol << ":" << ycol << " with linespoints\n";
  return os.str();
}

struct ModeResult {
  json summary = json::object();
  bool pass = true;
};

void check(ModeResult& r, json& checks, const std::string& name, bool ok, json detail) {
  detail["name"] = name;
  detail["pass"] = ok;
  checks.push_back(std::move(detail));
  r.pass = r.pass && ok;
}

// ---------------------------------------------------------- steady state --

ModeResult run_steady(const Node& root, Artifacts& art) {
  ModeResult res;
  json checks = json::array();
  const Node st = root.at("steady");
  const int m = st.integer("m", 4001);
  const double residual_max = st.number("residual_max", 1e-8);
  const double analytic_max = st.number("analytic_max_error", 1e-6);
  std::vector<std::pair<double, int>> cases;
  if (st.has("cases")) {
    const Node cs = st.at("cases");
    if (!cs.is_array() || cs.size() == 0) st.fail("cases", "expected a non-empty array");
    for (std::size_t i = 0; i < cs.size(); ++i) cases.emplace_back(cs.index(i).number("p"), cs.index(i).integer("n"));
  } else {
    cases.emplace_back(st.number("p"), st.integer("n"));
  }
  json out = json::array();
  for (auto [p, n] : cases) {
    const auto s = st.parse([&](const json&) { return solve_steady_state(p, n, m); });
    char name[64];
    std::snprintf(name, sizeof name, "steady_p%g_n%d.csv", p, n);
    std::ostringstream os;
    write_csv(os, s.w1, "w1");
    art.write(name, os.str());
    art.write(fs::path(name).stem().string() + ".gp", plot_script(name, "steady state w1", false, false));
    json entry = io::to_json(s);
    entry["csv"] = name;
    check(res, checks, std::string(name) + ":residual", s.residual <= residual_max,
          {{"value", s.residual}, {"max", residual_max}});
    if (p == 1.0) {
      double err = 0.0;
      for (int i = 0; i < s.w1.grid.m; ++i) {
        const double r = s.w1.grid.r(i);
        err = std::max(err, std::abs(s.w1.values[static_cast<std::size_t>(i)] - (1 - r * r) / (2.0 * n)));
      }
      entry["analytic_max_error"] = err;
      check(res, checks, std::string(name) + ":analytic", err <= analytic_max,
            {{"value", err}, {"max", analytic_max}});
    }
    out.push_back(entry);
  }
  res.summary["steady_states"] = out;
  if (cases.size() == 1) res.summary["center_value"] = out[0]["center"];

  if (root.has("ode")) {
    const Node ode = root.at("ode");
    const auto ps = ode.numbers("p");
    const auto deltas = ode.numbers("delta");
    const double tau_max = ode.number("tau_max", 20.0);
    const int count = ode.integer("count", 2001);
    const double rmax = ode.number("residual_max", 1e-6);
    const auto grid = linear_grid(0.0, tau_max, count);
    json rows = json::array();
    std::ostringstream os;
    os << "p,delta,residual\n";
    for (double p : ps)
      for (double d : deltas) {
        const double r = ode.parse([&](const json&) { return y_residual(grid, d, p); });
        const bool initial = y_exact(0.0, d, p) == d;
        bool fixed = true;
        if (d == 1.0)
          for (double tau : grid) fixed = fixed && y_exact(tau, d, p) == 1.0;
        char line[96];
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", p, d, r);
        os << line;
        rows.push_back({{"p", p}, {"delta", d}, {"residual", r}, {"y0_exact", initial}, {"fixed_point", fixed}});
        check(res, checks, "ode_p" + std::to_string(p) + "_delta" + std::to_string(d),
              r <= rmax && initial && fixed, {{"residual", r}, {"max", rmax}});
      }
    art.write("ode_residuals.csv", os.str());
    res.summary["ode"] = rows;
  }
  res.summary["checks"] = checks;
  return res;
}

// ------------------------------------------------------------ L audit ----

ModeResult run_audit(const Node& root, Artifacts& art) {
  ModeResult res;
  json checks = json::array();
  const Node au = root.at("audit");
  const Node fns = au.at("functions");
  if (!fns.is_array() || fns.size() == 0) au.fail("functions", "expected a non-empty array");
  const double p = au.number("p", 1.0);
  const double q0 = au.number("q0", 1.0);
  const double s_lo = au.number("s_lo", 1e-100);
  const int s_count = au.integer("s_count", 400);
  const int l_count = au.integer("lambda_count", 100);
  const double tol = au.number("tolerance", kHypothesisTolerance);
  std::set<std::string> enabled{"hypothesis", "ratio", "convexity", "dilation", "transcendental"};
  if (au.has("checks")) {
    enabled.clear();
    const Node c = au.at("checks");
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!c.index(i).raw().is_string()) au.fail("checks", "expected an array of check names");
      enabled.insert(c.index(i).raw().get<std::string>());
    }
  }
  json out = json::array();
  for (std::size_t k = 0; k < fns.size(); ++k) {
    const Node fn = fns.index(k);
    const auto L = fn.parse(io::steepness_from_json);
    const std::string tag = "L" + std::to_string(k) + "_" + to_string(L.kind());
    json entry{{"L", io::to_json(L)}};
    const double top = std::isfinite(L.s0()) ? L.s0() : 1e3;
    const double unit = std::min(L.s0(), 1.0);
    const auto s_grid = geometric_grid(s_lo, top * (1.0 - 1e-9), s_count);
    const auto r_grid = geometric_grid(s_lo, unit * (1.0 - 1e-3), s_count);
    std::vector<double> l_grid;
    for (int i = 1; i <= l_count; ++i) l_grid.push_back(L.lambda0() * i / (l_count + 1.0));
    if (enabled.count("hypothesis")) {
      const auto r = check_hypothesis_H(L, L.lambda0(), L.a(), s_grid, l_grid, tol);
      entry["hypothesis"] = io::to_json(r);
      check(res, checks, tag + ":hypothesis", r.passed, io::to_json(r));
    }
    if (enabled.count("ratio")) {
      const auto r = check_ratio_bound(L, L.a(), r_grid, tol);
      entry["ratio_bound"] = io::to_json(r);
      check(res, checks, tag + ":ratio_bound", r.passed, io::to_json(r));
    }
    if (enabled.count("convexity")) {
      const auto r = fn.parse([&](const json&) { return check_convexity_condition(L, p, q0, s_grid, tol); });
      entry["convexity"] = io::to_json(r);
      check(res, checks, tag + ":convexity", r.passed(), io::to_json(r));
    }
    if (enabled.count("dilation")) {
      const double s_ref = 0.5 * unit;
      const auto grid = geometric_grid(s_lo, s_ref * (1.0 - 1e-9), s_count);
      json dil = json::array();
      for (double d : {0.5, 0.1}) {
        const auto r = check_dilation_bound(L, d, s_ref, grid, tol);
        json j = io::to_json(r);
        j["d"] = d;
        dil.push_back(j);
        check(res, checks, tag + ":dilation_" + std::to_string(d), r.passed, j);
      }
      entry["dilation"] = dil;
    }
    if (enabled.count("transcendental") && au.has("transcendental")) {
      const Node tr = au.at("transcendental");
      const double beta = tr.number("beta"), gamma = tr.number("gamma"), d0 = tr.number("delta0");
      const auto deltas = tr.numbers("deltas");
      std::ostringstream os;
      os << "delta,eta_bruteforce,eta_bound\n";
      json rows = json::array();
      bool ok = true;
      double C = 0.0;
      for (double d : deltas) {
        const auto r = tr.parse([&](const json&) { return solve_transcendental(L, beta, gamma, d, d0); });
        C = r.constant;
        const bool row_ok = r.eta_bruteforce <= r.eta_bound * (1.0 + 1e-12);
        ok = ok && row_ok;
        rows.push_back({{"delta", d}, {"eta_bruteforce", r.eta_bruteforce}, {"eta_bound", r.eta_bound}, {"holds", row_ok}});
        char line[96];
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", d, r.eta_bruteforce, r.eta_bound);
        os << line;
      }
      art.write(tag + "_transcendental.csv", os.str());
      entry["transcendental"] = {{"constant", C}, {"rows", rows}};
      check(res, checks, tag + ":transcendental", ok, {{"constant", C}});
    }
    out.push_back(entry);
  }
  res.summary["functions"] = out;
  res.summary["checks"] = checks;
  return res;
}

// --------------------------------------------------------------- GN scan --

ModeResult run_gn(const Node& root, Artifacts& art, int jobs) {
  ModeResult res;
  json checks = json::array();
  const Node gn = root.at("gn");
  const int n = gn.integer("n");
  const auto grid = gn.parse([&](const json&) { return RadialGrid::make(n, gn.number("R"), gn.integer("m")); });
  GNRequest req;
  req.q = gn.number("q");
  req.L = gn.at("L").parse(io::steepness_from_json);
  if (gn.has("K")) req.K = gn.number("K");
  const Node fam_cfg = gn.at("family");
  FamilySpec fam;
  fam.shape = fam_cfg.at("shape").parse(io::envelope_from_json);
  fam.scales = fam_cfg.numbers("scales");
  fam.widths = fam_cfg.numbers("widths");
  const auto scan = gn.parse([&](const json&) { return family_scan(fam, req, grid, jobs); });
  art.csv("scan.csv", scan);
  art.write("scan.gp", plot_script("scan.csv", "GN ratio vs gradient norm", true, true, 6, 3));
  res.summary["scan"] = io::to_json(scan);
  const bool in_budget = std::all_of(scan.rows.begin(), scan.rows.end(), [](const FamilyRow& r) { return r.budget_ok; });
  check(res, checks, "budget", in_budget, {{"K", scan.K}});
  const double max_spread = gn.number("max_spread", 3.0);
  const double min_decades = gn.number("min_grad_decades", 2.0);
  check(res, checks, "ratio_bounded", scan.ratio_spread <= max_spread,
        {{"spread", scan.ratio_spread}, {"max", max_spread}});
  check(res, checks, "grad_span", std::log10(scan.grad_span) >= min_decades,
        {{"decades", std::log10(scan.grad_span)}, {"min", min_decades}});
  if (gn.has("sharpness_multiplier")) {
    GNRequest sharp = req;
    sharp.alpha_multiplier = gn.number("sharpness_multiplier");
    const auto s2 = gn.parse([&](const json&) { return family_scan(fam, sharp, grid, jobs); });
    art.csv("sharpness.csv", s2);
    art.write("sharpness.gp", plot_script("sharpness.csv", "sharpness probe", true, true, 6, 3));
    res.summary["sharpness"] = io::to_json(s2);
    const double min_growth = gn.number("min_growth", 5.0);
    check(res, checks, "sharpness_divergence", s2.monotone_increasing && s2.growth >= min_growth,
          {{"growth", s2.growth}, {"monotone", s2.monotone_increasing}, {"min", min_growth}});
  }
  res.summary["checks"] = checks;
  return res;
}

// ------------------------------------------------------------------ PDE ---

ProblemSpec parse_problem(const Node& root) {
  const Node pr = root.at("problem");
  ProblemSpec spec;
  spec.p = pr.number("p");
  spec.n = pr.integer("n");
  const Node u0 = pr.at("u0");
  if (u0.has("kind") && u0.at("kind").raw() == "Sampled") {
    const auto values = u0.numbers("values");
    if (values.size() < 3) u0.fail("values", "need at least 3 samples");
    const auto g = u0.parse([&](const json&) {
      return RadialGrid::make(spec.n, u0.number("R"), static_cast<int>(values.size()));
    });
    spec.sampled = RadialProfile{g, values};
  } else {
    spec.envelope = u0.parse(io::envelope_from_json);
  }
  pr.parse([&](const json&) {
    spec.validate();
    return 0;
  });
  return spec;
}

ApproxParams parse_approx(const Node& root) {
  const Node ap = root.at("approx");
  ApproxParams a;
  a.R = ap.number("R", a.R);
  a.m = ap.integer("m", a.m);
  a.eps = ap.number("eps", a.eps);
  a.dt_init = ap.number("dt_init", a.dt_init);
  a.dt_max = ap.number("dt_max", a.dt_max);
  a.safety = ap.number("safety", a.safety);
  ap.parse([&](const json&) {
    a.validate();
    return 0;
  });
  return a;
}

std::vector<double> parse_snapshots(const Node& root) {
  const Node sn = root.at("snapshots");
  std::vector<double> t;
  if (sn.has("times")) t = sn.numbers("times");
  else t = sn.parse([&](const json&) { return log_snapshots(sn.number("t_lo"), sn.number("t_hi"), sn.integer("count")); });
  for (std::size_t k = 0; k < t.size(); ++k)
    if (!(t[k] > (k ? t[k - 1] : 0.0))) sn.fail("times", "snapshot times must be positive and increasing");
  return t;
}

void write_snapshots(Artifacts& art, const EvolutionRun& run, const std::string& name) {
  const std::size_t total = run.profiles.size();
  std::vector<std::size_t> pick;
  const std::size_t want = std::min<std::size_t>(total, 9);
  for (std::size_t j = 0; j < want; ++j)
    pick.push_back(want == 1 ? 0 : j * (total - 1) / (want - 1));
  std::ostringstream os;
  os << "r";
  char buf[64];
  for (std::size_t k : pick) {
    std::snprintf(buf, sizeof buf, ",u_t%.6g", run.times[k]);
    os << buf;
  }
  os << '\n';
  for (int i = 0; i < run.grid.m; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", i == run.grid.m - 1 ? run.grid.R : run.grid.r(i));
    os << buf;
    for (std::size_t k : pick) {
      std::snprintf(buf, sizeof buf, ",%.17g", run.profiles[k].values[static_cast<std::size_t>(i)]);
      os << buf;
    }
    os << '\n';
  }
  art.write(name, os.str());
}

void write_run_series(Artifacts& art, const EvolutionRun& run, const std::string& prefix) {
  for (const auto& [name, s] : run.series) {
    const std::string file = prefix + name + ".csv";
    art.csv(file, s);
    art.write(prefix + name + ".gp", plot_script(file, name, true, true));
  }
}

struct PdeChecks {
  std::vector<ObserverSpec::Lyapunov> lyapunov;
  std::vector<double> linfty_q;
};

void run_pde_checks(const Node& root, const EvolutionRun& run, ModeResult& res, json& checks,
                    Artifacts& art, const std::vector<const EvolutionRun*>& all_runs) {
  if (!root.has("checks")) return;
  const Node ck = root.at("checks");
  const double p = run.spec.p;
  const int n = run.grid.n;
  if (ck.has("lyapunov")) {
    const Node ly = ck.at("lyapunov");
    json out = json::array();
    for (std::size_t i = 0; i < ly.size(); ++i) {
      const auto L = ly.index(i).at("L").parse(io::steepness_from_json);
      const double q = ly.index(i).number("q");
      const auto rep = ly.index(i).parse([&](const json&) { return lyapunov_series(run, L, q); });
      art.csv(rep.series.name + ".csv", rep.series);
      art.write(rep.series.name + ".gp", plot_script(rep.series.name + ".csv", "Lyapunov functional", true, false));
      out.push_back(io::to_json(rep));
      check(res, checks, "lyapunov_" + std::to_string(i), rep.nonincreasing, io::to_json(rep));
    }
    res.summary["lyapunov"] = out;
  }
  if (ck.has("semiconvexity")) {
    const Node sc = ck.at("semiconvexity");
    const auto rep = semiconvexity_check(run, p);
    const double floor = sc.number("min", -rep.tolerance);
    json j = io::to_json(rep);
    j["floor"] = floor;
    bool ok = rep.min_value >= floor;
    if (sc.has("refine")) {
      const Node rf = sc.at("refine");
      ApproxParams fine = run.params;
      fine.m = rf.integer("m", 2 * run.params.m - 1);
      fine.safety = rf.number("safety", run.params.safety / 2.0);
      const auto fine_run = rf.parse([&](const json&) {
        return evolve(run.spec, fine, std::vector<double>(run.times.begin() + 1, run.times.end()));
      });
      const auto frep = semiconvexity_check(fine_run, p);
      const double neg_coarse = std::max(0.0, -rep.min_value);
      const double neg_fine = std::max(0.0, -frep.min_value);
      j["refined"] = io::to_json(frep);
      j["refined_m"] = fine.m;
      j["refined_safety"] = fine.safety;
      j["improves"] = neg_fine <= neg_coarse;
      ok = ok && frep.min_value >= floor && neg_fine <= neg_coarse;
      const auto lr = linfty_from_lq_check(fine_run, 1.0);
      res.summary["refined_linfty_q1"] = io::to_json(lr);
      check(res, checks, "linfty_refined_q1", lr.passed, io::to_json(lr));
    }
    res.summary["semiconvexity"] = j;
    check(res, checks, "semiconvexity", ok, j);
  }
  if (ck.has("linfty_q")) {
    json out = json::array();
    for (double q : ck.numbers("linfty_q")) {
      double worst = 0.0;
      for (const auto* r : all_runs) {
        const auto rep = linfty_from_lq_check(*r, q);
        worst = std::max(worst, rep.worst_ratio);
      }
      const bool ok = worst <= 1.0 + kLinftySlack;
      out.push_back({{"q", q}, {"worst_ratio", worst}, {"runs", all_runs.size()}, {"passed", ok}});
      check(res, checks, "linfty_q" + std::to_string(q), ok, {{"worst_ratio", worst}});
    }
    res.summary["linfty"] = out;
  }
  if (ck.has("fit")) {
    const Node f = ck.at("fit");
    const auto model = f.parse([&](const json&) { return rate_model_from_string(f.string("model")); });
    const auto fit = f.parse([&](const json&) {
      return fit_decay(sup_norm_series(run), p, model, f.number("t_lo", kDefaultFitStart), f.number("t_hi", 1e300));
    });
    res.summary["fit"] = io::to_json(fit);
  }
  if (ck.has("sandwich")) {
    const Node sw = ck.at("sandwich");
    if (!run.spec.envelope) sw.fail("", "sandwich check needs a closed-form u0 envelope");
    const auto L = sw.at("L").parse(io::steepness_from_json);
    SandwichOptions opt;
    opt.t_lo = sw.number("t_lo", opt.t_lo);
    opt.t_hi = sw.number("t_hi", opt.t_hi);
    opt.t_calibrate = sw.number("t_calibrate", opt.t_calibrate);
    const double delta = sw.number("delta");
    const auto rep = sw.parse([&](const json&) {
      return sandwich_report(run, *run.spec.envelope, L, p, n, delta, opt);
    });
    res.summary["sandwich"] = io::to_json(rep);
    check(res, checks, "sandwich", rep.passed, io::to_json(rep));
  }
  if (ck.has("baseline")) {
    const Node bl = ck.at("baseline");
    const auto rep = bl.parse([&](const json&) {
      return baseline_check(center_series(run), p, bl.number("delta", 0.1), bl.number("t_lo", kDefaultFitStart),
                            bl.number("t_hi", 1e300));
    });
    res.summary["baseline"] = io::to_json(rep);
    check(res, checks, "baseline", rep.passed, io::to_json(rep));
  }
  if (ck.has("subsolution")) {
    const Node ss = ck.at("subsolution");
    if (!run.spec.envelope && !ss.has("Lambda")) ss.fail("", "subsolution check needs an envelope");
    const DecayEnvelope env = ss.has("Lambda") ? ss.at("Lambda").parse(io::envelope_from_json) : *run.spec.envelope;
    const auto steady = ss.parse([&](const json&) { return solve_steady_state(p, n, ss.integer("steady_m", 4001)); });
    json out = json::array();
    bool ok = true;
    for (double tau0 : ss.numbers("tau0")) {
      auto spec = ss.parse([&](const json&) { return SubsolutionSpec::make(env, p, tau0); });
      if (ss.has("c1")) spec.c1 = ss.number("c1");
      const auto rep = ss.parse([&](const json&) { return subsolution_check(run, spec, steady); });
      out.push_back(io::to_json(rep));
      ok = ok && rep.passed;
    }
    res.summary["subsolution"] = out;
    check(res, checks, "subsolution", ok, {{"tau0_count", out.size()}});
  }
}

ModeResult run_pde(const Node& root, Artifacts& art, int jobs) {
  ModeResult res;
  json checks = json::array();
  const auto spec = parse_problem(root);
  const auto approx = parse_approx(root);
  const auto snaps = parse_snapshots(root);
  ObserverSpec obs;
  if (root.has("observers")) {
    const Node o = root.at("observers");
    if (o.has("lq")) obs.lq = o.numbers("lq");
  }
  if (root.has("ladder")) {
    const Node ld = root.at("ladder");
    GridPolicy gp;
    gp.h = ld.number("h", 0.0);
    gp.m = ld.integer("m", approx.m);
    std::vector<double> win{1.0, 100.0};
    if (ld.has("cauchy_window")) win = ld.numbers("cauchy_window");
    if (win.size() != 2) ld.fail("cauchy_window", "expected [t_lo, t_hi]");
    const auto lad = ld.parse([&](const json&) {
      return minimal_solution_ladder(spec, ld.numbers("eps"), ld.numbers("R"), gp, approx, snaps, obs,
                                     jobs, win[0], win[1]);
    });
    art.write("ladder.json", io::dump(io::to_json(lad.report)));
    res.summary["ladder"] = io::to_json(lad.report);
    check(res, checks, "ladder_monotone", lad.report.monotone,
          {{"max_violation_eps", lad.report.max_violation_eps}, {"max_violation_R", lad.report.max_violation_R}});
    const double cmax = ld.number("cauchy_max", 1e-3);
    const double ce = lad.report.cauchy_eps.empty() ? 0.0 : lad.report.cauchy_eps.back();
    const double cr = lad.report.cauchy_R.empty() ? 0.0 : lad.report.cauchy_R.back();
    check(res, checks, "ladder_cauchy_eps", ce < cmax, {{"value", ce}, {"max", cmax}});
    check(res, checks, "ladder_cauchy_R", cr < cmax, {{"value", cr}, {"max", cmax}});
    const auto& proxy = lad.runs[lad.proxy];
    for (std::size_t k = 0; k < lad.runs.size(); ++k) {
      const auto& r = lad.runs[k];
      char prefix[64];
      std::snprintf(prefix, sizeof prefix, "eps%g_R%g_", r.params.eps, r.params.R);
      art.csv(std::string(prefix) + "sup_norm.csv", sup_norm_series(r));
    }
    write_run_series(art, proxy, "");
    write_snapshots(art, proxy, "snapshots.csv");
    std::vector<const EvolutionRun*> all;
    for (const auto& r : lad.runs) all.push_back(&r);
    res.summary["proxy"] = {{"eps", proxy.params.eps}, {"R", proxy.params.R}, {"steps", proxy.steps}};
    run_pde_checks(root, proxy, res, checks, art, all);
  } else {
    const auto run = root.parse([&](const json&) { return evolve(spec, approx, snaps, obs); });
    write_run_series(art, run, "");
    write_snapshots(art, run, "snapshots.csv");
    res.summary["run"] = {{"steps", run.steps}, {"halvings", run.halvings}, {"m", run.grid.m},
                          {"R", run.params.R}, {"eps", run.params.eps}};
    run_pde_checks(root, run, res, checks, art, {&run});
  }
  res.summary["checks"] = checks;
  return res;
}

// ---------------------------------------------------------- lower bound --

ModeResult run_lower(const Node& root, Artifacts& art) {
  ModeResult res;
  json checks = json::array();
  const auto spec = parse_problem(root);
  const auto approx = parse_approx(root);
  const auto snaps = parse_snapshots(root);
  const Node lb = root.at("lower_bound");
  const DecayEnvelope env = lb.has("Lambda") ? lb.at("Lambda").parse(io::envelope_from_json)
                                             : (spec.envelope ? *spec.envelope
                                                              : (lb.fail("Lambda", "required for sampled u0"), *spec.envelope));
  const double p = spec.p;
  const double c1 = lb.number("c1", 1.0 / (2.0 * p));
  const auto run = root.parse([&](const json&) { return evolve(spec, approx, snaps); });
  const auto steady = lb.parse([&](const json&) { return solve_steady_state(p, spec.n, lb.integer("steady_m", 4001)); });
  write_run_series(art, run, "");
  {
    std::ostringstream os;
    write_csv(os, steady.w1, "w1");
    art.write("steady_w1.csv", os.str());
  }
  const auto zf = to_z_frame(run, p);
  art.csv("z_sup_norm.csv", zf.sup_norm);
  art.write("z_sup_norm.gp", plot_script("z_sup_norm.csv", "z sup norm vs tau", false, true));

  json subs = json::array();
  bool ok = true;
  for (double tau0 : lb.numbers("tau0")) {
    auto ss = lb.parse([&](const json&) { return SubsolutionSpec::make(env, p, tau0); });
    ss.c1 = c1;
    const auto rep = lb.parse([&](const json&) { return subsolution_check(run, ss, steady); });
    subs.push_back(io::to_json(rep));
    ok = ok && rep.passed;
  }
  res.summary["subsolution"] = subs;
  check(res, checks, "subsolution", ok, {{"tau0_count", subs.size()}});

  const Series sup = sup_norm_series(run);
  Series tail;
  for (std::size_t k = 0; k < sup.t.size(); ++k)
    if (sup.t[k] > 1.0) {
      tail.t.push_back(sup.t[k]);
      tail.v.push_back(sup.v[k]);
    }
  if (tail.t.size() >= 2) {
    const Series curve = lb.parse([&](const json&) { return lower_bound_curve(env, p, c1, 1.0, tail.t); });
    const double t0 = lb.number("t_calibrate", tail.t.front());
    const auto bc = lb.parse([&](const json&) { return lower_bound_check(tail, curve, t0, lb.number("t_hi", 1e300)); });
    Series scaled = curve;
    for (double& v : scaled.v) v *= bc.C;
    scaled.name = "lower_bound_curve";
    art.csv("lower_bound_curve.csv", scaled);
    art.write("lower_bound_curve.gp", plot_script("lower_bound_curve.csv", "calibrated lower curve", true, true));
    res.summary["lower_curve"] = io::to_json(bc);
    check(res, checks, "lower_curve", bc.passed, io::to_json(bc));
  }
  res.summary["checks"] = checks;
  return res;
}

// ---------------------------------------------------------------- driver --

ExperimentResult execute(const std::string& text, const std::optional<fs::path>& out_dir, int jobs) {
  ExperimentResult result;
  Source src{text};
  json root_json;
  try {
    root_json = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto pos = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
    throw ConfigError("<json>", line, "line " + std::to_string(line) + ": invalid JSON: " + e.what());
  }
  const Node root(root_json, {}, src);
  if (!root_json.is_object()) root.fail("", "top level must be an object");
  const std::string name = root.string("name");
  if (name.empty()) root.fail("name", "must be a non-empty string");
  if (name.find_first_of("/\\") != std::string::npos || name == "." || name == "..")
    root.fail("name", "must not contain path separators");
  const std::string mode = root.string("mode");
  static const std::set<std::string> modes{"gn_scan", "pde_decay", "lower_bound", "steady_state",
                                           "lfunction_audit"};
  if (!modes.count(mode)) root.fail("mode", "unknown mode '" + mode + "'");

  fs::path dir = out_dir ? *out_dir
                         : (root.has("output_dir") ? fs::path(root.string("output_dir")) : fs::path("runs") / name);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) root.fail("output_dir", "cannot create output directory " + dir.string());
  Artifacts art{dir, {}};

  ModeResult mr;
  if (mode == "steady_state") mr = run_steady(root, art);
  else if (mode == "lfunction_audit") mr = run_audit(root, art);
  else if (mode == "gn_scan") mr = run_gn(root, art, jobs);
  else if (mode == "pde_decay") mr = run_pde(root, art, jobs);
  else mr = run_lower(root, art);

  json summary{{"name", name}, {"mode", mode}, {"pass", mr.pass}};
  for (auto& [k, v] : mr.summary.items()) summary[k] = v;
  art.write("summary.json", io::dump(summary));
  art.write("config.json", text);

  json manifest{{"name", name}, {"mode", mode}, {"pass", mr.pass}};
  json results = json::object();
  if (summary.contains("center_value")) results["center_value"] = summary["center_value"];
  if (summary.contains("steady_states")) {
    json centers = json::array();
    for (const auto& s : summary["steady_states"])
      centers.push_back({{"p", s["p"]}, {"n", s["n"]}, {"center", s["center"]}});
    results["centers"] = centers;
  }
  json failed = json::array();
  for (const auto& c : summary["checks"])
    if (!c["pass"].get<bool>()) failed.push_back(c["name"]);
  results["failed_checks"] = failed;
  manifest["results"] = results;
  json files = json::array();
  std::vector<std::string> names = art.files;
  std::sort(names.begin(), names.end());
  for (const auto& f : names) {
    const std::string bytes = io::read_file(dir / f);
    files.push_back({{"path", f}, {"bytes", bytes.size()}, {"fnv1a64", io::hex64(io::fnv1a64(bytes))}});
  }
  manifest["artifacts"] = files;
  io::write_file(dir / "manifest.json", io::dump(manifest));

  result.dir = dir;
  result.pass = mr.pass;
  result.summary = summary;
  result.exit_code = mr.pass ? kExitPass : kExitVerdictFail;
  return result;
}

std::string module_of(const std::string& what) {
  const auto colon = what.find(':');
  return colon == std::string::npos ? "lfunctions.eval" : "lfunctions." + what.substr(0, colon);
}

}  // namespace

ExperimentResult run_experiment_text(const std::string& text, const std::optional<fs::path>& out_dir,
                                     int jobs) {
  try {
    return execute(text, out_dir, jobs);
  } catch (const ConfigError& e) {
    return {kExitConfig, false, {}, {}, std::string("config error: ") + e.what()};
  } catch (const NumericError& e) {
    return {kExitNumeric, false, {}, {}, std::string("numeric error in ") + e.what()};
  } catch (const DomainError& e) {
    return {kExitNumeric, false, {}, {}, "numeric error in " + module_of(e.what()) + ": " + e.what()};
  } catch (const PreconditionError& e) {
    return {kExitConfig, false, {}, {}, std::string("config error: ") + e.what()};
  } catch (const InputError& e) {
    return {kExitConfig, false, {}, {}, std::string("config error: ") + e.what()};
  }
}

ExperimentResult run_experiment(const fs::path& config, const std::optional<fs::path>& out_dir, int jobs) {
  std::string text;
  try {
    text = io::read_file(config);
  } catch (const InputError& e) {
    return {kExitConfig, false, {}, {}, std::string("config error: ") + e.what()};
  }
  return run_experiment_text(text, out_dir, jobs);
}

// ---------------------------------------------------------------- report --

int report_run(const fs::path& dir, std::ostream& log) {
  const fs::path mpath = dir / "manifest.json";
  if (!fs::exists(mpath)) {
    log << "report: no manifest.json in " << dir.string() << "\n";
    return kExitConfig;
  }
  json manifest, summary;
  try {
    manifest = json::parse(io::read_file(mpath));
  } catch (const std::exception& e) {
    log << "report: unreadable manifest: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    summary = json::parse(io::read_file(dir / "summary.json"));
  } catch (const std::exception&) {
    summary = json::object();
  }
  const std::string mode = manifest.value("mode", std::string("?"));
  std::ostringstream md;
  md << "# " << manifest.value("name", std::string("?")) << "\n\n"
     << "- mode: " << mode << "\n"
     << "- verdict: " << (manifest.value("pass", false) ? "PASS" : "FAIL") << "\n\n";

  md << "## Checks\n\n";
  if (summary.contains("checks") && summary["checks"].is_array()) {
    md << "| check | result |\n|---|---|\n";
    for (const auto& c : summary["checks"])
      md << "| " << c.value("name", std::string("?")) << " | " << (c.value("pass", false) ? "pass" : "FAIL")
         << " |\n";
  } else {
    md << "summary.json missing or unreadable\n";
  }
  md << "\n## Artifacts\n\n";
  std::vector<std::string> corrupted, plots;
  for (const auto& a : manifest.value("artifacts", json::array())) {
    const std::string f = a.value("path", std::string());
    const fs::path p = dir / f;
    std::string status = "ok";
    if (!fs::exists(p)) {
      status = "missing";
    } else {
      const std::string bytes = io::read_file(p);
      if (io::hex64(io::fnv1a64(bytes)) != a.value("fnv1a64", std::string())) status = "checksum mismatch";
      if (p.extension() == ".csv") {
        const auto t = io::read_csv(bytes);
        if (!t.error.empty()) status = "corrupted CSV (" + t.error + ")";
        else if (status == "ok") status = "ok, " + std::to_string(t.rows.size()) + " rows";
      }
    }
    if (status.rfind("ok", 0) != 0) corrupted.push_back(f);
    if (p.extension() == ".gp") plots.push_back(f);
    md << "- `" << f << "`: " << status << "\n";
  }
  if (!corrupted.empty()) {
    md << "\n## Flagged files\n\n";
    for (const auto& f : corrupted) md << "- `" << f << "`\n";
  }

  md << "\n## Summary\n\n";
  if (mode == "pde_decay") {
    if (summary.contains("sandwich"))
      md << "- fitted sigma: " << summary["sandwich"]["fit"]["sigma"] << "\n";
    if (summary.contains("ladder"))
      md << "- ladder Cauchy differences (eps): " << summary["ladder"]["cauchy_eps"] << "\n";
    md << "- sup-norm decay plot: `sup_norm.gp`\n";
  } else if (mode == "gn_scan") {
    if (summary.contains("scan"))
      md << "- ratio spread: " << summary["scan"]["ratio_spread"] << ", gradient span: "
         << summary["scan"]["grad_span"] << "\n";
    md << "- ratio vs gradient norm plot: `scan.gp`\n";
  } else if (mode == "steady_state") {
    for (const auto& s : summary.value("steady_states", json::array()))
      md << "- p=" << s["p"] << ", n=" << s["n"] << ": center " << s["center"] << ", residual "
         << s["residual"] << "\n";
  } else if (mode == "lower_bound") {
    for (const auto& s : summary.value("subsolution", json::array()))
      md << "- tau0=" << s["tau0"] << ": margin " << s["margin"] << "\n";
    md << "- z-frame plot: `z_sup_norm.gp`\n";
  } else if (mode == "lfunction_audit") {
    md << "- functions audited: " << summary.value("functions", json::array()).size() << "\n";
  }
  if (!plots.empty()) {
    md << "\n## Plot scripts\n\nRun `gnuplot <script>` inside this directory.\n\n";
    for (const auto& f : plots) md << "- `" << f << "`\n";
  }
  io::write_file(dir / "report.md", md.str());
  for (const auto& f : corrupted) log << "report: flagged " << f << "\n";
  log << "report: wrote " << (dir / "report.md").string() << "\n";
  return kExitPass;
}

}  // namespace decaylab
