#include "doctest.h"

#include <sstream>

#include "decaylab/experiment.hpp"
#include "decaylab/io.hpp"

using namespace decaylab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / "decaylab_cli_test" / name;
  fs::remove_all(p);
  return p;
}

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" DECAYLAB_CLI "\" " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

const char* kSteady = R"({
  "name": "steady_p1_n2",
  "mode": "steady_state",
  "steady": {"p": 1, "n": 2, "m": 2001}
})";

const char* kSmallPde = R"({
  "name": "small_pde",
  "mode": "pde_decay",
  "problem": {"p": 1, "n": 2, "u0": {"kind": "StretchedExp", "alpha": 1, "beta": 2}},
  "approx": {"R": 10, "m": 201, "eps": 1e-6},
  "snapshots": {"t_lo": 0.01, "t_hi": 10, "count": 12},
  "observers": {"lq": [1, 2]},
  "checks": {"linfty_q": [1]}
})";

}  // namespace

TEST_CASE("steady_state config reports the center value") {
  const auto dir = scratch("steady");
  const auto r = run_experiment_text(kSteady, dir);
  REQUIRE(r.exit_code == kExitPass);
  const auto manifest = io::json::parse(io::read_file(dir / "manifest.json"));
  CHECK(manifest["results"]["center_value"].get<double>() == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(manifest["pass"].get<bool>());
  bool has_csv = false;
  for (const auto& a : manifest["artifacts"]) {
    const auto bytes = io::read_file(dir / a["path"].get<std::string>());
    CHECK(a["bytes"].get<std::size_t>() == bytes.size());
    CHECK(a["fnv1a64"].get<std::string>() == io::hex64(io::fnv1a64(bytes)));
    has_csv = has_csv || a["path"] == "steady_p1_n2.csv";
  }
  CHECK(has_csv);
}

TEST_CASE("schema errors map to exit 2 with field and line") {
  const auto dir = scratch("schema");
  auto r = run_experiment_text(R"({"name": "", "mode": "steady_state"})", dir);
  CHECK(r.exit_code == kExitConfig);
  CHECK(r.message.find("name") != std::string::npos);
  CHECK(r.message.find("line 1") != std::string::npos);

  r = run_experiment_text("{\n  \"name\": \"x\",\n  \"mode\": \"bogus\"\n}", dir);
  CHECK(r.exit_code == kExitConfig);
  CHECK(r.message.find("line 3") != std::string::npos);
  CHECK(r.message.find("mode") != std::string::npos);

  r = run_experiment_text("{\n \"name\": \"x\",\n \"mode\": \"steady_state\",\n \"steady\": {\"p\": \"one\", \"n\": 1}\n}", dir);
  CHECK(r.exit_code == kExitConfig);
  CHECK(r.message.find("steady.p") != std::string::npos);
  CHECK(r.message.find("line 4") != std::string::npos);

  r = run_experiment_text("{\n \"name\": \"x\",\n oops\n}", dir);
  CHECK(r.exit_code == kExitConfig);
  CHECK(r.message.find("line 3") != std::string::npos);

  r = run_experiment_text(R"({"name": "x", "mode": "pde_decay", "problem": {"p": 0.5, "n": 1,
    "u0": {"kind": "StretchedExp", "alpha": 1, "beta": 2}}, "approx": {}, "snapshots": {"times": [1]}})", dir);
  CHECK(r.exit_code == kExitConfig);
  CHECK(r.message.find("problem") != std::string::npos);

  // members over the budget are excluded and fail the verdict
  r = run_experiment_text(R"({"name": "x", "mode": "gn_scan", "gn": {"n": 3, "q": 2, "R": 20, "m": 401,
    "L": {"kind": "LogType", "kappa": 2, "M": 4}, "K": 1e-30,
    "family": {"shape": {"kind": "StretchedExp", "alpha": 1, "beta": 2}, "scales": [0.5], "widths": [1, 2]}}})", dir);
  CHECK(r.exit_code == kExitVerdictFail);
}

TEST_CASE("numeric failures map to exit 3 with module and op") {
  // u^p overflows for p = 40 and sup u0 = 1e10
  const auto r = run_experiment_text(R"({"name": "x", "mode": "pde_decay",
    "problem": {"p": 40, "n": 1, "u0": {"kind": "StretchedExp", "c0": 1e10, "alpha": 1, "beta": 2}},
    "approx": {"R": 5, "m": 51, "eps": 1e-3}, "snapshots": {"times": [1]}})", scratch("numeric"));
  CHECK(r.exit_code == kExitNumeric);
  CHECK(r.message.find("pde_solver.step") != std::string::npos);
}

TEST_CASE("verdict failures map to exit 1") {
  const auto dir = scratch("verdict");
  const auto r = run_experiment_text(R"({"name": "x", "mode": "steady_state",
    "steady": {"p": 1, "n": 1, "m": 101, "analytic_max_error": 1e-30}})", dir);
  CHECK(r.exit_code == kExitVerdictFail);
  CHECK_FALSE(r.pass);
  CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("repeated runs are byte identical") {
  const auto a = scratch("repeat_a"), b = scratch("repeat_b");
  REQUIRE(run_experiment_text(kSmallPde, a).exit_code == kExitPass);
  REQUIRE(run_experiment_text(kSmallPde, b).exit_code == kExitPass);
  for (const auto& e : fs::directory_iterator(a)) {
    CAPTURE(e.path().filename().string());
    CHECK(io::read_file(e.path()) == io::read_file(b / e.path().filename()));
  }
}

TEST_CASE("report") {
  const auto dir = scratch("report");
  REQUIRE(run_experiment_text(kSmallPde, dir).exit_code == kExitPass);
  std::ostringstream log;
  CHECK(report_run(dir, log) == kExitPass);
  const auto md = io::read_file(dir / "report.md");
  CHECK(md.find("sup_norm.gp") != std::string::npos);
  CHECK(md.find("Flagged") == std::string::npos);
  // plot scripts reference files in the run dir only
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".gp") {
      const auto gp = io::read_file(e.path());
      const auto at = gp.find("plot '");
      REQUIRE(at != std::string::npos);
      const auto name = gp.substr(at + 6, gp.find('\'', at + 6) - at - 6);
      CHECK(name.find('/') == std::string::npos);
      CHECK(fs::exists(dir / name));
    }

  io::write_file(dir / "sup_norm.csv", "t,sup_norm\n0,1\n1,not-a-number\n");
  CHECK(report_run(dir, log) == kExitPass);
  const auto md2 = io::read_file(dir / "report.md");
  CHECK(md2.find("Flagged") != std::string::npos);
  CHECK(md2.find("`sup_norm.csv`: corrupted CSV") != std::string::npos);
  CHECK(md2.find("center_value.csv`: ok") != std::string::npos);
  CHECK(log.str().find("flagged sup_norm.csv") != std::string::npos);

  CHECK(report_run(scratch("empty"), log) == kExitConfig);
}

TEST_CASE("gn_scan report mentions the ratio plot") {
  const auto dir = scratch("gn");
  const auto r = run_experiment_text(R"({"name": "gn", "mode": "gn_scan", "gn": {"n": 3, "q": 2, "R": 40, "m": 2001,
    "L": {"kind": "LogType", "kappa": 2, "M": 4},
    "family": {"shape": {"kind": "StretchedExp", "alpha": 1, "beta": 2},
               "scales": [0.36787944117144233, 0.018315638888734179], "widths": [1, 2]},
    "min_grad_decades": 0}})", dir);
  CHECK(r.exit_code == kExitPass);
  std::ostringstream log;
  REQUIRE(report_run(dir, log) == kExitPass);
  CHECK(io::read_file(dir / "report.md").find("scan.gp") != std::string::npos);
}

TEST_CASE("command line") {
  const auto dir = scratch("cmdline");
  fs::create_directories(dir);
  io::write_file(dir / "steady.json", kSteady);
  io::write_file(dir / "pde.json", kSmallPde);
  io::write_file(dir / "bad.json", R"({"name": "", "mode": "steady_state"})");
  CHECK(run_cli("run \"" + (dir / "steady.json").string() + "\" --out \"" + (dir / "s").string() + "\"") == 0);
  CHECK(run_cli("run \"" + (dir / "bad.json").string() + "\" --out \"" + (dir / "b").string() + "\"") == 2);
  CHECK(run_cli("run \"" + (dir / "missing.json").string() + "\"") == 2);
  CHECK(run_cli("report \"" + (dir / "s").string() + "\"") == 0);
  CHECK(run_cli("report \"" + (dir / "nothing").string() + "\"") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("run \"" + (dir / "pde.json").string() + "\" --jobs 0") == 2);

  // the scalar and AVX2 paths produce identical solution bytes
  CHECK(run_cli("run \"" + (dir / "pde.json").string() + "\" --out \"" + (dir / "k1").string() + "\"",
                "DECAYLAB_KERNELS=scalar") == 0);
  CHECK(run_cli("run \"" + (dir / "pde.json").string() + "\" --out \"" + (dir / "k2").string() + "\"") == 0);
  for (const char* f : {"snapshots.csv", "sup_norm.csv", "center_value.csv"})
    CHECK(io::read_file(dir / "k1" / f) == io::read_file(dir / "k2" / f));
}
