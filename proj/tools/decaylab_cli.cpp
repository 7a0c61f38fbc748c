#include <iostream>

#include "CLI11.hpp"
#include "decaylab/experiment.hpp"
#include "decaylab/kernels.hpp"

int main(int argc, char** argv) {
  CLI::App app{"decaylab: decay experiments for u_t = u^p \\Delta u"};
  app.require_subcommand(1);

  std::string config, out, run_dir;
  int jobs = 1;
  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("config", config, "experiment config")->required();
  run->add_option("--out", out, "output directory (default: output_dir from config, else runs/<name>)");
  run->add_option("--jobs", jobs, "worker threads for ladders and scans")->check(CLI::Range(1, 256));

  auto* report = app.add_subcommand("report", "write report.md for a finished run");
  report->add_option("run_dir", run_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : decaylab::kExitConfig;
  }

  if (*run) {
    std::optional<std::filesystem::path> dir;
    if (!out.empty()) dir = out;
    const auto r = decaylab::run_experiment(config, dir, jobs);
    if (r.exit_code == decaylab::kExitConfig || r.exit_code == decaylab::kExitNumeric) {
      std::cerr << r.message << "\n";
      return r.exit_code;
    }
    std::cout << r.summary.value("name", std::string()) << ": " << (r.pass ? "PASS" : "FAIL") << " ("
              << r.dir.string() << ", kernels " << decaylab::kernels::active().name << ")\n";
    for (const auto& c : r.summary["checks"])
      if (!c["pass"].get<bool>()) std::cout << "  failed: " << c["name"].get<std::string>() << "\n";
    return r.exit_code;
  }
  return decaylab::report_run(run_dir, std::cerr);
}
