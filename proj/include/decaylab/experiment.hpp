#pragma once
// Config-driven experiments: parse a JSON experiment file, run one of the
// modes, write CSV series, JSON verdicts, gnuplot scripts and a manifest.
//
// Exit codes: 0 pass, 1 verdict failed, 2 config error, 3 numeric error.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "decaylab/errors.hpp"
#include "decaylab/io.hpp"

namespace decaylab {

enum ExitCode : int { kExitPass = 0, kExitVerdictFail = 1, kExitConfig = 2, kExitNumeric = 3 };

class ConfigError : public InputError {
 public:
  ConfigError(std::string field, int line, const std::string& what)
      : InputError(what), field_(std::move(field)), line_(line) {}
  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

struct ExperimentResult {
  int exit_code = kExitPass;
  bool pass = false;
  std::filesystem::path dir;
  io::json summary;
  std::string message;  // diagnostic for exit codes 2 and 3
};

ExperimentResult run_experiment(const std::filesystem::path& config,
                                const std::optional<std::filesystem::path>& out_dir, int jobs = 1);
ExperimentResult run_experiment_text(const std::string& text,
                                     const std::optional<std::filesystem::path>& out_dir,
                                     int jobs = 1);

// Writes report.md and plot scripts into the run directory. Corrupted CSV
// artifacts are listed in the report; the others are still summarised.
int report_run(const std::filesystem::path& dir, std::ostream& log);

}  // namespace decaylab
