#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdgate/cli/config.hpp"

namespace qdgate::cli {

struct RunOptions {
  std::filesystem::path out_dir = ".";
  /// Worker threads for sweep children; 0 means hardware concurrency.
  unsigned jobs = 1;
  std::ostream* log = nullptr;
};

struct RunOutcome {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
  /// Headline numbers of the run (what the report JSON holds, or a sweep summary).
  nlohmann::json summary;
};

/// Runs one experiment and writes its artifacts under `out_dir`. Library
/// exceptions propagate: ConfigError / std::invalid_argument for bad input,
/// NumericalError for integrator failure.
RunOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

/// Figure-family CSVs plus a sidecar schema. The cphase family is driven by
/// `curve_ratios` (Ω/V_F); the raman_x family by `curve_gammas` × `curve_detunings`.
/// Does nothing when no family is declared for the config's kind.
RunOutcome emit_figure_data(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// True when `cfg` declares a curve family emit_figure_data would act on.
bool has_figure_family(const ExperimentConfig& cfg);

/// Tolerances applied by verify_outputs.
inline constexpr double kVerifyNormTol = 1e-7;
inline constexpr double kVerifyPopulationFloor = -1e-6;

struct VerifyReport {
  std::size_t files_checked = 0;
  std::size_t rows_checked = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Re-reads every trajectory CSV below `dir` and checks the state norm
/// (pure) or trace, populations and 2×2 positivity (mixed) on every row.
VerifyReport verify_outputs(const std::filesystem::path& dir);

/// Full command line: subcommands cphase, zrot, raman, conditions, sweep, verify.
/// Returns the process exit status (0 ok, 1 config error, 2 numerical failure).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qdgate::cli
