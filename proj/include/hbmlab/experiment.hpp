// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hbmlab/decomposition.hpp"
#include "hbmlab/hbm.hpp"
#include "hbmlab/rbm.hpp"
#include "hbmlab/synthdata.hpp"

namespace hbmlab {

inline constexpr const char* kToolVersion = "0.1.0";

/// Process exit codes of every command.
enum ExitCode : int {
  kExitClean = 0,
  kExitConfigError = 2,
  kExitPartialFailure = 3,
  kExitInvariantFailure = 4,
};

/// Declarative experiment description, parsed from a JSON config file that
/// follows schema/run_config.schema.json. Absent keys take the defaults
/// below; unknown keys are rejected.
struct RunConfig {
  ExperimentGrid grid;
  std::vector<std::string> families = {"hbm", "rbm"};
  FitMode mode = FitMode::kExact;
  std::string output_dir = "hbmlab-out";
  unsigned workers = 0;  // 0 = hardware parallelism
  FitConfig fit;
  FitConfig projection{0.1, 1000000, 1e-10, FitMode::kExact, 1000};
  GibbsConfig gibbs;
  AisConfig ais;
  CdConfig cd;
  std::uint64_t rbm_mle_sample_size = 1000000;

  /// FNV-1a 64 of the config file bytes ("" when built in code).
  std::string config_hash;
};

/// Throws Error(kConfig) naming the offending key.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

/// Flags shared by every command; unset fields fall back to the config.
struct CommandOptions {
  std::string config_path;
  std::string out_dir;
  bool force = false;
  unsigned workers = 0;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
};

const std::vector<std::string>& results_csv_columns();

/// One CSV line per report, in the fixed column order (header not included).
std::string results_csv_row(const DecompositionReport& row, std::uint64_t base_seed);
std::string results_csv(const std::vector<DecompositionReport>& rows,
                        std::uint64_t base_seed);

int cmd_generate(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_fit(const CommandOptions& opts, const std::string& family,
            const std::string& dataset_path, unsigned complexity,
            std::ostream& out, std::ostream& err);
int cmd_decompose(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err);
/// Regenerates plot files from a results CSV.
int cmd_plot(const std::string& csv_path, const std::string& out_dir,
             std::ostream& out, std::ostream& err);

}  // namespace hbmlab
