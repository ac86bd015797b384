#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "helibo/config.hpp"
#include "helibo/labels.hpp"

namespace helibo {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

// Each command writes its CSVs plus run_manifest.ini into cfg.output_dir and
// a short human summary to `log`. Errors propagate as exceptions; the CLI
// maps them to exit codes.
OptimizationReport cmd_optimize(const RunConfig& cfg, std::ostream& log);

std::vector<EvalResult> cmd_evaluate(const RunConfig& cfg, const AugParams& params,
                                     const std::vector<EnvCondition>& envs,
                                     std::ostream& log);

struct UncertaintyRow {
  EnvCondition env;
  EnsembleUncertainty mean;  // per-coordinate sd over frames where >= 2 members fire
};
std::vector<UncertaintyRow> cmd_uncertainty(const RunConfig& cfg, std::ostream& log);

void cmd_landscape(const RunConfig& cfg,
                   const std::optional<std::filesystem::path>& observations,
                   std::ostream& log);

ConvertSummary cmd_convert_labels(const std::filesystem::path& input,
                                  const std::filesystem::path& output,
                                  double train_fraction, std::uint64_t seed,
                                  std::ostream& log);

}  // namespace helibo
