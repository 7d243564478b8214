#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wentzell/config.hpp"

namespace wentzell {

inline constexpr const char* kToolVersion = "0.3.0";

struct RunContext {
  std::filesystem::path out_root = "runs";
  int workers = 1;
};

struct RunResult {
  std::filesystem::path run_dir;
  /// Output files relative to run_dir, manifest excluded.
  std::vector<std::string> files;
  std::vector<std::string> warnings;
};

/// Spectrum CSV, Weyl fit and Lieb-Thirring JSON.
RunResult cmd_eigs(const ExperimentConfig& config, const RunContext& ctx);
/// Trajectory diagnostics CSV and a JSON summary.
RunResult cmd_simulate(const ExperimentConfig& config, const RunContext& ctx);
/// Lyapunov exponents, trace sums, unstable counts and the bound report.
RunResult cmd_dimension(const ExperimentConfig& config, const RunContext& ctx);
/// Weyl constants, bound report and the optional scaling table.
RunResult cmd_bounds(const ExperimentConfig& config, const RunContext& ctx);
/// One JSONL record per grid point, in grid order; resumable.
RunResult cmd_sweep(const ExperimentConfig& config, const RunContext& ctx);

/// Grid points of the sweep, in output order.
std::vector<ExperimentConfig> sweep_grid(const ExperimentConfig& config);

/// The sweep record of a single configuration (no error handling).
nlohmann::json sweep_record(const ExperimentConfig& point);

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> problems;
};

/// Re-hashes every file listed in <run_dir>/manifest.json.
VerifyReport verify_run(const std::filesystem::path& run_dir);

}  // namespace wentzell
