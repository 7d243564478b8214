#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wentzell/config.hpp"
#include "wentzell/errors.hpp"
#include "wentzell/runner.hpp"

namespace {

enum Exit { kOk = 0, kMismatch = 1, kConfig = 2, kNumeric = 3 };

void report(const wentzell::RunResult& r) {
  std::cout << r.run_dir.string() << '\n';
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reaction-diffusion with dynamic boundary conditions: spectra, dynamics, attractor dimension"};
  app.require_subcommand(1);
  app.set_version_flag("--version", wentzell::kToolVersion);

  std::string config_path;
  std::string out_dir = "runs";
  int workers = 1;
  std::optional<std::uint64_t> seed;

  auto add_run_options = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Experiment config (JSON)")->required();
    sub->add_option("--out", out_dir, "Root directory for run outputs");
    sub->add_option("--workers", workers, "Concurrent sweep points")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Override the config seed");
  };

  auto* eigs = app.add_subcommand("eigs", "Spectrum, Weyl fit and Lieb-Thirring check");
  auto* simulate = app.add_subcommand("simulate", "Time integration with diagnostics");
  auto* dimension = app.add_subcommand("dimension", "Lyapunov exponents, trace sums and bounds");
  auto* sweep = app.add_subcommand("sweep", "Parameter grid, one JSONL record per point");
  auto* bounds = app.add_subcommand("bounds", "Closed-form Weyl constants and dimension bounds");
  for (auto* sub : {eigs, simulate, dimension, sweep, bounds}) add_run_options(sub);

  std::string run_dir;
  auto* verify = app.add_subcommand("verify", "Re-hash the files listed in a run manifest");
  verify->add_option("run_dir", run_dir, "Run directory")->required();

  app.add_subcommand("defaults", "Print the default configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (app.got_subcommand("defaults")) {
    std::cout << wentzell::default_config_json().dump(2) << '\n';
    return kOk;
  }
  if (verify->parsed()) {
    const auto r = wentzell::verify_run(run_dir);
    for (const auto& p : r.problems) std::cerr << p << '\n';
    std::cout << (r.ok ? "ok" : "mismatch") << '\n';
    return r.ok ? kOk : kMismatch;
  }

  try {
    wentzell::ExperimentConfig config = wentzell::load_config(config_path);
    if (seed) config.seed = *seed;
    const wentzell::RunContext ctx{out_dir, workers};
    if (eigs->parsed()) report(wentzell::cmd_eigs(config, ctx));
    if (simulate->parsed()) report(wentzell::cmd_simulate(config, ctx));
    if (dimension->parsed()) report(wentzell::cmd_dimension(config, ctx));
    if (sweep->parsed()) report(wentzell::cmd_sweep(config, ctx));
    if (bounds->parsed()) report(wentzell::cmd_bounds(config, ctx));
  } catch (const wentzell::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const wentzell::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const wentzell::DivergenceError& e) {
    std::cerr << "numeric error: " << e.what() << " (t = " << e.time() << ")\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  }
  return kOk;
}
