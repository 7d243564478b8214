#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wentzell/assembly.hpp"
#include "wentzell/bounds.hpp"
#include "wentzell/mesh.hpp"
#include "wentzell/nonlinearity.hpp"
#include "wentzell/spectral.hpp"

namespace wentzell {

/// Schema violation; `field()` is the dotted path of the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct DomainConfig {
  Shape shape = Shape::Interval;
  std::vector<double> size{1.0};
  std::vector<int> resolution{64};
  BulkMass mass = BulkMass::Consistent;

  Domain domain() const;
  /// Throws ConfigError for shapes without a mesh builder.
  Mesh mesh() const;
  /// Same configuration with every extent multiplied by `factor`.
  DomainConfig scaled(double factor) const;
};

struct NonlinearityConfig {
  /// cubic, quintic, none or polynomial.
  std::string name = "cubic";
  /// Ascending powers; polynomial only.
  std::vector<double> coefficients;
  /// Declared growth constants; polynomial only.
  GrowthConstants growth;

  Nonlinearity build() const;
};

struct SpectralConfig {
  Index modes = 40;
  std::optional<IndexWindow> window;
  /// m values for the Lieb-Thirring check; empty selects 5, 10, ... up to modes.
  std::vector<Index> lt_m;
  double tolerance = 1e-8;
};

struct InitialConfig {
  /// constant, cosine or random.
  std::string kind = "cosine";
  double amplitude = 1.0;
  double offset = 0.0;

  Eigen::VectorXd build(const Mesh& mesh, std::uint64_t seed) const;
};

struct DynamicsConfig {
  double tau = 1e-3;
  double T = 1.0;
  int sample_every = 1;
  bool adaptive = true;
  InitialConfig initial;
};

struct DimensionConfig {
  Index modes = 10;
  int reorth_period = 1;
  double T = 10.0;
  double tau = 1e-3;
  /// equilibrium: frozen at the most unstable constant equilibrium;
  /// trajectory: evolved from the dynamics initial state.
  std::string background = "equilibrium";
  double transient_fraction = 0.2;
};

struct BoundsConfig {
  BoundPrefactors prefactors;
  /// Scale factors for compare_scaling; empty skips it.
  std::vector<double> scaling_sizes;
};

/// Grid axes; an absent axis keeps the base value. No axes means no points.
struct SweepConfig {
  std::optional<std::vector<double>> nu;
  std::optional<std::vector<double>> lambda;
  std::optional<std::vector<double>> b;
  std::optional<std::vector<double>> size;
};

struct OutputConfig {
  bool mesh = false;
  bool matrices = false;
  bool snapshot = false;
};

struct ExperimentConfig {
  DomainConfig domain;
  ProblemParams params;
  NonlinearityConfig nonlinearity;
  SpectralConfig spectral;
  DynamicsConfig dynamics;
  DimensionConfig dimension;
  BoundsConfig bounds;
  SweepConfig sweep;
  OutputConfig output;
  std::uint64_t seed = 1;
};

/// Validates against the schema (unknown keys rejected) and fills defaults.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully expanded form, every field explicit. Parsing it gives back the same config.
nlohmann::json to_json(const ExperimentConfig& config);

/// Hex FNV-1a of the canonical JSON dump.
std::string config_hash(const ExperimentConfig& config);

/// Documented defaults, as printed by the `defaults` subcommand.
nlohmann::json default_config_json();

}  // namespace wentzell
