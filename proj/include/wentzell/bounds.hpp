#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "wentzell/assembly.hpp"
#include "wentzell/mesh.hpp"
#include "wentzell/nonlinearity.hpp"

namespace wentzell {

/// Volume of the unit ball in R^n (n = 1, 2, 3).
double unit_ball_volume(int n);

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double x) const { return x >= lower && x <= upper; }
};

struct WeylConstants {
  int dimension = 1;
  /// Bulk (Dirichlet-type) Weyl constant (2 pi)^2 / (v_n |Omega|)^{2/n}.
  double bulk = 0.0;
  /// Surface constant 2 pi / (v_{n-1} |Gamma|)^{1/(n-1)}; n >= 2 only.
  std::optional<double> surface;
  /// Interval holding the Wentzell Weyl constant; n >= 2 only.
  std::optional<Bracket> bracket;

  /// Throws NotDefined in one dimension.
  double surface_constant() const;
  /// Throws NotDefined in one dimension.
  const Bracket& wentzell_bracket() const;
};

WeylConstants weyl_constants(const Domain& domain, double b);

/// Shape-dependent multipliers of the bound formulas. None of them is known
/// in closed form; all default to 1 so that only exponents and ratios are
/// meaningful.
struct BoundPrefactors {
  double static_lower = 1.0;
  double static_upper = 1.0;
  double wentzell_lower = 1.0;
  double wentzell_upper = 1.0;
  double surface_lower = 1.0;
  double surface_upper = 1.0;
};

struct BoundReport {
  int dimension = 1;
  /// Operational Weyl constant used (C_W for n >= 2, C_D for n = 1).
  double weyl_constant = 0.0;
  double lt_constant = 0.0;
  /// Root of the volume-contraction condition,
  /// (1 + (c_f + lambda) / (nu c1 C))^{n-1}, exponent 1/2 when n = 1.
  double d_star = 0.0;
  double upper_W = 0.0;
  double lower_W = 0.0;
  double upper_static = 0.0;
  double lower_static = 0.0;
  /// Surface-area forms, n >= 3 only.
  std::optional<double> upper_surface;
  std::optional<double> lower_surface;
  BoundPrefactors prefactors;
};

/// Evaluates the dimension bounds. `weyl_constant` is C_W for n >= 2 and
/// C_D for n = 1; `lt_constant` is the Lieb-Thirring constant c1.
BoundReport evaluate_bounds(const ProblemParams& params, const GrowthConstants& growth,
                            const Domain& domain, double weyl_constant, double lt_constant,
                            const BoundPrefactors& prefactors = {});

struct ScalingRow {
  double scale = 1.0;
  double upper_W = 0.0;
  double upper_static = 0.0;
  /// upper_W / upper_static, normalized to 1 at the first domain.
  double ratio = 1.0;
};

struct ScalingTable {
  int dimension = 1;
  std::vector<ScalingRow> rows;
  double slope_wentzell = 0.0;
  double slope_static = 0.0;
  /// Scaling is only asserted where the surface form applies (n >= 3).
  bool asserted = false;
};

/// Bounds over a family of similar domains, with C_W taken as the upper
/// end of the bracket (C_D in one dimension). Slopes are least-squares
/// log-log slopes against the linear scale factor.
ScalingTable compare_scaling(const std::vector<Domain>& family, const ProblemParams& params,
                             const GrowthConstants& growth, double lt_constant = 1.0,
                             const BoundPrefactors& prefactors = {});

/// CSV with columns s, upper_W, upper_static, ratio.
void write_scaling_csv(const ScalingTable& table, const std::filesystem::path& path);

}  // namespace wentzell
