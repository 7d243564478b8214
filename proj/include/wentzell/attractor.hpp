#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "wentzell/assembly.hpp"
#include "wentzell/dynamics.hpp"
#include "wentzell/nonlinearity.hpp"
#include "wentzell/spectral.hpp"

namespace wentzell {

/// One IMEX step of the linearized flow along the background state,
/// applied to every column of `v`.
Eigen::MatrixXd apply_linearized(const OperatorPencil& pencil, const ProblemParams& params,
                                 const Nonlinearity& nonlin, const Eigen::VectorXd& background,
                                 const Eigen::MatrixXd& v, double tau);

struct LyapunovOptions {
  Index modes = 10;
  double T = 10.0;
  double tau = 1e-3;
  int reorth_period = 1;
  /// Leading fraction of [0, T] excluded from every time average.
  double transient_fraction = 0.2;
  /// Hold the background at U0 (exact when U0 is an equilibrium).
  bool freeze_background = false;
  /// Substep the background when tau exceeds its stability limit.
  bool adaptive = true;
  std::uint64_t seed = 1;
};

struct DimensionEstimate {
  /// Nonincreasing.
  std::vector<double> lyapunov_exponents;
  double kaplan_yorke = 0.0;
  /// trace_sums[m-1]: time average of the linearized trace over the first
  /// m evolved directions.
  std::vector<double> trace_sums;
  /// Per-direction time averages behind trace_sums.
  std::vector<double> trace_terms;
  /// Smallest m with a negative averaged trace sum; -1 if none up to modes.
  Index m_star_trace = -1;
  /// Max relative change of any exponent between 3/4 of the averaging
  /// window and its end.
  double drift = 0.0;
  /// drift above 10%.
  bool drift_warning = false;
  double averaging_time = 0.0;
  long long reorthonormalizations = 0;
};

/// Benettin-style QR iteration in the X^2 inner product. Advances the
/// background with the IMEX step and a random M-orthonormal tangent basis
/// with the linearized step, reorthonormalizing every reorth_period steps.
/// Exponents and trace terms are averaged over t >= transient_fraction * T.
DimensionEstimate lyapunov_spectrum(const OperatorPencil& pencil, const ProblemParams& params,
                                    const Nonlinearity& nonlin, const Eigen::VectorXd& u0,
                                    const LyapunovOptions& options);

/// The trace part of lyapunov_spectrum with `m_max` directions.
DimensionEstimate trace_upper_estimate(const OperatorPencil& pencil, const ProblemParams& params,
                                       const Nonlinearity& nonlin, const Eigen::VectorXd& u0,
                                       Index m_max, LyapunovOptions options);

/// Kaplan-Yorke dimension of exponents sorted in nonincreasing order:
/// j + S_j / |mu_{j+1}| with S_j the largest nonnegative partial sum.
/// 0 when the leading exponent is negative; the full count when every
/// partial sum is nonnegative.
double kaplan_yorke(const std::vector<double>& exponents);

struct UnstableCount {
  Equilibrium equilibrium;
  /// Positive eigenvalues of the linearization at the equilibrium.
  Index count_direct = 0;
  /// #{j : nu Lambda_j < chi}.
  Index count_paper = 0;
  /// Modes with nu Lambda_j in [0.8 chi, 1.2 chi].
  Index crossover_band = 0;
  /// Per mode j: {chi - nu Lambda_j, -nu Lambda_j}.
  std::vector<std::pair<double, double>> zeta_roots;
  /// Growth rates of the linearization, descending (at least the positive ones).
  std::vector<double> direct_rates;
};

/// Unstable directions at a constant equilibrium.
///
/// count_paper counts Wentzell modes below chi/nu and needs a spectrum deep
/// enough that nu Lambda_last > chi. count_direct counts positive
/// eigenvalues of the linearization -nu K + chi M_bulk in the X^2 inner
/// product, where the reaction acts on bulk mass only.
UnstableCount unstable_count(const OperatorPencil& pencil, const ProblemParams& params,
                             const Equilibrium& eq, const Spectrum& spectrum,
                             const EigenOptions& options = {});

/// CSV with columns j, exponent, trace_term, trace_sum.
void write_exponents_csv(const DimensionEstimate& est, const std::filesystem::path& path);

}  // namespace wentzell
