#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>

#include "wentzell/assembly.hpp"
#include "wentzell/nonlinearity.hpp"

namespace wentzell {

/// Largest step allowed for the explicit reaction part at state `u`:
/// 0.5 / (max_i |f'(u_i)| + |lambda|), or +inf when both vanish.
double stable_step_limit(const Nonlinearity& nonlin, const ProblemParams& params,
                         const Eigen::VectorXd& u);

/// First-order IMEX stepper: implicit diffusion, explicit reaction.
///
///   (M + tau nu K) U+ = M U - tau M_bulk (f(u) - lambda u - g)
///
/// Factorizations of M + tau nu K are cached per step size. Holds references
/// to its inputs, which must outlive it. Not thread-safe; use one per run.
class ImexIntegrator {
 public:
  ImexIntegrator(const OperatorPencil& pencil, const ProblemParams& params,
                 const Nonlinearity& nonlin);

  /// One step of size tau. No stability guard is applied here.
  Eigen::VectorXd step(const Eigen::VectorXd& u, double tau);

  /// Tangent step along the background `u`: the derivative of step() at u
  /// applied to each column of `v`,
  ///   (M + tau nu K) V+ = M V - tau M_bulk ((f'(u) - lambda) V).
  Eigen::MatrixXd step_tangent(const Eigen::VectorXd& u, const Eigen::MatrixXd& v, double tau);

  /// Same as step_tangent with f'(u) - lambda precomputed per node.
  Eigen::MatrixXd step_tangent_frozen(const Eigen::VectorXd& rate, const Eigen::MatrixXd& v,
                                      double tau);

  /// -nu K U - M_bulk (f(u) - lambda u - g): the semi-discrete right-hand
  /// side in load form.
  Eigen::VectorXd rhs_load(const Eigen::VectorXd& u) const;

  const OperatorPencil& pencil() const { return pencil_; }
  const ProblemParams& params() const { return params_; }
  const Nonlinearity& nonlinearity() const { return nonlin_; }

 private:
  using Factor = Eigen::SimplicialLDLT<SparseMatrix>;
  const Factor& factor(double tau);

  const OperatorPencil& pencil_;
  const ProblemParams& params_;
  const Nonlinearity& nonlin_;
  Eigen::VectorXd forcing_;
  std::map<double, std::unique_ptr<Factor>> factors_;
};

/// Single guarded step: throws InvalidArgument if tau exceeds the stability
/// limit at U, DivergenceError if the result is not finite.
Eigen::VectorXd step_imex(const OperatorPencil& pencil, const ProblemParams& params,
                          const Nonlinearity& nonlin, const Eigen::VectorXd& u, double tau);

struct SimulateOptions {
  double T = 1.0;
  double tau = 1e-3;
  /// Record diagnostics every this many steps (the initial state is always recorded).
  int sample_every = 1;
  /// Split a step into 2^k equal substeps whenever tau exceeds the
  /// stability limit. When false the step is taken as given and a
  /// non-finite state raises DivergenceError.
  bool adaptive = true;
  /// Keep the final state in the diagnostics.
  bool keep_final_state = true;
};

struct TrajectoryDiagnostics {
  std::vector<double> times;
  std::vector<double> x2_norm_sq;
  std::vector<double> h1_seminorm_sq;
  std::vector<double> linf_norm;
  std::vector<double> total_mass;
  /// Exponential rate of x2_norm_sq toward its final level over the
  /// transient (until the gap to that level first drops below 1% of its
  /// initial value); NaN when the transient is too short to fit.
  double fitted_decay_rate = 0.0;
  long long steps = 0;
  long long substeps = 0;
  Eigen::VectorXd final_state;
};

/// Integrates to time T recording diagnostics. Non-finite states raise
/// DivergenceError carrying the time of the failing step.
TrajectoryDiagnostics simulate(const OperatorPencil& pencil, const ProblemParams& params,
                               const Nonlinearity& nonlin, const Eigen::VectorXd& u0,
                               const SimulateOptions& options);

/// Log-linear decay rate of `values` toward `values.back()` (see TrajectoryDiagnostics).
double fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values);

/// Spatially constant steady state of the flow:  -f(z) + lambda z + g = 0.
struct Equilibrium {
  double z = 0.0;
  /// -f'(z) + lambda.
  double chi = 0.0;
  /// |-f(z) + lambda z + g|.
  double residual = 0.0;
};

/// All constant equilibria, ascending. Requires constant forcing. The
/// search interval [-R, R] is taken from the growth bound so that every
/// root lies inside; roots are bracketed on a 10^4-point grid and bisected.
std::vector<Equilibrium> find_constant_equilibria(const Nonlinearity& nonlin,
                                                  const ProblemParams& params);

struct JacobianRow {
  double epsilon = 0.0;
  double relative_error = 0.0;
};

struct JacobianReport {
  std::vector<JacobianRow> rows;
  double min_error = 0.0;
  /// Log-log slope of error vs epsilon over the truncation-dominated
  /// branch: from the largest epsilon down to the smallest error, keeping
  /// only errors at least ten times that minimum.
  double observed_order = 0.0;
};

/// Centered finite differences of step() at U along V, compared with
/// step_tangent(U, V) in the X^2 norm.
JacobianReport jacobian_check(const OperatorPencil& pencil, const ProblemParams& params,
                              const Nonlinearity& nonlin, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& v, const std::vector<double>& epsilons,
                              double tau);

/// CSV with columns t, x2_norm_sq, h1_seminorm_sq, linf_norm, mass.
void write_diagnostics_csv(const TrajectoryDiagnostics& diag, const std::filesystem::path& path);

/// CSV with columns node, x, y, value.
void write_state_csv(const Mesh& mesh, const Eigen::VectorXd& state,
                     const std::filesystem::path& path);

}  // namespace wentzell
