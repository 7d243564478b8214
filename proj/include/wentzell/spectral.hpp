#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "wentzell/assembly.hpp"
#include "wentzell/eigensolver.hpp"

namespace wentzell {

/// Low spectrum of the pencil (K, M).
struct Spectrum {
  /// Nondecreasing.
  Eigen::VectorXd eigenvalues;
  /// M-orthonormal columns.
  Eigen::MatrixXd eigenvectors;
  Eigen::VectorXd residuals;
  double mesh_h = 0.0;

  Index count() const { return eigenvalues.size(); }
};

/// The m smallest eigenpairs of K phi = Lambda M phi.
Spectrum solve_eigs(const OperatorPencil& pencil, Index m, const EigenOptions& options = {});

/// Exact eigenvalues of the 1D Wentzell problem on [0, L]:
///   -phi'' = Lambda phi,  b dphi/dn = Lambda phi at both ends.
/// With phi = A cos(kx) + B sin(kx) the nonzero eigenvalues Lambda = k^2
/// solve  (k^2 - b^2) sin(kL) - 2 b k cos(kL) = 0.  Returns Lambda = 0
/// followed by the first `k_max` positive roots, each bisected to full
/// double precision.
std::vector<double> eig_oracle_1d(double length, double b, int k_max);

/// Closed interval of eigenvalue indices.
struct IndexWindow {
  Index lo = 0;
  Index hi = 0;
  Index length() const { return hi - lo + 1; }
};

/// Default window: drop the lowest 10% (preasymptotic) and the top 40%
/// (mesh-polluted) of the computed modes.
IndexWindow default_fit_window(Index modes);

struct WeylFit {
  double exponent_used = 0.0;
  double fitted_slope = 0.0;
  IndexWindow fit_window;
  /// Max relative deviation of Lambda_j from slope * j^exponent in the window.
  double residual = 0.0;
};

/// Least-squares slope through the origin of Lambda_j against j^alpha over
/// the window, alpha = 1/(n-1) for n >= 2 and 2 for n = 1.
WeylFit weyl_fit(const Spectrum& spectrum, int dimension, IndexWindow window);

/// Same fit with an arbitrary exponent.
WeylFit power_fit(const Spectrum& spectrum, double exponent, IndexWindow window);

/// Exponent of the Weyl law in dimension n.
double weyl_exponent(int dimension);

struct LiebThirringRow {
  Index m = 0;
  /// Sum of the m smallest eigenvalues.
  double gradient_sum = 0.0;
  /// C_W (m^{alpha+1} - m).
  double unit_bound = 0.0;
  /// gradient_sum - c1 * unit_bound, nonnegative by construction.
  double margin = 0.0;
};

struct LiebThirringReport {
  /// Largest constant for which the inequality holds on every listed m;
  /// +infinity when every bound side vanishes.
  double c1 = 0.0;
  std::vector<LiebThirringRow> rows;
};

/// Largest c1 with  sum_{j<m} Lambda_j >= c1 C_W (m^{alpha+1} - m)  for
/// every m in the list. The m smallest eigenvalues are the minimum of the
/// gradient sum over M-orthonormal m-families, so c1 is valid for all of them.
LiebThirringReport lieb_thirring_check(const Spectrum& spectrum, int dimension,
                                       double weyl_constant, const std::vector<Index>& m_list);

/// Sum of squared H1 seminorms over the columns of an M-orthonormal family.
double gradient_sum(const OperatorPencil& pencil, const Eigen::MatrixXd& family);

/// Largest Rayleigh quotient over span(columns of `basis`).
double subspace_max_quotient(const OperatorPencil& pencil, const Eigen::MatrixXd& basis);

struct MinMaxRow {
  Index dimension = 0;
  double eigenvalue = 0.0;
  /// Smallest max-quotient seen across the random subspaces.
  double min_of_max = 0.0;
  int violations = 0;
};

struct MinMaxReport {
  std::vector<MinMaxRow> rows;
  bool holds() const;
};

/// For j = 1 .. min(5, modes) draws `trials` random j-dimensional subspaces
/// and checks  max quotient >= Lambda_{j-1}  (up to 1e-9 relative).
MinMaxReport minmax_check(const OperatorPencil& pencil, const Spectrum& spectrum, int trials,
                          std::uint64_t seed);

/// CSV with columns j, lambda, residual.
void write_spectrum_csv(const Spectrum& spectrum, const std::filesystem::path& path);

}  // namespace wentzell
