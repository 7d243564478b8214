#pragma once

#include <cstdint>
#include <limits>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace wentzell {

enum class EigenMethod { Auto, Dense, ShiftInvert };

struct EigenOptions {
  EigenMethod method = EigenMethod::Auto;
  /// Auto picks the dense solver up to this many unknowns.
  Eigen::Index dense_limit = 800;
  /// Shift sigma with A + sigma*B positive definite. NaN selects a small
  /// positive shift, which is valid whenever A is positive semidefinite.
  double shift = std::numeric_limits<double>::quiet_NaN();
  int block_size = 8;
  /// Relative residual ||A x - theta B x|| / (scale * ||B x||) to accept.
  double tolerance = 1e-8;
  /// Upper bound on the Krylov basis size (0: no bound beyond the matrix size).
  Eigen::Index max_basis = 0;
  std::uint64_t seed = 0x5eed;
};

struct EigenResult {
  /// Ascending.
  Eigen::VectorXd values;
  /// B-orthonormal columns.
  Eigen::MatrixXd vectors;
  /// Relative residual per pair.
  Eigen::VectorXd residuals;
  Eigen::Index basis_size = 0;
};

/// The `count` smallest eigenpairs of A x = theta B x with A symmetric and B
/// symmetric positive definite.
///
/// The shift-invert path builds a block Krylov space of (A + sigma B)^{-1} B
/// with full B-reorthogonalization and extracts Ritz pairs of the original
/// pencil, enlarging the space until every requested residual is below
/// tolerance. Throws NumericFailure if that cannot be reached.
EigenResult lowest_eigenpairs(const Eigen::SparseMatrix<double>& A,
                              const Eigen::SparseMatrix<double>& B, Eigen::Index count,
                              const EigenOptions& options = {});

}  // namespace wentzell
