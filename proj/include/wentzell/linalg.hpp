#pragma once

#include <cstdint>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace wentzell {

/// Counter-based generator: draw k of stream `seed` is a pure function of
/// (seed, k), so results never depend on call interleaving across threads.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed ^ (stream * 0x9E3779B97F4A7C15ULL)) {}

  std::uint64_t next_u64();
  /// Uniform on (0, 1).
  double uniform();
  double normal();

  /// Matrix of independent standard normals.
  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols);

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// In-place orthonormalization of the columns of `w` in the inner product
/// x^T B y (classical Gram-Schmidt with one reorthogonalization pass).
/// Returns the diagonal of the triangular factor; a column whose norm
/// collapses below `drop_tol` times its incoming norm is zeroed and reported
/// as 0 in the result.
Eigen::VectorXd b_orthonormalize(const Eigen::SparseMatrix<double>& B, Eigen::MatrixXd& w,
                                 double drop_tol = 0.0);

/// Max-norm distance of W^T B W from the identity.
double gram_defect(const Eigen::SparseMatrix<double>& B, const Eigen::MatrixXd& w);

}  // namespace wentzell
