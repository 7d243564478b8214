#include "wentzell/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "wentzell/errors.hpp"
#include "wentzell/linalg.hpp"

namespace wentzell {

namespace {

using Sparse = Eigen::SparseMatrix<double>;

Eigen::VectorXd relative_residuals(const Eigen::MatrixXd& ax, const Eigen::MatrixXd& bx,
                                   const Eigen::VectorXd& theta, double shift) {
  const double top = theta.size() ? theta.cwiseAbs().maxCoeff() : 0.0;
  Eigen::VectorXd res(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double scale = std::max({std::abs(theta[i]), 1e-3 * top, std::abs(shift),
                                   std::numeric_limits<double>::min()});
    const double bnorm = bx.col(i).norm();
    res[i] = (ax.col(i) - theta[i] * bx.col(i)).norm() / (scale * std::max(bnorm, 1e-300));
  }
  return res;
}

EigenResult dense_solve(const Sparse& A, const Sparse& B, Eigen::Index count) {
  const Eigen::MatrixXd ad = Eigen::MatrixXd(A);
  const Eigen::MatrixXd bd = Eigen::MatrixXd(B);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(ad, bd);
  if (es.info() != Eigen::Success) throw NumericFailure("dense generalized eigensolve failed");
  EigenResult out;
  out.values = es.eigenvalues().head(count);
  out.vectors = es.eigenvectors().leftCols(count);
  out.residuals = relative_residuals(A * out.vectors, B * out.vectors, out.values, 0.0);
  out.basis_size = A.rows();
  return out;
}

Eigen::Index round_up(Eigen::Index value, Eigen::Index step) {
  return ((value + step - 1) / step) * step;
}

class KrylovBasis {
 public:
  KrylovBasis(const Sparse& B, Eigen::Index n, Eigen::Index capacity)
      : B_(B), q_(n, capacity), bq_(n, capacity) {}

  Eigen::Index size() const { return k_; }
  auto q() const { return q_.leftCols(k_); }
  auto bq() const { return bq_.leftCols(k_); }

  /// Orthogonalizes `w` against the basis and appends the surviving
  /// columns. Returns the number appended.
  Eigen::Index append(Eigen::MatrixXd w) {
    for (int pass = 0; pass < 2 && k_ > 0; ++pass) {
      const Eigen::MatrixXd coeff = bq().transpose() * w;
      w.noalias() -= q() * coeff;
    }
    const Eigen::VectorXd r = b_orthonormalize(B_, w, 1e-8);
    // A second projection keeps columns that were nearly dependent on the
    // old basis clean after normalization amplified them.
    if (k_ > 0) {
      const Eigen::MatrixXd coeff = bq().transpose() * w;
      w.noalias() -= q() * coeff;
      b_orthonormalize(B_, w, 0.5);
    }
    Eigen::Index added = 0;
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (r[j] == 0.0 || w.col(j).squaredNorm() == 0.0) continue;
      if (k_ == q_.cols()) grow();
      q_.col(k_) = w.col(j);
      bq_.col(k_) = B_ * w.col(j);
      ++k_;
      ++added;
    }
    return added;
  }

 private:
  void grow() {
    const Eigen::Index cap = std::min<Eigen::Index>(q_.rows(), std::max<Eigen::Index>(8, q_.cols() * 3 / 2));
    q_.conservativeResize(Eigen::NoChange, cap);
    bq_.conservativeResize(Eigen::NoChange, cap);
  }

  const Sparse& B_;
  Eigen::MatrixXd q_;
  Eigen::MatrixXd bq_;
  Eigen::Index k_ = 0;
};

EigenResult shift_invert_solve(const Sparse& A, const Sparse& B, Eigen::Index count,
                               const EigenOptions& opt) {
  const Eigen::Index n = A.rows();
  double sigma = opt.shift;
  if (std::isnan(sigma)) {
    double d = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) d = std::max(d, A.coeff(i, i) / B.coeff(i, i));
    sigma = 1e-8 * std::max(d, 1.0);
  }

  const Sparse shifted = A + sigma * B;
  Eigen::SimplicialLDLT<Sparse> ldlt(shifted);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0)) {
    std::ostringstream msg;
    msg << "shift-invert: A + sigma*B is not positive definite (sigma = " << sigma << ")";
    throw NumericFailure(msg.str());
  }

  const Eigen::Index p = std::max(1, opt.block_size);
  const Eigen::Index limit = opt.max_basis > 0 ? std::min(opt.max_basis, n) : n;
  Eigen::Index target =
      std::min(limit, round_up(std::max(2 * count, count + 4 * p), p));

  CounterRng rng(opt.seed);
  KrylovBasis basis(B, n, std::min(n, target + p));
  basis.append(rng.normal_matrix(n, p));
  Eigen::Index block_begin = 0;
  Eigen::Index block_len = basis.size();

  EigenResult out;
  for (;;) {
    while (basis.size() < target) {
      Eigen::MatrixXd w = ldlt.solve(Eigen::MatrixXd(basis.bq().middleCols(block_begin, block_len)));
      const Eigen::Index before = basis.size();
      Eigen::Index added = basis.append(std::move(w));
      // Invariant subspace exhausted: continue from fresh random directions.
      for (int attempt = 0; added == 0 && attempt < 3; ++attempt) {
        added = basis.append(rng.normal_matrix(n, p));
      }
      if (added == 0) break;
      block_begin = before;
      block_len = added;
    }

    const Eigen::Index k = basis.size();
    if (k < count) throw NumericFailure("shift-invert: Krylov space smaller than requested count");
    const Eigen::MatrixXd aq = A * basis.q();
    Eigen::MatrixXd h = basis.q().transpose() * aq;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw NumericFailure("shift-invert: Ritz eigensolve failed");

    const Eigen::MatrixXd y = es.eigenvectors().leftCols(count);
    out.values = es.eigenvalues().head(count);
    out.vectors = basis.q() * y;
    out.residuals = relative_residuals(aq * y, basis.bq() * y, out.values, sigma);
    out.basis_size = k;

    const double worst = out.residuals.maxCoeff();
    if (worst <= opt.tolerance) break;
    if (k >= limit || basis.size() < target) {
      std::ostringstream msg;
      msg << "shift-invert: no convergence with basis " << k << " (worst residual " << worst
          << ", tolerance " << opt.tolerance << ")";
      throw NumericFailure(msg.str());
    }
    target = std::min(limit, round_up(target + std::max(p, target / 4), p));
  }
  return out;
}

}  // namespace

EigenResult lowest_eigenpairs(const Sparse& A, const Sparse& B, Eigen::Index count,
                              const EigenOptions& options) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || B.cols() != n) {
    throw InvalidArgument("lowest_eigenpairs: matrix shapes do not match");
  }
  if (count < 1 || count > n) throw InvalidArgument("lowest_eigenpairs: count out of range");

  const bool dense = options.method == EigenMethod::Dense ||
                     (options.method == EigenMethod::Auto && n <= options.dense_limit);
  return dense ? dense_solve(A, B, count) : shift_invert_solve(A, B, count, options);
}

}  // namespace wentzell
