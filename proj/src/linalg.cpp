#include "wentzell/linalg.hpp"

#include <cmath>
#include <numbers>

namespace wentzell {

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t CounterRng::next_u64() { return splitmix64(seed_ + splitmix64(counter_++)); }

double CounterRng::uniform() {
  // 53 random mantissa bits, shifted off zero.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::MatrixXd CounterRng::normal_matrix(Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = normal();
  }
  return out;
}

Eigen::VectorXd b_orthonormalize(const Eigen::SparseMatrix<double>& B, Eigen::MatrixXd& w,
                                 double drop_tol) {
  const Eigen::Index m = w.cols();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(m);
  Eigen::MatrixXd bw(w.rows(), m);
  for (Eigen::Index j = 0; j < m; ++j) {
    Eigen::VectorXd v = w.col(j);
    const double incoming = std::sqrt(std::max(0.0, v.dot(B * v)));
    for (int pass = 0; pass < 2 && j > 0; ++pass) {
      const Eigen::VectorXd coeff = bw.leftCols(j).transpose() * v;
      v.noalias() -= w.leftCols(j) * coeff;
    }
    Eigen::VectorXd bv = B * v;
    const double norm = std::sqrt(std::max(0.0, v.dot(bv)));
    if (!(norm > drop_tol * incoming) || norm == 0.0) {
      w.col(j).setZero();
      bw.col(j).setZero();
      continue;
    }
    r[j] = norm;
    w.col(j) = v / norm;
    bw.col(j) = bv / norm;
  }
  return r;
}

double gram_defect(const Eigen::SparseMatrix<double>& B, const Eigen::MatrixXd& w) {
  const Eigen::MatrixXd bw = B * w;
  const Eigen::MatrixXd g = w.transpose() * bw;
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

}  // namespace wentzell
