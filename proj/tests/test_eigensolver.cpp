#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "wentzell/assembly.hpp"
#include "wentzell/eigensolver.hpp"
#include "wentzell/errors.hpp"
#include "wentzell/linalg.hpp"

using namespace wentzell;

namespace {

OperatorPencil square_pencil(int cells, double b) {
  ProblemParams p;
  p.b = b;
  return assemble_pencil(build_rectangle_mesh(1.0, 1.0, cells, cells), p);
}

}  // namespace

TEST_CASE("shift-invert agrees with the dense generalized solver") {
  const OperatorPencil p = square_pencil(14, 1.0);
  EigenOptions dense;
  dense.method = EigenMethod::Dense;
  EigenOptions krylov;
  krylov.method = EigenMethod::ShiftInvert;
  const EigenResult a = lowest_eigenpairs(p.K, p.M, 30, dense);
  const EigenResult b = lowest_eigenpairs(p.K, p.M, 30, krylov);
  CHECK(std::abs(a.values[0]) <= 1e-9);
  for (int j = 1; j < 30; ++j) {
    CHECK(b.values[j] == doctest::Approx(a.values[j]).epsilon(1e-9));
  }
  CHECK(b.residuals.maxCoeff() <= 1e-8);
  CHECK(gram_defect(p.M, b.vectors) <= 1e-8);
  CHECK(gram_defect(p.M, a.vectors) <= 1e-8);
}

TEST_CASE("indefinite A with an explicit shift") {
  const OperatorPencil p = square_pencil(10, 1.0);
  const double chi = 12.0;
  const SparseMatrix a = p.K - chi * p.M_bulk;
  EigenOptions krylov;
  krylov.method = EigenMethod::ShiftInvert;
  krylov.shift = 1.01 * chi;
  const EigenResult r = lowest_eigenpairs(a, p.M, 12, krylov);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(a), Eigen::MatrixXd(p.M));
  for (int j = 0; j < 12; ++j) CHECK(r.values[j] == doctest::Approx(es.eigenvalues()[j]).epsilon(1e-8));
  CHECK(r.values[0] < 0.0);
}

TEST_CASE("shift that is not positive definite is reported") {
  const OperatorPencil p = square_pencil(6, 1.0);
  EigenOptions krylov;
  krylov.method = EigenMethod::ShiftInvert;
  krylov.shift = -1.0;
  CHECK_THROWS_AS(lowest_eigenpairs(p.K, p.M, 4, krylov), NumericFailure);
}

TEST_CASE("count checks") {
  const OperatorPencil p = square_pencil(4, 1.0);
  CHECK_THROWS_AS(lowest_eigenpairs(p.K, p.M, 0), InvalidArgument);
  CHECK_THROWS_AS(lowest_eigenpairs(p.K, p.M, p.size() + 1), InvalidArgument);
}

TEST_CASE("deterministic for a fixed seed") {
  const OperatorPencil p = square_pencil(12, 2.0);
  EigenOptions krylov;
  krylov.method = EigenMethod::ShiftInvert;
  const EigenResult a = lowest_eigenpairs(p.K, p.M, 10, krylov);
  const EigenResult b = lowest_eigenpairs(p.K, p.M, 10, krylov);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.vectors - b.vectors).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("M-orthonormalization") {
  const OperatorPencil p = square_pencil(6, 1.0);
  CounterRng rng(9);
  Eigen::MatrixXd w = rng.normal_matrix(p.size(), 5);
  w.col(3) = w.col(0) + 2.0 * w.col(1);
  const Eigen::VectorXd r = b_orthonormalize(p.M, w, 1e-10);
  CHECK(r[3] == 0.0);
  CHECK(w.col(3).norm() == 0.0);
  Eigen::MatrixXd kept(p.size(), 4);
  kept << w.col(0), w.col(1), w.col(2), w.col(4);
  CHECK(gram_defect(p.M, kept) <= 1e-12);
}

TEST_CASE("counter-based generator") {
  CounterRng a(42), b(42), c(43);
  CHECK(a.next_u64() == b.next_u64());
  CHECK(a.next_u64() != c.next_u64());
  CounterRng u(1);
  double mean = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double x = u.uniform();
    CHECK((x > 0.0 && x < 1.0));
    mean += x;
  }
  CHECK(mean / 20000 == doctest::Approx(0.5).epsilon(0.02));
}
