#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "wentzell/assembly.hpp"
#include "wentzell/errors.hpp"
#include "wentzell/linalg.hpp"
#include "wentzell/spectral.hpp"

using namespace wentzell;

namespace {

// Positive roots of (k^2 - b^2) sin(kL) - 2bk cos(kL) = 0 for L = b = 1,
// squared, from a 40-digit bisection.
const double kInterval[] = {1.7070529755509224834, 13.492357146504842251, 43.357221104937813981,
                            92.769348921422847515, 161.88085605098282095, 250.71889284712158764};

OperatorPencil interval_pencil(double length, int cells, double b) {
  ProblemParams p;
  p.b = b;
  return assemble_pencil(build_interval_mesh(length, cells), p);
}

OperatorPencil square_pencil(int cells, double b) {
  ProblemParams p;
  p.b = b;
  return assemble_pencil(build_rectangle_mesh(1.0, 1.0, cells, cells), p);
}

}  // namespace

TEST_CASE("1D oracle roots") {
  const auto roots = eig_oracle_1d(1.0, 1.0, 6);
  REQUIRE(roots.size() == 7);
  CHECK(roots[0] == 0.0);
  for (int j = 0; j < 6; ++j) CHECK(roots[j + 1] == doctest::Approx(kInterval[j]).epsilon(1e-13));
}

TEST_CASE("1D oracle interlaces below the Neumann eigenvalues") {
  for (double b : {0.1, 1.0, 7.0}) {
    for (double length : {0.5, 1.0, 3.0}) {
      const auto roots = eig_oracle_1d(length, b, 12);
      for (int j = 1; j <= 12; ++j) {
        const double neumann = std::pow(j * std::numbers::pi / length, 2);
        const double previous = std::pow((j - 1) * std::numbers::pi / length, 2);
        CHECK(roots[j] < neumann);
        CHECK(roots[j] > previous);
      }
    }
  }
  CHECK_THROWS_AS(eig_oracle_1d(-1.0, 1.0, 3), InvalidArgument);
  CHECK_THROWS_AS(eig_oracle_1d(1.0, 0.0, 3), InvalidArgument);
}

TEST_CASE("P1 spectrum on the interval matches the oracle") {
  const OperatorPencil p = interval_pencil(1.0, 1024, 1.0);
  const Spectrum s = solve_eigs(p, 6);
  CHECK(std::abs(s.eigenvalues[0]) <= 1e-9 * s.eigenvalues[1]);
  for (int j = 1; j <= 5; ++j) CHECK(s.eigenvalues[j] == doctest::Approx(kInterval[j - 1]).epsilon(5e-3));
  // P1 eigenvalues approach from above.
  for (int j = 1; j <= 5; ++j) CHECK(s.eigenvalues[j] >= kInterval[j - 1]);
}

TEST_CASE("ground state is constant with zero eigenvalue") {
  const OperatorPencil p = square_pencil(10, 2.0);
  const Spectrum s = solve_eigs(p, 8);
  CHECK(std::abs(s.eigenvalues[0]) <= 1e-9 * s.eigenvalues[1]);
  CHECK(s.eigenvalues[1] > 0.0);
  const Eigen::VectorXd phi0 = s.eigenvectors.col(0);
  CHECK(((phi0.array() > 0.0).all() || (phi0.array() < 0.0).all()));
  CHECK((phi0.array() - phi0.mean()).abs().maxCoeff() <= 1e-8 * phi0.cwiseAbs().maxCoeff());
}

TEST_CASE("spectrum invariants") {
  const OperatorPencil p = square_pencil(12, 1.0);
  const Spectrum s = solve_eigs(p, 20);
  for (Index j = 1; j < s.count(); ++j) CHECK(s.eigenvalues[j] >= s.eigenvalues[j - 1]);
  CHECK(s.eigenvalues.minCoeff() >= -1e-9);
  CHECK(gram_defect(p.M, s.eigenvectors) <= 1e-8);
  for (Index j = 0; j < s.count(); ++j) {
    const double rq = rayleigh_quotient(p, s.eigenvectors.col(j));
    CHECK(std::abs(rq - s.eigenvalues[j]) <= 1e-9 * std::max(1.0, s.eigenvalues[j]));
  }
  for (Index i = 0; i < 3; ++i) {
    for (Index j = i + 1; j < 4; ++j) {
      CHECK(std::abs(x2_inner(p, s.eigenvectors.col(i), s.eigenvectors.col(j))) <= 1e-10);
    }
  }
}

TEST_CASE("positive potential lifts the whole spectrum") {
  ProblemParams par;
  const Mesh m = build_rectangle_mesh(1.0, 1.0, 10, 10);
  const OperatorPencil p = assemble_pencil(m, par, Eigen::VectorXd::Ones(m.node_count()));
  const Spectrum s = solve_eigs(p, 6);
  CHECK(s.eigenvalues[0] > 0.1);
}

TEST_CASE("mode count is checked") {
  const OperatorPencil p = interval_pencil(1.0, 8, 1.0);
  CHECK_THROWS_AS(solve_eigs(p, 0), InvalidArgument);
  CHECK_THROWS_AS(solve_eigs(p, 9), InvalidArgument);
}

TEST_CASE("default fit window") {
  const IndexWindow w = default_fit_window(200);
  CHECK(w.lo == 20);
  CHECK(w.hi == 120);
  CHECK(default_fit_window(5).lo == 1);
}

TEST_CASE("Weyl fit on synthetic data") {
  Spectrum s;
  s.eigenvalues.resize(40);
  for (int j = 0; j < 40; ++j) s.eigenvalues[j] = 0.75 * j;
  const WeylFit f = weyl_fit(s, 2, {5, 30});
  CHECK(f.exponent_used == 1.0);
  CHECK(f.fitted_slope == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(f.residual <= 1e-14);
  CHECK(weyl_fit(s, 3, {5, 30}).exponent_used == 0.5);
  CHECK(weyl_fit(s, 1, {5, 30}).exponent_used == 2.0);
  CHECK_THROWS_AS(weyl_fit(s, 2, {5, 11}), InvalidArgument);
  CHECK_THROWS_AS(weyl_fit(s, 2, {0, 20}), InvalidArgument);
  CHECK_THROWS_AS(weyl_fit(s, 2, {20, 40}), InvalidArgument);
}

TEST_CASE("linear law beats the square-root law on the square") {
  const OperatorPencil p = square_pencil(32, 1.0);
  const Spectrum s = solve_eigs(p, 80);
  const IndexWindow w{10, 48};
  const WeylFit lin = weyl_fit(s, 2, w);
  const WeylFit sqrt_law = power_fit(s, 0.5, w);
  CHECK(5.0 * lin.residual <= sqrt_law.residual);
}

TEST_CASE("Lieb-Thirring constant is the tightest valid one") {
  Spectrum s;
  s.eigenvalues.resize(30);
  for (int j = 0; j < 30; ++j) s.eigenvalues[j] = j;
  // sum_{j<m} j = (m^2 - m) / 2, so c1 * C_W = 1/2 exactly.
  const auto r = lieb_thirring_check(s, 2, 0.25, {5, 10, 20, 30});
  CHECK(r.c1 == doctest::Approx(2.0));
  for (const auto& row : r.rows) CHECK(row.margin >= -1e-12);
  const auto single = lieb_thirring_check(s, 2, 1.0, {1});
  CHECK(std::isinf(single.c1));
  CHECK_THROWS_AS(lieb_thirring_check(s, 2, 1.0, {31}), InvalidArgument);
  CHECK_THROWS_AS(lieb_thirring_check(s, 2, -1.0, {3}), InvalidArgument);
}

TEST_CASE("gradient sum of the eigenbasis equals the eigenvalue sum") {
  const OperatorPencil p = square_pencil(10, 1.0);
  const Spectrum s = solve_eigs(p, 12);
  CHECK(gradient_sum(p, s.eigenvectors) == doctest::Approx(s.eigenvalues.sum()).epsilon(1e-9));
}

TEST_CASE("min-max principle on random subspaces") {
  const OperatorPencil p = square_pencil(8, 1.0);
  const Spectrum s = solve_eigs(p, 8);
  const MinMaxReport r = minmax_check(p, s, 50, 17);
  CHECK(r.rows.size() == 5);
  CHECK(r.holds());
  // The span of the first j eigenvectors attains the bound.
  for (Index j = 1; j <= 5; ++j) {
    const double q = subspace_max_quotient(p, s.eigenvectors.leftCols(j));
    CHECK(q == doctest::Approx(s.eigenvalues[j - 1]).epsilon(1e-9));
  }
}

TEST_CASE("spectrum CSV") {
  const OperatorPencil p = interval_pencil(1.0, 16, 1.0);
  const Spectrum s = solve_eigs(p, 4);
  const auto path = std::filesystem::temp_directory_path() / "wentzell_test_spectrum.csv";
  write_spectrum_csv(s, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "j,lambda,residual");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
  std::filesystem::remove(path);
}
