#include <doctest.h>

#include <cmath>
#include <numbers>

#include "wentzell/errors.hpp"
#include "wentzell/mesh.hpp"

using namespace wentzell;

TEST_CASE("interval mesh layout") {
  const Mesh m = build_interval_mesh(1.0, 4);
  REQUIRE(m.node_count() == 5);
  for (int i = 0; i < 5; ++i) CHECK(m.nodes()[i][0] == doctest::Approx(0.25 * i));
  CHECK(m.bulk_weights().sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.boundary_nodes() == std::vector<Index>{0, 4});
  CHECK(m.boundary_position(2) == -1);
}

TEST_CASE("interval surface weights are two unit points") {
  const Mesh m = build_interval_mesh(std::numbers::pi, 8);
  CHECK(m.surface_weights().sum() == doctest::Approx(2.0).epsilon(1e-14));
  const Mesh fine = build_interval_mesh(1.0, 1024);
  CHECK(fine.h() == doctest::Approx(1.0 / 1024).epsilon(1e-14));
  CHECK(fine.boundary_nodes().size() == 2);
}

TEST_CASE("rectangle counts") {
  const Mesh m = build_rectangle_mesh(1.0, 1.0, 4, 4);
  CHECK(m.node_count() == 25);
  CHECK(m.element_count() == 32);
  CHECK(m.boundary_nodes().size() == 16);
  CHECK(m.h() == doctest::Approx(std::sqrt(2.0) / 4));
}

TEST_CASE("weights partition the measures") {
  const Mesh m = build_rectangle_mesh(1.0, 1.0, 64, 64);
  CHECK(std::abs(m.bulk_weights().sum() - 1.0) <= 1e-10);
  CHECK(std::abs(m.surface_weights().sum() - 4.0) <= 1e-10);
  const Mesh r = build_rectangle_mesh(2.0, 1.0, 8, 4);
  CHECK(std::abs(r.surface_weights().sum() - 6.0) <= 1e-10);
  CHECK(std::abs(r.bulk_weights().sum() - 2.0) <= 1e-10);
}

TEST_CASE("refinement keeps weight sums") {
  const Mesh a = build_rectangle_mesh(1.5, 0.5, 6, 4);
  const Mesh b = build_rectangle_mesh(1.5, 0.5, 12, 8);
  CHECK(std::abs(a.bulk_weights().sum() - b.bulk_weights().sum()) <= 1e-12);
  CHECK(std::abs(a.surface_weights().sum() - b.surface_weights().sum()) <= 1e-12);
}

TEST_CASE("boundary nodes lie on the boundary, interior carries no surface weight") {
  const Mesh m = build_rectangle_mesh(2.0, 1.0, 8, 6);
  std::vector<bool> on(m.node_count(), false);
  for (Index i : m.boundary_nodes()) {
    const auto& p = m.nodes()[i];
    const bool edge = std::abs(p[0]) < 1e-14 || std::abs(p[0] - 2.0) < 1e-14 ||
                      std::abs(p[1]) < 1e-14 || std::abs(p[1] - 1.0) < 1e-14;
    CHECK(edge);
    on[i] = true;
  }
  for (Index i = 0; i < m.node_count(); ++i) {
    if (!on[i]) CHECK(m.surface_weights()[i] == 0.0);
  }
  CHECK(m.boundary_nodes().size() == 2 * (8 + 6));
}

TEST_CASE("trace restriction") {
  const Mesh line = build_interval_mesh(3.0, 6);
  const Eigen::VectorXd x = interpolate(line, [](double x, double) { return x; });
  const Eigen::VectorXd t = trace_restrict(line, x);
  CHECK(t[0] == 0.0);
  CHECK(t[1] == doctest::Approx(3.0));

  const Mesh sq = build_rectangle_mesh(1.0, 1.0, 5, 5);
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(sq.node_count(), 2.5);
  CHECK((trace_restrict(sq, c).array() == 2.5).all());
  const Eigen::VectorXd s = interpolate(sq, [](double x, double y) { return x + y; });
  const Eigen::VectorXd ts = trace_restrict(sq, s);
  for (std::size_t k = 0; k < sq.boundary_nodes().size(); ++k) {
    const auto& p = sq.nodes()[sq.boundary_nodes()[k]];
    CHECK(ts[k] == doctest::Approx(p[0] + p[1]));
  }
  CHECK_THROWS_AS(trace_restrict(sq, Eigen::VectorXd::Zero(3)), InvalidArgument);
}

TEST_CASE("embedding then restriction is the identity on the boundary") {
  const Mesh sq = build_rectangle_mesh(1.0, 2.0, 4, 7);
  Eigen::VectorXd b(sq.boundary_nodes().size());
  for (Index k = 0; k < b.size(); ++k) b[k] = 0.5 * k - 3.0;
  const Eigen::VectorXd full = boundary_embed(sq, b);
  CHECK((trace_restrict(sq, full) - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("boundary ordering runs counter-clockwise from the origin") {
  const Mesh sq = build_rectangle_mesh(1.0, 1.0, 4, 4);
  const auto& bn = sq.boundary_nodes();
  CHECK(sq.nodes()[bn[0]][0] == 0.0);
  CHECK(sq.nodes()[bn[0]][1] == 0.0);
  CHECK(sq.nodes()[bn[1]][0] == doctest::Approx(0.25));
  CHECK(sq.nodes()[bn[1]][1] == 0.0);
  for (std::size_t k = 0; k < bn.size(); ++k) CHECK(sq.boundary_position(bn[k]) == static_cast<Index>(k));
}

TEST_CASE("invalid sizes are rejected") {
  CHECK_THROWS_AS(build_interval_mesh(0.0, 8), InvalidArgument);
  CHECK_THROWS_AS(build_interval_mesh(1.0, 3), InvalidArgument);
  CHECK_THROWS_AS(build_rectangle_mesh(1.0, -1.0, 4, 4), InvalidArgument);
  CHECK_THROWS_AS(build_rectangle_mesh(1.0, 1.0, 4, 2), InvalidArgument);
}

TEST_CASE("domain measures") {
  CHECK(Domain::interval(2.0).surface() == 2.0);
  CHECK(Domain::rectangle(2.0, 3.0).volume() == 6.0);
  CHECK(Domain::rectangle(2.0, 3.0).surface() == 10.0);
  CHECK(Domain::box(1.0, 2.0, 3.0).surface() == doctest::Approx(22.0));
  CHECK(Domain::box(1.0, 1.0, 1.0).scaled(2.0).volume() == doctest::Approx(8.0));
}
