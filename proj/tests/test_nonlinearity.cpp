#include <doctest.h>

#include "wentzell/errors.hpp"
#include "wentzell/nonlinearity.hpp"

using namespace wentzell;

TEST_CASE("built-in nonlinearities") {
  const Nonlinearity c = Nonlinearity::cubic();
  CHECK(c.value(2.0) == 8.0);
  CHECK(c.derivative(-2.0) == 12.0);
  CHECK(c.growth().p == 4.0);
  CHECK_NOTHROW(c.validate());

  const Nonlinearity q = Nonlinearity::quintic();
  CHECK(q.value(-2.0) == -32.0);
  CHECK(q.derivative(1.5) == doctest::Approx(5 * std::pow(1.5, 4)));
  CHECK(q.growth().p == 6.0);
  CHECK_NOTHROW(q.validate());

  const Nonlinearity z = Nonlinearity::none();
  CHECK(z.is_zero());
  CHECK(z.value(3.0) == 0.0);
  CHECK(z.derivative(3.0) == 0.0);
  CHECK(z.max_derivative(100.0) == 0.0);
}

TEST_CASE("vector evaluation") {
  const Nonlinearity c = Nonlinearity::cubic();
  Eigen::VectorXd y(3);
  y << -1.0, 0.5, 2.0;
  CHECK(c.value(y)[2] == 8.0);
  CHECK(c.derivative(y)[1] == doctest::Approx(0.75));
}

TEST_CASE("derivative bound") {
  const Nonlinearity c = Nonlinearity::cubic();
  CHECK(c.max_derivative(10.0) == doctest::Approx(300.0));
  const Nonlinearity p = Nonlinearity::polynomial({0.0, -1.0, 0.0, 1.0}, {1.0, 4.0, 0.5, 1.5, 1.0});
  for (double y = -3.0; y <= 3.0; y += 0.01) CHECK(std::abs(p.derivative(y)) <= p.max_derivative(3.0));
}

TEST_CASE("user polynomial with valid constants") {
  // y^3 - y: f' = 3y^2 - 1 >= -1; y^4 - y^2 lies between y^4/2 - 1/2 and 3y^4/2 + 1/2.
  const Nonlinearity p = Nonlinearity::polynomial({0.0, -1.0, 0.0, 1.0}, {1.0, 4.0, 0.5, 1.5, 0.5});
  CHECK(p.value(2.0) == 6.0);
  CHECK(p.name() == "polynomial");
}

TEST_CASE("user polynomial with violated constants is rejected") {
  // c_f too small for y^3 - y.
  CHECK_THROWS_AS(Nonlinearity::polynomial({0.0, -1.0, 0.0, 1.0}, {0.5, 4.0, 0.5, 1.5, 0.5}),
                  InvalidArgument);
  // Lower growth bound fails without C_f.
  CHECK_THROWS_AS(Nonlinearity::polynomial({0.0, -1.0, 0.0, 1.0}, {1.0, 4.0, 1.0, 1.5, 0.0}),
                  InvalidArgument);
  // Wrong sign of the leading term.
  CHECK_THROWS_AS(Nonlinearity::polynomial({0.0, 0.0, 0.0, -1.0}, {}), InvalidArgument);
  // p must exceed 2.
  CHECK_THROWS_AS(Nonlinearity::polynomial({0.0, 1.0}, {0.0, 2.0, 1.0, 1.0, 0.0}), InvalidArgument);
}
