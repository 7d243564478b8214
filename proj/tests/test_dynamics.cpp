#include <doctest.h>

#include <cmath>
#include <fstream>

#include "wentzell/assembly.hpp"
#include "wentzell/dynamics.hpp"
#include "wentzell/errors.hpp"
#include "wentzell/linalg.hpp"

using namespace wentzell;

namespace {

ProblemParams make_params(double lambda, double g = 0.0) {
  ProblemParams p;
  p.lambda = lambda;
  p.g = g;
  return p;
}

}  // namespace

TEST_CASE("heat step keeps constants and conserves mass") {
  const Mesh m = build_rectangle_mesh(1.0, 1.0, 8, 8);
  const ProblemParams par = make_params(0.0);
  const OperatorPencil p = assemble_pencil(m, par);
  const Nonlinearity none = Nonlinearity::none();
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(p.size(), 1.7);
  CHECK((step_imex(p, par, none, c, 0.01) - c).cwiseAbs().maxCoeff() <= 1e-14);

  CounterRng rng(2);
  const Eigen::VectorXd u = rng.normal_matrix(p.size(), 1).col(0).array() + 3.0;
  const Eigen::VectorXd next = step_imex(p, par, none, u, 0.01);
  const double before = (p.M * u).sum();
  CHECK(std::abs((p.M * next).sum() - before) <= 1e-12 * std::abs(before));
}

TEST_CASE("stability limit") {
  const Nonlinearity c = Nonlinearity::cubic();
  Eigen::VectorXd u(2);
  u << 1.0, -2.0;
  CHECK(stable_step_limit(c, make_params(1.0), u) == doctest::Approx(0.5 / 13.0));
  CHECK(std::isinf(stable_step_limit(Nonlinearity::none(), make_params(0.0), u)));

  const Mesh m = build_interval_mesh(1.0, 8);
  const ProblemParams par = make_params(1.0);
  const OperatorPencil p = assemble_pencil(m, par);
  const Eigen::VectorXd big = Eigen::VectorXd::Constant(9, 10.0);
  CHECK_THROWS_AS(step_imex(p, par, c, big, 0.1), InvalidArgument);
}

TEST_CASE("cubic flow settles on the stable constant") {
  const Mesh m = build_interval_mesh(1.0, 32);
  const ProblemParams par = make_params(1.0);
  const OperatorPencil p = assemble_pencil(m, par);
  SimulateOptions opt;
  opt.T = 30.0;
  opt.tau = 0.01;
  opt.sample_every = 100;
  const auto d = simulate(p, par, Nonlinearity::cubic(), Eigen::VectorXd::Constant(33, 0.5), opt);
  CHECK((d.final_state.array() - 1.0).abs().maxCoeff() <= 1e-6);
}

TEST_CASE("constant equilibria stay put under the full scheme") {
  const Mesh m = build_rectangle_mesh(1.0, 1.0, 6, 6);
  const ProblemParams par = make_params(1.0, 0.1);
  const OperatorPencil p = assemble_pencil(m, par);
  const Nonlinearity c = Nonlinearity::cubic();
  for (const auto& eq : find_constant_equilibria(c, par)) {
    if (eq.chi > 0.0) continue;  // unstable ones amplify round-off
    SimulateOptions opt;
    opt.T = 1.0;
    opt.tau = 0.01;
    const auto d = simulate(p, par, c, Eigen::VectorXd::Constant(p.size(), eq.z), opt);
    CHECK((d.final_state.array() - eq.z).abs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("heat flow: energy decreases and mass is conserved") {
  const Mesh m = build_rectangle_mesh(1.0, 1.0, 10, 10);
  const ProblemParams par = make_params(0.0);
  const OperatorPencil p = assemble_pencil(m, par);
  const Eigen::VectorXd u0 = interpolate(m, [](double x, double y) { return 1.0 + std::cos(3 * x) * y; });
  SimulateOptions opt;
  opt.T = 0.2;
  opt.tau = 1e-3;
  const auto d = simulate(p, par, Nonlinearity::none(), u0, opt);
  REQUIRE(d.x2_norm_sq.size() == 201);
  for (std::size_t i = 1; i < d.x2_norm_sq.size(); ++i) {
    CHECK(d.x2_norm_sq[i] <= d.x2_norm_sq[i - 1]);
    CHECK(std::abs(d.total_mass[i] - d.total_mass[0]) <= 1e-10 * std::abs(d.total_mass[0]));
  }
  CHECK(d.fitted_decay_rate > 0.0);
}

TEST_CASE("Lipschitz dependence on initial data") {
  const Mesh m = build_interval_mesh(1.0, 32);
  const ProblemParams par = make_params(1.0);
  const OperatorPencil p = assemble_pencil(m, par);
  const Nonlinearity c = Nonlinearity::cubic();
  const Eigen::VectorXd a = interpolate(m, [](double x, double) { return 0.3 + std::sin(4 * x); });
  const Eigen::VectorXd b = a.array() + 1e-3 * (a.array() * 7.0).cos();
  SimulateOptions opt;
  opt.T = 1.0;
  opt.tau = 1e-3;
  opt.sample_every = 1000;
  const auto da = simulate(p, par, c, a, opt);
  const auto db = simulate(p, par, c, b, opt);
  const Eigen::VectorXd e0 = a - b, e1 = da.final_state - db.final_state;
  const double d0 = std::sqrt(e0.dot(p.M * e0)), d1 = std::sqrt(e1.dot(p.M * e1));
  const double rate = std::log(d1 / d0);  // over t = 1
  CHECK(rate <= c.growth().c_f + par.lambda);
}

TEST_CASE("adaptive substeps tame large data, fixed steps diverge") {
  const Mesh m = build_interval_mesh(1.0, 16);
  const ProblemParams par = make_params(1.0);
  const OperatorPencil p = assemble_pencil(m, par);
  const Nonlinearity c = Nonlinearity::cubic();
  const Eigen::VectorXd u0 = Eigen::VectorXd::Constant(17, 50.0);
  SimulateOptions opt;
  opt.T = 2.0;
  opt.tau = 0.05;
  opt.sample_every = 10;
  const auto d = simulate(p, par, c, u0, opt);
  CHECK(d.substeps > d.steps);
  CHECK(d.linf_norm.back() < 5.0);

  opt.adaptive = false;
  try {
    simulate(p, par, c, u0, opt);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.time() > 0.0);
    CHECK(e.time() <= opt.T);
  }
}

TEST_CASE("decay-rate fit recovers an exponential") {
  std::vector<double> t, v;
  for (int i = 0; i <= 200; ++i) {
    t.push_back(0.01 * i);
    v.push_back(2.0 + 5.0 * std::exp(-3.0 * t.back()));
  }
  v.back() = 2.0;
  CHECK(fit_decay_rate(t, v) == doctest::Approx(3.0).epsilon(0.01));
  CHECK(std::isnan(fit_decay_rate({0.0, 1.0}, {1.0, 0.5})));
}

TEST_CASE("equilibria of the cubic") {
  const Nonlinearity c = Nonlinearity::cubic();
  const auto three = find_constant_equilibria(c, make_params(1.0));
  REQUIRE(three.size() == 3);
  CHECK(three[0].z == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(three[1].z == 0.0);
  CHECK(three[2].z == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(three[0].chi == doctest::Approx(-2.0));
  CHECK(three[1].chi == doctest::Approx(1.0));
  CHECK(three[2].chi == doctest::Approx(-2.0));

  const auto one = find_constant_equilibria(c, make_params(0.0));
  REQUIRE(one.size() == 1);
  CHECK(one[0].z == 0.0);
  CHECK(one[0].chi == 0.0);
}

TEST_CASE("equilibria of the forced cubic match a high-precision bisection") {
  const double z[] = {-0.94564927392359144017, -0.10103125788101082341, 1.0466805318046022636};
  const double chi[] = {-1.6827576478166470332, 0.96937805479294206515, -2.2866204069762950319};
  const auto eqs = find_constant_equilibria(Nonlinearity::cubic(), make_params(1.0, 0.1));
  REQUIRE(eqs.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(eqs[i].z - z[i]) <= 1e-12);
    CHECK(std::abs(eqs[i].chi - chi[i]) <= 1e-11);
    CHECK(eqs[i].residual <= 1e-12);
  }
}

TEST_CASE("equilibria need constant forcing and isolated roots") {
  ProblemParams par = make_params(1.0);
  par.g_nodal = Eigen::VectorXd::Ones(4);
  CHECK_THROWS_AS(find_constant_equilibria(Nonlinearity::cubic(), par), InvalidArgument);
  CHECK_THROWS_AS(find_constant_equilibria(Nonlinearity::none(), make_params(0.0)), NotDefined);
  const auto lin = find_constant_equilibria(Nonlinearity::none(), make_params(2.0, 1.0));
  REQUIRE(lin.size() == 1);
  CHECK(lin[0].z == doctest::Approx(-0.5));
}

TEST_CASE("finite differences of the step match the tangent step") {
  const Mesh m = build_rectangle_mesh(1.0, 1.0, 8, 8);
  const ProblemParams par = make_params(1.0);
  const OperatorPencil p = assemble_pencil(m, par);
  CounterRng rng(31);
  const Eigen::MatrixXd uv = rng.normal_matrix(p.size(), 2);
  const std::vector<double> eps{1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7};

  const auto cubic = jacobian_check(p, par, Nonlinearity::cubic(), uv.col(0), uv.col(1), eps, 0.02);
  CHECK(cubic.min_error < 1e-6);
  CHECK(cubic.observed_order == doctest::Approx(2.0).epsilon(0.1));

  const auto linear = jacobian_check(p, par, Nonlinearity::none(), uv.col(0), uv.col(1), eps, 0.02);
  for (const auto& row : linear.rows) CHECK(row.relative_error <= 1e-8);
}

TEST_CASE("diagnostics CSV") {
  const Mesh m = build_interval_mesh(1.0, 8);
  const ProblemParams par = make_params(0.0);
  const OperatorPencil p = assemble_pencil(m, par);
  SimulateOptions opt;
  opt.T = 0.01;
  opt.tau = 1e-3;
  opt.sample_every = 5;
  const auto d = simulate(p, par, Nonlinearity::none(), Eigen::VectorXd::LinSpaced(9, 0.0, 1.0), opt);
  CHECK(d.times.size() == 3);
  const auto path = std::filesystem::temp_directory_path() / "wentzell_test_diag.csv";
  write_diagnostics_csv(d, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x2_norm_sq,h1_seminorm_sq,linf_norm,mass");
  std::filesystem::remove(path);
}
