#include "wentzell/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "wentzell/errors.hpp"

namespace wentzell {

double stable_step_limit(const Nonlinearity& nonlin, const ProblemParams& params,
                         const Eigen::VectorXd& u) {
  double fmax = 0.0;
  if (!nonlin.is_zero()) {
    for (Index i = 0; i < u.size(); ++i) fmax = std::max(fmax, std::abs(nonlin.derivative(u[i])));
  }
  const double rate = fmax + std::abs(params.lambda);
  return rate > 0.0 ? 0.5 / rate : std::numeric_limits<double>::infinity();
}

ImexIntegrator::ImexIntegrator(const OperatorPencil& pencil, const ProblemParams& params,
                               const Nonlinearity& nonlin)
    : pencil_(pencil), params_(params), nonlin_(nonlin), forcing_(params.forcing(pencil.size())) {
  params_.validate();
}

const ImexIntegrator::Factor& ImexIntegrator::factor(double tau) {
  auto it = factors_.find(tau);
  if (it != factors_.end()) return *it->second;
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("time step must be positive");
  const SparseMatrix system = pencil_.M + (tau * params_.nu) * pencil_.K;
  auto f = std::make_unique<Factor>(system);
  if (f->info() != Eigen::Success) throw NumericFailure("factorization of M + tau nu K failed");
  return *factors_.emplace(tau, std::move(f)).first->second;
}

Eigen::VectorXd ImexIntegrator::step(const Eigen::VectorXd& u, double tau) {
  if (u.size() != pencil_.size()) throw InvalidArgument("state length does not match the mesh");
  Eigen::VectorXd reaction = -params_.lambda * u - forcing_;
  if (!nonlin_.is_zero()) reaction += nonlin_.value(u);
  const Eigen::VectorXd load = pencil_.M * u - tau * (pencil_.M_bulk * reaction);
  return factor(tau).solve(load);
}

Eigen::MatrixXd ImexIntegrator::step_tangent(const Eigen::VectorXd& u, const Eigen::MatrixXd& v,
                                             double tau) {
  if (u.size() != pencil_.size()) throw InvalidArgument("background length does not match the mesh");
  Eigen::VectorXd rate = Eigen::VectorXd::Constant(u.size(), -params_.lambda);
  if (!nonlin_.is_zero()) rate += nonlin_.derivative(u);
  return step_tangent_frozen(rate, v, tau);
}

Eigen::MatrixXd ImexIntegrator::step_tangent_frozen(const Eigen::VectorXd& rate,
                                                    const Eigen::MatrixXd& v, double tau) {
  if (v.rows() != pencil_.size() || rate.size() != pencil_.size()) {
    throw InvalidArgument("tangent length does not match the mesh");
  }
  const Eigen::MatrixXd scaled = rate.asDiagonal() * v;
  const Eigen::MatrixXd load = pencil_.M * v - tau * (pencil_.M_bulk * scaled);
  return factor(tau).solve(load);
}

Eigen::VectorXd ImexIntegrator::rhs_load(const Eigen::VectorXd& u) const {
  Eigen::VectorXd reaction = -params_.lambda * u - forcing_;
  if (!nonlin_.is_zero()) reaction += nonlin_.value(u);
  return -params_.nu * (pencil_.K * u) - pencil_.M_bulk * reaction;
}

Eigen::VectorXd step_imex(const OperatorPencil& pencil, const ProblemParams& params,
                          const Nonlinearity& nonlin, const Eigen::VectorXd& u, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("time step must be positive");
  const double limit = stable_step_limit(nonlin, params, u);
  if (tau > limit) {
    std::ostringstream msg;
    msg << "time step " << tau << " exceeds the stability limit " << limit;
    throw InvalidArgument(msg.str());
  }
  ImexIntegrator integrator(pencil, params, nonlin);
  Eigen::VectorXd next = integrator.step(u, tau);
  if (!next.allFinite()) throw DivergenceError("non-finite state after one step", tau);
  return next;
}

namespace {

void record(TrajectoryDiagnostics& d, const OperatorPencil& pencil, const Eigen::VectorXd& u,
            double t) {
  const Eigen::VectorXd mu = pencil.M * u;
  d.times.push_back(t);
  d.x2_norm_sq.push_back(u.dot(mu));
  d.h1_seminorm_sq.push_back(u.dot(pencil.K0 * u));
  d.linf_norm.push_back(u.cwiseAbs().maxCoeff());
  d.total_mass.push_back(mu.sum());
}

}  // namespace

TrajectoryDiagnostics simulate(const OperatorPencil& pencil, const ProblemParams& params,
                               const Nonlinearity& nonlin, const Eigen::VectorXd& u0,
                               const SimulateOptions& options) {
  if (!(options.T > 0.0)) throw InvalidArgument("simulation time T must be positive");
  if (!(options.tau > 0.0)) throw InvalidArgument("time step must be positive");
  if (options.sample_every < 1) throw InvalidArgument("sample_every must be >= 1");
  if (u0.size() != pencil.size()) throw InvalidArgument("initial state length does not match the mesh");
  if (!u0.allFinite()) throw InvalidArgument("initial state must be finite");

  ImexIntegrator integrator(pencil, params, nonlin);
  const long long steps = std::max(1LL, std::llround(options.T / options.tau));

  TrajectoryDiagnostics d;
  Eigen::VectorXd u = u0;
  record(d, pencil, u, 0.0);

  constexpr int max_level = 30;
  for (long long k = 0; k < steps; ++k) {
    const double t0 = static_cast<double>(k) * options.tau;
    if (!options.adaptive) {
      u = integrator.step(u, options.tau);
      ++d.substeps;
    } else {
      // Remaining work counted in units of tau / 2^level.
      int level = 0;
      long long units = 1;
      while (units > 0) {
        double h = std::ldexp(options.tau, -level);
        const double limit = stable_step_limit(nonlin, params, u);
        while (h > limit) {
          if (++level > max_level) {
            throw DivergenceError("stability limit collapsed during substepping", t0);
          }
          units *= 2;
          h *= 0.5;
        }
        u = integrator.step(u, h);
        ++d.substeps;
        --units;
        if (!u.allFinite()) break;
      }
    }
    if (!u.allFinite()) {
      const double t = static_cast<double>(k + 1) * options.tau;
      std::ostringstream msg;
      msg << "non-finite state at t = " << t << " (step " << k + 1 << ")";
      throw DivergenceError(msg.str(), t);
    }
    ++d.steps;
    if ((k + 1) % options.sample_every == 0 || k + 1 == steps) {
      record(d, pencil, u, static_cast<double>(k + 1) * options.tau);
    }
  }
  d.fitted_decay_rate = fit_decay_rate(d.times, d.x2_norm_sq);
  if (options.keep_final_state) d.final_state = std::move(u);
  return d;
}

double fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values) {
  if (values.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  const double level = values.back();
  std::vector<double> t, y;
  const double initial_gap = std::abs(values.front() - level);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double gap = std::abs(values[i] - level);
    if (!(gap > 1e-2 * initial_gap) || !(gap > 1e-12 * std::abs(level))) break;
    t.push_back(times[i]);
    y.push_back(std::log(gap));
  }
  if (t.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(t.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
    stt += t[i] * t[i];
    sty += t[i] * y[i];
  }
  const double denom = n * stt - st * st;
  if (!(denom > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return -(n * sty - st * sy) / denom;
}

std::vector<Equilibrium> find_constant_equilibria(const Nonlinearity& nonlin,
                                                  const ProblemParams& params) {
  params.validate();
  if (!params.constant_forcing()) {
    throw InvalidArgument("constant equilibria require spatially constant forcing");
  }
  const double lambda = params.lambda;
  const double g = params.g;
  auto residual = [&](double z) { return -nonlin.value(z) + lambda * z + g; };
  auto make = [&](double z) {
    return Equilibrium{z, -nonlin.derivative(z) + lambda, std::abs(residual(z))};
  };

  if (nonlin.is_zero()) {
    if (lambda == 0.0) {
      if (g == 0.0) throw NotDefined("every constant is an equilibrium of the linear flow");
      return {};
    }
    return {make(-g / lambda)};
  }

  // For |z| >= R the growth bound forces residual(z) * z < 0.
  const auto& gc = nonlin.growth();
  const double base = (std::abs(lambda) + std::abs(g) + gc.C_f) / gc.eta1;
  const double radius = 1.1 * std::max(1.0, std::pow(base, 1.0 / (gc.p - 2.0)));

  constexpr int cells = 10000;
  std::vector<double> roots;
  double z_prev = -radius;
  double r_prev = residual(z_prev);
  if (r_prev == 0.0) roots.push_back(z_prev);
  for (int i = 1; i <= cells; ++i) {
    const double z = -radius + 2.0 * radius * i / cells;
    const double r = residual(z);
    if (r == 0.0) {
      roots.push_back(z);
    } else if (r_prev != 0.0 && (r_prev < 0.0) != (r < 0.0)) {
      double lo = z_prev, hi = z;
      const bool rising = r_prev < 0.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double rm = residual(mid);
        if (rm == 0.0) {
          lo = hi = mid;
          break;
        }
        ((rm < 0.0) == rising ? lo : hi) = mid;
      }
      const double a = std::abs(residual(lo)) <= std::abs(residual(hi)) ? lo : hi;
      roots.push_back(a);
    }
    z_prev = z;
    r_prev = r;
  }

  std::sort(roots.begin(), roots.end());
  std::vector<Equilibrium> out;
  for (double z : roots) {
    if (!out.empty() && std::abs(z - out.back().z) <= 1e-9 * radius) continue;
    out.push_back(make(z));
  }
  return out;
}

JacobianReport jacobian_check(const OperatorPencil& pencil, const ProblemParams& params,
                              const Nonlinearity& nonlin, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& v, const std::vector<double>& epsilons,
                              double tau) {
  if (epsilons.empty()) throw InvalidArgument("jacobian_check needs at least one epsilon");
  if (!u.allFinite() || !v.allFinite()) throw InvalidArgument("jacobian_check needs finite inputs");
  ImexIntegrator integrator(pencil, params, nonlin);
  const Eigen::VectorXd exact = integrator.step_tangent(u, v, tau);
  const double scale = std::sqrt(exact.dot(pencil.M * exact));
  if (!(scale > 0.0)) throw InvalidArgument("linearized step vanishes along the direction");

  std::vector<double> eps = epsilons;
  std::sort(eps.begin(), eps.end(), std::greater<>());

  JacobianReport report;
  report.min_error = std::numeric_limits<double>::infinity();
  std::size_t best = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double e = eps[i];
    if (!(e > 0.0)) throw InvalidArgument("epsilons must be positive");
    const Eigen::VectorXd fd =
        (integrator.step(u + e * v, tau) - integrator.step(u - e * v, tau)) / (2.0 * e);
    const Eigen::VectorXd diff = fd - exact;
    const double err = std::sqrt(std::max(0.0, diff.dot(pencil.M * diff))) / scale;
    report.rows.push_back({e, err});
    if (err < report.min_error) {
      report.min_error = err;
      best = i;
    }
  }

  report.observed_order = std::numeric_limits<double>::quiet_NaN();
  if (best >= 1 && report.rows[0].relative_error > 0.0) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double n = 0;
    for (std::size_t i = 0; i <= best; ++i) {
      // Points within a decade of the floor are round-off dominated.
      if (!(report.rows[i].relative_error >= 10.0 * report.min_error)) continue;
      const double x = std::log(report.rows[i].epsilon);
      const double y = std::log(report.rows[i].relative_error);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      n += 1;
    }
    const double denom = n * sxx - sx * sx;
    if (n >= 2 && denom > 0.0) report.observed_order = (n * sxy - sx * sy) / denom;
  }
  return report;
}

void write_diagnostics_csv(const TrajectoryDiagnostics& diag, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  out << std::setprecision(17) << "t,x2_norm_sq,h1_seminorm_sq,linf_norm,mass\n";
  for (std::size_t i = 0; i < diag.times.size(); ++i) {
    out << diag.times[i] << ',' << diag.x2_norm_sq[i] << ',' << diag.h1_seminorm_sq[i] << ','
        << diag.linf_norm[i] << ',' << diag.total_mass[i] << '\n';
  }
}

void write_state_csv(const Mesh& mesh, const Eigen::VectorXd& state,
                     const std::filesystem::path& path) {
  if (state.size() != mesh.node_count()) throw InvalidArgument("state length does not match the mesh");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  out << std::setprecision(17) << "node,x,y,value\n";
  for (Index i = 0; i < mesh.node_count(); ++i) {
    out << i << ',' << mesh.nodes()[i][0] << ',' << mesh.nodes()[i][1] << ',' << state[i] << '\n';
  }
}

}  // namespace wentzell
