#include "wentzell/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>

#include "wentzell/errors.hpp"
#include "wentzell/linalg.hpp"

namespace wentzell {

Eigen::MatrixXd apply_linearized(const OperatorPencil& pencil, const ProblemParams& params,
                                 const Nonlinearity& nonlin, const Eigen::VectorXd& background,
                                 const Eigen::MatrixXd& v, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("time step must be positive");
  ImexIntegrator integrator(pencil, params, nonlin);
  Eigen::MatrixXd out = integrator.step_tangent(background, v, tau);
  if (!out.allFinite()) throw DivergenceError("non-finite tangent after one step", tau);
  return out;
}

namespace {

std::vector<double> sorted_descending(const Eigen::VectorXd& v) {
  std::vector<double> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace

DimensionEstimate lyapunov_spectrum(const OperatorPencil& pencil, const ProblemParams& params,
                                    const Nonlinearity& nonlin, const Eigen::VectorXd& u0,
                                    const LyapunovOptions& opt) {
  const Index n = pencil.size();
  const Index m = opt.modes;
  if (m < 1 || m > n) throw InvalidArgument("mode count must lie in [1, node count]");
  if (u0.size() != n || !u0.allFinite()) throw InvalidArgument("background must be a finite nodal vector");
  if (!(opt.T > 0.0) || !(opt.tau > 0.0)) throw InvalidArgument("T and tau must be positive");
  if (opt.reorth_period < 1) throw InvalidArgument("reorth_period must be >= 1");
  if (!(opt.transient_fraction >= 0.0) || !(opt.transient_fraction < 1.0)) {
    throw InvalidArgument("transient_fraction must lie in [0, 1)");
  }

  ImexIntegrator integrator(pencil, params, nonlin);
  const long long steps = std::max(1LL, std::llround(opt.T / opt.tau));
  const long long cut = static_cast<long long>(std::ceil(opt.transient_fraction * static_cast<double>(steps)));

  CounterRng rng(opt.seed, 0x74616e67656e74ULL);
  Eigen::MatrixXd basis = rng.normal_matrix(n, m);
  if ((b_orthonormalize(pencil.M, basis).array() <= 0.0).any()) {
    throw NumericFailure("initial tangent basis is degenerate");
  }

  Eigen::VectorXd u = u0;
  auto reaction_rate = [&](const Eigen::VectorXd& state) {
    Eigen::VectorXd rate = Eigen::VectorXd::Constant(n, -params.lambda);
    if (!nonlin.is_zero()) rate += nonlin.derivative(state);
    return rate;
  };
  const Eigen::VectorXd frozen_rate = reaction_rate(u0);
  const double frozen_limit = stable_step_limit(nonlin, params, u0);

  auto advance = [&](double t0) {
    int level = 0;
    long long units = 1;
    constexpr int max_level = 30;
    while (units > 0) {
      double h = std::ldexp(opt.tau, -level);
      if (opt.adaptive) {
        const double limit = opt.freeze_background ? frozen_limit : stable_step_limit(nonlin, params, u);
        while (h > limit) {
          if (++level > max_level) throw DivergenceError("stability limit collapsed", t0);
          units *= 2;
          h *= 0.5;
        }
      }
      if (opt.freeze_background) {
        basis = integrator.step_tangent_frozen(frozen_rate, basis, h);
      } else {
        basis = integrator.step_tangent(u, basis, h);
        u = integrator.step(u, h);
      }
      --units;
    }
    if (!u.allFinite() || !basis.allFinite()) {
      std::ostringstream msg;
      msg << "non-finite background or tangent at t = " << t0 + opt.tau;
      throw DivergenceError(msg.str(), t0 + opt.tau);
    }
  };

  DimensionEstimate est;
  Eigen::VectorXd log_sums = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd trace_acc = Eigen::VectorXd::Zero(m);
  long long trace_samples = 0;
  long long start = -1;
  long long quarter_mark = -1;
  Eigen::VectorXd quarter_estimate;

  for (long long k = 0; k < steps; ++k) {
    advance(static_cast<double>(k) * opt.tau);
    const long long s = k + 1;
    if (s % opt.reorth_period != 0 && s != steps) continue;

    const Eigen::VectorXd r = b_orthonormalize(pencil.M, basis);
    ++est.reorthonormalizations;
    if (!(r.array() > 0.0).all()) {
      std::ostringstream msg;
      msg << "tangent basis collapsed at t = " << static_cast<double>(s) * opt.tau
          << "; reduce reorth_period";
      throw NumericFailure(msg.str());
    }

    if (start < 0) {
      if (s < cut) continue;
      start = s;
      quarter_mark = start + (3 * (steps - start)) / 4;
    } else {
      log_sums.array() += r.array().log();
      if (quarter_estimate.size() == 0 && s >= quarter_mark && s < steps) {
        quarter_estimate = log_sums / (static_cast<double>(s - start) * opt.tau);
      }
    }

    const Eigen::VectorXd rate = opt.freeze_background ? frozen_rate : reaction_rate(u);
    const Eigen::MatrixXd k_basis = pencil.K * basis;
    const Eigen::MatrixXd react = pencil.M_bulk * (rate.asDiagonal() * basis);
    for (Index j = 0; j < m; ++j) {
      trace_acc[j] += -params.nu * basis.col(j).dot(k_basis.col(j)) - basis.col(j).dot(react.col(j));
    }
    ++trace_samples;
  }

  if (start < 0 || start == steps) {
    throw InvalidArgument("T too short for the transient cut and reorthonormalization period");
  }
  est.averaging_time = static_cast<double>(steps - start) * opt.tau;
  const Eigen::VectorXd exponents = log_sums / est.averaging_time;
  est.lyapunov_exponents = sorted_descending(exponents);
  est.kaplan_yorke = kaplan_yorke(est.lyapunov_exponents);

  const Eigen::VectorXd terms = trace_acc / static_cast<double>(trace_samples);
  est.trace_terms.assign(terms.data(), terms.data() + m);
  double acc = 0.0;
  for (Index j = 0; j < m; ++j) {
    acc += terms[j];
    est.trace_sums.push_back(acc);
    if (est.m_star_trace < 0 && acc < 0.0) est.m_star_trace = j + 1;
  }

  if (quarter_estimate.size() == m) {
    const std::vector<double> early = sorted_descending(quarter_estimate);
    double top = 0.0;
    for (double mu : est.lyapunov_exponents) top = std::max(top, std::abs(mu));
    for (Index j = 0; j < m; ++j) {
      const double mu = est.lyapunov_exponents[j];
      const double denom = std::max({std::abs(mu), 1e-3 * top, std::numeric_limits<double>::min()});
      est.drift = std::max(est.drift, std::abs(mu - early[j]) / denom);
    }
  }
  est.drift_warning = est.drift > 0.1;
  return est;
}

DimensionEstimate trace_upper_estimate(const OperatorPencil& pencil, const ProblemParams& params,
                                       const Nonlinearity& nonlin, const Eigen::VectorXd& u0,
                                       Index m_max, LyapunovOptions options) {
  options.modes = m_max;
  return lyapunov_spectrum(pencil, params, nonlin, u0, options);
}

double kaplan_yorke(const std::vector<double>& exponents) {
  if (exponents.empty() || exponents.front() < 0.0) return 0.0;
  double partial = 0.0;
  for (std::size_t j = 0; j < exponents.size(); ++j) {
    if (partial + exponents[j] < 0.0) return static_cast<double>(j) + partial / std::abs(exponents[j]);
    partial += exponents[j];
  }
  return static_cast<double>(exponents.size());
}

UnstableCount unstable_count(const OperatorPencil& pencil, const ProblemParams& params,
                             const Equilibrium& eq, const Spectrum& spectrum,
                             const EigenOptions& options) {
  params.validate();
  const double nu = params.nu;
  const double chi = eq.chi;
  const Index modes = spectrum.count();
  if (modes < 1) throw InvalidArgument("unstable_count needs a nonempty spectrum");
  if (!(nu * spectrum.eigenvalues[modes - 1] > chi)) {
    std::ostringstream msg;
    msg << "spectrum too shallow: nu*Lambda_" << modes - 1 << " = "
        << nu * spectrum.eigenvalues[modes - 1] << " does not exceed chi = " << chi
        << "; request more modes";
    throw InvalidArgument(msg.str());
  }

  UnstableCount out;
  out.equilibrium = eq;
  for (Index j = 0; j < modes; ++j) {
    const double s = nu * spectrum.eigenvalues[j];
    out.zeta_roots.emplace_back(chi - s, -s);
    if (s < chi) ++out.count_paper;
    if (chi > 0.0 && s >= 0.8 * chi && s <= 1.2 * chi) ++out.crossover_band;
  }
  if (!(chi > 0.0)) return out;

  // nu K - chi M_bulk + sigma M is positive definite for sigma > chi.
  const SparseMatrix a = nu * pencil.K - chi * pencil.M_bulk;
  EigenOptions opt = options;
  opt.shift = 1.01 * chi;
  const Index n = pencil.size();
  Index request = std::min(n - 1, out.count_paper + 8);
  for (;;) {
    const EigenResult r = lowest_eigenpairs(a, pencil.M, request, opt);
    Index negative = 0;
    for (Index j = 0; j < r.values.size(); ++j) {
      if (r.values[j] < 0.0) ++negative;
    }
    if (negative < request || request == n - 1) {
      out.count_direct = negative;
      out.direct_rates.clear();
      for (Index j = 0; j < r.values.size(); ++j) out.direct_rates.push_back(-r.values[j]);
      break;
    }
    request = std::min(n - 1, 2 * request);
  }
  return out;
}

void write_exponents_csv(const DimensionEstimate& est, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  out << std::setprecision(17) << "j,exponent,trace_term,trace_sum\n";
  for (std::size_t j = 0; j < est.lyapunov_exponents.size(); ++j) {
    out << j << ',' << est.lyapunov_exponents[j] << ',' << est.trace_terms[j] << ','
        << est.trace_sums[j] << '\n';
  }
}

}  // namespace wentzell
