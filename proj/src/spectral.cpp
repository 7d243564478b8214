#include "wentzell/spectral.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "wentzell/errors.hpp"
#include "wentzell/linalg.hpp"

namespace wentzell {

Spectrum solve_eigs(const OperatorPencil& pencil, Index m, const EigenOptions& options) {
  if (m < 1 || m >= pencil.size()) {
    throw InvalidArgument("solve_eigs: mode count must satisfy 1 <= m < node count");
  }
  EigenResult r = lowest_eigenpairs(pencil.K, pencil.M, m, options);

  Spectrum s;
  s.eigenvalues = std::move(r.values);
  s.eigenvectors = std::move(r.vectors);
  s.residuals = std::move(r.residuals);
  s.mesh_h = pencil.h;

  // Fix the sign convention: largest-magnitude entry positive.
  for (Index j = 0; j < s.eigenvectors.cols(); ++j) {
    Index at = 0;
    s.eigenvectors.col(j).cwiseAbs().maxCoeff(&at);
    if (s.eigenvectors(at, j) < 0.0) s.eigenvectors.col(j) *= -1.0;
  }
  return s;
}

std::vector<double> eig_oracle_1d(double length, double b, int k_max) {
  if (!(length > 0.0) || !(b > 0.0)) throw InvalidArgument("eig_oracle_1d: L and b must be positive");
  if (k_max < 0) throw InvalidArgument("eig_oracle_1d: k_max must be nonnegative");

  // Phase form of the dispersion relation: the j-th positive root solves
  //   k L - 2 atan(b / k) = j pi,
  // whose left side is strictly increasing, so [j pi / L, (j+1) pi / L]
  // always brackets exactly one root.
  auto phase = [&](double k, int j) {
    return k * length - 2.0 * std::atan(b / k) - j * std::numbers::pi;
  };
  auto dispersion = [&](double k) {
    return (k * k - b * b) * std::sin(k * length) - 2.0 * b * k * std::cos(k * length);
  };

  std::vector<double> out{0.0};
  out.reserve(static_cast<std::size_t>(k_max) + 1);
  for (int j = 0; j < k_max; ++j) {
    double lo = j * std::numbers::pi / length;
    double hi = (j + 1) * std::numbers::pi / length;
    if (lo == 0.0) lo = std::numeric_limits<double>::min();
    if (!(phase(lo, j) < 0.0) || !(phase(hi, j) > 0.0)) {
      throw NumericFailure("eig_oracle_1d: root bracketing failed");
    }
    for (int it = 0; it < 2000; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (phase(mid, j) < 0.0 ? lo : hi) = mid;
    }
    const double k = 0.5 * (lo + hi);
    // Cross-check against the trigonometric form: a genuine root makes it
    // vanish relative to its amplitude k^2 + b^2.
    if (std::abs(dispersion(k)) > 1e-8 * (k * k + b * b) * std::max(1.0, k * length)) {
      throw NumericFailure("eig_oracle_1d: bisection did not land on a root");
    }
    out.push_back(k * k);
  }
  return out;
}

double weyl_exponent(int dimension) {
  if (dimension < 1) throw InvalidArgument("dimension must be >= 1");
  return dimension == 1 ? 2.0 : 1.0 / (dimension - 1);
}

IndexWindow default_fit_window(Index modes) {
  IndexWindow w;
  w.lo = std::max<Index>(1, static_cast<Index>(std::ceil(0.1 * static_cast<double>(modes))));
  w.hi = static_cast<Index>(std::floor(0.6 * static_cast<double>(modes)));
  w.hi = std::min(w.hi, modes - 1);
  return w;
}

WeylFit power_fit(const Spectrum& spectrum, double exponent, IndexWindow window) {
  if (window.lo < 1 || window.hi >= spectrum.count() || window.hi < window.lo) {
    throw InvalidArgument("fit window must lie inside [1, m-1]");
  }
  if (window.length() < 8) throw InvalidArgument("fit window must span at least 8 indices");

  double sxy = 0.0, sxx = 0.0;
  for (Index j = window.lo; j <= window.hi; ++j) {
    const double x = std::pow(static_cast<double>(j), exponent);
    sxy += x * spectrum.eigenvalues[j];
    sxx += x * x;
  }
  WeylFit fit;
  fit.exponent_used = exponent;
  fit.fitted_slope = sxy / sxx;
  fit.fit_window = window;
  for (Index j = window.lo; j <= window.hi; ++j) {
    const double x = std::pow(static_cast<double>(j), exponent);
    const double y = spectrum.eigenvalues[j];
    fit.residual = std::max(fit.residual, std::abs(y - fit.fitted_slope * x) / std::abs(y));
  }
  return fit;
}

WeylFit weyl_fit(const Spectrum& spectrum, int dimension, IndexWindow window) {
  return power_fit(spectrum, weyl_exponent(dimension), window);
}

LiebThirringReport lieb_thirring_check(const Spectrum& spectrum, int dimension,
                                       double weyl_constant, const std::vector<Index>& m_list) {
  if (!(weyl_constant > 0.0)) throw InvalidArgument("Weyl constant must be positive");
  const double alpha = weyl_exponent(dimension);

  LiebThirringReport report;
  report.c1 = std::numeric_limits<double>::infinity();
  for (Index m : m_list) {
    if (m < 1 || m > spectrum.count()) throw InvalidArgument("m_list entries must lie in [1, modes]");
    LiebThirringRow row;
    row.m = m;
    row.gradient_sum = spectrum.eigenvalues.head(m).sum();
    const double md = static_cast<double>(m);
    row.unit_bound = weyl_constant * (std::pow(md, alpha + 1.0) - md);
    if (row.unit_bound > 0.0) report.c1 = std::min(report.c1, row.gradient_sum / row.unit_bound);
    report.rows.push_back(row);
  }
  for (auto& row : report.rows) {
    row.margin = std::isinf(report.c1) ? row.gradient_sum
                                       : row.gradient_sum - report.c1 * row.unit_bound;
  }
  return report;
}

double gradient_sum(const OperatorPencil& pencil, const Eigen::MatrixXd& family) {
  if (family.rows() != pencil.size()) throw InvalidArgument("gradient_sum: family size mismatch");
  return (family.transpose() * (pencil.K0 * family)).trace();
}

double subspace_max_quotient(const OperatorPencil& pencil, const Eigen::MatrixXd& basis) {
  if (basis.rows() != pencil.size() || basis.cols() < 1) {
    throw InvalidArgument("subspace_max_quotient: bad basis shape");
  }
  Eigen::MatrixXd k = basis.transpose() * (pencil.K * basis);
  Eigen::MatrixXd m = basis.transpose() * (pencil.M * basis);
  k = 0.5 * (k + k.transpose()).eval();
  m = 0.5 * (m + m.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(k, m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericFailure("subspace eigensolve failed");
  return es.eigenvalues().maxCoeff();
}

bool MinMaxReport::holds() const {
  for (const auto& r : rows) {
    if (r.violations > 0) return false;
  }
  return true;
}

MinMaxReport minmax_check(const OperatorPencil& pencil, const Spectrum& spectrum, int trials,
                          std::uint64_t seed) {
  if (spectrum.count() < 2) throw InvalidArgument("minmax_check needs at least 2 modes");
  CounterRng rng(seed, 0x6d696e6d6178ULL);
  MinMaxReport report;
  const Index jmax = std::min<Index>(5, spectrum.count());
  const double scale = spectrum.eigenvalues.cwiseAbs().maxCoeff();
  for (Index j = 1; j <= jmax; ++j) {
    MinMaxRow row;
    row.dimension = j;
    row.eigenvalue = spectrum.eigenvalues[j - 1];
    row.min_of_max = std::numeric_limits<double>::infinity();
    const double tol = 1e-9 * std::max(std::abs(row.eigenvalue), 1e-3 * scale);
    for (int t = 0; t < trials; ++t) {
      const double q = subspace_max_quotient(pencil, rng.normal_matrix(pencil.size(), j));
      row.min_of_max = std::min(row.min_of_max, q);
      if (q < row.eigenvalue - tol) ++row.violations;
    }
    report.rows.push_back(row);
  }
  return report;
}

void write_spectrum_csv(const Spectrum& spectrum, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  out << std::setprecision(17) << "j,lambda,residual\n";
  for (Index j = 0; j < spectrum.count(); ++j) {
    out << j << ',' << spectrum.eigenvalues[j] << ',' << spectrum.residuals[j] << '\n';
  }
}

}  // namespace wentzell
