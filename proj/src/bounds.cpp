#include "wentzell/bounds.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

#include "wentzell/errors.hpp"

namespace wentzell {

double unit_ball_volume(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi / 3.0;
    default: throw InvalidArgument("unit ball volume tabulated for n = 1, 2, 3 only");
  }
}

double WeylConstants::surface_constant() const {
  if (!surface) throw NotDefined("the surface Weyl constant needs n >= 2");
  return *surface;
}

const Bracket& WeylConstants::wentzell_bracket() const {
  if (!bracket) throw NotDefined("the Wentzell Weyl bracket needs n >= 2");
  return *bracket;
}

WeylConstants weyl_constants(const Domain& domain, double b) {
  if (!(b > 0.0)) throw InvalidArgument("b must be positive");
  const int n = domain.dimension();
  const double two_pi = 2.0 * std::numbers::pi;

  WeylConstants w;
  w.dimension = n;
  w.bulk = two_pi * two_pi / std::pow(unit_ball_volume(n) * domain.volume(), 2.0 / n);
  if (n == 1) return w;

  const double cs = two_pi / std::pow(unit_ball_volume(n - 1) * domain.surface(), 1.0 / (n - 1));
  w.surface = cs;
  if (n == 2) {
    const double cd = w.bulk;
    w.bracket = Bracket{cd * cs / (2.0 * (cd / b + cs)), std::min(cd, b * cs)};
  } else {
    w.bracket = Bracket{b * cs * std::pow(2.0, -1.0 / (n - 1)), b * cs};
  }
  return w;
}

BoundReport evaluate_bounds(const ProblemParams& params, const GrowthConstants& growth,
                            const Domain& domain, double weyl_constant, double lt_constant,
                            const BoundPrefactors& prefactors) {
  params.validate();
  if (!(weyl_constant > 0.0)) throw InvalidArgument("Weyl constant must be positive");
  if (!(lt_constant > 0.0)) throw InvalidArgument("Lieb-Thirring constant must be positive");
  if (!(growth.c_f >= 0.0)) throw InvalidArgument("c_f must be nonnegative");

  const int n = domain.dimension();
  const double nu = params.nu;
  const double lambda = params.lambda;
  const double drive = growth.c_f + lambda;
  const double gain = std::max(lambda, 0.0);
  const double exponent = n == 1 ? 0.5 : static_cast<double>(n - 1);

  BoundReport r;
  r.dimension = n;
  r.weyl_constant = weyl_constant;
  r.lt_constant = lt_constant;
  r.prefactors = prefactors;

  r.d_star = std::pow(std::max(0.0, 1.0 + drive / (nu * lt_constant * weyl_constant)), exponent);
  r.upper_W = prefactors.wentzell_upper * std::pow(std::max(0.0, 1.0 + drive / (nu * weyl_constant)), exponent);
  r.lower_W = prefactors.wentzell_lower * std::pow(gain / (weyl_constant * nu), exponent);

  const double half_n = 0.5 * n;
  r.upper_static = prefactors.static_upper *
                   std::pow(std::max(0.0, 1.0 + drive / nu * std::pow(domain.volume(), 2.0 / n)), half_n);
  r.lower_static = prefactors.static_lower * std::pow(gain / nu, half_n) * domain.volume();

  if (n >= 3) {
    const double nb = nu * params.b;
    const double area = domain.surface();
    r.lower_surface = prefactors.surface_lower * std::pow(gain / nb, n - 1) * area;
    r.upper_surface = prefactors.surface_upper *
                      std::pow(std::max(0.0, 1.0 + drive / nb * std::pow(area, 1.0 / (n - 1))), n - 1);
  }
  return r;
}

namespace {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

ScalingTable compare_scaling(const std::vector<Domain>& family, const ProblemParams& params,
                             const GrowthConstants& growth, double lt_constant,
                             const BoundPrefactors& prefactors) {
  if (family.size() < 2) throw InvalidArgument("compare_scaling needs at least two domains");
  const int n = family.front().dimension();
  for (const auto& d : family) {
    if (d.dimension() != n) throw InvalidArgument("compare_scaling: mixed dimensions in family");
  }

  ScalingTable table;
  table.dimension = n;
  table.asserted = n >= 3;
  const double v0 = family.front().volume();
  std::vector<double> s, uw, us;
  for (const auto& d : family) {
    const WeylConstants w = weyl_constants(d, params.b);
    const double cw = n == 1 ? w.bulk : w.wentzell_bracket().upper;
    const BoundReport r = evaluate_bounds(params, growth, d, cw, lt_constant, prefactors);
    ScalingRow row;
    row.scale = std::pow(d.volume() / v0, 1.0 / n);
    row.upper_W = r.upper_W;
    row.upper_static = r.upper_static;
    table.rows.push_back(row);
    s.push_back(row.scale);
    uw.push_back(row.upper_W);
    us.push_back(row.upper_static);
  }
  const double base = table.rows.front().upper_W / table.rows.front().upper_static;
  for (auto& row : table.rows) row.ratio = row.upper_W / row.upper_static / base;
  table.slope_wentzell = loglog_slope(s, uw);
  table.slope_static = loglog_slope(s, us);
  return table;
}

void write_scaling_csv(const ScalingTable& table, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  out << std::setprecision(17) << "s,upper_W,upper_static,ratio\n";
  for (const auto& row : table.rows) {
    out << row.scale << ',' << row.upper_W << ',' << row.upper_static << ',' << row.ratio << '\n';
  }
}

}  // namespace wentzell
