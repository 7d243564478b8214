#include "wentzell/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wentzell/errors.hpp"

namespace wentzell {

namespace {

double horner(const std::vector<double>& c, double y) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * y + *it;
  return acc;
}

}  // namespace

Nonlinearity::Nonlinearity(std::string name, std::vector<double> coefficients,
                           GrowthConstants growth)
    : name_(std::move(name)), coefficients_(std::move(coefficients)), growth_(growth) {
  while (!coefficients_.empty() && coefficients_.back() == 0.0) coefficients_.pop_back();
  for (std::size_t k = 1; k < coefficients_.size(); ++k) {
    derivative_coefficients_.push_back(static_cast<double>(k) * coefficients_[k]);
  }
}

Nonlinearity Nonlinearity::cubic() { return {"cubic", {0.0, 0.0, 0.0, 1.0}, {0.0, 4.0, 1.0, 1.0, 0.0}}; }

Nonlinearity Nonlinearity::quintic() {
  return {"quintic", {0.0, 0.0, 0.0, 0.0, 0.0, 1.0}, {0.0, 6.0, 1.0, 1.0, 0.0}};
}

Nonlinearity Nonlinearity::none() { return {"none", {}, {0.0, 4.0, 1.0, 1.0, 0.0}}; }

Nonlinearity Nonlinearity::polynomial(std::vector<double> coefficients, GrowthConstants growth) {
  for (double c : coefficients) {
    if (!std::isfinite(c)) throw InvalidArgument("polynomial coefficients must be finite");
  }
  Nonlinearity f("polynomial", std::move(coefficients), growth);
  f.validate();
  return f;
}

double Nonlinearity::value(double y) const { return horner(coefficients_, y); }

double Nonlinearity::derivative(double y) const { return horner(derivative_coefficients_, y); }

Eigen::VectorXd Nonlinearity::value(const Eigen::VectorXd& y) const {
  return y.unaryExpr([this](double v) { return value(v); });
}

Eigen::VectorXd Nonlinearity::derivative(const Eigen::VectorXd& y) const {
  return y.unaryExpr([this](double v) { return derivative(v); });
}

double Nonlinearity::max_derivative(double bound) const {
  if (derivative_coefficients_.empty()) return 0.0;
  // |f'(y)| <= sum |a_k| |y|^k, exact for even-power-only derivatives such
  // as the cubic and quintic.
  const double r = std::abs(bound);
  double acc = 0.0;
  for (auto it = derivative_coefficients_.rbegin(); it != derivative_coefficients_.rend(); ++it) {
    acc = acc * r + std::abs(*it);
  }
  return acc;
}

void Nonlinearity::validate() const {
  const auto& g = growth_;
  if (!(g.c_f >= 0.0) || !(g.C_f >= 0.0)) throw InvalidArgument("c_f and C_f must be nonnegative");
  if (is_zero()) return;
  if (!(g.p > 2.0)) throw InvalidArgument("growth exponent p must exceed 2");
  if (!(g.eta1 > 0.0) || !(g.eta2 >= g.eta1)) {
    throw InvalidArgument("growth constants need 0 < eta1 <= eta2");
  }
  constexpr int samples = 4001;
  for (int i = 0; i < samples; ++i) {
    const double y = -10.0 + 20.0 * i / (samples - 1);
    const double fy = value(y) * y;
    const double ay = std::pow(std::abs(y), g.p);
    const double slack = 1e-12 * std::max(1.0, ay);
    std::ostringstream msg;
    if (derivative(y) < -g.c_f - slack) {
      msg << "f'(" << y << ") = " << derivative(y) << " is below -c_f = " << -g.c_f;
    } else if (fy < g.eta1 * ay - g.C_f - slack) {
      msg << "f(y)y at y = " << y << " violates the lower growth bound";
    } else if (fy > g.eta2 * ay + g.C_f + slack) {
      msg << "f(y)y at y = " << y << " violates the upper growth bound";
    } else {
      continue;
    }
    throw InvalidArgument(msg.str());
  }
}

}  // namespace wentzell
