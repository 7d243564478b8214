#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace wentzell {

/// Constants in  f'(y) >= -c_f  and  eta1 |y|^p - C_f <= f(y) y <= eta2 |y|^p + C_f.
struct GrowthConstants {
  double c_f = 0.0;
  double p = 4.0;
  double eta1 = 1.0;
  double eta2 = 1.0;
  double C_f = 0.0;
};

/// Polynomial reaction term f with its declared growth constants.
class Nonlinearity {
 public:
  /// f(y) = y^3.
  static Nonlinearity cubic();
  /// f(y) = y^5.
  static Nonlinearity quintic();
  /// f = 0. Exempt from the growth checks; useful for linear runs.
  static Nonlinearity none();
  /// f(y) = sum_k coefficients[k] y^k.
  static Nonlinearity polynomial(std::vector<double> coefficients, GrowthConstants growth);

  const std::string& name() const { return name_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  const GrowthConstants& growth() const { return growth_; }
  bool is_zero() const { return coefficients_.empty(); }

  double value(double y) const;
  double derivative(double y) const;

  Eigen::VectorXd value(const Eigen::VectorXd& y) const;
  Eigen::VectorXd derivative(const Eigen::VectorXd& y) const;

  /// Upper estimate of max |f'(y)| over |y| <= bound.
  double max_derivative(double bound) const;

  /// Checks the declared constants on a grid over [-10, 10]; throws
  /// InvalidArgument describing the first violation.
  void validate() const;

 private:
  Nonlinearity(std::string name, std::vector<double> coefficients, GrowthConstants growth);

  std::string name_;
  std::vector<double> coefficients_;
  std::vector<double> derivative_coefficients_;
  GrowthConstants growth_;
};

}  // namespace wentzell
