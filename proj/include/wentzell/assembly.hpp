#pragma once

#include <filesystem>
#include <memory>
#include <optional>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "wentzell/mesh.hpp"

namespace wentzell {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Physical coefficients of  u_t = nu*Lap(u) - f(u) + lambda*u + g  in the
/// bulk with  u_t + nu*b*du/dn = 0  on the boundary.
struct ProblemParams {
  double nu = 1.0;
  double lambda = 0.0;
  double b = 1.0;
  double g = 0.0;
  /// Optional per-node forcing; overrides `g` when non-empty.
  Eigen::VectorXd g_nodal;

  void validate() const;
  /// Forcing as a nodal field of length `nodes`.
  Eigen::VectorXd forcing(Index nodes) const;
  bool constant_forcing() const { return g_nodal.size() == 0; }
};

enum class BulkMass { Consistent, Lumped };

/// Discrete Wentzell Laplacian as the symmetric pencil (K, M).
///
/// M = M_bulk + M_surf realizes the X^2 inner product with the boundary
/// measure dS/b; K = stiffness + potential. Immutable once assembled.
struct OperatorPencil {
  SparseMatrix K;
  /// Stiffness without the potential term.
  SparseMatrix K0;
  SparseMatrix M_bulk;
  /// Lumped boundary mass divided by b.
  SparseMatrix M_surf;
  SparseMatrix M;
  Eigen::VectorXd q;
  double b = 1.0;
  int dimension = 1;
  double h = 0.0;

  Index size() const { return M.rows(); }

  /// Cholesky factor of M, used to apply M^{-1}.
  std::shared_ptr<const Eigen::SimplicialLLT<SparseMatrix>> mass_factor;
};

/// Assembles the pencil. `q`, if given, must be a nonnegative nodal field.
OperatorPencil assemble_pencil(const Mesh& mesh, const ProblemParams& params,
                               const std::optional<Eigen::VectorXd>& q = std::nullopt,
                               BulkMass bulk_mass = BulkMass::Consistent);

/// U^T M V: bulk L2 product plus boundary L2 product weighted by 1/b.
double x2_inner(const OperatorPencil& pencil, const Eigen::VectorXd& u,
                const Eigen::VectorXd& v);

/// U^T K U / U^T M U.
double rayleigh_quotient(const OperatorPencil& pencil, const Eigen::VectorXd& u);

/// U^T K0 U, the squared H1 seminorm of the bulk component.
double h1_seminorm_sq(const OperatorPencil& pencil, const Eigen::VectorXd& u);

/// W with M W = K U, the discrete action of the Wentzell Laplacian.
Eigen::VectorXd apply_operator(const OperatorPencil& pencil, const Eigen::VectorXd& u);

/// Coordinate-format text export: one "row col value" triple per line,
/// zero-based, lower and upper triangle both listed.
void write_coo(const SparseMatrix& matrix, const std::filesystem::path& path);

}  // namespace wentzell
