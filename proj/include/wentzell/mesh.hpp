#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

namespace wentzell {

using Index = std::ptrdiff_t;

enum class Shape { Interval, Rectangle, Box };

/// Geometry of the physical domain. Box is supported for the closed-form
/// bound formulas only; no mesh builder exists for it.
class Domain {
 public:
  static Domain interval(double length);
  static Domain rectangle(double lx, double ly);
  static Domain box(double lx, double ly, double lz);

  int dimension() const { return dimension_; }
  Shape shape() const { return shape_; }
  const std::array<double, 3>& extents() const { return extents_; }

  /// Lebesgue measure of the domain.
  double volume() const;
  /// Measure of the boundary; two unit-weight points in 1D.
  double surface() const;

  /// Same shape with every extent multiplied by `factor`.
  Domain scaled(double factor) const;

 private:
  Domain(Shape shape, int dimension, std::array<double, 3> extents);

  Shape shape_;
  int dimension_;
  std::array<double, 3> extents_;
};

/// P1 mesh on a structured grid. Immutable after construction.
///
/// Element connectivity is stored flat with stride `vertices_per_element()`
/// (2 for segments, 3 for triangles). Boundary nodes are listed in boundary
/// ordering: {left, right} for an interval and counter-clockwise from the
/// origin corner for a rectangle.
class Mesh {
 public:
  using Point = std::array<double, 2>;

  const Domain& domain() const { return domain_; }
  int dimension() const { return domain_.dimension(); }
  Index node_count() const { return static_cast<Index>(nodes_.size()); }
  Index element_count() const {
    return static_cast<Index>(elements_.size()) / vertices_per_element();
  }
  int vertices_per_element() const { return dimension() + 1; }

  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<Index>& elements() const { return elements_; }
  const std::vector<Index>& boundary_nodes() const { return boundary_nodes_; }
  /// Position of `node` in boundary ordering, or -1 for interior nodes.
  Index boundary_position(Index node) const { return boundary_position_[node]; }

  /// Max element diameter.
  double h() const { return h_; }

  /// Lumped P1 masses for dx, one per node.
  const Eigen::VectorXd& bulk_weights() const { return bulk_weights_; }
  /// Lumped boundary masses for dS, one per node (zero on interior nodes).
  const Eigen::VectorXd& surface_weights() const { return surface_weights_; }

  /// Vertex indices of element `e`.
  const Index* element(Index e) const {
    return elements_.data() + e * vertices_per_element();
  }

 private:
  friend Mesh build_interval_mesh(double, int);
  friend Mesh build_rectangle_mesh(double, double, int, int);

  explicit Mesh(Domain domain) : domain_(domain) {}
  void finalize();

  Domain domain_;
  std::vector<Point> nodes_;
  std::vector<Index> elements_;
  std::vector<Index> boundary_nodes_;
  std::vector<Index> boundary_position_;
  double h_ = 0.0;
  Eigen::VectorXd bulk_weights_;
  Eigen::VectorXd surface_weights_;
};

/// Uniform partition of [0, L] into N segments.
Mesh build_interval_mesh(double length, int segments);

/// Structured triangulation of [0, Lx] x [0, Ly]; each grid cell is cut
/// along its lower-left to upper-right diagonal.
Mesh build_rectangle_mesh(double lx, double ly, int nx, int ny);

/// Values at the boundary nodes, in boundary ordering.
Eigen::VectorXd trace_restrict(const Mesh& mesh, const Eigen::VectorXd& values);

/// Inverse of trace_restrict on boundary-supported vectors: zero in the interior.
Eigen::VectorXd boundary_embed(const Mesh& mesh, const Eigen::VectorXd& trace);

/// Nodal interpolant of a function of the coordinates.
template <class F>
Eigen::VectorXd interpolate(const Mesh& mesh, F&& func) {
  Eigen::VectorXd out(mesh.node_count());
  for (Index i = 0; i < mesh.node_count(); ++i) {
    out[i] = func(mesh.nodes()[i][0], mesh.nodes()[i][1]);
  }
  return out;
}

/// Writes nodes.csv, elements.csv and boundary.csv into `dir`.
void write_mesh_csv(const Mesh& mesh, const std::filesystem::path& dir);

}  // namespace wentzell
