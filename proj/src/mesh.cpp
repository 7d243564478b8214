#include "wentzell/mesh.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "wentzell/errors.hpp"

namespace wentzell {

Domain::Domain(Shape shape, int dimension, std::array<double, 3> extents)
    : shape_(shape), dimension_(dimension), extents_(extents) {
  for (int d = 0; d < dimension_; ++d) {
    if (!(extents_[d] > 0.0) || !std::isfinite(extents_[d])) {
      throw InvalidArgument("domain extents must be positive and finite");
    }
  }
}

Domain Domain::interval(double length) {
  return Domain(Shape::Interval, 1, {length, 0.0, 0.0});
}

Domain Domain::rectangle(double lx, double ly) {
  return Domain(Shape::Rectangle, 2, {lx, ly, 0.0});
}

Domain Domain::box(double lx, double ly, double lz) {
  return Domain(Shape::Box, 3, {lx, ly, lz});
}

double Domain::volume() const {
  switch (shape_) {
    case Shape::Interval:
      return extents_[0];
    case Shape::Rectangle:
      return extents_[0] * extents_[1];
    case Shape::Box:
      return extents_[0] * extents_[1] * extents_[2];
  }
  return 0.0;
}

double Domain::surface() const {
  const auto& e = extents_;
  switch (shape_) {
    case Shape::Interval:
      return 2.0;
    case Shape::Rectangle:
      return 2.0 * (e[0] + e[1]);
    case Shape::Box:
      return 2.0 * (e[0] * e[1] + e[1] * e[2] + e[0] * e[2]);
  }
  return 0.0;
}

Domain Domain::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("scale factor must be positive");
  auto e = extents_;
  for (int d = 0; d < dimension_; ++d) e[d] *= factor;
  return Domain(shape_, dimension_, e);
}

void Mesh::finalize() {
  const Index n = node_count();
  boundary_position_.assign(n, -1);
  for (std::size_t k = 0; k < boundary_nodes_.size(); ++k) {
    boundary_position_[boundary_nodes_[k]] = static_cast<Index>(k);
  }

  bulk_weights_ = Eigen::VectorXd::Zero(n);
  const int nv = vertices_per_element();
  h_ = 0.0;
  for (Index e = 0; e < element_count(); ++e) {
    const Index* v = element(e);
    double measure = 0.0;
    double diameter = 0.0;
    if (nv == 2) {
      measure = std::abs(nodes_[v[1]][0] - nodes_[v[0]][0]);
      diameter = measure;
    } else {
      const auto& a = nodes_[v[0]];
      const auto& b = nodes_[v[1]];
      const auto& c = nodes_[v[2]];
      measure = 0.5 * std::abs((b[0] - a[0]) * (c[1] - a[1]) -
                               (c[0] - a[0]) * (b[1] - a[1]));
      for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
          const auto& p = nodes_[v[i]];
          const auto& q = nodes_[v[j]];
          diameter = std::max(diameter, std::hypot(p[0] - q[0], p[1] - q[1]));
        }
      }
    }
    h_ = std::max(h_, diameter);
    for (int i = 0; i < nv; ++i) bulk_weights_[v[i]] += measure / nv;
  }
}

Mesh build_interval_mesh(double length, int segments) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw InvalidArgument("interval length must be positive");
  }
  if (segments < 4) throw InvalidArgument("interval mesh needs at least 4 segments");

  Mesh mesh(Domain::interval(length));
  const double h = length / segments;
  mesh.nodes_.reserve(segments + 1);
  for (int i = 0; i <= segments; ++i) {
    // Pin the right end exactly so the trace of x is (0, L).
    const double x = (i == segments) ? length : i * h;
    mesh.nodes_.push_back({x, 0.0});
  }
  mesh.elements_.reserve(2 * segments);
  for (int i = 0; i < segments; ++i) {
    mesh.elements_.push_back(i);
    mesh.elements_.push_back(i + 1);
  }
  mesh.boundary_nodes_ = {0, segments};
  mesh.finalize();

  mesh.surface_weights_ = Eigen::VectorXd::Zero(mesh.node_count());
  mesh.surface_weights_[0] = 1.0;
  mesh.surface_weights_[segments] = 1.0;
  return mesh;
}

Mesh build_rectangle_mesh(double lx, double ly, int nx, int ny) {
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
    throw InvalidArgument("rectangle extents must be positive");
  }
  if (nx < 4 || ny < 4) throw InvalidArgument("rectangle mesh needs at least 4 cells per side");

  Mesh mesh(Domain::rectangle(lx, ly));
  const double hx = lx / nx;
  const double hy = ly / ny;
  auto id = [nx](int i, int j) { return static_cast<Index>(j) * (nx + 1) + i; };

  mesh.nodes_.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    const double y = (j == ny) ? ly : j * hy;
    for (int i = 0; i <= nx; ++i) {
      const double x = (i == nx) ? lx : i * hx;
      mesh.nodes_.push_back({x, y});
    }
  }

  mesh.elements_.reserve(static_cast<std::size_t>(6) * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Index a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      mesh.elements_.insert(mesh.elements_.end(), {a, b, c});
      mesh.elements_.insert(mesh.elements_.end(), {a, c, d});
    }
  }

  // Counter-clockwise perimeter walk starting at the origin corner.
  auto& bnd = mesh.boundary_nodes_;
  for (int i = 0; i < nx; ++i) bnd.push_back(id(i, 0));
  for (int j = 0; j < ny; ++j) bnd.push_back(id(nx, j));
  for (int i = nx; i > 0; --i) bnd.push_back(id(i, ny));
  for (int j = ny; j > 0; --j) bnd.push_back(id(0, j));

  mesh.finalize();

  mesh.surface_weights_ = Eigen::VectorXd::Zero(mesh.node_count());
  const std::size_t nb = bnd.size();
  for (std::size_t k = 0; k < nb; ++k) {
    const auto& p = mesh.nodes_[bnd[k]];
    const auto& q = mesh.nodes_[bnd[(k + 1) % nb]];
    const double edge = std::hypot(q[0] - p[0], q[1] - p[1]);
    mesh.surface_weights_[bnd[k]] += 0.5 * edge;
    mesh.surface_weights_[bnd[(k + 1) % nb]] += 0.5 * edge;
  }
  return mesh;
}

Eigen::VectorXd trace_restrict(const Mesh& mesh, const Eigen::VectorXd& values) {
  if (values.size() != mesh.node_count()) {
    throw InvalidArgument("trace_restrict: vector length does not match node count");
  }
  const auto& bnd = mesh.boundary_nodes();
  Eigen::VectorXd out(static_cast<Index>(bnd.size()));
  for (std::size_t k = 0; k < bnd.size(); ++k) out[static_cast<Index>(k)] = values[bnd[k]];
  return out;
}

Eigen::VectorXd boundary_embed(const Mesh& mesh, const Eigen::VectorXd& trace) {
  const auto& bnd = mesh.boundary_nodes();
  if (trace.size() != static_cast<Index>(bnd.size())) {
    throw InvalidArgument("boundary_embed: vector length does not match boundary node count");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.node_count());
  for (std::size_t k = 0; k < bnd.size(); ++k) out[bnd[k]] = trace[static_cast<Index>(k)];
  return out;
}

void write_mesh_csv(const Mesh& mesh, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "nodes.csv");
    out << std::setprecision(17) << "node,x,y,bulk_weight\n";
    for (Index i = 0; i < mesh.node_count(); ++i) {
      out << i << ',' << mesh.nodes()[i][0] << ',' << mesh.nodes()[i][1] << ','
          << mesh.bulk_weights()[i] << '\n';
    }
  }
  {
    std::ofstream out(dir / "elements.csv");
    const int nv = mesh.vertices_per_element();
    out << (nv == 2 ? "element,v0,v1\n" : "element,v0,v1,v2\n");
    for (Index e = 0; e < mesh.element_count(); ++e) {
      out << e;
      for (int k = 0; k < nv; ++k) out << ',' << mesh.element(e)[k];
      out << '\n';
    }
  }
  {
    std::ofstream out(dir / "boundary.csv");
    out << std::setprecision(17) << "position,node,surface_weight\n";
    const auto& bnd = mesh.boundary_nodes();
    for (std::size_t k = 0; k < bnd.size(); ++k) {
      out << k << ',' << bnd[k] << ',' << mesh.surface_weights()[bnd[k]] << '\n';
    }
  }
}

}  // namespace wentzell
