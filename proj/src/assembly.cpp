#include "wentzell/assembly.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "wentzell/errors.hpp"

namespace wentzell {

void ProblemParams::validate() const {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidArgument("nu must be positive");
  if (!(b > 0.0) || !std::isfinite(b)) throw InvalidArgument("b must be positive");
  if (!std::isfinite(lambda)) throw InvalidArgument("lambda must be finite");
  if (!std::isfinite(g)) throw InvalidArgument("g must be finite");
  if (g_nodal.size() > 0 && !g_nodal.allFinite()) {
    throw InvalidArgument("nodal forcing must be finite");
  }
}

Eigen::VectorXd ProblemParams::forcing(Index nodes) const {
  if (g_nodal.size() == 0) return Eigen::VectorXd::Constant(nodes, g);
  if (g_nodal.size() != nodes) throw InvalidArgument("nodal forcing length mismatch");
  return g_nodal;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

// Integral over a simplex of measure `measure` in dimension d of the product
// of barycentric coordinates with the given exponents.
double barycentric_moment(const std::array<int, 3>& exponents, int d, double measure) {
  int total = 0;
  double num = factorial(d);
  for (int e : exponents) {
    num *= factorial(e);
    total += e;
  }
  return measure * num / factorial(total + d);
}

struct ElementData {
  double measure = 0.0;
  // Gradients of the barycentric coordinates, one row per vertex.
  std::array<std::array<double, 2>, 3> grad{};
};

ElementData element_data(const Mesh& mesh, const Index* v) {
  ElementData out;
  const auto& nodes = mesh.nodes();
  if (mesh.dimension() == 1) {
    const double len = nodes[v[1]][0] - nodes[v[0]][0];
    out.measure = std::abs(len);
    out.grad[0] = {-1.0 / len, 0.0};
    out.grad[1] = {1.0 / len, 0.0};
    return out;
  }
  const auto& a = nodes[v[0]];
  const auto& b = nodes[v[1]];
  const auto& c = nodes[v[2]];
  const double det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
  out.measure = 0.5 * std::abs(det);
  out.grad[0] = {(b[1] - c[1]) / det, (c[0] - b[0]) / det};
  out.grad[1] = {(c[1] - a[1]) / det, (a[0] - c[0]) / det};
  out.grad[2] = {(a[1] - b[1]) / det, (b[0] - a[0]) / det};
  return out;
}

}  // namespace

OperatorPencil assemble_pencil(const Mesh& mesh, const ProblemParams& params,
                               const std::optional<Eigen::VectorXd>& q,
                               BulkMass bulk_mass) {
  params.validate();
  const Index n = mesh.node_count();
  if (q) {
    if (q->size() != n) throw InvalidArgument("potential length does not match node count");
    if ((q->array() < 0.0).any() || !q->allFinite()) {
      throw InvalidArgument("potential q must be nonnegative");
    }
  }
  const bool has_q = q && (q->array() != 0.0).any();

  const int d = mesh.dimension();
  const int nv = mesh.vertices_per_element();
  Triplets stiff, mass, pot;
  stiff.reserve(static_cast<std::size_t>(mesh.element_count()) * nv * nv);
  mass.reserve(stiff.capacity());

  for (Index e = 0; e < mesh.element_count(); ++e) {
    const Index* v = mesh.element(e);
    const ElementData el = element_data(mesh, v);
    for (int i = 0; i < nv; ++i) {
      for (int j = 0; j < nv; ++j) {
        const double kij = el.measure * (el.grad[i][0] * el.grad[j][0] +
                                         el.grad[i][1] * el.grad[j][1]);
        stiff.emplace_back(v[i], v[j], kij);

        if (bulk_mass == BulkMass::Consistent) {
          std::array<int, 3> ex{0, 0, 0};
          ex[i] += 1;
          ex[j] += 1;
          mass.emplace_back(v[i], v[j], barycentric_moment(ex, d, el.measure));
        } else if (i == j) {
          mass.emplace_back(v[i], v[i], el.measure / nv);
        }

        if (has_q) {
          if (bulk_mass == BulkMass::Consistent) {
            // Exact integral of (P1 interpolant of q) * phi_i * phi_j.
            double acc = 0.0;
            for (int k = 0; k < nv; ++k) {
              std::array<int, 3> ex{0, 0, 0};
              ex[i] += 1;
              ex[j] += 1;
              ex[k] += 1;
              acc += (*q)[v[k]] * barycentric_moment(ex, d, el.measure);
            }
            pot.emplace_back(v[i], v[j], acc);
          } else if (i == j) {
            pot.emplace_back(v[i], v[i], (*q)[v[i]] * el.measure / nv);
          }
        }
      }
    }
  }

  OperatorPencil p;
  p.dimension = d;
  p.b = params.b;
  p.h = mesh.h();
  p.q = q ? *q : Eigen::VectorXd::Zero(n);

  p.K0.resize(n, n);
  p.K0.setFromTriplets(stiff.begin(), stiff.end());
  p.M_bulk.resize(n, n);
  p.M_bulk.setFromTriplets(mass.begin(), mass.end());
  if (has_q) {
    SparseMatrix potential(n, n);
    potential.setFromTriplets(pot.begin(), pot.end());
    p.K = p.K0 + potential;
  } else {
    p.K = p.K0;
  }

  Triplets surf;
  const auto& sw = mesh.surface_weights();
  for (Index node : mesh.boundary_nodes()) surf.emplace_back(node, node, sw[node] / params.b);
  p.M_surf.resize(n, n);
  p.M_surf.setFromTriplets(surf.begin(), surf.end());
  p.M = p.M_bulk + p.M_surf;

  for (SparseMatrix* m : {&p.K, &p.K0, &p.M_bulk, &p.M_surf, &p.M}) m->makeCompressed();

  auto factor = std::make_shared<Eigen::SimplicialLLT<SparseMatrix>>(p.M);
  if (factor->info() != Eigen::Success) throw NumericFailure("mass matrix is not positive definite");
  p.mass_factor = std::move(factor);
  return p;
}

namespace {
void check_length(const OperatorPencil& p, const Eigen::VectorXd& u, const char* who) {
  if (u.size() != p.size()) {
    throw InvalidArgument(std::string(who) + ": vector length does not match pencil size");
  }
}
}  // namespace

double x2_inner(const OperatorPencil& pencil, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  check_length(pencil, u, "x2_inner");
  check_length(pencil, v, "x2_inner");
  return u.dot(pencil.M * v);
}

double rayleigh_quotient(const OperatorPencil& pencil, const Eigen::VectorXd& u) {
  check_length(pencil, u, "rayleigh_quotient");
  const double denom = u.dot(pencil.M * u);
  if (!(denom > 0.0)) throw InvalidArgument("rayleigh_quotient: zero vector");
  return u.dot(pencil.K * u) / denom;
}

double h1_seminorm_sq(const OperatorPencil& pencil, const Eigen::VectorXd& u) {
  check_length(pencil, u, "h1_seminorm_sq");
  return u.dot(pencil.K0 * u);
}

Eigen::VectorXd apply_operator(const OperatorPencil& pencil, const Eigen::VectorXd& u) {
  check_length(pencil, u, "apply_operator");
  return pencil.mass_factor->solve(pencil.K * u);
}

void write_coo(const SparseMatrix& matrix, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  out << std::setprecision(17);
  out << "% rows " << matrix.rows() << " cols " << matrix.cols() << " nnz " << matrix.nonZeros()
      << '\n';
  for (Index col = 0; col < matrix.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(matrix, col); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
}

}  // namespace wentzell
