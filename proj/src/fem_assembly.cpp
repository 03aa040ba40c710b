#include "porosplit/fem_assembly.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace porosplit {

void DirichletSet::add(int node, int component, double value) {
  for (const auto& e : entries_) {
    if (e.node == node && e.component == component) {
      throw std::invalid_argument("dirichlet: duplicate constraint on node " +
                                  std::to_string(node) + " component " +
                                  std::to_string(component));
    }
  }
  entries_.push_back({node, component, value});
}

std::vector<char> DirichletSet::mask(const StructuredGrid& grid) const {
  std::vector<char> m(static_cast<std::size_t>(num_displacement_dofs(grid)), 0);
  for (const auto& e : entries_) {
    if (e.node < 0 || e.node >= grid.num_nodes() || e.component < 0 ||
        e.component >= grid.dim()) {
      throw std::invalid_argument("dirichlet: constraint outside the grid");
    }
    m[static_cast<std::size_t>(displacement_dof(grid, e.node, e.component))] = 1;
  }
  return m;
}

Vector DirichletSet::values(const StructuredGrid& grid) const {
  Vector v = Vector::Zero(num_displacement_dofs(grid));
  for (const auto& e : entries_) v[displacement_dof(grid, e.node, e.component)] = e.value;
  return v;
}

namespace {

constexpr double kGauss = 0.57735026918962576451;  // 1/sqrt(3)

struct QuadPoint {
  // Shape function gradients in physical coordinates, [node][axis].
  std::array<std::array<double, 3>, 8> grad{};
  double weight = 0.0;  // includes the Jacobian determinant
};

// Gauss points of the reference cell mapped onto one uniform grid cell.
std::vector<QuadPoint> quadrature(const StructuredGrid& grid) {
  const int dim = grid.dim();
  const int nn = grid.nodes_per_cell();
  const Vec3& h = grid.spacing();
  double det = 1.0;
  for (int d = 0; d < dim; ++d) det *= 0.5 * h[d];
  if (dim == 2) det *= h[2];  // unit depth

  std::vector<QuadPoint> pts;
  const int nq = dim == 2 ? 4 : 8;
  for (int q = 0; q < nq; ++q) {
    const std::array<double, 3> xi{(q & 1) ? kGauss : -kGauss, (q & 2) ? kGauss : -kGauss,
                                   (q & 4) ? kGauss : -kGauss};
    QuadPoint p;
    p.weight = det;
    for (int a = 0; a < nn; ++a) {
      std::array<double, 3> s{(a & 1) ? 1.0 : -1.0, (a & 2) ? 1.0 : -1.0, (a & 4) ? 1.0 : -1.0};
      for (int d = 0; d < dim; ++d) {
        double g = 0.5 * s[d] * (2.0 / h[d]);
        for (int e = 0; e < dim; ++e)
          if (e != d) g *= 0.5 * (1.0 + s[e] * xi[e]);
        p.grad[a][d] = g;
      }
    }
    pts.push_back(p);
  }
  return pts;
}

// Voigt elasticity matrix; 2D is plane strain.
Eigen::MatrixXd elasticity_matrix(int dim, const MaterialRegion& m) {
  const ElasticModuli em = derived_moduli(m);
  const double l = em.lambda;
  const double g = em.shear;
  if (dim == 2) {
    Eigen::MatrixXd d(3, 3);
    d << l + 2 * g, l, 0, l, l + 2 * g, 0, 0, 0, g;
    return d;
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(6, 6);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) d(i, j) = l;
    d(i, i) = l + 2 * g;
    d(i + 3, i + 3) = g;
  }
  return d;
}

// Strain-displacement matrix at one quadrature point.
Eigen::MatrixXd strain_matrix(int dim, const QuadPoint& q, int nn) {
  Eigen::MatrixXd bm = Eigen::MatrixXd::Zero(dim == 2 ? 3 : 6, dim * nn);
  for (int a = 0; a < nn; ++a) {
    const auto& g = q.grad[a];
    const int c = dim * a;
    if (dim == 2) {
      bm(0, c) = g[0];
      bm(1, c + 1) = g[1];
      bm(2, c) = g[1];
      bm(2, c + 1) = g[0];
    } else {
      bm(0, c) = g[0];
      bm(1, c + 1) = g[1];
      bm(2, c + 2) = g[2];
      bm(3, c) = g[1];
      bm(3, c + 1) = g[0];
      bm(4, c + 1) = g[2];
      bm(4, c + 2) = g[1];
      bm(5, c) = g[2];
      bm(5, c + 2) = g[0];
    }
  }
  return bm;
}

const MaterialRegion& cell_material(const StructuredGrid& grid, const MaterialTable& materials,
                                    int cell) {
  const auto r = static_cast<std::size_t>(grid.cell_region(cell));
  if (r >= materials.size()) throw std::invalid_argument("fem: cell region has no material");
  return materials[r];
}

}  // namespace

Eigen::MatrixXd element_stiffness(const StructuredGrid& grid, const MaterialRegion& material) {
  const int dim = grid.dim();
  const int nn = grid.nodes_per_cell();
  const Eigen::MatrixXd d = elasticity_matrix(dim, material);
  Eigen::MatrixXd ke = Eigen::MatrixXd::Zero(dim * nn, dim * nn);
  for (const QuadPoint& q : quadrature(grid)) {
    const Eigen::MatrixXd bm = strain_matrix(dim, q, nn);
    ke.noalias() += q.weight * bm.transpose() * d * bm;
  }
  return ke;
}

Eigen::VectorXd element_divergence(const StructuredGrid& grid, const MaterialRegion& material) {
  const int dim = grid.dim();
  const int nn = grid.nodes_per_cell();
  Eigen::VectorXd be = Eigen::VectorXd::Zero(dim * nn);
  for (const QuadPoint& q : quadrature(grid))
    for (int a = 0; a < nn; ++a)
      for (int d = 0; d < dim; ++d) be[dim * a + d] += q.weight * q.grad[a][d];
  return material.biot_coefficient * be;
}

namespace {

std::vector<Triplet> stiffness_triplets(const StructuredGrid& grid,
                                        const MaterialTable& materials) {
  const int dim = grid.dim();
  const int nn = grid.nodes_per_cell();
  // Uniform spacing: one element matrix per region.
  std::vector<Eigen::MatrixXd> ke(materials.size());
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(grid.num_cells() * dim * nn * dim * nn));
  for (int c = 0; c < grid.num_cells(); ++c) {
    const auto r = static_cast<std::size_t>(grid.cell_region(c));
    const MaterialRegion& m = cell_material(grid, materials, c);
    if (ke[r].size() == 0) ke[r] = element_stiffness(grid, m);
    const auto nodes = grid.cell_nodes(c);
    for (int a = 0; a < nn; ++a)
      for (int i = 0; i < dim; ++i)
        for (int b = 0; b < nn; ++b)
          for (int j = 0; j < dim; ++j)
            t.emplace_back(displacement_dof(grid, nodes[a], i), displacement_dof(grid, nodes[b], j),
                           ke[r](dim * a + i, dim * b + j));
  }
  return t;
}

}  // namespace

SparseMatrix assemble_stiffness_unconstrained(const StructuredGrid& grid,
                                              const MaterialTable& materials) {
  const int n = num_displacement_dofs(grid);
  return from_triplets(n, n, stiffness_triplets(grid, materials));
}

SparseMatrix assemble_stiffness(const StructuredGrid& grid, const MaterialTable& materials,
                                const DirichletSet& dirichlet,
                                std::vector<std::string>* warnings) {
  if (dirichlet.empty()) {
    const std::string msg =
        "assemble_stiffness: no displacement constraints, stiffness is singular (rigid-body modes)";
    if (warnings) {
      warnings->push_back(msg);
    } else {
      std::cerr << "warning: " << msg << '\n';
    }
  }
  const int n = num_displacement_dofs(grid);
  const std::vector<char> fixed = dirichlet.mask(grid);
  std::vector<Triplet> t = stiffness_triplets(grid, materials);
  std::erase_if(t, [&](const Triplet& e) {
    return fixed[static_cast<std::size_t>(e.row())] || fixed[static_cast<std::size_t>(e.col())];
  });
  for (int i = 0; i < n; ++i)
    if (fixed[static_cast<std::size_t>(i)]) t.emplace_back(i, i, 1.0);
  return from_triplets(n, n, t);
}

SparseMatrix assemble_coupling(const StructuredGrid& grid, const MaterialTable& materials) {
  return assemble_coupling(grid, materials, DirichletSet{});
}

SparseMatrix assemble_coupling(const StructuredGrid& grid, const MaterialTable& materials,
                               const DirichletSet& dirichlet) {
  const int dim = grid.dim();
  const int nn = grid.nodes_per_cell();
  const std::vector<char> fixed = dirichlet.mask(grid);
  std::vector<Eigen::VectorXd> be(materials.size());
  std::vector<Triplet> t;
  for (int c = 0; c < grid.num_cells(); ++c) {
    const auto r = static_cast<std::size_t>(grid.cell_region(c));
    const MaterialRegion& m = cell_material(grid, materials, c);
    if (be[r].size() == 0) be[r] = element_divergence(grid, m);
    const auto nodes = grid.cell_nodes(c);
    for (int a = 0; a < nn; ++a)
      for (int d = 0; d < dim; ++d) {
        const int dof = displacement_dof(grid, nodes[a], d);
        if (!fixed[static_cast<std::size_t>(dof)]) t.emplace_back(c, dof, be[r][dim * a + d]);
      }
  }
  return from_triplets(grid.num_cells(), num_displacement_dofs(grid), t);
}

std::vector<Traction> side_traction(const StructuredGrid& grid, int axis, int side,
                                    const Vec3& value) {
  std::vector<Traction> out;
  for (const BoundaryFace& f : grid.boundary_faces())
    if (f.axis == axis && f.side == side) out.push_back({f.cell, axis, side, value});
  return out;
}

Vector assemble_mech_load(const StructuredGrid& grid, const MaterialTable& materials,
                          const std::vector<Traction>& tractions, const Vec3& gravity) {
  const int dim = grid.dim();
  const int nn = grid.nodes_per_cell();
  Vector q = Vector::Zero(num_displacement_dofs(grid));

  const bool has_gravity = gravity[0] != 0.0 || gravity[1] != 0.0 || gravity[2] != 0.0;
  if (has_gravity) {
    for (int c = 0; c < grid.num_cells(); ++c) {
      const double w = cell_material(grid, materials, c).bulk_density() * grid.cell_volume(c) / nn;
      const auto nodes = grid.cell_nodes(c);
      for (int a = 0; a < nn; ++a)
        for (int d = 0; d < dim; ++d) q[displacement_dof(grid, nodes[a], d)] += w * gravity[d];
    }
  }

  for (const Traction& tr : tractions) {
    if (tr.cell < 0 || tr.cell >= grid.num_cells() || tr.axis < 0 || tr.axis >= dim ||
        (tr.side != 0 && tr.side != 1)) {
      throw std::invalid_argument("traction: face outside the grid");
    }
    const Ijk ijk = grid.cell_ijk(tr.cell);
    const int boundary_index = tr.side == 0 ? 0 : grid.dims()[tr.axis] - 1;
    if (ijk[tr.axis] != boundary_index) {
      throw std::invalid_argument("traction: face of cell " + std::to_string(tr.cell) +
                                  " is interior");
    }
    // Each face node carries A_f / 2^(dim-1).
    const double w = grid.face_area(tr.axis) / (nn / 2);
    const auto nodes = grid.cell_nodes(tr.cell);
    for (int a = 0; a < nn; ++a) {
      if (((a >> tr.axis) & 1) != tr.side) continue;
      for (int d = 0; d < dim; ++d) q[displacement_dof(grid, nodes[a], d)] += w * tr.value[d];
    }
  }
  return q;
}

}  // namespace porosplit
