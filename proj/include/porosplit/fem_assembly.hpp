#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "porosplit/grid.hpp"
#include "porosplit/materials.hpp"
#include "porosplit/sparse.hpp"

namespace porosplit {

// Q1 nodal displacements: degree of freedom (node, component) lives at
// dim * node + component.
inline int displacement_dof(const StructuredGrid& grid, int node, int component) {
  return grid.dim() * node + component;
}
inline int num_displacement_dofs(const StructuredGrid& grid) {
  return grid.dim() * grid.num_nodes();
}

struct DofConstraint {
  int node = 0;
  int component = 0;
  double value = 0.0;  // m

  bool operator==(const DofConstraint&) const = default;
};

/// Prescribed nodal displacement components. No (node, component) pair twice.
class DirichletSet {
 public:
  void add(int node, int component, double value = 0.0);
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const std::vector<DofConstraint>& entries() const { return entries_; }

  /// Per-dof flag and prescribed value vectors sized for `grid`.
  std::vector<char> mask(const StructuredGrid& grid) const;
  Vector values(const StructuredGrid& grid) const;

 private:
  std::vector<DofConstraint> entries_;
};

/// Element stiffness of one cell (plane strain in 2D), 2x2(x2) Gauss rule.
Eigen::MatrixXd element_stiffness(const StructuredGrid& grid, const MaterialRegion& material);

/// Element divergence integrals: entry (a * dim + d) = b * int_K dN_a/dx_d.
Eigen::VectorXd element_divergence(const StructuredGrid& grid, const MaterialRegion& material);

/// Stiffness without any boundary treatment (singular: rigid-body modes).
SparseMatrix assemble_stiffness_unconstrained(const StructuredGrid& grid,
                                              const MaterialTable& materials);

/// Stiffness with constrained rows/columns replaced by the identity.
/// An empty constraint set leaves A singular; a warning is appended to
/// `warnings` (or written to stderr when `warnings` is null).
SparseMatrix assemble_stiffness(const StructuredGrid& grid, const MaterialTable& materials,
                                const DirichletSet& dirichlet,
                                std::vector<std::string>* warnings = nullptr);

/// B(K, j) = b int_K div(psi_j). One row per cell.
SparseMatrix assemble_coupling(const StructuredGrid& grid, const MaterialTable& materials);

/// Same, with the columns of constrained degrees of freedom removed.
SparseMatrix assemble_coupling(const StructuredGrid& grid, const MaterialTable& materials,
                               const DirichletSet& dirichlet);

/// Uniform traction (Pa) on one boundary face of one cell.
struct Traction {
  int cell = 0;
  int axis = 0;
  int side = 0;
  Vec3 value{0.0, 0.0, 0.0};

  bool operator==(const Traction&) const = default;
};

/// The traction `value` applied on every face of boundary side (axis, side).
std::vector<Traction> side_traction(const StructuredGrid& grid, int axis, int side,
                                    const Vec3& value);

/// Consistent nodal loads from boundary tractions and the body force
/// rho * gravity. Throws std::invalid_argument for a traction that does not
/// sit on the boundary.
Vector assemble_mech_load(const StructuredGrid& grid, const MaterialTable& materials,
                          const std::vector<Traction>& tractions, const Vec3& gravity);

}  // namespace porosplit
