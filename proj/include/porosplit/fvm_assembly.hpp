#pragma once

#include <vector>

#include "porosplit/grid.hpp"
#include "porosplit/materials.hpp"
#include "porosplit/sparse.hpp"

namespace porosplit {

/// Fixed pressure (Pa) on one boundary side, imposed through the half-cell
/// transmissibility between the boundary face and the adjacent cell center.
struct PressureBoundary {
  int axis = 0;
  int side = 0;
  double pressure = 0.0;

  bool operator==(const PressureBoundary&) const = default;
};

/// Either every region or an explicit list of region ids.
struct RegionSet {
  bool all = false;
  std::vector<int> ids;

  static RegionSet everything() { return {true, {}}; }
  static RegionSet none() { return {false, {}}; }
  static RegionSet of(std::vector<int> ids) { return {false, std::move(ids)}; }

  bool empty() const { return !all && ids.empty(); }
  bool contains(int region) const;
  bool operator==(const RegionSet&) const = default;
};

/// Pieces of the backward-Euler mass balance that do not depend on dt.
struct FlowOperators {
  SparseMatrix transmissibility;  // T: interior faces only, zero row sums
  Vector boundary_transmissibility;  // per cell, summed over pressure-boundary faces
  Vector boundary_inflow;            // per cell, sum of T_face * p_boundary
  SparseMatrix accumulation;         // M_acc = diag(V_K / M)
};

FlowOperators assemble_flow_operators(const StructuredGrid& grid, const MaterialTable& materials,
                                      const std::vector<PressureBoundary>& pressure_bcs = {});

/// Incremental flow blocks for one step of size dt:
///   C = M_acc + dt (T + T_bc)
///   Q_p = dt q - dt (T + T_bc) p_prev + dt * boundary_inflow
/// with q the per-cell volumetric source (m^3/s) sampled at the new time.
struct FlowAssembly {
  SparseMatrix C;
  SparseMatrix T;
  SparseMatrix M_acc;
  Vector Q_p;
};

FlowAssembly assemble_flow(const StructuredGrid& grid, const MaterialTable& materials, double dt,
                           const Vector& sources, const Vector& p_prev,
                           const std::vector<PressureBoundary>& pressure_bcs = {});

/// Fixed-stress diagonal R_K = alpha V_K b^2 / K_dr.
Vector assemble_fixed_stress_diagonal(const StructuredGrid& grid, const MaterialTable& materials,
                                      double alpha);

/// tau* = 9 / (32 (lambda + 4 G)), the jump-stabilization weight (1/Pa).
double optimal_tau(double lambda, double shear);
double optimal_tau(const MaterialRegion& m);

/// Pressure-jump stabilization acting on the pressure increment. Each face
/// with both cells in `regions` contributes tau V_f [[1, -1], [-1, 1]], with
/// tau = c * tau* evaluated from harmonic means of lambda and G.
SparseMatrix assemble_stabilization(const StructuredGrid& grid, const MaterialTable& materials,
                                    const RegionSet& regions, double c);

/// tau V_f of one face under the same rule (0 when the face is excluded).
double stabilization_weight(const StructuredGrid& grid, const MaterialTable& materials,
                            const InteriorFace& face, const RegionSet& regions, double c);

}  // namespace porosplit
