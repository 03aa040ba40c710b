#include "porosplit/fvm_assembly.hpp"

#include <algorithm>
#include <stdexcept>

namespace porosplit {

bool RegionSet::contains(int region) const {
  return all || std::find(ids.begin(), ids.end(), region) != ids.end();
}

namespace {

const MaterialRegion& cell_material(const StructuredGrid& grid, const MaterialTable& materials,
                                    int cell) {
  const auto r = static_cast<std::size_t>(grid.cell_region(cell));
  if (r >= materials.size()) throw std::invalid_argument("fvm: cell region has no material");
  return materials[r];
}

double harmonic(double a, double b) {
  if (a <= 0.0 || b <= 0.0) return 0.0;
  return 2.0 * a * b / (a + b);
}

}  // namespace

FlowOperators assemble_flow_operators(const StructuredGrid& grid, const MaterialTable& materials,
                                      const std::vector<PressureBoundary>& pressure_bcs) {
  const int n = grid.num_cells();
  FlowOperators out;

  std::vector<Triplet> t;
  t.reserve(grid.interior_faces().size() * 4);
  for (const InteriorFace& f : grid.interior_faces()) {
    const double tf = face_transmissibility(grid, f, materials);
    if (tf == 0.0) continue;
    t.emplace_back(f.left, f.left, tf);
    t.emplace_back(f.right, f.right, tf);
    t.emplace_back(f.left, f.right, -tf);
    t.emplace_back(f.right, f.left, -tf);
  }
  out.transmissibility = from_triplets(n, n, t);

  out.boundary_transmissibility = Vector::Zero(n);
  out.boundary_inflow = Vector::Zero(n);
  for (const PressureBoundary& bc : pressure_bcs) {
    if (bc.axis < 0 || bc.axis >= grid.dim() || (bc.side != 0 && bc.side != 1)) {
      throw std::invalid_argument("pressure boundary: side outside the grid");
    }
    for (const BoundaryFace& f : grid.boundary_faces()) {
      if (f.axis != bc.axis || f.side != bc.side) continue;
      const double tf = boundary_transmissibility(grid, f, materials);
      out.boundary_transmissibility[f.cell] += tf;
      out.boundary_inflow[f.cell] += tf * bc.pressure;
    }
  }

  Vector acc(n);
  for (int c = 0; c < n; ++c)
    acc[c] = grid.cell_volume(c) * cell_material(grid, materials, c).inv_biot_modulus;
  out.accumulation = diagonal_matrix(acc);
  return out;
}

FlowAssembly assemble_flow(const StructuredGrid& grid, const MaterialTable& materials, double dt,
                           const Vector& sources, const Vector& p_prev,
                           const std::vector<PressureBoundary>& pressure_bcs) {
  if (!(dt >= 0.0)) throw std::invalid_argument("assemble_flow: dt must be non-negative");
  const int n = grid.num_cells();
  if (sources.size() != n || p_prev.size() != n) {
    throw std::invalid_argument("assemble_flow: vectors must have one entry per cell");
  }
  const FlowOperators ops = assemble_flow_operators(grid, materials, pressure_bcs);
  FlowAssembly out;
  out.T = ops.transmissibility;
  out.M_acc = ops.accumulation;
  SparseMatrix flux = ops.transmissibility + diagonal_matrix(ops.boundary_transmissibility);
  out.C = ops.accumulation + dt * flux;
  out.C.prune(0.0);
  out.Q_p = dt * sources - dt * (flux * p_prev) + dt * ops.boundary_inflow;
  return out;
}

Vector assemble_fixed_stress_diagonal(const StructuredGrid& grid, const MaterialTable& materials,
                                      double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("fixed-stress: alpha must be non-negative");
  Vector r(grid.num_cells());
  for (int c = 0; c < grid.num_cells(); ++c) {
    const MaterialRegion& m = cell_material(grid, materials, c);
    const double b = m.biot_coefficient;
    r[c] = alpha * grid.cell_volume(c) * b * b / derived_moduli(m).bulk;
  }
  return r;
}

double optimal_tau(double lambda, double shear) { return 9.0 / (32.0 * (lambda + 4.0 * shear)); }

double optimal_tau(const MaterialRegion& m) {
  const ElasticModuli em = derived_moduli(m);
  return optimal_tau(em.lambda, em.shear);
}

double stabilization_weight(const StructuredGrid& grid, const MaterialTable& materials,
                            const InteriorFace& face, const RegionSet& regions, double c) {
  if (c == 0.0) return 0.0;
  if (!regions.contains(grid.cell_region(face.left)) ||
      !regions.contains(grid.cell_region(face.right))) {
    return 0.0;
  }
  const ElasticModuli ml = derived_moduli(cell_material(grid, materials, face.left));
  const ElasticModuli mr = derived_moduli(cell_material(grid, materials, face.right));
  double lambda = harmonic(ml.lambda, mr.lambda);
  double shear = harmonic(ml.shear, mr.shear);
  if (ml == mr) {
    lambda = ml.lambda;
    shear = ml.shear;
  }
  return c * optimal_tau(lambda, shear) * stabilization_volume(grid, face);
}

SparseMatrix assemble_stabilization(const StructuredGrid& grid, const MaterialTable& materials,
                                    const RegionSet& regions, double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("stabilization: c must be >= 0");
  for (int id : regions.ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= materials.size()) {
      throw std::invalid_argument("stabilization: unknown region id " + std::to_string(id));
    }
  }
  const int n = grid.num_cells();
  std::vector<Triplet> t;
  for (const InteriorFace& f : grid.interior_faces()) {
    const double w = stabilization_weight(grid, materials, f, regions, c);
    if (w == 0.0) continue;
    t.emplace_back(f.left, f.left, w);
    t.emplace_back(f.right, f.right, w);
    t.emplace_back(f.left, f.right, -w);
    t.emplace_back(f.right, f.left, -w);
  }
  return from_triplets(n, n, t);
}

}  // namespace porosplit
