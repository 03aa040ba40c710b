#include "porosplit/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace porosplit {

OscillationReport oscillation_metrics(const StructuredGrid& grid, const Vector& p,
                                      const RegionSet& region) {
  if (p.size() != grid.num_cells()) {
    throw std::invalid_argument("oscillation_metrics: pressure length does not match the grid");
  }
  double volume = 0.0;
  double mass = 0.0;
  for (int c = 0; c < grid.num_cells(); ++c) {
    if (!region.contains(grid.cell_region(c))) continue;
    volume += grid.cell_volume(c);
    mass += p[c] * grid.cell_volume(c);
  }
  if (volume == 0.0) throw std::invalid_argument("oscillation_metrics: empty region");
  const double mean = mass / volume;

  double parity = 0.0;
  for (int c = 0; c < grid.num_cells(); ++c) {
    if (!region.contains(grid.cell_region(c))) continue;
    const Ijk ijk = grid.cell_ijk(c);
    const double sign = ((ijk[0] + ijk[1] + ijk[2]) % 2 == 0) ? 1.0 : -1.0;
    parity += sign * (p[c] - mean) * grid.cell_volume(c);
  }

  double jumps = 0.0;
  for (const InteriorFace& f : grid.interior_faces()) {
    if (!region.contains(grid.cell_region(f.left)) || !region.contains(grid.cell_region(f.right)))
      continue;
    const double j = p[f.left] - p[f.right];
    jumps += j * j * f.area;
  }

  OscillationReport out;
  out.jump_energy = std::sqrt(jumps) / std::sqrt(volume);
  out.checkerboard_projection = std::abs(parity) / volume;
  out.region = region;
  return out;
}

FieldDifference field_difference(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("field_difference: length mismatch");
  constexpr double eps = 1e-30;
  FieldDifference d;
  if (a.size() == 0) return d;
  d.l2_rel = (a - b).norm() / std::max(b.norm(), eps);
  d.linf_rel = (a - b).lpNorm<Eigen::Infinity>() / std::max(b.lpNorm<Eigen::Infinity>(), eps);
  return d;
}

MassBalance mass_balance(const Model& model, double dt, const Vector& accumulation,
                         const Vector& p_new, const Vector& dp, const Vector& source_volume) {
  const StructuredGrid& g = model.grid;
  const int n = g.num_cells();
  if (accumulation.size() != n || p_new.size() != n || dp.size() != n ||
      source_volume.size() != n) {
    throw std::invalid_argument("mass_balance: vectors must have one entry per cell");
  }
  MassBalance out;
  out.defect = accumulation - source_volume;
  Vector stab_net = Vector::Zero(n);
  const bool stabilized = !model.stab_regions.empty() && model.stab_c != 0.0;
  for (const InteriorFace& f : g.interior_faces()) {
    const double flux = dt * face_transmissibility(g, f, model.materials) *
                        (p_new[f.left] - p_new[f.right]);
    out.defect[f.left] += flux;
    out.defect[f.right] -= flux;
    if (stabilized) {
      const double w = stabilization_weight(g, model.materials, f, model.stab_regions,
                                            model.stab_c);
      const double stab = w * (dp[f.left] - dp[f.right]);
      stab_net[f.left] += stab;
      stab_net[f.right] -= stab;
    }
  }
  for (const PressureBoundary& bc : model.pressure_bcs) {
    for (const BoundaryFace& f : g.boundary_faces()) {
      if (f.axis != bc.axis || f.side != bc.side) continue;
      const double flux =
          dt * boundary_transmissibility(g, f, model.materials) * (p_new[f.cell] - bc.pressure);
      out.defect[f.cell] += flux;
      out.total_boundary_outflow += flux;
    }
  }
  out.defect += stab_net;
  out.total_stabilization_flux = stab_net.sum();
  out.total_defect = out.defect.sum();
  out.total_source = source_volume.sum();
  return out;
}

}  // namespace porosplit
