#pragma once

#include "porosplit/discretization.hpp"
#include "porosplit/fvm_assembly.hpp"
#include "porosplit/grid.hpp"
#include "porosplit/sparse.hpp"

namespace porosplit {

struct OscillationReport {
  /// sqrt(sum over faces inside the region of [[p]]^2 A_f) / sqrt(sum V_K)  (Pa)
  double jump_energy = 0.0;
  /// |sum_K (-1)^(i+j+l) (p_K - pbar) V_K| / sum V_K over the region (Pa),
  /// pbar the volume-weighted region mean.
  double checkerboard_projection = 0.0;
  RegionSet region;
};

/// Throws std::invalid_argument when the region holds no cell or p has the
/// wrong length.
OscillationReport oscillation_metrics(const StructuredGrid& grid, const Vector& p,
                                      const RegionSet& region);

struct FieldDifference {
  double l2_rel = 0.0;
  double linf_rel = 0.0;
};

/// ||a - b|| / max(||b||, 1e-30) in the 2- and max-norms.
FieldDifference field_difference(const Vector& a, const Vector& b);

/// Per-cell mass balance of one step, every term in m^3 over the step:
/// accumulation + net TPFA outflow + stabilization outflow - source.
/// Fluxes are recomputed face by face from the grid and materials.
struct MassBalance {
  Vector defect;          // per cell
  double total_defect = 0.0;
  double total_source = 0.0;
  double total_boundary_outflow = 0.0;
  double total_stabilization_flux = 0.0;  // net over all cells, zero up to round-off
};

MassBalance mass_balance(const Model& model, double dt, const Vector& accumulation,
                         const Vector& p_new, const Vector& dp, const Vector& source_volume);

}  // namespace porosplit
