#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "porosplit/materials.hpp"

namespace porosplit {

using Vec3 = std::array<double, 3>;
using Ijk = std::array<int, 3>;

/// Face shared by two cells. `left` has the lower index along `axis`.
struct InteriorFace {
  int left = 0;
  int right = 0;
  int axis = 0;
  double area = 0.0;        // m^2
  double dist_left = 0.0;   // left cell center to face center (m)
  double dist_right = 0.0;  // face center to right cell center (m)

  double distance() const { return dist_left + dist_right; }
};

/// Face on the domain boundary. side 0 is the low end of `axis`, 1 the high end.
struct BoundaryFace {
  int cell = 0;
  int axis = 0;
  int side = 0;
  double area = 0.0;  // m^2
  double dist = 0.0;  // cell center to face center (m)
};

using RegionFn = std::function<int(const Ijk&)>;

/// Tensor-product quadrilateral (2D) or hexahedral (3D) grid with uniform
/// spacing per axis. 2D grids are unit-depth slabs: volumes are m^3 and
/// face areas m^2 with a 1 m extent along z.
class StructuredGrid {
 public:
  static StructuredGrid build(std::span<const int> dims, std::span<const double> extent,
                              const RegionFn& region_fn = {});

  int dim() const { return dim_; }
  const Ijk& dims() const { return dims_; }
  const Vec3& extent() const { return extent_; }
  const Vec3& spacing() const { return spacing_; }

  int num_cells() const { return dims_[0] * dims_[1] * dims_[2]; }
  int num_nodes() const { return node_dims_[0] * node_dims_[1] * node_dims_[2]; }
  const Ijk& node_dims() const { return node_dims_; }
  int nodes_per_cell() const { return dim_ == 2 ? 4 : 8; }

  int cell_index(int i, int j, int l = 0) const { return i + dims_[0] * (j + dims_[1] * l); }
  Ijk cell_ijk(int cell) const;
  int node_index(int i, int j, int l = 0) const {
    return i + node_dims_[0] * (j + node_dims_[1] * l);
  }
  Ijk node_ijk(int node) const;

  Vec3 node_coord(int node) const;
  Vec3 cell_center(int cell) const;
  double cell_volume(int /*cell*/) const { return cell_volume_; }
  int cell_region(int cell) const { return cell_regions_[static_cast<std::size_t>(cell)]; }
  const std::vector<int>& cell_regions() const { return cell_regions_; }

  /// Q1 element connectivity, lexicographic with x fastest: local node
  /// a = ax + 2*ay (+ 4*az) sits at offset (ax, ay, az) from the cell origin.
  std::array<int, 8> cell_nodes(int cell) const;

  const std::vector<InteriorFace>& interior_faces() const { return interior_faces_; }
  const std::vector<BoundaryFace>& boundary_faces() const { return boundary_faces_; }

  /// Area of a face normal to `axis` (2D: the transverse length times unit depth).
  double face_area(int axis) const;

  /// Cell containing `point`; points on a shared face resolve to the higher cell.
  std::optional<int> locate_cell(const Vec3& point) const;

  /// Per-axis node coordinates (used by rectilinear output).
  std::vector<double> axis_coordinates(int axis) const;

 private:
  int dim_ = 2;
  Ijk dims_{1, 1, 1};
  Ijk node_dims_{2, 2, 1};
  Vec3 extent_{1.0, 1.0, 1.0};
  Vec3 spacing_{1.0, 1.0, 1.0};
  double cell_volume_ = 1.0;
  std::vector<int> cell_regions_;
  std::vector<InteriorFace> interior_faces_;
  std::vector<BoundaryFace> boundary_faces_;
};

/// Two-point flux transmissibility of an interior face (m^3/(Pa s)):
/// series combination of the half-cell factors k_i A_f / (mu_i d_i).
/// Zero when either side is impermeable.
double face_transmissibility(const StructuredGrid& grid, const InteriorFace& face,
                             const MaterialTable& materials);

/// Transmissibility of the half cell between a boundary face and its cell center.
double boundary_transmissibility(const StructuredGrid& grid, const BoundaryFace& face,
                                 const MaterialTable& materials);

/// Geometric weight of the pressure-jump flux on a face: the k = mu = 1
/// transmissibility A_f / (d_L + d_R) scaled by the squared center distance,
/// i.e. A_f (d_L + d_R) (m^3). Equals the cell volume on a uniform grid.
double stabilization_volume(const StructuredGrid& grid, const InteriorFace& face);

}  // namespace porosplit
