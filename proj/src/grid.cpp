#include "porosplit/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace porosplit {

StructuredGrid StructuredGrid::build(std::span<const int> dims, std::span<const double> extent,
                                     const RegionFn& region_fn) {
  if (dims.size() != 2 && dims.size() != 3) {
    throw std::invalid_argument("grid: dims must have 2 or 3 entries");
  }
  if (extent.size() != dims.size()) {
    throw std::invalid_argument("grid: extent must have one entry per axis");
  }
  for (std::size_t a = 0; a < dims.size(); ++a) {
    if (dims[a] < 1) throw std::invalid_argument("grid: every dimension must be >= 1");
    if (!(extent[a] > 0.0) || !std::isfinite(extent[a])) {
      throw std::invalid_argument("grid: every extent must be > 0");
    }
  }

  StructuredGrid g;
  g.dim_ = static_cast<int>(dims.size());
  for (int a = 0; a < g.dim_; ++a) {
    g.dims_[a] = dims[a];
    g.extent_[a] = extent[a];
    g.spacing_[a] = extent[a] / dims[a];
    g.node_dims_[a] = dims[a] + 1;
  }
  if (g.dim_ == 2) {
    g.dims_[2] = 1;
    g.node_dims_[2] = 1;
    g.extent_[2] = 1.0;
    g.spacing_[2] = 1.0;
  }
  g.cell_volume_ = g.spacing_[0] * g.spacing_[1] * g.spacing_[2];

  const int ncell = g.num_cells();
  g.cell_regions_.assign(static_cast<std::size_t>(ncell), 0);
  if (region_fn) {
    for (int c = 0; c < ncell; ++c) {
      const int r = region_fn(g.cell_ijk(c));
      if (r < 0) throw std::invalid_argument("grid: region ids must be >= 0");
      g.cell_regions_[static_cast<std::size_t>(c)] = r;
    }
  }

  for (int axis = 0; axis < g.dim_; ++axis) {
    const double area = g.face_area(axis);
    const double half = 0.5 * g.spacing_[axis];
    for (int c = 0; c < ncell; ++c) {
      const Ijk ijk = g.cell_ijk(c);
      if (ijk[axis] + 1 < g.dims_[axis]) {
        Ijk n = ijk;
        ++n[axis];
        g.interior_faces_.push_back(
            {c, g.cell_index(n[0], n[1], n[2]), axis, area, half, half});
      }
      if (ijk[axis] == 0) g.boundary_faces_.push_back({c, axis, 0, area, half});
      if (ijk[axis] + 1 == g.dims_[axis]) g.boundary_faces_.push_back({c, axis, 1, area, half});
    }
  }
  return g;
}

Ijk StructuredGrid::cell_ijk(int cell) const {
  const int i = cell % dims_[0];
  const int rest = cell / dims_[0];
  return {i, rest % dims_[1], rest / dims_[1]};
}

Ijk StructuredGrid::node_ijk(int node) const {
  const int i = node % node_dims_[0];
  const int rest = node / node_dims_[0];
  return {i, rest % node_dims_[1], rest / node_dims_[1]};
}

Vec3 StructuredGrid::node_coord(int node) const {
  const Ijk n = node_ijk(node);
  Vec3 x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[a] = n[a] * spacing_[a];
  return x;
}

Vec3 StructuredGrid::cell_center(int cell) const {
  const Ijk c = cell_ijk(cell);
  Vec3 x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[a] = (c[a] + 0.5) * spacing_[a];
  return x;
}

std::array<int, 8> StructuredGrid::cell_nodes(int cell) const {
  const Ijk c = cell_ijk(cell);
  std::array<int, 8> nodes{};
  const int nz = dim_ == 3 ? 2 : 1;
  for (int az = 0; az < nz; ++az)
    for (int ay = 0; ay < 2; ++ay)
      for (int ax = 0; ax < 2; ++ax)
        nodes[ax + 2 * ay + 4 * az] = node_index(c[0] + ax, c[1] + ay, c[2] + az);
  return nodes;
}

double StructuredGrid::face_area(int axis) const {
  double area = 1.0;
  for (int a = 0; a < 3; ++a)
    if (a != axis) area *= spacing_[a];
  return area;
}

std::optional<int> StructuredGrid::locate_cell(const Vec3& point) const {
  Ijk ijk{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    if (point[a] < 0.0 || point[a] > extent_[a]) return std::nullopt;
    int i = static_cast<int>(std::floor(point[a] / spacing_[a]));
    if (i >= dims_[a]) i = dims_[a] - 1;
    ijk[a] = i;
  }
  return cell_index(ijk[0], ijk[1], ijk[2]);
}

std::vector<double> StructuredGrid::axis_coordinates(int axis) const {
  if (axis >= dim_) return {0.0};
  std::vector<double> x(static_cast<std::size_t>(node_dims_[axis]));
  for (int i = 0; i < node_dims_[axis]; ++i) x[static_cast<std::size_t>(i)] = i * spacing_[axis];
  return x;
}

namespace {

const MaterialRegion& material_of(const StructuredGrid& grid, int cell,
                                  const MaterialTable& materials) {
  const auto r = static_cast<std::size_t>(grid.cell_region(cell));
  if (r >= materials.size()) throw std::invalid_argument("grid: cell region has no material");
  return materials[r];
}

}  // namespace

double face_transmissibility(const StructuredGrid& grid, const InteriorFace& face,
                             const MaterialTable& materials) {
  const MaterialRegion& ml = material_of(grid, face.left, materials);
  const MaterialRegion& mr = material_of(grid, face.right, materials);
  if (ml.permeability <= 0.0 || mr.permeability <= 0.0) return 0.0;
  const double tl = ml.permeability * face.area / (ml.viscosity * face.dist_left);
  const double tr = mr.permeability * face.area / (mr.viscosity * face.dist_right);
  return 1.0 / (1.0 / tl + 1.0 / tr);
}

double boundary_transmissibility(const StructuredGrid& grid, const BoundaryFace& face,
                                 const MaterialTable& materials) {
  const MaterialRegion& m = material_of(grid, face.cell, materials);
  return m.permeability * face.area / (m.viscosity * face.dist);
}

double stabilization_volume(const StructuredGrid&, const InteriorFace& face) {
  const double d = face.dist_left + face.dist_right;
  return face.area / d * d * d;
}

}  // namespace porosplit
