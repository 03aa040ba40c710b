#include "porosplit/vtk.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace porosplit {

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  out << buf;
}

}  // namespace

void write_vtk(std::ostream& out, const StructuredGrid& grid, const Vector& pressure,
               const Vector& displacement, const std::string& title) {
  const int dim = grid.dim();
  if (pressure.size() != grid.num_cells()) {
    throw std::invalid_argument("write_vtk: pressure has " + std::to_string(pressure.size()) +
                                " entries, grid has " + std::to_string(grid.num_cells()) +
                                " cells");
  }
  if (displacement.size() != static_cast<Eigen::Index>(dim) * grid.num_nodes()) {
    throw std::invalid_argument("write_vtk: displacement does not match the grid nodes");
  }
  if (title.find('\n') != std::string::npos) {
    throw std::invalid_argument("write_vtk: title must be a single line");
  }

  const auto nd = grid.node_dims();
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET RECTILINEAR_GRID\n";
  out << "DIMENSIONS " << nd[0] << ' ' << nd[1] << ' ' << nd[2] << '\n';
  const char* names[3] = {"X_COORDINATES", "Y_COORDINATES", "Z_COORDINATES"};
  for (int a = 0; a < 3; ++a) {
    std::vector<double> xs =
        a < dim ? grid.axis_coordinates(a) : std::vector<double>{0.0};
    out << names[a] << ' ' << xs.size() << " double\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) out << ' ';
      put(out, xs[i]);
    }
    out << '\n';
  }

  out << "CELL_DATA " << grid.num_cells() << "\nSCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (int c = 0; c < grid.num_cells(); ++c) {
    put(out, pressure[c]);
    out << '\n';
  }

  out << "POINT_DATA " << grid.num_nodes() << "\nVECTORS displacement double\n";
  for (int n = 0; n < grid.num_nodes(); ++n) {
    for (int d = 0; d < 3; ++d) {
      if (d) out << ' ';
      put(out, d < dim ? displacement[static_cast<Eigen::Index>(dim) * n + d] : 0.0);
    }
    out << '\n';
  }
}

void write_vtk(const std::filesystem::path& path, const StructuredGrid& grid,
               const Vector& pressure, const Vector& displacement, const std::string& title) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_vtk(out, grid, pressure, displacement, title);
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace porosplit
