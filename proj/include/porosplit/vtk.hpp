#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "porosplit/grid.hpp"
#include "porosplit/sparse.hpp"

namespace porosplit {

/// Legacy ASCII VTK rectilinear grid with cell pressure and nodal
/// displacement (always three components), numbers with 17 significant digits.
/// Throws std::invalid_argument when the fields do not match the grid.
void write_vtk(std::ostream& out, const StructuredGrid& grid, const Vector& pressure,
               const Vector& displacement, const std::string& title = "porosplit");

/// Throws std::runtime_error when the file cannot be written.
void write_vtk(const std::filesystem::path& path, const StructuredGrid& grid,
               const Vector& pressure, const Vector& displacement,
               const std::string& title = "porosplit");

}  // namespace porosplit
