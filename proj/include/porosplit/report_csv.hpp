#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "porosplit/cases.hpp"

namespace porosplit {

/// Quotes a field when it holds a comma, quote, CR or LF; inner quotes doubled.
std::string csv_field(const std::string& text);

/// Column order of the per-step report:
///   step, time, dt, scheme, outer_iterations, converged, residual_ratio,
///   splitting_error_norm, mass_defect, source_volume,
///   then <region>_jump_energy, <region>_checkerboard for each region,
///   then wall_time when `timing` is set.
std::vector<std::string> step_columns(const std::vector<std::string>& region_names, bool timing);
void write_step_csv(std::ostream& out, const RunReport& report, bool timing = false);

/// Column order of the sweep report:
///   one column per axis, ok, converged, steps, first_step_iterations,
///   total_iterations, max_iterations, <region>_jump_energy,
///   <region>_checkerboard for each region, error.
std::vector<std::string> sweep_columns(const SweepTable& table);
void write_sweep_csv(std::ostream& out, const SweepTable& table);

/// File variants; throw std::runtime_error when the path cannot be written.
void write_step_csv(const std::filesystem::path& path, const RunReport& report,
                    bool timing = false);
void write_sweep_csv(const std::filesystem::path& path, const SweepTable& table);

}  // namespace porosplit
