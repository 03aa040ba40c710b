#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "porosplit/diagnostics.hpp"
#include "porosplit/discretization.hpp"
#include "porosplit/solvers.hpp"

namespace porosplit {

/// A named region: which cells it covers and its material. When selectors
/// overlap, the region listed last wins.
struct RegionSpec {
  enum class Selector { all, box, layers };

  std::string name;
  Selector selector = Selector::all;
  Vec3 box_lo{0.0, 0.0, 0.0};  // cell centers inside [lo, hi] (m)
  Vec3 box_hi{0.0, 0.0, 0.0};
  int layer_axis = 2;          // cell index range [first, last] along layer_axis
  int layer_first = 0;
  int layer_last = 0;
  MaterialRegion material;

  bool operator==(const RegionSpec&) const = default;
};

/// Mechanical condition on one boundary side. Sides without an entry are
/// traction free.
struct MechBoundary {
  enum class Kind { roller, fixed, traction };

  int axis = 0;
  int side = 0;
  Kind kind = Kind::roller;
  Vec3 traction{0.0, 0.0, 0.0};  // Pa, for Kind::traction

  bool operator==(const MechBoundary&) const = default;
};

struct SourceSpec {
  Vec3 at{0.0, 0.0, 0.0};  // a point strictly inside one cell (m)
  RateFunction rate;       // m^3/s

  bool operator==(const SourceSpec&) const = default;
};

/// dt_n = min(dt0 * growth^n, dt_max); stop after `steps` steps, or at
/// `end_time` (last step clipped) when steps == 0.
struct TimeStepping {
  double dt0 = 1.0;
  double growth = 1.0;
  double dt_max = std::numeric_limits<double>::infinity();
  int steps = 1;
  double end_time = 0.0;

  bool operator==(const TimeStepping&) const = default;
  std::vector<double> step_sizes() const;
};

struct StabilizationSpec {
  enum class Scope { none, all, named };

  Scope scope = Scope::none;
  std::vector<std::string> regions;
  double c = 1.0;

  bool operator==(const StabilizationSpec&) const = default;
};

struct CaseSpec {
  std::string name;
  std::vector<int> dims;
  std::vector<double> extent;
  std::vector<RegionSpec> regions;
  std::vector<MechBoundary> mech_bcs;
  std::vector<PressureBoundary> pressure_bcs;
  std::vector<SourceSpec> sources;
  Vec3 gravity{0.0, 0.0, 0.0};
  TimeStepping time;
  SolverConfig solver;
  StabilizationSpec stabilization;

  bool operator==(const CaseSpec&) const = default;

  int region_id(const std::string& region_name) const;  // throws if unknown
};

/// Resolve regions, boundary conditions and sources into an assembled model.
/// Throws std::invalid_argument on unresolvable names or source points.
Model build_model(const CaseSpec& spec);

// Built-in benchmark setups.
CaseSpec barry_mercer_undrained();
CaseSpec barry_mercer_drained();  // k = 1e-8 m^2, otherwise identical
CaseSpec layered_column_undrained(double burden_permeability = 9.8e-20);

std::vector<std::string> builtin_case_names();
/// Throws std::invalid_argument for an unknown name.
CaseSpec builtin_case(const std::string& name);

struct StepRow {
  int step = 0;
  double time = 0.0;
  double dt = 0.0;
  Scheme scheme = Scheme::monolithic;
  int outer_iterations = 0;
  bool converged = true;
  double residual_ratio = 0.0;
  double splitting_error_norm = 0.0;
  double mass_defect = 0.0;    // m^3, summed over cells
  double source_volume = 0.0;  // m^3
  std::vector<OscillationReport> regions;  // one per CaseSpec region
  std::vector<double> residual_history;
  double wall_time = 0.0;
};

struct RunReport {
  std::string case_name;
  std::vector<std::string> region_names;
  std::vector<StepRow> rows;
  FieldState final_state;
  bool converged = true;
  std::optional<int> failed_step;  // 1-based step that missed the tolerance
  std::string message;
};

using StepCallback = std::function<void(const StepRow&, const FieldState&)>;

/// Advance through every step with the configured scheme. Stops at the first
/// step whose outer iterations do not converge.
RunReport run_case(const CaseSpec& spec, const StepCallback& on_step = {});

/// One axis of a sweep. Names: alpha, c, dt (sets dt0), steps, scheme,
/// stab (none | all | region name), k (every region) or k:<region>.
struct SweepAxis {
  std::string name;
  std::vector<std::string> values;

  bool operator==(const SweepAxis&) const = default;
};

/// Parses "name=v1,v2,..." or "name=lo:hi:step" (inclusive of hi within 1e-9 step).
SweepAxis parse_sweep_axis(const std::string& text);

/// Apply one axis value to a case. Throws std::invalid_argument.
CaseSpec apply_axis_value(CaseSpec spec, const std::string& axis, const std::string& value);

struct SweepSpec {
  CaseSpec base;
  std::vector<SweepAxis> axes;
  std::size_t max_points = 10000;
  int workers = 1;
};

struct SweepRow {
  std::vector<std::string> values;  // one per axis
  bool ok = true;
  std::string error;
  bool converged = false;
  int steps = 0;
  int first_step_iterations = 0;
  int total_iterations = 0;
  int max_iterations = 0;
  std::vector<OscillationReport> final_regions;
};

struct SweepTable {
  std::vector<std::string> axis_names;
  std::vector<std::string> region_names;
  std::vector<SweepRow> rows;
};

/// Full cross product of the axes (last axis fastest). Failed points are
/// recorded in their row; the sweep carries on.
SweepTable run_sweep(const SweepSpec& spec);

}  // namespace porosplit
