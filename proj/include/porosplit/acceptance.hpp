#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "porosplit/cases.hpp"

namespace porosplit {

// Thresholds frozen from the first reference runs (see README).
namespace reference {
// Monolithic unstabilized Barry-Mercer after 10 steps, dense-solver oracle:
// checkerboard projection 5.4221e6 Pa. Threshold at half that value.
inline constexpr double checkerboard_threshold = 2.7e6;          // Pa
inline constexpr double dense_agreement = 1e-10;                  // relative
inline constexpr double iterate_separation = 0.05;                // successive norms shrink >= 5%
inline constexpr double noniter_onset_ratio = 0.1;
inline constexpr double drained_agreement = 1e-6;
inline constexpr double splitting_identity_tol = 1e-10;
inline constexpr double stabilized_checkerboard_reduction = 10.0;
inline constexpr double stabilized_iteration_reduction = 2.0;
inline constexpr double tau_star_barry_mercer = 1.4464e-5;        // 1/Pa, 5 digits
inline constexpr double stabilized_count_spread = 0.25;
inline constexpr double c_knee_ratio = 1.5;
inline constexpr double c_plateau_spread = 0.30;
inline constexpr double interface_agreement = 1e-8;
inline constexpr double mass_balance_tol = 1e-10;
}  // namespace reference

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct AcceptanceOptions {
  std::filesystem::path scratch_dir;  // determinism artifacts are written below here
  int workers = 1;
};

/// Ids 1..12 in order.
std::vector<int> acceptance_ids();
std::string acceptance_name(int id);

/// Runs one check; an unexpected exception becomes a failed result.
CriterionResult run_criterion(int id, const AcceptanceOptions& options);

/// Writes the determinism artifact set (per-step CSV, VTK per step, sweep CSV)
/// into `dir`, creating it. `workers` sets the sweep parallelism.
void write_reference_artifacts(const std::filesystem::path& dir, int workers);

/// "[ 1] PASS checkerboard_emergence: ..." style line.
std::string format_result(const CriterionResult& r);

}  // namespace porosplit
