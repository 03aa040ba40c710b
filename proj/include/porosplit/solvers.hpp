#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "porosplit/discretization.hpp"
#include "porosplit/state.hpp"

namespace porosplit {

enum class Scheme { monolithic, fs_noniter, fs_iter };

const char* to_string(Scheme s);
/// Accepts "monolithic", "fs_noniter", "fs_iter". Throws std::invalid_argument.
Scheme parse_scheme(std::string_view name);

struct SolverConfig {
  Scheme scheme = Scheme::monolithic;
  double alpha = 1.0;
  double rel_tol = 1e-8;
  int max_outer_iters = 1000;
  std::optional<int> fixed_iter_count;  // run exactly this many outer iterations
  double linear_solver_tol = 1e-12;     // normwise backward error bound

  bool operator==(const SolverConfig&) const = default;
};

void validate(const SolverConfig& config);

struct StepResult {
  FieldState state;
  int outer_iterations = 0;
  std::vector<double> residual_history;  // entry 0 is the initial residual
  double splitting_error_norm = 0.0;
  double wall_time = 0.0;  // s
  bool converged = true;
  /// Per-cell accumulation (m^3) used by the flow solve that produced the
  /// final pressure, excluding fluxes and sources.
  Vector flow_accumulation;

  double final_residual_ratio() const;
};

/// Raised when a factorization fails or misses the backward-error contract.
class LinearSolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Factorizations of one set of block operators, built on first use.
class LinearSolvers {
 public:
  explicit LinearSolvers(std::shared_ptr<const BlockOperators> ops, double tol = 1e-12);
  ~LinearSolvers();
  LinearSolvers(LinearSolvers&&) noexcept;
  LinearSolvers& operator=(LinearSolvers&&) noexcept;

  const BlockOperators& ops() const { return *ops_; }
  bool serves(const BlockOperators& ops) const { return ops_.get() == &ops; }

  /// A x = rhs.
  Vector solve_mechanics(const Vector& rhs);
  /// (C + R + S) x = rhs.
  Vector solve_flow(const Vector& rhs);
  /// Full saddle system [[A, -B^T], [B, C + S]], row/column equilibrated before
  /// the LU; the backward-error bound applies to the equilibrated system.
  void solve_monolithic(const Vector& f_u, const Vector& f_p, Vector& du, Vector& dp);

  /// True when A factors as L D L^T with strictly positive pivots.
  bool mechanics_positive_definite();

 private:
  struct Impl;
  std::shared_ptr<const BlockOperators> ops_;
  double tol_;
  std::unique_ptr<Impl> impl_;
};

/// The stacked monolithic saddle-point matrix [[A, -B^T], [B, C + S]].
SparseMatrix saddle_matrix(const BlockOperators& ops);

StepResult step_monolithic(const BlockSystem& system, const FieldState& state,
                           LinearSolvers* solvers = nullptr);

/// One flow solve with the stress extrapolated from the last two levels, then
/// one mechanics solve. Before any history exists the increments are zero.
StepResult step_fs_noniter(const BlockSystem& system, const FieldState& state,
                           LinearSolvers* solvers = nullptr);

/// Sequential flow/mechanics iterations until the coupled residual drops by
/// rel_tol (or exactly fixed_iter_count iterations). Each iterate ends with an
/// exact mechanics solve, so only the mass-balance rows of the monolithic
/// residual are measured; the mechanics rows hold round-off only.
StepResult step_fs_iter(const BlockSystem& system, const FieldState& state,
                        const SolverConfig& config, LinearSolvers* solvers = nullptr);

/// Dispatch on config.scheme.
StepResult step(const BlockSystem& system, const FieldState& state, const SolverConfig& config,
                LinearSolvers* solvers = nullptr);

/// Euclidean norm of the stacked monolithic residual for the candidate new
/// level (u, p); the fixed-stress term R does not enter.
double coupled_residual(const BlockSystem& system, const FieldState& state, const Vector& u,
                        const Vector& p);

/// -B (u^{n+1} - 2u^n + u^{n-1}) + R (p^{n+1} - 2p^n + p^{n-1}).
Vector splitting_error_vector(const BlockOperators& ops, const Vector& u_next, const Vector& u_curr,
                              const Vector& u_prev, const Vector& p_next, const Vector& p_curr,
                              const Vector& p_prev);

/// Same, from a state holding n+1, n, n-1 in curr, prev, prev2.
/// Throws std::invalid_argument before the first completed step.
Vector splitting_error_vector(const BlockOperators& ops, const FieldState& after_step);

/// Iterated form: -B [du_{k+1} - du_k] + R [dp_{k+1} - dp_k].
Vector splitting_error_vector_iterated(const BlockOperators& ops, const Vector& du_next,
                                       const Vector& du_prev, const Vector& dp_next,
                                       const Vector& dp_prev);

/// Per-cell mean total stress sigma_v = K_dr div(u) - b p, with div(u) the
/// cell average of the Q1 divergence.
Vector mean_total_stress(const StructuredGrid& grid, const MaterialTable& materials,
                         const Vector& u, const Vector& p);

}  // namespace porosplit
