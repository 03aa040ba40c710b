#include "porosplit/solvers.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <chrono>
#include <cmath>

namespace porosplit {

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::monolithic: return "monolithic";
    case Scheme::fs_noniter: return "fs_noniter";
    case Scheme::fs_iter: return "fs_iter";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "monolithic") return Scheme::monolithic;
  if (name == "fs_noniter") return Scheme::fs_noniter;
  if (name == "fs_iter") return Scheme::fs_iter;
  throw std::invalid_argument("unknown scheme '" + std::string(name) +
                              "' (expected monolithic, fs_noniter or fs_iter)");
}

void validate(const SolverConfig& config) {
  if (!(config.rel_tol > 0.0)) throw std::invalid_argument("solver: rel_tol must be > 0");
  if (config.scheme != Scheme::monolithic && !(config.alpha > 0.0)) {
    throw std::invalid_argument("solver: alpha must be > 0 for fixed-stress schemes");
  }
  if (config.max_outer_iters < 1) throw std::invalid_argument("solver: max_outer_iters must be >= 1");
  if (config.fixed_iter_count && *config.fixed_iter_count < 1) {
    throw std::invalid_argument("solver: fixed_iter_count must be >= 1");
  }
  if (!(config.linear_solver_tol > 0.0)) {
    throw std::invalid_argument("solver: linear_solver_tol must be > 0");
  }
}

double StepResult::final_residual_ratio() const {
  if (residual_history.empty() || residual_history.front() == 0.0) return 0.0;
  return residual_history.back() / residual_history.front();
}

// ---------------------------------------------------------------------------
// Linear solvers

namespace {

double inf_norm(const SparseMatrix& m) {
  double best = 0.0;
  for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
    double row = 0.0;
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) row += std::abs(it.value());
    best = std::max(best, row);
  }
  return best;
}

double backward_error(const SparseMatrix& m, double m_norm, const Vector& x, const Vector& b) {
  const double denom = m_norm * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>();
  if (denom == 0.0) return 0.0;
  return (b - m * x).lpNorm<Eigen::Infinity>() / denom;
}

using ColMatrix = Eigen::SparseMatrix<double>;

// Ruiz equilibration: alternately scale rows and columns towards unit max
// norm, so blocks in different units carry comparable weight.
void equilibrate(SparseMatrix& m, Vector& row_scale, Vector& col_scale) {
  row_scale = Vector::Ones(m.rows());
  col_scale = Vector::Ones(m.cols());
  for (int sweep = 0; sweep < 20; ++sweep) {
    Vector rmax = Vector::Zero(m.rows());
    Vector cmax = Vector::Zero(m.cols());
    for (Eigen::Index r = 0; r < m.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
        const double a = std::abs(it.value());
        rmax[r] = std::max(rmax[r], a);
        cmax[it.col()] = std::max(cmax[it.col()], a);
      }
    double worst = 0.0;
    Vector dr(m.rows()), dc(m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      dr[i] = rmax[i] > 0.0 ? 1.0 / std::sqrt(rmax[i]) : 1.0;
      worst = std::max(worst, std::abs(1.0 - rmax[i]));
    }
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      dc[j] = cmax[j] > 0.0 ? 1.0 / std::sqrt(cmax[j]) : 1.0;
      worst = std::max(worst, std::abs(1.0 - cmax[j]));
    }
    if (worst < 1e-3) break;
    for (Eigen::Index r = 0; r < m.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(m, r); it; ++it) it.valueRef() *= dr[r] * dc[it.col()];
    row_scale.array() *= dr.array();
    col_scale.array() *= dc.array();
  }
}

}  // namespace

struct LinearSolvers::Impl {
  std::unique_ptr<Eigen::SimplicialLDLT<ColMatrix>> mech;
  std::unique_ptr<Eigen::SimplicialLDLT<ColMatrix>> flow;
  std::unique_ptr<Eigen::SparseLU<ColMatrix>> saddle;
  SparseMatrix flow_matrix;
  SparseMatrix saddle_matrix;  // equilibrated
  Vector saddle_rows;
  Vector saddle_cols;
  double mech_norm = 0.0;
  double flow_norm = 0.0;
  double saddle_norm = 0.0;
};

LinearSolvers::LinearSolvers(std::shared_ptr<const BlockOperators> ops, double tol)
    : ops_(std::move(ops)), tol_(tol), impl_(std::make_unique<Impl>()) {}
LinearSolvers::~LinearSolvers() = default;
LinearSolvers::LinearSolvers(LinearSolvers&&) noexcept = default;
LinearSolvers& LinearSolvers::operator=(LinearSolvers&&) noexcept = default;

namespace {

template <class Solver, class Matrix>
Vector refine_solve(Solver& solver, const Matrix& m, double m_norm, const Vector& rhs, double tol,
                    const char* what) {
  Vector x = solver.solve(rhs);
  double err = backward_error(m, m_norm, x, rhs);
  // Two rounds of iterative refinement at most.
  for (int round = 0; round < 2 && err > tol; ++round) {
    x += solver.solve(Vector(rhs - m * x));
    err = backward_error(m, m_norm, x, rhs);
  }
  if (!x.allFinite() || err > tol) {
    throw LinearSolverError(std::string(what) + ": backward error " + std::to_string(err) +
                            " exceeds " + std::to_string(tol));
  }
  return x;
}

void check_ldlt(const Eigen::SimplicialLDLT<ColMatrix>& f, const char* what) {
  if (f.info() != Eigen::Success) {
    throw LinearSolverError(std::string(what) + ": factorization failed");
  }
  const Vector d = f.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  if (!(d.minCoeff() > 1e-14 * dmax)) {
    throw LinearSolverError(std::string(what) +
                            ": matrix is singular or indefinite (pivot ratio " +
                            std::to_string(d.minCoeff() / dmax) + ")");
  }
}

}  // namespace

Vector LinearSolvers::solve_mechanics(const Vector& rhs) {
  if (!impl_->mech) {
    impl_->mech = std::make_unique<Eigen::SimplicialLDLT<ColMatrix>>();
    impl_->mech->compute(ColMatrix(ops_->A));
    check_ldlt(*impl_->mech, "mechanics solve");
    impl_->mech_norm = inf_norm(ops_->A);
  }
  return refine_solve(*impl_->mech, ops_->A, impl_->mech_norm, rhs, tol_, "mechanics solve");
}

bool LinearSolvers::mechanics_positive_definite() {
  try {
    solve_mechanics(Vector::Zero(ops_->A.rows()));
  } catch (const LinearSolverError&) {
    return false;
  }
  return true;
}

Vector LinearSolvers::solve_flow(const Vector& rhs) {
  if (!impl_->flow) {
    impl_->flow_matrix = ops_->C + SparseMatrix(diagonal_matrix(ops_->R)) + ops_->S;
    impl_->flow = std::make_unique<Eigen::SimplicialLDLT<ColMatrix>>();
    impl_->flow->compute(ColMatrix(impl_->flow_matrix));
    check_ldlt(*impl_->flow, "flow solve");
    impl_->flow_norm = inf_norm(impl_->flow_matrix);
  }
  return refine_solve(*impl_->flow, impl_->flow_matrix, impl_->flow_norm, rhs, tol_, "flow solve");
}

void LinearSolvers::solve_monolithic(const Vector& f_u, const Vector& f_p, Vector& du, Vector& dp) {
  const Eigen::Index nu = ops_->A.rows();
  const Eigen::Index np = ops_->C.rows();
  if (!impl_->saddle) {
    impl_->saddle_matrix = saddle_matrix(*ops_);
    equilibrate(impl_->saddle_matrix, impl_->saddle_rows, impl_->saddle_cols);
    impl_->saddle = std::make_unique<Eigen::SparseLU<ColMatrix>>();
    impl_->saddle->compute(ColMatrix(impl_->saddle_matrix));
    if (impl_->saddle->info() != Eigen::Success) {
      throw LinearSolverError("monolithic solve: LU factorization failed (" +
                              impl_->saddle->lastErrorMessage() + ")");
    }
    impl_->saddle_norm = inf_norm(impl_->saddle_matrix);
  }
  Vector rhs(nu + np);
  rhs << f_u, f_p;
  rhs.array() *= impl_->saddle_rows.array();
  Vector x = refine_solve(*impl_->saddle, impl_->saddle_matrix, impl_->saddle_norm, rhs, tol_,
                          "monolithic solve");
  x.array() *= impl_->saddle_cols.array();
  du = x.head(nu);
  dp = x.tail(np);
}

SparseMatrix saddle_matrix(const BlockOperators& ops) {
  const Eigen::Index nu = ops.A.rows();
  const Eigen::Index np = ops.C.rows();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(ops.A.nonZeros() + 2 * ops.B.nonZeros() + ops.C.nonZeros() +
                                     ops.S.nonZeros()));
  for (Eigen::Index r = 0; r < ops.A.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(ops.A, r); it; ++it) t.emplace_back(r, it.col(), it.value());
  for (Eigen::Index r = 0; r < ops.B.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(ops.B, r); it; ++it) {
      t.emplace_back(nu + r, it.col(), it.value());
      t.emplace_back(it.col(), nu + r, -it.value());
    }
  const SparseMatrix cs = ops.C + ops.S;
  for (Eigen::Index r = 0; r < cs.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(cs, r); it; ++it)
      t.emplace_back(nu + r, nu + it.col(), it.value());
  // Keep structurally present diagonal entries even when C + S vanishes.
  for (Eigen::Index r = 0; r < np; ++r) t.emplace_back(nu + r, nu + r, 0.0);
  SparseMatrix m(nu + np, nu + np);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

// ---------------------------------------------------------------------------
// Residuals and splitting errors

namespace {

struct Residual {
  Vector mech;
  Vector mass;
  double norm() const { return std::sqrt(mech.squaredNorm() + mass.squaredNorm()); }
};

Residual increment_residual(const BlockOperators& op, const Vector& f_u, const Vector& f_p,
                            const Vector& du, const Vector& dp) {
  Residual r;
  r.mech = f_u - op.A * du + op.B.transpose() * dp;
  r.mass = f_p - op.B * du - op.C * dp - op.S * dp;
  return r;
}

Vector prescribed_increment(const BlockOperators& op, const FieldState& state) {
  Vector g = Vector::Zero(op.A.rows());
  for (Eigen::Index i = 0; i < g.size(); ++i)
    if (op.constrained[static_cast<std::size_t>(i)]) g[i] = op.prescribed[i] - state.u_curr[i];
  return g;
}

void check_sizes(const BlockSystem& system, const FieldState& state) {
  if (state.u_curr.size() != system.n_u() || state.p_curr.size() != system.n_p() ||
      state.u_prev.size() != system.n_u() || state.p_prev.size() != system.n_p()) {
    throw std::invalid_argument("state does not match the system dimensions");
  }
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

LinearSolvers& solvers_for(const BlockSystem& system, LinearSolvers* given,
                           std::unique_ptr<LinearSolvers>& local) {
  if (given && given->serves(system.op())) return *given;
  local = std::make_unique<LinearSolvers>(system.ops);
  return *local;
}

}  // namespace

double coupled_residual(const BlockSystem& system, const FieldState& state, const Vector& u,
                        const Vector& p) {
  check_sizes(system, state);
  const Vector f_u = system.mechanics_rhs(state);
  return increment_residual(system.op(), f_u, system.Q_p, u - state.u_curr, p - state.p_curr)
      .norm();
}

Vector splitting_error_vector(const BlockOperators& ops, const Vector& u_next, const Vector& u_curr,
                              const Vector& u_prev, const Vector& p_next, const Vector& p_curr,
                              const Vector& p_prev) {
  return -(ops.B * (u_next - 2.0 * u_curr + u_prev)) +
         ops.R.cwiseProduct(p_next - 2.0 * p_curr + p_prev);
}

Vector splitting_error_vector(const BlockOperators& ops, const FieldState& after_step) {
  if (after_step.step_index < 1) {
    throw std::invalid_argument("splitting_error_vector: needs at least one completed step");
  }
  return splitting_error_vector(ops, after_step.u_curr, after_step.u_prev, after_step.u_prev2,
                                after_step.p_curr, after_step.p_prev, after_step.p_prev2);
}

Vector splitting_error_vector_iterated(const BlockOperators& ops, const Vector& du_next,
                                       const Vector& du_prev, const Vector& dp_next,
                                       const Vector& dp_prev) {
  return -(ops.B * (du_next - du_prev)) + ops.R.cwiseProduct(dp_next - dp_prev);
}

// ---------------------------------------------------------------------------
// Time steps

StepResult step_monolithic(const BlockSystem& system, const FieldState& state,
                           LinearSolvers* solvers) {
  const auto t0 = Clock::now();
  check_sizes(system, state);
  std::unique_ptr<LinearSolvers> local;
  LinearSolvers& ls = solvers_for(system, solvers, local);
  const BlockOperators& op = system.op();

  const Vector f_u = system.mechanics_rhs(state);
  const Vector& f_p = system.Q_p;
  StepResult out;
  out.residual_history.push_back(
      increment_residual(op, f_u, f_p, Vector::Zero(system.n_u()), Vector::Zero(system.n_p()))
          .norm());
  Vector du, dp;
  ls.solve_monolithic(f_u, f_p, du, dp);
  out.residual_history.push_back(increment_residual(op, f_u, f_p, du, dp).norm());
  out.outer_iterations = 1;
  out.flow_accumulation =
      op.M_acc * dp + op.B * du + op.B_lift * prescribed_increment(op, state);

  out.state = state;
  out.state.advance(state.u_curr + du, state.p_curr + dp, system.t_next);
  out.splitting_error_norm = splitting_error_vector(op, out.state).norm();
  out.wall_time = seconds_since(t0);
  return out;
}

StepResult step_fs_noniter(const BlockSystem& system, const FieldState& state,
                           LinearSolvers* solvers) {
  const auto t0 = Clock::now();
  check_sizes(system, state);
  std::unique_ptr<LinearSolvers> local;
  LinearSolvers& ls = solvers_for(system, solvers, local);
  const BlockOperators& op = system.op();

  const Vector f_u = system.mechanics_rhs(state);
  const Vector& f_p = system.Q_p;
  // Before the first step the previous increments are taken as zero.
  const Vector du_old = state.step_index >= 1 ? Vector(state.u_curr - state.u_prev)
                                              : Vector::Zero(system.n_u());
  const Vector dp_old = state.step_index >= 1 ? Vector(state.p_curr - state.p_prev)
                                              : Vector::Zero(system.n_p());

  StepResult out;
  out.residual_history.push_back(
      increment_residual(op, f_u, f_p, Vector::Zero(system.n_u()), Vector::Zero(system.n_p()))
          .norm());
  const Vector dp = ls.solve_flow(f_p - op.B * du_old + op.R.cwiseProduct(dp_old));
  const Vector du = ls.solve_mechanics(f_u + op.B.transpose() * dp);
  out.residual_history.push_back(increment_residual(op, f_u, f_p, du, dp).norm());
  out.outer_iterations = 1;
  out.flow_accumulation = op.M_acc * dp + op.B * du_old + op.R.cwiseProduct(dp - dp_old) +
                          op.B_lift * prescribed_increment(op, state);

  out.state = state;
  if (state.step_index == 0) {
    // Make the stored history match the zero-increment assumption.
    out.state.u_prev = state.u_curr;
    out.state.p_prev = state.p_curr;
  }
  out.state.advance(state.u_curr + du, state.p_curr + dp, system.t_next);
  out.splitting_error_norm = splitting_error_vector(op, out.state).norm();
  out.wall_time = seconds_since(t0);
  return out;
}

StepResult step_fs_iter(const BlockSystem& system, const FieldState& state,
                        const SolverConfig& config, LinearSolvers* solvers) {
  const auto t0 = Clock::now();
  validate(config);
  if (config.alpha != system.op().alpha) {
    throw std::invalid_argument("step_fs_iter: config alpha differs from the assembled R");
  }
  check_sizes(system, state);
  std::unique_ptr<LinearSolvers> local;
  LinearSolvers& ls = solvers_for(system, solvers, local);
  const BlockOperators& op = system.op();

  const Vector f_u = system.mechanics_rhs(state);
  const Vector& f_p = system.Q_p;
  Vector du = Vector::Zero(system.n_u());
  Vector dp = Vector::Zero(system.n_p());
  Vector du_old = du;
  Vector dp_old = dp;

  StepResult out;
  const double r0 = increment_residual(op, f_u, f_p, du, dp).mass.norm();
  out.residual_history.push_back(r0);
  const int limit = config.fixed_iter_count ? *config.fixed_iter_count : config.max_outer_iters;
  bool done = !config.fixed_iter_count && r0 == 0.0;
  int k = 0;
  while (!done && k < limit) {
    du_old = du;
    dp_old = dp;
    dp = ls.solve_flow(f_p - op.B * du_old + op.R.cwiseProduct(dp_old));
    du = ls.solve_mechanics(f_u + op.B.transpose() * dp);
    ++k;
    const double r = increment_residual(op, f_u, f_p, du, dp).mass.norm();
    out.residual_history.push_back(r);
    if (!config.fixed_iter_count && r <= config.rel_tol * r0) done = true;
  }
  out.outer_iterations = k;
  out.converged = config.fixed_iter_count ? true : done;
  out.flow_accumulation = op.M_acc * dp + op.B * du_old + op.R.cwiseProduct(dp - dp_old) +
                          op.B_lift * prescribed_increment(op, state);
  if (k == 0) out.flow_accumulation = op.B_lift * prescribed_increment(op, state);
  out.splitting_error_norm = splitting_error_vector_iterated(op, du, du_old, dp, dp_old).norm();

  out.state = state;
  out.state.advance(state.u_curr + du, state.p_curr + dp, system.t_next);
  out.wall_time = seconds_since(t0);
  return out;
}

StepResult step(const BlockSystem& system, const FieldState& state, const SolverConfig& config,
                LinearSolvers* solvers) {
  switch (config.scheme) {
    case Scheme::monolithic: return step_monolithic(system, state, solvers);
    case Scheme::fs_noniter: validate(config); return step_fs_noniter(system, state, solvers);
    case Scheme::fs_iter: return step_fs_iter(system, state, config, solvers);
  }
  throw std::invalid_argument("step: unknown scheme");
}

Vector mean_total_stress(const StructuredGrid& grid, const MaterialTable& materials,
                         const Vector& u, const Vector& p) {
  if (u.size() != num_displacement_dofs(grid) || p.size() != grid.num_cells()) {
    throw std::invalid_argument("mean_total_stress: field sizes do not match the grid");
  }
  const int dim = grid.dim();
  const int nn = grid.nodes_per_cell();
  Vector sigma(grid.num_cells());
  for (int c = 0; c < grid.num_cells(); ++c) {
    const MaterialRegion& m = materials.at(static_cast<std::size_t>(grid.cell_region(c)));
    MaterialRegion unit = m;
    unit.biot_coefficient = 1.0;
    const Eigen::VectorXd div = element_divergence(grid, unit);
    const auto nodes = grid.cell_nodes(c);
    double integral = 0.0;
    for (int a = 0; a < nn; ++a)
      for (int d = 0; d < dim; ++d) integral += div[dim * a + d] * u[displacement_dof(grid, nodes[a], d)];
    const double vol_strain = integral / grid.cell_volume(c);
    // (1/3) tr(C : eps) = K_dr tr(eps); plane strain keeps eps_zz = 0.
    sigma[c] = derived_moduli(m).bulk * vol_strain - m.biot_coefficient * p[c];
  }
  return sigma;
}

}  // namespace porosplit
