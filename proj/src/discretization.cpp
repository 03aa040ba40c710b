#include "porosplit/discretization.hpp"

#include <stdexcept>

namespace porosplit {

namespace {

// Entries (i, j) of `m` whose row passes `keep_row` and column passes `keep_col`.
template <class RowPred, class ColPred>
SparseMatrix filter(const SparseMatrix& m, RowPred keep_row, ColPred keep_col) {
  std::vector<Triplet> t;
  for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
    if (!keep_row(r)) continue;
    for (SparseMatrix::InnerIterator it(m, r); it; ++it)
      if (keep_col(it.col())) t.emplace_back(r, it.col(), it.value());
  }
  return from_triplets(m.rows(), m.cols(), t);
}

}  // namespace

Vector BlockSystem::mechanics_rhs(const FieldState& state) const {
  return Q_u - ops->A * state.u_curr + ops->B.transpose() * state.p_curr;
}

Discretization::Discretization(Model model, double alpha) : model_(std::move(model)), alpha_(alpha) {
  const StructuredGrid& g = model_.grid;
  for (const MaterialRegion& m : model_.materials) validate(m);
  for (int c = 0; c < g.num_cells(); ++c) {
    if (static_cast<std::size_t>(g.cell_region(c)) >= model_.materials.size()) {
      throw std::invalid_argument("model: cell " + std::to_string(c) + " has no material");
    }
  }
  for (const SourceTerm& s : model_.sources) {
    if (s.cell < 0 || s.cell >= g.num_cells()) throw std::invalid_argument("model: bad source cell");
  }
  if (alpha < 0.0) throw std::invalid_argument("model: alpha must be non-negative");

  constrained_ = model_.dirichlet.mask(g);
  prescribed_ = model_.dirichlet.values(g);
  auto is_fixed = [&](Eigen::Index i) { return constrained_[static_cast<std::size_t>(i)] != 0; };
  auto is_free = [&](Eigen::Index i) { return !is_fixed(i); };
  auto any = [](Eigen::Index) { return true; };

  std::vector<std::string> warnings;
  A_ = assemble_stiffness(g, model_.materials, model_.dirichlet, &warnings);
  const SparseMatrix a_full = assemble_stiffness_unconstrained(g, model_.materials);
  A_lift_ = filter(a_full, is_free, is_fixed);

  const SparseMatrix b_full = assemble_coupling(g, model_.materials);
  B_ = filter(b_full, any, is_free);
  B_lift_ = filter(b_full, any, is_fixed);

  flow_ = assemble_flow_operators(g, model_.materials, model_.pressure_bcs);
  R_ = assemble_fixed_stress_diagonal(g, model_.materials, alpha);
  S_ = model_.stab_regions.empty() || model_.stab_c == 0.0
           ? SparseMatrix(g.num_cells(), g.num_cells())
           : assemble_stabilization(g, model_.materials, model_.stab_regions, model_.stab_c);

  load_ = assemble_mech_load(g, model_.materials, model_.tractions, model_.gravity);
  load_ -= A_lift_ * prescribed_;
  for (Eigen::Index i = 0; i < load_.size(); ++i)
    if (is_fixed(i)) load_[i] = prescribed_[i];
}

std::shared_ptr<const BlockOperators> Discretization::operators(double dt) const {
  if (!(dt >= 0.0)) throw std::invalid_argument("operators: dt must be non-negative");
  if (auto it = cache_.find(dt); it != cache_.end()) return it->second;

  auto ops = std::make_shared<BlockOperators>();
  ops->dt = dt;
  ops->alpha = alpha_;
  ops->A = A_;
  ops->B = B_;
  ops->T = flow_.transmissibility;
  ops->T_bc = flow_.boundary_transmissibility;
  ops->bc_inflow = flow_.boundary_inflow;
  ops->M_acc = flow_.accumulation;
  SparseMatrix flux = flow_.transmissibility + diagonal_matrix(flow_.boundary_transmissibility);
  ops->C = flow_.accumulation + dt * flux;
  ops->C.prune(0.0);
  ops->R = R_;
  ops->S = S_;
  ops->A_lift = A_lift_;
  ops->B_lift = B_lift_;
  ops->constrained = constrained_;
  ops->prescribed = prescribed_;
  cache_.emplace(dt, ops);
  return ops;
}

Vector Discretization::sources_at(double t) const {
  Vector q = Vector::Zero(model_.grid.num_cells());
  for (const SourceTerm& s : model_.sources) q[s.cell] += s.rate(t);
  return q;
}

BlockSystem Discretization::system(double dt, const FieldState& state) const {
  BlockSystem sys;
  sys.ops = operators(dt);
  const BlockOperators& op = *sys.ops;
  sys.t_next = state.time + dt;
  sys.Q_u = load_;
  sys.source_volume = dt * sources_at(sys.t_next);
  const Vector flux_p = op.T * state.p_curr + op.T_bc.cwiseProduct(state.p_curr);
  sys.Q_p = sys.source_volume - dt * flux_p + dt * op.bc_inflow -
            op.B_lift * (op.prescribed - state.u_curr);
  return sys;
}

FieldState Discretization::initial_state() const {
  FieldState s = FieldState::zeros(num_displacement_dofs(model_.grid), model_.grid.num_cells());
  return s;
}

}  // namespace porosplit
