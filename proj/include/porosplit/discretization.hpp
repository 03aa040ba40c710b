#pragma once

#include <map>
#include <memory>
#include <vector>

#include "porosplit/fem_assembly.hpp"
#include "porosplit/fvm_assembly.hpp"
#include "porosplit/grid.hpp"
#include "porosplit/rate.hpp"
#include "porosplit/state.hpp"

namespace porosplit {

struct SourceTerm {
  int cell = 0;
  RateFunction rate;  // m^3/s
};

/// Everything needed to assemble the coupled problem.
struct Model {
  StructuredGrid grid;
  MaterialTable materials;
  DirichletSet dirichlet;
  std::vector<Traction> tractions;
  Vec3 gravity{0.0, 0.0, 0.0};
  std::vector<SourceTerm> sources;
  std::vector<PressureBoundary> pressure_bcs;
  RegionSet stab_regions;
  double stab_c = 1.0;
};

/// Matrices of one step size. Rows of constrained displacement dofs in A are
/// identity rows; the corresponding columns of A and B are removed and their
/// effect is carried by the `*_lift` matrices when loads are formed.
struct BlockOperators {
  double dt = 0.0;
  double alpha = 1.0;
  SparseMatrix A;        // N_u x N_u
  SparseMatrix B;        // N_p x N_u
  SparseMatrix T;        // interior transmissibility
  Vector T_bc;           // pressure-boundary transmissibility per cell
  Vector bc_inflow;      // sum of T_face * p_boundary per cell
  SparseMatrix M_acc;    // diag(V / M)
  SparseMatrix C;        // M_acc + dt (T + diag(T_bc))
  Vector R;              // alpha V b^2 / K_dr
  SparseMatrix S;        // jump stabilization, acts on the pressure increment
  SparseMatrix A_lift;   // free rows x constrained columns of the full stiffness
  SparseMatrix B_lift;   // constrained columns of the full coupling
  std::vector<char> constrained;
  Vector prescribed;     // prescribed values on constrained dofs, zero elsewhere
};

/// Incremental coupled system of one step:
///   [ A   -B^T ] [du]   [F_u]
///   [ B   C+S  ] [dp] = [F_p]
/// with F_u = Q_u - A u^n + B^T p^n and F_p = Q_p.
struct BlockSystem {
  std::shared_ptr<const BlockOperators> ops;
  Vector Q_u;  // external load at t^{n+1} (constrained rows: prescribed values)
  Vector Q_p;  // dt q - dt (T + T_bc) p^n + dt bc_inflow - B_lift (u_bar - u^n)
  double t_next = 0.0;

  const BlockOperators& op() const { return *ops; }
  Eigen::Index n_u() const { return ops->A.rows(); }
  Eigen::Index n_p() const { return ops->C.rows(); }

  /// Mechanics right-hand side for the increment from `state`.
  Vector mechanics_rhs(const FieldState& state) const;
  /// Per-cell source volume dt * q(t^{n+1}) (m^3) of this step.
  Vector source_volume;
};

/// Owns the time-independent assembly of a Model and hands out BlockSystems.
class Discretization {
 public:
  Discretization(Model model, double alpha);

  const Model& model() const { return model_; }
  const StructuredGrid& grid() const { return model_.grid; }
  double alpha() const { return alpha_; }

  /// Operators for step size dt; cached, so equal dt returns the same object.
  std::shared_ptr<const BlockOperators> operators(double dt) const;

  /// System advancing `state` (at state.time) to t_next = state.time + dt.
  BlockSystem system(double dt, const FieldState& state) const;

  Vector sources_at(double t) const;

  FieldState initial_state() const;

 private:
  Model model_;
  double alpha_;
  SparseMatrix A_;
  SparseMatrix B_;
  SparseMatrix A_lift_;
  SparseMatrix B_lift_;
  FlowOperators flow_;
  Vector R_;
  SparseMatrix S_;
  Vector load_;
  std::vector<char> constrained_;
  Vector prescribed_;
  mutable std::map<double, std::shared_ptr<const BlockOperators>> cache_;
};

}  // namespace porosplit
