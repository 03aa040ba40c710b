#pragma once

#include "porosplit/sparse.hpp"

namespace porosplit {

/// Displacements (nodal, m) and pressures (cell, Pa) at the latest three time
/// levels. `*_curr` is the newest; `*_prev2` is meaningful once
/// step_index >= 1, and holds zeros (the initial state) before that.
struct FieldState {
  Vector u_prev2, u_prev, u_curr;
  Vector p_prev2, p_prev, p_curr;
  double time = 0.0;
  int step_index = 0;  // completed steps

  static FieldState zeros(Eigen::Index n_u, Eigen::Index n_p) {
    FieldState s;
    s.u_prev2 = s.u_prev = s.u_curr = Vector::Zero(n_u);
    s.p_prev2 = s.p_prev = s.p_curr = Vector::Zero(n_p);
    return s;
  }

  /// Shift the history and install the new time level.
  void advance(Vector u_new, Vector p_new, double new_time) {
    u_prev2 = std::move(u_prev);
    u_prev = std::move(u_curr);
    u_curr = std::move(u_new);
    p_prev2 = std::move(p_prev);
    p_prev = std::move(p_curr);
    p_curr = std::move(p_new);
    time = new_time;
    ++step_index;
  }
};

}  // namespace porosplit
