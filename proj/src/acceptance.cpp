#include "porosplit/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include <Eigen/Dense>

#include "porosplit/report_csv.hpp"
#include "porosplit/vtk.hpp"

namespace porosplit {

namespace {

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string sci(double v) { return fmt("%.4e", v); }

struct Run {
  RunReport report;
  std::vector<FieldState> states;  // after each step
};

Run run_with_states(const CaseSpec& spec) {
  Run r;
  r.report = run_case(spec, [&](const StepRow&, const FieldState& s) { r.states.push_back(s); });
  return r;
}

CaseSpec with_scheme(CaseSpec c, Scheme s) {
  c.solver.scheme = s;
  return c;
}

CaseSpec globally_stabilized(CaseSpec c, double coeff = 1.0) {
  c.stabilization.scope = StabilizationSpec::Scope::all;
  c.stabilization.regions.clear();
  c.stabilization.c = coeff;
  return c;
}

CaseSpec burden_stabilized(CaseSpec c, double coeff = 1.0) {
  c.stabilization.scope = StabilizationSpec::Scope::named;
  c.stabilization.regions = {"burden"};
  c.stabilization.c = coeff;
  return c;
}

// First-day layered runs, as in the iteration-count protocol.
CaseSpec layered_first_step(double burden_k) {
  CaseSpec c = layered_column_undrained(burden_k);
  c.time.steps = 1;
  c.solver.scheme = Scheme::fs_iter;
  c.solver.rel_tol = 1e-8;
  c.solver.max_outer_iters = 1000;
  return c;
}

double final_checkerboard(const RunReport& r) {
  return r.rows.back().regions.front().checkerboard_projection;
}

int total_iterations(const RunReport& r) {
  int n = 0;
  for (const StepRow& s : r.rows) n += s.outer_iterations;
  return n;
}

void require_converged(const RunReport& r, const std::string& what) {
  if (!r.converged) throw std::runtime_error(what + " did not converge: " + r.message);
}

// ---------------------------------------------------------------------------

CriterionResult checkerboard_emergence() {
  const CaseSpec spec = barry_mercer_undrained();
  const RunReport sparse = run_case(spec);

  // Dense oracle: the same incremental systems solved with a full-pivot LU.
  const Discretization disc(build_model(spec), spec.solver.alpha);
  FieldState state = disc.initial_state();
  for (double dt : spec.time.step_sizes()) {
    const BlockSystem sys = disc.system(dt, state);
    const Eigen::MatrixXd K = Eigen::MatrixXd(saddle_matrix(sys.op()));
    Eigen::VectorXd rhs(sys.n_u() + sys.n_p());
    rhs << sys.mechanics_rhs(state), sys.Q_p;
    const Eigen::VectorXd x = K.fullPivLu().solve(rhs);
    state.advance(state.u_curr + x.head(sys.n_u()), state.p_curr + x.tail(sys.n_p()),
                  sys.t_next);
  }
  const double du = field_difference(sparse.final_state.u_curr, state.u_curr).l2_rel;
  const double dp = field_difference(sparse.final_state.p_curr, state.p_curr).l2_rel;
  const double cb = final_checkerboard(sparse);
  const double cb_dense = oscillation_metrics(disc.grid(), state.p_curr, RegionSet::everything())
                              .checkerboard_projection;

  CriterionResult r;
  r.pass = cb >= reference::checkerboard_threshold && du <= reference::dense_agreement &&
           dp <= reference::dense_agreement;
  r.detail = "checkerboard " + sci(cb) + " Pa (dense " + sci(cb_dense) + ", threshold " +
             sci(reference::checkerboard_threshold) + "); sparse vs dense u " + sci(du) + ", p " +
             sci(dp);
  return r;
}

CriterionResult iterates_approach_monolithic() {
  const CaseSpec base = barry_mercer_undrained();
  const Vector p_fim = run_case(with_scheme(base, Scheme::monolithic)).final_state.p_curr;
  std::vector<double> norms;
  std::string list;
  for (int k : {10, 50, 100, 500}) {
    CaseSpec c = with_scheme(base, Scheme::fs_iter);
    c.solver.fixed_iter_count = k;
    const Vector p = run_case(c).final_state.p_curr;
    norms.push_back((p - p_fim).norm());
    list += (list.empty() ? "" : ", ") + std::string("k=") + std::to_string(k) + " " +
            sci(norms.back());
  }
  bool ok = true;
  for (std::size_t i = 1; i < norms.size(); ++i)
    ok = ok && norms[i] <= (1.0 - reference::iterate_separation) * norms[i - 1];
  CriterionResult r;
  r.pass = ok;
  r.detail = "||p_k - p_FIM||: " + list;
  return r;
}

CriterionResult delayed_oscillation() {
  const RunReport rep = run_case(with_scheme(barry_mercer_undrained(), Scheme::fs_noniter));
  std::vector<double> cb;
  for (const StepRow& s : rep.rows) cb.push_back(s.regions.front().checkerboard_projection);
  bool ok = cb.size() == 10 && cb[0] < reference::noniter_onset_ratio * cb[9];
  for (std::size_t i = 4; ok && i < cb.size(); ++i) ok = cb[i] >= cb[i - 1];
  CriterionResult r;
  r.pass = ok;
  r.detail = "checkerboard step 1 " + sci(cb.front()) + ", step 4 " + sci(cb.at(3)) +
             ", step 10 " + sci(cb.back());
  return r;
}

CriterionResult drained_equivalence() {
  const CaseSpec base = barry_mercer_drained();
  const Run mono = run_with_states(with_scheme(base, Scheme::monolithic));
  CaseSpec it = with_scheme(base, Scheme::fs_iter);
  it.solver.rel_tol = 1e-10;
  it.solver.max_outer_iters = 100000;
  const Run iter = run_with_states(it);
  require_converged(iter.report, "fs_iter");
  double du = 0.0, dp = 0.0;
  for (std::size_t n = 0; n < mono.states.size(); ++n) {
    du = std::max(du, field_difference(iter.states[n].u_curr, mono.states[n].u_curr).l2_rel);
    dp = std::max(dp, field_difference(iter.states[n].p_curr, mono.states[n].p_curr).l2_rel);
  }
  CriterionResult r;
  r.pass = du <= reference::drained_agreement && dp <= reference::drained_agreement;
  r.detail = "max over steps: u " + sci(du) + ", p " + sci(dp) + " (fs_iter " +
             std::to_string(total_iterations(iter.report)) + " outer iterations)";
  return r;
}

CriterionResult splitting_identity() {
  const CaseSpec spec = with_scheme(barry_mercer_undrained(), Scheme::fs_noniter);
  const Discretization disc(build_model(spec), spec.solver.alpha);
  FieldState state = disc.initial_state();
  double worst = 0.0;
  for (double dt : spec.time.step_sizes()) {
    const BlockSystem sys = disc.system(dt, state);
    const BlockOperators& op = sys.op();
    const Vector f_u = sys.mechanics_rhs(state);
    const Vector& f_p = sys.Q_p;
    StepResult res = step_fs_noniter(sys, state);
    const Vector du = res.state.u_curr - state.u_curr;
    const Vector dp = res.state.p_curr - state.p_curr;
    const Vector r_u = f_u - op.A * du + op.B.transpose() * dp;
    const Vector r_p = f_p - op.B * du - (op.C + op.S) * dp;
    const Vector e = splitting_error_vector(op, res.state);
    // Blocks carry different units (N, m^3); each is measured against its own
    // right-hand side of the saddle form.
    const double gap_u = r_u.norm() / Vector(f_u + op.B.transpose() * dp).norm();
    const double gap_p = (r_p - e).norm() / Vector(f_p - e).norm();
    worst = std::max({worst, gap_u, gap_p});
    state = std::move(res.state);
  }
  CriterionResult r;
  r.pass = worst <= reference::splitting_identity_tol;
  r.detail = "max blockwise ||residual - splitting error|| / ||rhs|| = " + sci(worst);
  return r;
}

CriterionResult stabilization_efficacy() {
  const CaseSpec base = barry_mercer_undrained();
  const double cb0 = final_checkerboard(run_case(base));
  const double cb1 = final_checkerboard(run_case(globally_stabilized(base)));

  CaseSpec it = with_scheme(base, Scheme::fs_iter);
  it.solver.alpha = 1.0;
  it.solver.rel_tol = 1e-8;
  it.solver.max_outer_iters = 100000;
  const RunReport plain = run_case(it);
  const RunReport stab = run_case(globally_stabilized(it));
  require_converged(plain, "unstabilized fs_iter");
  require_converged(stab, "stabilized fs_iter");
  const int n0 = total_iterations(plain);
  const int n1 = total_iterations(stab);
  const double cb_ratio = cb0 / cb1;
  const double it_ratio = static_cast<double>(n0) / n1;

  CriterionResult r;
  r.pass = cb_ratio >= reference::stabilized_checkerboard_reduction &&
           it_ratio >= reference::stabilized_iteration_reduction;
  r.detail = "checkerboard " + sci(cb0) + " -> " + sci(cb1) + " (x" + fmt("%.1f", cb_ratio) +
             "); outer iterations " + std::to_string(n0) + " -> " + std::to_string(n1) + " (x" +
             fmt("%.1f", it_ratio) + ")";
  return r;
}

CriterionResult tau_star() {
  const double E = 1.0e4, nu = 0.2;
  // Independent scalar evaluation.
  const double lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  const double G = E / (2.0 * (1.0 + nu));
  const double expected = 9.0 / (32.0 * (lambda + 4.0 * G));
  MaterialRegion m;
  m.young_modulus = E;
  m.poisson_ratio = nu;
  m.viscosity = 1.0;
  const double got = optimal_tau(m);
  const double rel = std::abs(got - expected) / expected;
  const double rounded = std::abs(got - reference::tau_star_barry_mercer) / got;
  CriterionResult r;
  r.pass = rel <= 1e-12 && rounded < 5e-5;
  r.detail = "tau* = " + fmt("%.10e", got) + " 1/Pa, relative error " + sci(rel);
  return r;
}

SweepTable layered_sweep(std::vector<SweepAxis> axes, const CaseSpec& base, int workers) {
  SweepSpec s;
  s.base = base;
  s.axes = std::move(axes);
  s.workers = workers;
  return run_sweep(s);
}

std::string count_text(const SweepRow& row) {
  if (!row.ok) return "error";
  return row.converged ? std::to_string(row.first_step_iterations)
                       : ">" + std::to_string(row.first_step_iterations);
}

CriterionResult alpha_sweep_trends(int workers) {
  const std::vector<std::string> ks = {"9.8e-14", "9.8e-17", "9.8e-20"};
  const CaseSpec base = layered_first_step(9.8e-20);
  const SweepTable plain =
      layered_sweep({{"k:burden", ks}}, base, workers);
  const SweepTable stab = layered_sweep({{"k:burden", ks}}, burden_stabilized(base), workers);
  const SweepTable low = layered_sweep({{"alpha", {"0.4"}}}, base, workers);

  for (const SweepTable* t : {&plain, &stab, &low})
    for (const SweepRow& row : t->rows)
      if (!row.ok) throw std::runtime_error("sweep point failed: " + row.error);

  const SweepRow& drained = plain.rows[0];
  const SweepRow& undrained = plain.rows[2];
  const bool a = drained.converged &&
                 (!undrained.converged ||
                  undrained.first_step_iterations > drained.first_step_iterations);

  int lo = 1 << 30, hi = 0;
  bool all_converged = true;
  for (const SweepRow& row : stab.rows) {
    all_converged = all_converged && row.converged;
    lo = std::min(lo, row.first_step_iterations);
    hi = std::max(hi, row.first_step_iterations);
  }
  const double spread = static_cast<double>(hi - lo) / lo;
  const bool b = all_converged && spread <= reference::stabilized_count_spread;

  const SweepRow& slow = low.rows[0];
  const bool c = !slow.converged || (undrained.converged &&
                                     slow.first_step_iterations > undrained.first_step_iterations);

  CriterionResult r;
  r.pass = a && b && c;
  r.detail = std::string("(a) ") + (a ? "ok" : "FAIL") + " unstabilized k=9.8e-14/-17/-20: " +
             count_text(plain.rows[0]) + "/" + count_text(plain.rows[1]) + "/" +
             count_text(plain.rows[2]) + "; (b) " + (b ? "ok" : "FAIL") + " burden-stabilized " +
             count_text(stab.rows[0]) + "/" + count_text(stab.rows[1]) + "/" +
             count_text(stab.rows[2]) + " spread " + fmt("%.1f%%", 100.0 * spread) + "; (c) " +
             (c ? "ok" : "FAIL") + " alpha=0.4 undrained " + count_text(slow);
  return r;
}

CriterionResult c_sweep_knee(int workers) {
  const SweepTable t = layered_sweep({{"c", {"0.1", "1", "10"}}},
                                     burden_stabilized(layered_first_step(9.8e-20)), workers);
  for (const SweepRow& row : t.rows)
    if (!row.ok || !row.converged) throw std::runtime_error("c sweep point did not converge");
  const double n01 = t.rows[0].first_step_iterations;
  const double n1 = t.rows[1].first_step_iterations;
  const double n10 = t.rows[2].first_step_iterations;
  const double knee = n01 / n1;
  const double plateau = std::abs(n1 - n10) / n1;
  CriterionResult r;
  r.pass = knee >= reference::c_knee_ratio && plateau <= reference::c_plateau_spread;
  r.detail = "iterations c=0.1/1/10: " + count_text(t.rows[0]) + "/" + count_text(t.rows[1]) +
             "/" + count_text(t.rows[2]) + " (knee x" + fmt("%.2f", knee) + ", plateau " +
             fmt("%.1f%%", 100.0 * plateau) + ")";
  return r;
}

CriterionResult interface_sharpness() {
  const CaseSpec plain = with_scheme(layered_column_undrained(), Scheme::monolithic);
  const CaseSpec stab = burden_stabilized(plain);
  const Model model = build_model(stab);
  const StructuredGrid& g = model.grid;
  const int reservoir = stab.region_id("reservoir");
  const int burden = stab.region_id("burden");

  const SparseMatrix S = assemble_stabilization(g, model.materials, model.stab_regions, 1.0);
  int interface_faces = 0;
  bool structural = true;
  for (const InteriorFace& f : g.interior_faces()) {
    const int a = g.cell_region(f.left), b = g.cell_region(f.right);
    if (a == b) continue;
    if (!((a == reservoir && b == burden) || (a == burden && b == reservoir))) continue;
    ++interface_faces;
    structural = structural && S.coeff(f.left, f.right) == 0.0 &&
                 S.coeff(f.right, f.left) == 0.0 &&
                 stabilization_weight(g, model.materials, f, model.stab_regions, 1.0) == 0.0;
  }
  // Reservoir rows must not see burden cells either.
  for (int c = 0; c < g.num_cells(); ++c) {
    if (g.cell_region(c) != reservoir) continue;
    for (SparseMatrix::InnerIterator it(S, c); it; ++it) structural = structural && it.value() == 0.0;
  }

  const Vector p0 = run_case(plain).final_state.p_curr;
  const Vector p1 = run_case(stab).final_state.p_curr;
  std::vector<double> a, b;
  for (int c = 0; c < g.num_cells(); ++c) {
    if (g.cell_region(c) != reservoir) continue;
    a.push_back(p1[c]);
    b.push_back(p0[c]);
  }
  const double diff = field_difference(Eigen::Map<const Vector>(a.data(), a.size()),
                                       Eigen::Map<const Vector>(b.data(), b.size()))
                          .l2_rel;
  CriterionResult r;
  r.pass = structural && interface_faces > 0 && diff <= reference::interface_agreement;
  r.detail = std::to_string(interface_faces) + " interface faces, S coupling " +
             (structural ? "zero" : "NONZERO") + "; reservoir pressure change " + sci(diff) +
             " (bound " + sci(reference::interface_agreement) + ")";
  return r;
}

CriterionResult mass_bookkeeping() {
  struct Item {
    std::string label;
    CaseSpec spec;
  };
  std::vector<Item> items;
  const CaseSpec bm = barry_mercer_undrained();
  CaseSpec layered = burden_stabilized(layered_column_undrained());
  layered.time.steps = 2;
  for (Scheme s : {Scheme::monolithic, Scheme::fs_noniter, Scheme::fs_iter}) {
    CaseSpec plain = with_scheme(bm, s);
    plain.solver.max_outer_iters = 100000;
    items.push_back({std::string("bm/") + to_string(s), plain});
    items.push_back({std::string("bm-stab/") + to_string(s), globally_stabilized(plain)});
    items.push_back({std::string("layered-stab/") + to_string(s), with_scheme(layered, s)});
  }
  double worst = 0.0;
  std::string where;
  for (const Item& item : items) {
    const RunReport rep = run_case(item.spec);
    require_converged(rep, item.label);
    double scale = 0.0;
    for (const StepRow& s : rep.rows) scale = std::max(scale, std::abs(s.source_volume));
    for (const StepRow& s : rep.rows) {
      const double rel = std::abs(s.mass_defect) / scale;
      if (rel >= worst) {
        worst = rel;
        where = item.label + " step " + std::to_string(s.step);
      }
    }
  }
  CriterionResult r;
  r.pass = worst <= reference::mass_balance_tol;
  r.detail = "worst |defect| / max step source " + sci(worst) + " at " + where + " (" +
             std::to_string(items.size()) + " runs)";
  return r;
}

bool same_bytes(const std::filesystem::path& a, const std::filesystem::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  const std::string sa{std::istreambuf_iterator<char>(fa), {}};
  const std::string sb{std::istreambuf_iterator<char>(fb), {}};
  return sa == sb;
}

CriterionResult determinism(const AcceptanceOptions& options) {
  const auto root = options.scratch_dir.empty()
                        ? std::filesystem::temp_directory_path() / "porosplit-determinism"
                        : options.scratch_dir / "determinism";
  const auto d1 = root / "run1";
  const auto d2 = root / "run2";
  std::filesystem::remove_all(root);
  write_reference_artifacts(d1, 1);
  write_reference_artifacts(d2, std::max(2, options.workers));

  int files = 0, mismatched = 0;
  for (const auto& entry : std::filesystem::directory_iterator(d1)) {
    ++files;
    if (!same_bytes(entry.path(), d2 / entry.path().filename())) ++mismatched;
  }
  int other = 0;
  for ([[maybe_unused]] const auto& entry : std::filesystem::directory_iterator(d2)) ++other;

  CriterionResult r;
  r.pass = files > 0 && mismatched == 0 && files == other;
  r.detail = std::to_string(files) + " CSV/VTK files compared, " + std::to_string(mismatched) +
             " differ";
  return r;
}

}  // namespace

void write_reference_artifacts(const std::filesystem::path& dir, int workers) {
  std::filesystem::create_directories(dir);
  CaseSpec spec = with_scheme(barry_mercer_undrained(), Scheme::fs_iter);
  spec.solver.max_outer_iters = 100000;
  const Discretization disc(build_model(spec), spec.solver.alpha);
  const RunReport rep = run_case(spec, [&](const StepRow& row, const FieldState& s) {
    write_vtk(dir / ("pressure_step" + std::to_string(row.step) + ".vtk"), disc.grid(), s.p_curr,
              s.u_curr, spec.name);
  });
  write_step_csv(dir / "report.csv", rep);

  SweepSpec sweep;
  sweep.base = barry_mercer_undrained();
  sweep.base.time.steps = 2;
  sweep.base.solver.scheme = Scheme::fs_iter;
  sweep.axes = {{"alpha", {"0.6", "0.8", "1"}}, {"stab", {"none", "all"}}};
  sweep.workers = workers;
  write_sweep_csv(dir / "sweep.csv", run_sweep(sweep));
}

std::vector<int> acceptance_ids() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}; }

std::string acceptance_name(int id) {
  switch (id) {
    case 1: return "checkerboard_emergence";
    case 2: return "iterates_approach_monolithic";
    case 3: return "noniterative_delayed_oscillation";
    case 4: return "drained_scheme_equivalence";
    case 5: return "splitting_error_identity";
    case 6: return "stabilization_efficacy";
    case 7: return "optimal_tau";
    case 8: return "alpha_sweep_trends";
    case 9: return "c_sweep_knee";
    case 10: return "interface_sharpness";
    case 11: return "mass_bookkeeping";
    case 12: return "determinism";
  }
  throw std::invalid_argument("no acceptance check with id " + std::to_string(id));
}

CriterionResult run_criterion(int id, const AcceptanceOptions& options) {
  CriterionResult r;
  const std::string name = acceptance_name(id);
  try {
    switch (id) {
      case 1: r = checkerboard_emergence(); break;
      case 2: r = iterates_approach_monolithic(); break;
      case 3: r = delayed_oscillation(); break;
      case 4: r = drained_equivalence(); break;
      case 5: r = splitting_identity(); break;
      case 6: r = stabilization_efficacy(); break;
      case 7: r = tau_star(); break;
      case 8: r = alpha_sweep_trends(options.workers); break;
      case 9: r = c_sweep_knee(options.workers); break;
      case 10: r = interface_sharpness(); break;
      case 11: r = mass_bookkeeping(); break;
      case 12: r = determinism(options); break;
    }
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.id = id;
  r.name = name;
  return r;
}

std::string format_result(const CriterionResult& r) {
  char head[16];
  std::snprintf(head, sizeof head, "[%2d] ", r.id);
  return head + std::string(r.pass ? "PASS " : "FAIL ") + r.name + ": " + r.detail;
}

}  // namespace porosplit
