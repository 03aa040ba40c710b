#include "porosplit/cases.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace porosplit {

std::vector<double> TimeStepping::step_sizes() const {
  if (!(dt0 > 0.0)) throw std::invalid_argument("time.dt0 must be > 0");
  if (!(growth >= 1.0)) throw std::invalid_argument("time.growth must be >= 1");
  if (!(dt_max > 0.0)) throw std::invalid_argument("time.dtmax must be > 0");
  if (steps < 0) throw std::invalid_argument("time.steps must be >= 0");
  if (steps == 0 && !(end_time > 0.0)) {
    throw std::invalid_argument("time: need steps > 0 or end > 0");
  }
  std::vector<double> out;
  double dt = std::min(dt0, dt_max);
  double t = 0.0;
  while (true) {
    if (steps > 0) {
      if (static_cast<int>(out.size()) == steps) break;
    } else {
      const double remaining = end_time - t;
      if (remaining <= 1e-12 * end_time) break;
      if (dt > remaining) dt = remaining;
    }
    out.push_back(dt);
    t += dt;
    dt = std::min(dt * growth, dt_max);
    if (out.size() > 1000000) throw std::invalid_argument("time: too many steps");
  }
  return out;
}

int CaseSpec::region_id(const std::string& region_name) const {
  for (std::size_t i = 0; i < regions.size(); ++i)
    if (regions[i].name == region_name) return static_cast<int>(i);
  throw std::invalid_argument("unknown region '" + region_name + "'");
}

namespace {

bool selects(const RegionSpec& r, const StructuredGrid& g, const Ijk& ijk) {
  switch (r.selector) {
    case RegionSpec::Selector::all: return true;
    case RegionSpec::Selector::layers: {
      const int i = ijk[static_cast<std::size_t>(r.layer_axis)];
      return i >= r.layer_first && i <= r.layer_last;
    }
    case RegionSpec::Selector::box: {
      const Vec3 x = g.cell_center(g.cell_index(ijk[0], ijk[1], ijk[2]));
      for (int a = 0; a < g.dim(); ++a)
        if (x[a] < r.box_lo[a] || x[a] > r.box_hi[a]) return false;
      return true;
    }
  }
  return false;
}

RegionSet resolve_stabilization(const CaseSpec& spec) {
  switch (spec.stabilization.scope) {
    case StabilizationSpec::Scope::none: return RegionSet::none();
    case StabilizationSpec::Scope::all: return RegionSet::everything();
    case StabilizationSpec::Scope::named: {
      std::vector<int> ids;
      for (const auto& n : spec.stabilization.regions) ids.push_back(spec.region_id(n));
      return RegionSet::of(std::move(ids));
    }
  }
  return RegionSet::none();
}

}  // namespace

Model build_model(const CaseSpec& spec) {
  if (spec.regions.empty()) throw std::invalid_argument("case: at least one region is required");
  for (const RegionSpec& r : spec.regions) {
    if (r.selector == RegionSpec::Selector::layers &&
        (r.layer_axis < 0 || r.layer_axis >= static_cast<int>(spec.dims.size()))) {
      throw std::invalid_argument("region '" + r.name + "': layer axis outside the grid");
    }
  }

  Model model;
  // Region selection needs cell centers, so build a probe grid first.
  const StructuredGrid probe = StructuredGrid::build(spec.dims, spec.extent);
  model.grid = StructuredGrid::build(spec.dims, spec.extent, [&](const Ijk& ijk) {
    int id = -1;
    for (std::size_t r = 0; r < spec.regions.size(); ++r)
      if (selects(spec.regions[r], probe, ijk)) id = static_cast<int>(r);
    if (id < 0) {
      throw std::invalid_argument("case: cell (" + std::to_string(ijk[0]) + "," +
                                  std::to_string(ijk[1]) + "," + std::to_string(ijk[2]) +
                                  ") belongs to no region");
    }
    return id;
  });
  const StructuredGrid& g = model.grid;
  for (const RegionSpec& r : spec.regions) model.materials.push_back(r.material);

  std::map<std::pair<int, int>, double> fixed;
  for (const MechBoundary& bc : spec.mech_bcs) {
    if (bc.axis < 0 || bc.axis >= g.dim() || (bc.side != 0 && bc.side != 1)) {
      throw std::invalid_argument("mechanical boundary: side outside the grid");
    }
    if (bc.kind == MechBoundary::Kind::traction) {
      auto tr = side_traction(g, bc.axis, bc.side, bc.traction);
      model.tractions.insert(model.tractions.end(), tr.begin(), tr.end());
      continue;
    }
    const int plane = bc.side == 0 ? 0 : g.node_dims()[bc.axis] - 1;
    for (int n = 0; n < g.num_nodes(); ++n) {
      if (g.node_ijk(n)[bc.axis] != plane) continue;
      if (bc.kind == MechBoundary::Kind::roller) {
        fixed[{n, bc.axis}] = 0.0;
      } else {
        for (int d = 0; d < g.dim(); ++d) fixed[{n, d}] = 0.0;
      }
    }
  }
  for (const auto& [key, value] : fixed) model.dirichlet.add(key.first, key.second, value);

  for (const SourceSpec& s : spec.sources) {
    const auto cell = g.locate_cell(s.at);
    if (!cell) throw std::invalid_argument("source: point lies outside the domain");
    // Points on a cell face are ambiguous.
    for (int a = 0; a < g.dim(); ++a) {
      const double q = s.at[a] / g.spacing()[a];
      if (std::abs(q - std::round(q)) < 1e-9) {
        throw std::invalid_argument("source: point lies on a cell face");
      }
    }
    model.sources.push_back({*cell, s.rate});
  }
  model.pressure_bcs = spec.pressure_bcs;
  model.gravity = spec.gravity;
  model.stab_regions = resolve_stabilization(spec);
  model.stab_c = spec.stabilization.c;
  return model;
}

// ---------------------------------------------------------------------------
// Built-in cases

CaseSpec barry_mercer_undrained() {
  CaseSpec c;
  c.name = "barry-mercer";
  c.dims = {10, 10};
  c.extent = {1.0, 1.0};
  RegionSpec domain;
  domain.name = "domain";
  domain.material.young_modulus = 1.0e4;
  domain.material.poisson_ratio = 0.2;
  domain.material.biot_coefficient = 1.0;
  domain.material.inv_biot_modulus = 0.0;
  domain.material.permeability = 1.0e-12;
  domain.material.viscosity = 1.0;
  c.regions = {domain};
  // Rollers on the left, right and bottom sides; the top is traction free.
  c.mech_bcs = {{0, 0, MechBoundary::Kind::roller, {0.0, 0.0, 0.0}},
                {0, 1, MechBoundary::Kind::roller, {0.0, 0.0, 0.0}},
                {1, 0, MechBoundary::Kind::roller, {0.0, 0.0, 0.0}}};
  for (int axis = 0; axis < 2; ++axis)
    for (int side = 0; side < 2; ++side) c.pressure_bcs.push_back({axis, side, 0.0});
  c.sources = {{{0.35, 0.15, 0.0}, RateFunction::sine(1.0, std::numbers::pi / 100.0, 0.0)}};
  c.time.dt0 = 10.0;
  c.time.growth = 1.0;
  c.time.steps = 10;
  c.solver.scheme = Scheme::monolithic;
  c.stabilization.scope = StabilizationSpec::Scope::none;
  c.stabilization.c = 1.0;
  return c;
}

CaseSpec barry_mercer_drained() {
  CaseSpec c = barry_mercer_undrained();
  c.name = "barry-mercer-drained";
  c.regions[0].material.permeability = 1.0e-8;
  return c;
}

CaseSpec layered_column_undrained(double burden_permeability) {
  CaseSpec c;
  c.name = "layered-column";
  c.dims = {10, 10, 15};
  c.extent = {3000.0, 3000.0, 4500.0};

  MaterialRegion rock;
  rock.poisson_ratio = 0.25;
  rock.young_modulus = young_from_bulk(5.0e9, rock.poisson_ratio);
  rock.biot_coefficient = 1.0;
  rock.inv_biot_modulus = 1.0e-10;
  rock.viscosity = 1.0e-3;

  RegionSpec burden;
  burden.name = "burden";
  burden.selector = RegionSpec::Selector::all;
  burden.material = rock;
  burden.material.permeability = burden_permeability;
  burden.material.inv_biot_modulus = 0.0;

  RegionSpec reservoir;
  reservoir.name = "reservoir";
  reservoir.selector = RegionSpec::Selector::layers;
  reservoir.layer_axis = 2;
  reservoir.layer_first = 5;
  reservoir.layer_last = 9;
  reservoir.material = rock;
  reservoir.material.permeability = 9.8e-13;

  c.regions = {burden, reservoir};
  // Rollers on the sides and bottom; the top surface is traction free.
  for (int axis = 0; axis < 2; ++axis)
    for (int side = 0; side < 2; ++side)
      c.mech_bcs.push_back({axis, side, MechBoundary::Kind::roller, {0.0, 0.0, 0.0}});
  c.mech_bcs.push_back({2, 0, MechBoundary::Kind::roller, {0.0, 0.0, 0.0}});
  c.sources = {{{1350.0, 1350.0, 2250.0}, RateFunction::constant(1.0e-3)}};
  c.time.dt0 = 86400.0;
  c.time.growth = 2.0;
  c.time.steps = 4;
  c.solver.scheme = Scheme::fs_iter;
  c.stabilization.scope = StabilizationSpec::Scope::none;
  c.stabilization.c = 1.0;
  return c;
}

std::vector<std::string> builtin_case_names() {
  return {"barry-mercer", "barry-mercer-drained", "layered-column"};
}

CaseSpec builtin_case(const std::string& name) {
  if (name == "barry-mercer") return barry_mercer_undrained();
  if (name == "barry-mercer-drained") return barry_mercer_drained();
  if (name == "layered-column") return layered_column_undrained();
  throw std::invalid_argument("unknown built-in case '" + name + "'");
}

// ---------------------------------------------------------------------------
// Running

RunReport run_case(const CaseSpec& spec, const StepCallback& on_step) {
  validate(spec.solver);
  const std::vector<double> dts = spec.time.step_sizes();
  const Discretization disc(build_model(spec), spec.solver.alpha);

  RunReport report;
  report.case_name = spec.name;
  std::vector<RegionSet> region_sets;
  for (std::size_t r = 0; r < spec.regions.size(); ++r) {
    report.region_names.push_back(spec.regions[r].name);
    region_sets.push_back(RegionSet::of({static_cast<int>(r)}));
  }

  FieldState state = disc.initial_state();
  std::unique_ptr<LinearSolvers> solvers;
  for (std::size_t n = 0; n < dts.size(); ++n) {
    const double dt = dts[n];
    const BlockSystem sys = disc.system(dt, state);
    if (!solvers || !solvers->serves(sys.op())) {
      solvers = std::make_unique<LinearSolvers>(sys.ops, spec.solver.linear_solver_tol);
    }
    StepResult res = step(sys, state, spec.solver, solvers.get());

    StepRow row;
    row.step = static_cast<int>(n) + 1;
    row.time = sys.t_next;
    row.dt = dt;
    row.scheme = spec.solver.scheme;
    row.outer_iterations = res.outer_iterations;
    row.converged = res.converged;
    row.residual_ratio = res.final_residual_ratio();
    row.splitting_error_norm = res.splitting_error_norm;
    const Vector dp = res.state.p_curr - state.p_curr;
    const MassBalance mb =
        mass_balance(disc.model(), dt, res.flow_accumulation, res.state.p_curr, dp,
                     sys.source_volume);
    row.mass_defect = mb.total_defect;
    row.source_volume = mb.total_source;
    for (std::size_t r = 0; r < region_sets.size(); ++r) {
      const bool populated = [&] {
        for (int c = 0; c < disc.grid().num_cells(); ++c)
          if (disc.grid().cell_region(c) == static_cast<int>(r)) return true;
        return false;
      }();
      row.regions.push_back(populated ? oscillation_metrics(disc.grid(), res.state.p_curr,
                                                            region_sets[r])
                                      : OscillationReport{0.0, 0.0, region_sets[r]});
    }
    row.residual_history = std::move(res.residual_history);
    row.wall_time = res.wall_time;
    state = std::move(res.state);

    report.rows.push_back(row);
    if (on_step) on_step(report.rows.back(), state);
    if (!row.converged) {
      report.converged = false;
      report.failed_step = row.step;
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "step %d: no convergence after %d outer iterations (residual ratio %.3e)",
                    row.step, row.outer_iterations, row.residual_ratio);
      report.message = buf;
      break;
    }
  }
  report.final_state = std::move(state);
  return report;
}

// ---------------------------------------------------------------------------
// Sweeps

namespace {

double to_double(const std::string& axis, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("sweep axis " + axis + ": '" + value + "' is not a number");
  }
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

SweepAxis parse_sweep_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    throw std::invalid_argument("sweep axis '" + text + "': expected name=values");
  }
  SweepAxis axis;
  axis.name = text.substr(0, eq);
  const std::string rest = text.substr(eq + 1);
  if (rest.find(':') != std::string::npos && rest.find(',') == std::string::npos) {
    const auto c1 = rest.find(':');
    const auto c2 = rest.find(':', c1 + 1);
    if (c2 == std::string::npos) {
      throw std::invalid_argument("sweep axis '" + text + "': range must be lo:hi:step");
    }
    const double lo = to_double(axis.name, rest.substr(0, c1));
    const double hi = to_double(axis.name, rest.substr(c1 + 1, c2 - c1 - 1));
    const double st = to_double(axis.name, rest.substr(c2 + 1));
    if (!(st > 0.0) || hi < lo) {
      throw std::invalid_argument("sweep axis '" + text + "': need step > 0 and hi >= lo");
    }
    const auto count = static_cast<long>(std::floor((hi - lo) / st + 1e-9));
    for (long i = 0; i <= count; ++i) axis.values.push_back(format_number(lo + i * st));
  } else {
    std::size_t start = 0;
    while (start <= rest.size()) {
      const auto comma = rest.find(',', start);
      const std::string v = rest.substr(start, comma == std::string::npos ? rest.npos : comma - start);
      if (v.empty()) throw std::invalid_argument("sweep axis '" + text + "': empty value");
      axis.values.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return axis;
}

CaseSpec apply_axis_value(CaseSpec spec, const std::string& axis, const std::string& value) {
  if (axis == "alpha") {
    spec.solver.alpha = to_double(axis, value);
  } else if (axis == "c") {
    spec.stabilization.c = to_double(axis, value);
  } else if (axis == "dt") {
    spec.time.dt0 = to_double(axis, value);
  } else if (axis == "steps") {
    spec.time.steps = static_cast<int>(to_double(axis, value));
  } else if (axis == "scheme") {
    spec.solver.scheme = parse_scheme(value);
  } else if (axis == "stab") {
    if (value == "none") {
      spec.stabilization.scope = StabilizationSpec::Scope::none;
      spec.stabilization.regions.clear();
    } else if (value == "all") {
      spec.stabilization.scope = StabilizationSpec::Scope::all;
      spec.stabilization.regions.clear();
    } else {
      (void)spec.region_id(value);
      spec.stabilization.scope = StabilizationSpec::Scope::named;
      spec.stabilization.regions = {value};
    }
  } else if (axis == "k") {
    const double k = to_double(axis, value);
    for (RegionSpec& r : spec.regions) r.material.permeability = k;
  } else if (axis.rfind("k:", 0) == 0) {
    const int id = spec.region_id(axis.substr(2));
    spec.regions[static_cast<std::size_t>(id)].material.permeability = to_double(axis, value);
  } else {
    throw std::invalid_argument("unknown sweep axis '" + axis + "'");
  }
  return spec;
}

SweepTable run_sweep(const SweepSpec& spec) {
  SweepTable table;
  std::size_t total = 1;
  for (const SweepAxis& a : spec.axes) {
    if (a.values.empty()) {
      total = 0;
    } else {
      total *= a.values.size();
    }
    if (total > spec.max_points) {
      throw std::invalid_argument("sweep: cross product exceeds " +
                                  std::to_string(spec.max_points) + " points");
    }
    table.axis_names.push_back(a.name);
  }
  for (const RegionSpec& r : spec.base.regions) table.region_names.push_back(r.name);
  table.rows.resize(total);

  auto run_point = [&](std::size_t index) {
    SweepRow& row = table.rows[index];
    std::size_t rem = index;
    std::vector<std::string> values(spec.axes.size());
    for (std::size_t a = spec.axes.size(); a-- > 0;) {
      const auto& vals = spec.axes[a].values;
      values[a] = vals[rem % vals.size()];
      rem /= vals.size();
    }
    row.values = values;
    try {
      CaseSpec c = spec.base;
      for (std::size_t a = 0; a < spec.axes.size(); ++a)
        c = apply_axis_value(std::move(c), spec.axes[a].name, values[a]);
      const RunReport rep = run_case(c);
      row.converged = rep.converged;
      row.steps = static_cast<int>(rep.rows.size());
      if (!rep.rows.empty()) {
        row.first_step_iterations = rep.rows.front().outer_iterations;
        row.final_regions = rep.rows.back().regions;
      }
      for (const StepRow& s : rep.rows) {
        row.total_iterations += s.outer_iterations;
        row.max_iterations = std::max(row.max_iterations, s.outer_iterations);
      }
      if (!rep.converged) row.error = rep.message;
    } catch (const std::exception& e) {
      row.ok = false;
      row.converged = false;
      row.error = e.what();
    }
  };

  const int workers = std::max(1, spec.workers);
  if (workers == 1 || total <= 1) {
    for (std::size_t i = 0; i < total; ++i) run_point(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < total; i = next++) run_point(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  return table;
}

}  // namespace porosplit
