// porosplit command-line front end: run, sweep, verify, list-cases.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "porosplit/acceptance.hpp"
#include "porosplit/case_file.hpp"
#include "porosplit/report_csv.hpp"
#include "porosplit/vtk.hpp"

namespace fs = std::filesystem;
using namespace porosplit;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_usage = 2;
constexpr int exit_not_converged = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CaseOptions {
  std::string case_path;
  std::string builtin;
  std::string scheme;
  std::optional<double> alpha;
  std::optional<double> c;
  std::vector<std::string> stab_regions;
  std::optional<double> dt0;
  std::optional<int> steps;
  std::optional<double> rel_tol;
  std::optional<int> max_outer;
  std::optional<int> fixed_iters;
  std::optional<double> permeability;
};

void add_case_options(CLI::App* cmd, CaseOptions& o) {
  auto* file = cmd->add_option("--case", o.case_path, "Case file (JSON)")->check(CLI::ExistingFile);
  auto* builtin = cmd->add_option("--builtin", o.builtin, "Built-in case name (see list-cases)");
  file->excludes(builtin);
  cmd->add_option("--scheme", o.scheme, "monolithic | fs_noniter | fs_iter");
  cmd->add_option("--alpha", o.alpha, "Fixed-stress coefficient");
  cmd->add_option("--c", o.c, "Stabilization strength multiplier");
  cmd->add_option("--stab-region", o.stab_regions,
                  "Stabilized region name, or all | none (repeatable)");
  cmd->add_option("--dt0", o.dt0, "First time step (s)");
  cmd->add_option("--steps", o.steps, "Number of time steps");
  cmd->add_option("--rel-tol", o.rel_tol, "Outer-iteration relative tolerance");
  cmd->add_option("--max-outer", o.max_outer, "Outer-iteration limit");
  cmd->add_option("--fixed-iters", o.fixed_iters, "Run exactly this many outer iterations");
  cmd->add_option("--k", o.permeability, "Permeability override for every region (m^2)");
}

CaseSpec load_case(const CaseOptions& o) {
  CaseSpec spec;
  try {
    if (!o.case_path.empty()) {
      spec = parse_case(o.case_path);
    } else if (!o.builtin.empty()) {
      spec = builtin_case(o.builtin);
    } else {
      throw UsageError("one of --case or --builtin is required");
    }
    if (!o.scheme.empty()) spec.solver.scheme = parse_scheme(o.scheme);
    if (o.alpha) {
      if (!(*o.alpha >= 0.0)) throw UsageError("--alpha must be >= 0");
      spec.solver.alpha = *o.alpha;
    }
    if (o.c) {
      if (!(*o.c >= 0.0)) throw UsageError("--c must be >= 0");
      spec.stabilization.c = *o.c;
    }
    if (!o.stab_regions.empty()) {
      spec.stabilization.regions.clear();
      if (o.stab_regions.size() == 1 && o.stab_regions[0] == "all") {
        spec.stabilization.scope = StabilizationSpec::Scope::all;
      } else if (o.stab_regions.size() == 1 && o.stab_regions[0] == "none") {
        spec.stabilization.scope = StabilizationSpec::Scope::none;
      } else {
        spec.stabilization.scope = StabilizationSpec::Scope::named;
        for (const std::string& r : o.stab_regions) {
          (void)spec.region_id(r);
          spec.stabilization.regions.push_back(r);
        }
      }
    }
    if (o.dt0) {
      if (!(*o.dt0 > 0.0)) throw UsageError("--dt0 must be > 0");
      spec.time.dt0 = *o.dt0;
    }
    if (o.steps) {
      if (*o.steps < 1) throw UsageError("--steps must be >= 1");
      spec.time.steps = *o.steps;
    }
    if (o.rel_tol) {
      if (!(*o.rel_tol > 0.0)) throw UsageError("--rel-tol must be > 0");
      spec.solver.rel_tol = *o.rel_tol;
    }
    if (o.max_outer) {
      if (*o.max_outer < 1) throw UsageError("--max-outer must be >= 1");
      spec.solver.max_outer_iters = *o.max_outer;
    }
    if (o.fixed_iters) {
      if (*o.fixed_iters < 1) throw UsageError("--fixed-iters must be >= 1");
      spec.solver.fixed_iter_count = *o.fixed_iters;
    }
    if (o.permeability) {
      if (!(*o.permeability >= 0.0)) throw UsageError("--k must be >= 0");
      for (RegionSpec& r : spec.regions) r.material.permeability = *o.permeability;
    }
    validate(spec.solver);
    (void)build_model(spec);
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return spec;
}

fs::path output_dir(const std::string& flag) {
  fs::path dir = flag;
  if (dir.empty()) {
    const char* env = std::getenv("POROSPLIT_OUT");
    dir = env && *env ? fs::path(env) : fs::path(".");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

int cmd_run(const CaseOptions& o, const std::string& out_flag, bool timing) {
  const CaseSpec spec = load_case(o);
  const fs::path dir = output_dir(out_flag);
  const Discretization disc(build_model(spec), spec.solver.alpha);

  std::printf("case %s, scheme %s, %zu regions\n", spec.name.c_str(), to_string(spec.solver.scheme),
              spec.regions.size());
  const RunReport rep = run_case(spec, [&](const StepRow& row, const FieldState& s) {
    double cb = 0.0;
    for (const OscillationReport& r : row.regions) cb = std::max(cb, r.checkerboard_projection);
    std::printf("step %3d  t=%-12.6g iterations %5d  residual ratio %.3e  checkerboard %.4e%s\n",
                row.step, row.time, row.outer_iterations, row.residual_ratio, cb,
                row.converged ? "" : "  NOT CONVERGED");
    std::fflush(stdout);
    write_vtk(dir / ("pressure_step" + std::to_string(row.step) + ".vtk"), disc.grid(), s.p_curr,
              s.u_curr, spec.name);
  });
  write_step_csv(dir / "report.csv", rep, timing);
  if (!rep.converged) {
    std::fprintf(stderr, "porosplit: %s\n", rep.message.c_str());
    return exit_not_converged;
  }
  return exit_ok;
}

int cmd_sweep(const CaseOptions& o, const std::vector<std::string>& axis_texts,
              const std::string& out_flag, int workers, std::size_t max_points) {
  SweepSpec sweep;
  sweep.base = load_case(o);
  sweep.workers = workers;
  sweep.max_points = max_points;
  try {
    for (const std::string& a : axis_texts) {
      SweepAxis axis = parse_sweep_axis(a);
      for (const std::string& v : axis.values) (void)apply_axis_value(sweep.base, axis.name, v);
      sweep.axes.push_back(std::move(axis));
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const fs::path dir = output_dir(out_flag);
  SweepTable table;
  try {
    table = run_sweep(sweep);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  write_sweep_csv(dir / "sweep.csv", table);
  int failed = 0;
  for (const SweepRow& row : table.rows) {
    std::string label;
    for (std::size_t i = 0; i < row.values.size(); ++i)
      label += (i ? " " : "") + table.axis_names[i] + "=" + row.values[i];
    std::printf("%-40s first-step iterations %5d  total %6d  %s\n", label.c_str(),
                row.first_step_iterations, row.total_iterations,
                !row.ok ? ("error: " + row.error).c_str() : row.converged ? "converged" : "NOT CONVERGED");
    if (!row.ok || !row.converged) ++failed;
  }
  std::printf("%zu points, %d failed or unconverged; wrote %s\n", table.rows.size(), failed,
              (dir / "sweep.csv").string().c_str());
  return exit_ok;
}

int cmd_verify(const std::string& out_flag, int workers, const std::vector<int>& only) {
  AcceptanceOptions options;
  options.scratch_dir = output_dir(out_flag);
  options.workers = workers;
  const std::vector<int> ids = only.empty() ? acceptance_ids() : only;
  int failures = 0;
  for (int id : ids) {
    try {
      (void)acceptance_name(id);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  for (int id : ids) {
    const CriterionResult r = run_criterion(id, options);
    std::printf("%s\n", format_result(r).c_str());
    std::fflush(stdout);
    if (!r.pass) ++failures;
  }
  std::printf("%d of %zu checks passed\n", static_cast<int>(ids.size()) - failures, ids.size());
  return failures == 0 ? exit_ok : exit_failure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear Biot poromechanics with fixed-stress splitting"};
  app.require_subcommand(1);

  CaseOptions run_opts;
  std::string run_out;
  bool timing = false;
  auto* run = app.add_subcommand("run", "Run one case, writing VTK fields and report.csv");
  add_case_options(run, run_opts);
  run->add_option("--out", run_out, "Output directory (default $POROSPLIT_OUT or .)");
  run->add_flag("--timing", timing, "Add a wall_time column to report.csv");

  CaseOptions sweep_opts;
  std::string sweep_out;
  std::vector<std::string> axes;
  int sweep_workers = 1;
  std::size_t max_points = 10000;
  auto* sweep = app.add_subcommand("sweep", "Cross-product parameter sweep, writing sweep.csv");
  add_case_options(sweep, sweep_opts);
  sweep->add_option("--axis", axes, "name=v1,v2,... or name=lo:hi:step (repeatable)")->required();
  sweep->add_option("--out", sweep_out, "Output directory (default $POROSPLIT_OUT or .)");
  sweep->add_option("--workers", sweep_workers, "Concurrent sweep points")->check(CLI::PositiveNumber);
  sweep->add_option("--max-points", max_points, "Cap on the cross-product size");

  std::string verify_out;
  int verify_workers = 1;
  std::vector<int> only;
  auto* verify = app.add_subcommand("verify", "Run the acceptance checks");
  verify->add_option("--out", verify_out, "Scratch directory (default $POROSPLIT_OUT or .)");
  verify->add_option("--workers", verify_workers, "Concurrent sweep points")->check(CLI::PositiveNumber);
  verify->add_option("--only", only, "Run only these check ids");

  auto* list = app.add_subcommand("list-cases", "List built-in cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : exit_usage;
  }

  try {
    if (*list) {
      for (const std::string& n : builtin_case_names()) std::printf("%s\n", n.c_str());
      return exit_ok;
    }
    if (*run) return cmd_run(run_opts, run_out, timing);
    if (*sweep) return cmd_sweep(sweep_opts, axes, sweep_out, sweep_workers, max_points);
    if (*verify) return cmd_verify(verify_out, verify_workers, only);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "porosplit: %s\n", e.what());
    return exit_usage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "porosplit: %s\n", e.what());
    return exit_failure;
  }
  return exit_usage;
}
