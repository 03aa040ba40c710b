#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "porosplit/cases.hpp"
#include "porosplit/rate.hpp"

using namespace porosplit;

TEST(Rate, Evaluates) {
  EXPECT_DOUBLE_EQ(RateFunction::constant(2.5)(123.0), 2.5);
  const auto s = RateFunction::sine(1.0, std::numbers::pi / 100.0);
  EXPECT_NEAR(s(10.0), 0.309017, 1e-6);
  EXPECT_EQ(s(0.0), 0.0);
}

TEST(Rate, Parses) {
  EXPECT_EQ(RateFunction::parse("2.5"), RateFunction::constant(2.5));
  const auto s = RateFunction::parse("sin(pi*t/100)");
  EXPECT_EQ(s.kind, RateFunction::Kind::sine);
  EXPECT_DOUBLE_EQ(s.scale, 1.0);
  EXPECT_DOUBLE_EQ(s.omega, std::numbers::pi / 100.0);
  const auto t = RateFunction::parse("3*sin(0.1*t + 0.5)");
  EXPECT_DOUBLE_EQ(t.scale, 3.0);
  EXPECT_DOUBLE_EQ(t.omega, 0.1);
  EXPECT_DOUBLE_EQ(t.phase, 0.5);
  EXPECT_THROW(RateFunction::parse("cos(t)"), std::invalid_argument);
  EXPECT_THROW(RateFunction::parse("sin(t*t)"), std::invalid_argument);
  EXPECT_THROW(RateFunction::parse(""), std::invalid_argument);
}

TEST(Cases, TimeStepping) {
  TimeStepping t;
  t.dt0 = 86400.0;
  t.growth = 2.0;
  t.steps = 4;
  EXPECT_EQ(t.step_sizes(), (std::vector<double>{86400.0, 172800.0, 345600.0, 691200.0}));
  t.dt_max = 200000.0;
  EXPECT_EQ(t.step_sizes().back(), 200000.0);
  TimeStepping e;
  e.dt0 = 3.0;
  e.steps = 0;
  e.end_time = 10.0;
  EXPECT_EQ(e.step_sizes(), (std::vector<double>{3.0, 3.0, 3.0, 1.0}));
  e.dt0 = -1.0;
  EXPECT_THROW(e.step_sizes(), std::invalid_argument);
}

TEST(Cases, BarryMercerSetup) {
  const CaseSpec s = barry_mercer_undrained();
  EXPECT_EQ(s.dims, (std::vector<int>{10, 10}));
  EXPECT_EQ(s.extent, (std::vector<double>{1.0, 1.0}));
  ASSERT_EQ(s.regions.size(), 1u);
  const auto& m = s.regions[0].material;
  EXPECT_EQ(m.young_modulus, 1e4);
  EXPECT_EQ(m.poisson_ratio, 0.2);
  EXPECT_EQ(m.inv_biot_modulus, 0.0);
  EXPECT_EQ(m.biot_coefficient, 1.0);
  EXPECT_EQ(m.viscosity, 1.0);
  EXPECT_EQ(m.permeability, 1e-12);
  EXPECT_EQ(s.time.step_sizes(), std::vector<double>(10, 10.0));
  ASSERT_EQ(s.sources.size(), 1u);
  EXPECT_NEAR(s.sources[0].rate(10.0), 0.309, 1e-3);

  const Model model = build_model(s);
  ASSERT_EQ(model.sources.size(), 1u);
  EXPECT_EQ(model.grid.cell_ijk(model.sources[0].cell), (Ijk{3, 1, 0}));
  EXPECT_EQ(model.pressure_bcs.size(), 4u);
}

TEST(Cases, SourceSampledAtNewTime) {
  const CaseSpec s = barry_mercer_undrained();
  const Discretization disc(build_model(s), 1.0);
  const auto sys = disc.system(10.0, disc.initial_state());
  EXPECT_NEAR(sys.source_volume.sum(), 10.0 * std::sin(std::numbers::pi / 10.0), 1e-14);
}

TEST(Cases, DrainedVariant) {
  CaseSpec d = barry_mercer_drained();
  EXPECT_EQ(d.regions[0].material.permeability, 1e-8);
  d.regions[0].material.permeability = 1e-12;
  d.name = barry_mercer_undrained().name;
  EXPECT_EQ(d, barry_mercer_undrained());
}

TEST(Cases, LayeredSetup) {
  const CaseSpec s = layered_column_undrained();
  EXPECT_EQ(s.dims, (std::vector<int>{10, 10, 15}));
  const int burden = s.region_id("burden");
  const int reservoir = s.region_id("reservoir");
  EXPECT_EQ(s.regions[static_cast<std::size_t>(burden)].material.permeability, 9.8e-20);
  EXPECT_EQ(s.regions[static_cast<std::size_t>(reservoir)].material.permeability, 9.8e-13);
  EXPECT_NEAR(s.regions[0].material.young_modulus, 7.5e9, 1e-3);
  EXPECT_EQ(layered_column_undrained(9.8e-14).regions[static_cast<std::size_t>(burden)]
                .material.permeability,
            9.8e-14);

  const Model m = build_model(s);
  for (int c = 0; c < m.grid.num_cells(); ++c) {
    const int l = m.grid.cell_ijk(c)[2];
    EXPECT_EQ(m.grid.cell_region(c), l >= 5 && l <= 9 ? reservoir : burden);
  }
  ASSERT_EQ(m.sources.size(), 1u);
  EXPECT_EQ(m.grid.cell_region(m.sources[0].cell), reservoir);
}

TEST(Cases, BuiltinLookup) {
  for (const std::string& n : builtin_case_names()) EXPECT_EQ(builtin_case(n).name, n);
  EXPECT_THROW(builtin_case("staircase"), std::invalid_argument);
  EXPECT_THROW(barry_mercer_undrained().region_id("burden"), std::invalid_argument);
}

TEST(Cases, BadSourceRejected) {
  CaseSpec s = barry_mercer_undrained();
  s.sources[0].at = {1.5, 0.5, 0.0};
  EXPECT_THROW(build_model(s), std::invalid_argument);
  s.sources[0].at = {0.3, 0.15, 0.0};
  EXPECT_THROW(build_model(s), std::invalid_argument);
}

TEST(Cases, StabilizationScope) {
  CaseSpec s = layered_column_undrained();
  s.stabilization.scope = StabilizationSpec::Scope::named;
  s.stabilization.regions = {"burden"};
  const Model m = build_model(s);
  EXPECT_FALSE(m.stab_regions.all);
  EXPECT_EQ(m.stab_regions.ids, (std::vector<int>{s.region_id("burden")}));
  s.stabilization.regions = {"cap"};
  EXPECT_THROW(build_model(s), std::invalid_argument);
}

TEST(Cases, RunReportRows) {
  CaseSpec s = barry_mercer_undrained();
  const RunReport rep = run_case(s);
  EXPECT_TRUE(rep.converged);
  ASSERT_EQ(rep.rows.size(), 10u);
  EXPECT_EQ(rep.region_names, (std::vector<std::string>{s.regions[0].name}));
  EXPECT_DOUBLE_EQ(rep.rows.back().time, 100.0);
  EXPECT_EQ(rep.final_state.step_index, 10);
  for (const StepRow& r : rep.rows) EXPECT_EQ(r.regions.size(), 1u);
}

TEST(Cases, GlobalStabilizationRemovesCheckerboard) {
  CaseSpec s = barry_mercer_undrained();
  const double plain = run_case(s).rows.back().regions[0].checkerboard_projection;
  s.stabilization.scope = StabilizationSpec::Scope::all;
  const double stab = run_case(s).rows.back().regions[0].checkerboard_projection;
  EXPECT_GE(plain, 10.0 * stab);
}

TEST(Cases, RunIsDeterministic) {
  CaseSpec s = barry_mercer_undrained();
  s.solver.scheme = Scheme::fs_iter;
  s.time.steps = 3;
  const RunReport a = run_case(s), b = run_case(s);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].outer_iterations, b.rows[i].outer_iterations);
    EXPECT_EQ(a.rows[i].residual_history, b.rows[i].residual_history);
    EXPECT_EQ(a.rows[i].mass_defect, b.rows[i].mass_defect);
  }
  EXPECT_EQ(a.final_state.p_curr, b.final_state.p_curr);
  EXPECT_EQ(a.final_state.u_curr, b.final_state.u_curr);
}

TEST(Cases, StopsAtFirstUnconvergedStep) {
  CaseSpec s = barry_mercer_undrained();
  s.solver.scheme = Scheme::fs_iter;
  s.solver.max_outer_iters = 2;
  const RunReport rep = run_case(s);
  EXPECT_FALSE(rep.converged);
  ASSERT_TRUE(rep.failed_step.has_value());
  EXPECT_EQ(*rep.failed_step, 1);
  EXPECT_EQ(rep.rows.size(), 1u);
  EXPECT_FALSE(rep.message.empty());
}

TEST(Sweep, ParseAxis) {
  EXPECT_EQ(parse_sweep_axis("alpha=0.5,1,1.5"), (SweepAxis{"alpha", {"0.5", "1", "1.5"}}));
  const SweepAxis r = parse_sweep_axis("alpha=0.5:1.5:0.1");
  EXPECT_EQ(r.values.size(), 11u);
  EXPECT_EQ(parse_sweep_axis("k:burden=9.8e-20").name, "k:burden");
  EXPECT_THROW(parse_sweep_axis("alpha"), std::invalid_argument);
  EXPECT_THROW(parse_sweep_axis("alpha=1:0:0.1"), std::invalid_argument);
  EXPECT_THROW(parse_sweep_axis("alpha=1,,2"), std::invalid_argument);
}

TEST(Sweep, ApplyAxis) {
  const CaseSpec base = layered_column_undrained();
  EXPECT_EQ(apply_axis_value(base, "alpha", "0.4").solver.alpha, 0.4);
  EXPECT_EQ(apply_axis_value(base, "c", "3").stabilization.c, 3.0);
  EXPECT_EQ(apply_axis_value(base, "dt", "100").time.dt0, 100.0);
  EXPECT_EQ(apply_axis_value(base, "steps", "2").time.steps, 2);
  EXPECT_EQ(apply_axis_value(base, "scheme", "monolithic").solver.scheme, Scheme::monolithic);
  const CaseSpec stab = apply_axis_value(base, "stab", "burden");
  EXPECT_EQ(stab.stabilization.scope, StabilizationSpec::Scope::named);
  EXPECT_EQ(apply_axis_value(base, "stab", "all").stabilization.scope, StabilizationSpec::Scope::all);
  const CaseSpec k = apply_axis_value(base, "k:burden", "9.8e-14");
  EXPECT_EQ(k.regions[static_cast<std::size_t>(k.region_id("burden"))].material.permeability, 9.8e-14);
  EXPECT_EQ(k.regions[static_cast<std::size_t>(k.region_id("reservoir"))].material.permeability, 9.8e-13);
  const CaseSpec kall = apply_axis_value(base, "k", "1e-15");
  for (const auto& r : kall.regions) EXPECT_EQ(r.material.permeability, 1e-15);
  EXPECT_THROW(apply_axis_value(base, "alpha", "x"), std::invalid_argument);
  EXPECT_THROW(apply_axis_value(base, "gamma", "1"), std::invalid_argument);
  EXPECT_THROW(apply_axis_value(base, "k:cap", "1"), std::invalid_argument);
}

TEST(Sweep, CrossProductOrderAndParallelism) {
  SweepSpec sw;
  sw.base = barry_mercer_drained();
  sw.base.time.steps = 2;
  sw.base.solver.scheme = Scheme::fs_iter;
  sw.axes = {parse_sweep_axis("alpha=0.6,1.0"), parse_sweep_axis("c=0,1,2")};
  sw.base.stabilization.scope = StabilizationSpec::Scope::all;
  const SweepTable one = run_sweep(sw);
  sw.workers = 4;
  const SweepTable four = run_sweep(sw);
  ASSERT_EQ(one.rows.size(), 6u);
  EXPECT_EQ(one.rows[1].values, (std::vector<std::string>{"0.6", "1"}));
  EXPECT_EQ(one.rows[3].values, (std::vector<std::string>{"1.0", "0"}));
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    EXPECT_TRUE(one.rows[i].ok);
    EXPECT_EQ(one.rows[i].values, four.rows[i].values);
    EXPECT_EQ(one.rows[i].total_iterations, four.rows[i].total_iterations);
    EXPECT_EQ(one.rows[i].final_regions[0].checkerboard_projection,
              four.rows[i].final_regions[0].checkerboard_projection);
  }
}

TEST(Sweep, SinglePointMatchesRun) {
  SweepSpec sw;
  sw.base = barry_mercer_undrained();
  sw.base.solver.scheme = Scheme::fs_iter;
  sw.base.time.steps = 2;
  sw.axes = {parse_sweep_axis("alpha=1")};
  const SweepTable t = run_sweep(sw);
  const RunReport r = run_case(sw.base);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].first_step_iterations, r.rows[0].outer_iterations);
  EXPECT_EQ(t.rows[0].total_iterations, r.rows[0].outer_iterations + r.rows[1].outer_iterations);
  EXPECT_EQ(t.rows[0].final_regions[0].checkerboard_projection,
            r.rows.back().regions[0].checkerboard_projection);
}

TEST(Sweep, FailuresRecordedInRow) {
  SweepSpec sw;
  sw.base = barry_mercer_undrained();
  sw.base.time.steps = 1;
  sw.axes = {parse_sweep_axis("k:nowhere=1,2")};
  for (const SweepRow& r : run_sweep(sw).rows) EXPECT_FALSE(r.ok);
  sw.axes = {parse_sweep_axis("scheme=monolithic,bogus")};
  const SweepTable t = run_sweep(sw);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_TRUE(t.rows[0].ok);
  EXPECT_FALSE(t.rows[1].ok);
  EXPECT_FALSE(t.rows[1].error.empty());
}

TEST(Sweep, CapEnforced) {
  SweepSpec sw;
  sw.base = barry_mercer_undrained();
  sw.axes = {parse_sweep_axis("alpha=0.5:1.5:0.1"), parse_sweep_axis("c=0:10:1")};
  sw.max_points = 100;
  EXPECT_THROW(run_sweep(sw), std::invalid_argument);
}
