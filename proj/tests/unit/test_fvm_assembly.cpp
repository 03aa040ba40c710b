#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "porosplit/cases.hpp"
#include "porosplit/fvm_assembly.hpp"

using namespace porosplit;

namespace {

MaterialRegion rock(double k, double inv_m = 0.0, double e = 1e4, double nu = 0.2) {
  MaterialRegion m;
  m.young_modulus = e;
  m.poisson_ratio = nu;
  m.permeability = k;
  m.inv_biot_modulus = inv_m;
  m.viscosity = 1.0;
  return m;
}

StructuredGrid square(int n) {
  const std::vector<int> d{n, n};
  const std::vector<double> e{1.0, 1.0};
  return StructuredGrid::build(d, e);
}

// 4x4x6 column, layers 2 and 3 are region 1.
StructuredGrid column() {
  const std::vector<int> d{4, 4, 6};
  const std::vector<double> e{1.0, 1.0, 1.5};
  return StructuredGrid::build(d, e, [](const Ijk& c) { return c[2] >= 2 && c[2] <= 3 ? 1 : 0; });
}

Eigen::MatrixXd dense(const SparseMatrix& m) { return Eigen::MatrixXd(m); }

}  // namespace

TEST(FvmAssembly, TwoCellExchange) {
  const std::vector<int> d{2, 1};
  const std::vector<double> e{0.2, 0.1};
  const auto g = StructuredGrid::build(d, e);
  const MaterialTable mats{rock(1e-12)};
  const double ups = face_transmissibility(g, g.interior_faces()[0], mats);
  const auto f = assemble_flow(g, mats, 1.0, Vector::Zero(2), Vector::Zero(2));
  const Eigen::MatrixXd t = dense(f.T);
  EXPECT_DOUBLE_EQ(t(0, 0), ups);
  EXPECT_DOUBLE_EQ(t(1, 1), ups);
  EXPECT_DOUBLE_EQ(t(0, 1), -ups);
  EXPECT_DOUBLE_EQ(t(1, 0), -ups);
}

TEST(FvmAssembly, UndrainedIncompressibleIsZero) {
  const auto g = square(4);
  const auto f = assemble_flow(g, {rock(0.0)}, 10.0, Vector::Zero(16), Vector::Random(16));
  EXPECT_EQ(f.C.nonZeros(), 0);
  EXPECT_EQ(f.Q_p.norm(), 0.0);
}

TEST(FvmAssembly, UniformPressureNoLoad) {
  const auto g = square(5);
  const auto f = assemble_flow(g, {rock(1e-3, 1e-9)}, 3.0, Vector::Zero(25), Vector::Constant(25, 4.2e5));
  EXPECT_LT(f.Q_p.cwiseAbs().maxCoeff(), 1e-9);
}

TEST(FvmAssembly, BlocksFromParts) {
  const auto g = column();
  const MaterialTable mats{rock(1e-3, 1e-9), rock(5e-2, 2e-9)};
  const double dt = 2.5;
  const Vector q = Vector::LinSpaced(g.num_cells(), -1.0, 1.0);
  const Vector p = Vector::LinSpaced(g.num_cells(), 3.0, 7.0);
  const auto f = assemble_flow(g, mats, dt, q, p);
  const Eigen::MatrixXd t = dense(f.T);
  EXPECT_LT((t - t.transpose()).norm(), 1e-15);
  EXPECT_LT((t * Eigen::VectorXd::Ones(g.num_cells())).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((dense(f.C) - dense(f.M_acc) - dt * t).norm(), 1e-14);
  for (int c = 0; c < g.num_cells(); ++c)
    EXPECT_DOUBLE_EQ(dense(f.M_acc)(c, c), g.cell_volume(c) * mats[g.cell_region(c)].inv_biot_modulus);
  EXPECT_LT((f.Q_p - (dt * q - dt * (t * p))).norm(), 1e-13);
  // Off-diagonals nonpositive, diagonally dominant.
  const Eigen::MatrixXd c = dense(f.C);
  for (int i = 0; i < c.rows(); ++i) {
    double off = 0.0;
    for (int j = 0; j < c.cols(); ++j)
      if (j != i) {
        EXPECT_LE(c(i, j), 0.0);
        off += std::abs(c(i, j));
      }
    EXPECT_GT(c(i, i), off);
  }
}

TEST(FvmAssembly, FluxAntisymmetry) {
  const auto g = column();
  const MaterialTable mats{rock(1e-3), rock(1.0)};
  const auto f = assemble_flow(g, mats, 1.0, Vector::Zero(g.num_cells()), Vector::Zero(g.num_cells()));
  std::mt19937 rng(3);
  std::normal_distribution<double> n;
  Vector p(g.num_cells());
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = n(rng);
  EXPECT_LT(std::abs((f.T * p).sum()), 1e-13);
}

// Relabelling the two cells of a face leaves its transmissibility unchanged.
TEST(FvmAssembly, TransmissibilitySwapInvariant) {
  const std::vector<int> d{2, 1};
  const std::vector<double> e{0.2, 0.1};
  const auto a = StructuredGrid::build(d, e, [](const Ijk& c) { return c[0]; });
  const auto b = StructuredGrid::build(d, e, [](const Ijk& c) { return 1 - c[0]; });
  const MaterialTable mats{rock(1e-12), rock(3e-15)};
  EXPECT_DOUBLE_EQ(face_transmissibility(a, a.interior_faces()[0], mats),
                   face_transmissibility(b, b.interior_faces()[0], mats));
}

TEST(FvmAssembly, NegativeDtRejected) {
  const auto g = square(2);
  EXPECT_THROW(assemble_flow(g, {rock(1.0)}, -1.0, Vector::Zero(4), Vector::Zero(4)),
               std::invalid_argument);
}

TEST(FvmAssembly, PressureBoundaryHalfCell) {
  const std::vector<int> d{3, 1};
  const std::vector<double> e{0.3, 0.1};
  const auto g = StructuredGrid::build(d, e);
  const MaterialTable mats{rock(2.0)};
  const auto ops = assemble_flow_operators(g, mats, {{0, 0, 5.0}});
  // k A / (mu h/2) on the left face of cell 0 only.
  const double tb = 2.0 * 0.1 / 0.05;
  EXPECT_NEAR(ops.boundary_transmissibility[0], tb, 1e-12);
  EXPECT_EQ(ops.boundary_transmissibility[1], 0.0);
  EXPECT_NEAR(ops.boundary_inflow[0], 5.0 * tb, 1e-12);
}

TEST(FvmAssembly, FixedStressDiagonal) {
  const auto g = square(10);
  const Vector r = assemble_fixed_stress_diagonal(g, {rock(0.0)}, 1.0);
  const double kdr = 1e4 / 1.8;
  for (Eigen::Index i = 0; i < r.size(); ++i) EXPECT_NEAR(r[i], 0.01 / kdr, 1e-20);
  EXPECT_NEAR(r[0], 1.8e-6, 1e-9);
  EXPECT_EQ(assemble_fixed_stress_diagonal(g, {rock(0.0)}, 0.0).norm(), 0.0);
  const Vector r2 = assemble_fixed_stress_diagonal(g, {rock(0.0)}, 2.0);
  EXPECT_LT((r2 - 2.0 * r).norm(), 1e-22);
}

TEST(FvmAssembly, FixedStressUsesRegionBiot) {
  const auto g = column();
  MaterialRegion soft = rock(0.0, 0.0, 1e4, 0.2);
  soft.biot_coefficient = 0.5;
  const MaterialTable mats{rock(0.0, 0.0, 7.5e9, 0.25), soft};
  const Vector r = assemble_fixed_stress_diagonal(g, mats, 0.7);
  for (int c = 0; c < g.num_cells(); ++c) {
    const auto& m = mats[g.cell_region(c)];
    const double kdr = m.young_modulus / (3 * (1 - 2 * m.poisson_ratio));
    const double expected = 0.7 * g.cell_volume(c) * m.biot_coefficient * m.biot_coefficient / kdr;
    EXPECT_NEAR(r[c], expected, 1e-12 * expected);
  }
}

TEST(FvmAssembly, OptimalTau) {
  const double lambda = 1e4 * 0.2 / (1.2 * 0.6);
  const double g = 1e4 / 2.4;
  EXPECT_NEAR(optimal_tau(rock(0.0)), 9.0 / (32.0 * (lambda + 4.0 * g)), 1e-20);
  EXPECT_NEAR(optimal_tau(rock(0.0)), 1.446e-5, 1e-8);
}

TEST(FvmAssembly, StabilizationZeroC) {
  const auto g = square(4);
  EXPECT_EQ(assemble_stabilization(g, {rock(0.0)}, RegionSet::everything(), 0.0).nonZeros(), 0);
}

TEST(FvmAssembly, StabilizationKernelAndSemidefinite) {
  const auto g = square(10);
  const MaterialTable mats{rock(0.0)};
  const Eigen::MatrixXd s = dense(assemble_stabilization(g, mats, RegionSet::everything(), 1.0));
  EXPECT_LT((s - s.transpose()).norm(), 1e-20);
  EXPECT_LT((s * Eigen::VectorXd::Ones(100)).cwiseAbs().maxCoeff(), 1e-18);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
  EXPECT_GT(eig.eigenvalues().minCoeff(), -1e-18);
  // Interior face weight tau* V.
  EXPECT_NEAR(s(0, 1), -optimal_tau(mats[0]) * 0.01, 1e-20);
}

TEST(FvmAssembly, StabilizationRegionRestricted) {
  const auto g = column();
  const MaterialTable mats{rock(1e-20, 0.0, 7.5e9, 0.25), rock(1e-12, 1e-10, 7.5e9, 0.25)};
  const Eigen::MatrixXd s = dense(assemble_stabilization(g, mats, RegionSet::of({0}), 1.0));
  int interface_faces = 0;
  for (const auto& f : g.interior_faces()) {
    const int rl = g.cell_region(f.left), rr = g.cell_region(f.right);
    if (rl != rr) {
      ++interface_faces;
      EXPECT_EQ(s(f.left, f.right), 0.0);
    }
    if (rl == 1 || rr == 1) {
      EXPECT_EQ(s(f.left, f.right), 0.0);
    } else {
      EXPECT_LT(s(f.left, f.right), 0.0);
    }
  }
  EXPECT_EQ(interface_faces, 2 * 16);
  for (int c = 0; c < g.num_cells(); ++c)
    if (g.cell_region(c) == 1) {
      EXPECT_EQ(s.row(c).cwiseAbs().sum(), 0.0);
    }
}

TEST(FvmAssembly, StabilizationHarmonicMeanAcrossRegions) {
  const std::vector<int> d{2, 1};
  const std::vector<double> e{2.0, 1.0};
  const auto g = StructuredGrid::build(d, e, [](const Ijk& c) { return c[0]; });
  const MaterialTable mats{rock(0.0, 0.0, 1e4, 0.2), rock(0.0, 0.0, 3e4, 0.3)};
  const auto ml = derived_moduli(mats[0]), mr = derived_moduli(mats[1]);
  const double lam = 2.0 / (1.0 / ml.lambda + 1.0 / mr.lambda);
  const double gs = 2.0 / (1.0 / ml.shear + 1.0 / mr.shear);
  const double expected = 0.5 * optimal_tau(lam, gs) * 1.0;
  EXPECT_NEAR(stabilization_weight(g, mats, g.interior_faces()[0], RegionSet::everything(), 0.5),
              expected, 1e-12 * expected);
}

TEST(FvmAssembly, StabilizationUnknownRegion) {
  const auto g = square(2);
  EXPECT_THROW(assemble_stabilization(g, {rock(0.0)}, RegionSet::of({3}), 1.0), std::invalid_argument);
}
