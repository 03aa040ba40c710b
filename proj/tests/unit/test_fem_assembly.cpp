#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "porosplit/cases.hpp"
#include "porosplit/fem_assembly.hpp"

using namespace porosplit;

namespace {

StructuredGrid unit_square(int n, double l = 1.0) {
  const std::vector<int> d{n, n};
  const std::vector<double> e{l, l};
  return StructuredGrid::build(d, e);
}

MaterialRegion elastic(double e, double nu, double b = 1.0) {
  MaterialRegion m;
  m.young_modulus = e;
  m.poisson_ratio = nu;
  m.biot_coefficient = b;
  return m;
}

// Q1 plane-strain stiffness of [0,h]^2 by a 3-point Gauss rule.
Eigen::MatrixXd oracle_quad_stiffness(double h, double e, double nu) {
  const double lam = e * nu / ((1 + nu) * (1 - 2 * nu));
  const double g = e / (2 * (1 + nu));
  Eigen::Matrix3d d;
  d << lam + 2 * g, lam, 0, lam, lam + 2 * g, 0, 0, 0, g;
  const std::array<double, 3> xi{-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  const std::array<double, 3> w{5.0 / 9, 8.0 / 9, 5.0 / 9};
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(8, 8);
  for (int qi = 0; qi < 3; ++qi)
    for (int qj = 0; qj < 3; ++qj) {
      const double x = 0.5 * (1 + xi[qi]), y = 0.5 * (1 + xi[qj]);
      Eigen::Matrix<double, 3, 8> bm = Eigen::Matrix<double, 3, 8>::Zero();
      for (int a = 0; a < 4; ++a) {
        const int ax = a & 1, ay = a >> 1;
        const double fx = ax ? x : 1 - x, fy = ay ? y : 1 - y;
        const double dx = (ax ? 1.0 : -1.0) * fy / h;
        const double dy = (ay ? 1.0 : -1.0) * fx / h;
        bm(0, 2 * a) = dx;
        bm(1, 2 * a + 1) = dy;
        bm(2, 2 * a) = dy;
        bm(2, 2 * a + 1) = dx;
      }
      k += w[qi] * w[qj] * 0.25 * h * h * bm.transpose() * d * bm;
    }
  return k;
}

}  // namespace

TEST(FemAssembly, UnitQuadMatchesOracle) {
  const auto g = unit_square(1);
  const Eigen::MatrixXd ke = element_stiffness(g, elastic(1.0, 0.0));
  const Eigen::MatrixXd ref = oracle_quad_stiffness(1.0, 1.0, 0.0);
  EXPECT_LT((ke - ref).norm(), 1e-14);
  EXPECT_NEAR(ke(0, 0), 0.5, 1e-14);
  Eigen::VectorXd tx = Eigen::VectorXd::Zero(8), ty = Eigen::VectorXd::Zero(8);
  for (int a = 0; a < 4; ++a) {
    tx[2 * a] = 1.0;
    ty[2 * a + 1] = 1.0;
  }
  EXPECT_LT((ke * tx).norm(), 1e-14);
  EXPECT_LT((ke * ty).norm(), 1e-14);
}

TEST(FemAssembly, QuadMatchesOracleWithPoisson) {
  const auto g = unit_square(4, 0.4);
  const Eigen::MatrixXd ke = element_stiffness(g, elastic(1e4, 0.2));
  EXPECT_LT((ke - oracle_quad_stiffness(0.1, 1e4, 0.2)).norm(), 1e-10 * ke.norm());
}

TEST(FemAssembly, HexAnnihilatesTranslations) {
  const std::vector<int> d{1, 1, 1};
  const std::vector<double> e{1.0, 2.0, 0.5};
  const auto g = StructuredGrid::build(d, e);
  const Eigen::MatrixXd ke = element_stiffness(g, elastic(7.5e9, 0.25));
  EXPECT_LT((ke - ke.transpose()).norm(), 1e-12 * ke.norm());
  for (int comp = 0; comp < 3; ++comp) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(24);
    for (int a = 0; a < 8; ++a) t[3 * a + comp] = 1.0;
    EXPECT_LT((ke * t).norm(), 1e-12 * ke.norm());
  }
}

TEST(FemAssembly, BarryMercerStiffnessSymmetric) {
  const Model m = build_model(barry_mercer_undrained());
  const SparseMatrix a = assemble_stiffness(m.grid, m.materials, m.dirichlet);
  const Eigen::MatrixXd dense(a);
  EXPECT_LE((dense - dense.transpose()).norm(), 1e-12 * dense.norm());
}

TEST(FemAssembly, BarryMercerStiffnessPositiveDefinite) {
  const Model m = build_model(barry_mercer_undrained());
  const SparseMatrix a = assemble_stiffness(m.grid, m.materials, m.dirichlet);
  const Eigen::MatrixXd dense(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense, Eigen::EigenvaluesOnly);
  ASSERT_EQ(eig.info(), Eigen::Success);
  EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
}

TEST(FemAssembly, EmptyConstraintsWarn) {
  const auto g = unit_square(2);
  std::vector<std::string> warnings;
  const SparseMatrix a = assemble_stiffness(g, {elastic(1.0, 0.2)}, DirichletSet{}, &warnings);
  EXPECT_EQ(warnings.size(), 1u);
  EXPECT_EQ(a.rows(), 18);
}

TEST(FemAssembly, DuplicateConstraintRejected) {
  DirichletSet d;
  d.add(0, 0);
  EXPECT_THROW(d.add(0, 0, 1.0), std::invalid_argument);
}

TEST(FemAssembly, ConstrainedRowsAreIdentity) {
  const auto g = unit_square(2);
  DirichletSet d;
  d.add(0, 0);
  d.add(0, 1);
  d.add(2, 1);
  const Eigen::MatrixXd a(assemble_stiffness(g, {elastic(1.0, 0.2)}, d));
  for (int dof : {0, 1, 5}) {
    EXPECT_EQ(a(dof, dof), 1.0);
    EXPECT_EQ(a.row(dof).cwiseAbs().sum(), 1.0);
    EXPECT_EQ(a.col(dof).cwiseAbs().sum(), 1.0);
  }
}

TEST(FemAssembly, CouplingTranslationKernel) {
  const auto g = unit_square(4);
  const SparseMatrix b = assemble_coupling(g, {elastic(1.0, 0.2)});
  Vector u(num_displacement_dofs(g));
  for (int n = 0; n < g.num_nodes(); ++n) {
    u[displacement_dof(g, n, 0)] = 0.3;
    u[displacement_dof(g, n, 1)] = -1.7;
  }
  EXPECT_LT((b * u).norm(), 1e-14);
}

TEST(FemAssembly, CouplingDilation) {
  const auto g = unit_square(1);
  const SparseMatrix b = assemble_coupling(g, {elastic(1.0, 0.2)});
  Vector u(num_displacement_dofs(g));
  for (int n = 0; n < g.num_nodes(); ++n) {
    const Vec3 x = g.node_coord(n);
    u[displacement_dof(g, n, 0)] = x[0];
    u[displacement_dof(g, n, 1)] = x[1];
  }
  const Vector bu = b * u;
  ASSERT_EQ(bu.size(), 1);
  EXPECT_NEAR(bu[0], 2.0 * g.cell_volume(0), 1e-14);
}

TEST(FemAssembly, CouplingDivergenceTheorem) {
  const auto g = unit_square(4);
  const double biot = 0.8;
  const SparseMatrix b = assemble_coupling(g, {elastic(1.0, 0.2, biot)});
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector u(num_displacement_dofs(g));
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = dist(rng);

  // Boundary flux by the trapezoid rule, exact for u linear along each edge.
  const auto& nd = g.node_dims();
  double flux = 0.0;
  const double h = g.spacing()[0];
  for (int i = 0; i + 1 < nd[0]; ++i) {
    const int top = nd[1] - 1;
    flux -= 0.5 * h * (u[displacement_dof(g, g.node_index(i, 0), 1)] +
                       u[displacement_dof(g, g.node_index(i + 1, 0), 1)]);
    flux += 0.5 * h * (u[displacement_dof(g, g.node_index(i, top), 1)] +
                       u[displacement_dof(g, g.node_index(i + 1, top), 1)]);
  }
  for (int j = 0; j + 1 < nd[1]; ++j) {
    const int right = nd[0] - 1;
    flux -= 0.5 * h * (u[displacement_dof(g, g.node_index(0, j), 0)] +
                       u[displacement_dof(g, g.node_index(0, j + 1), 0)]);
    flux += 0.5 * h * (u[displacement_dof(g, g.node_index(right, j), 0)] +
                       u[displacement_dof(g, g.node_index(right, j + 1), 0)]);
  }
  EXPECT_NEAR((b * u).sum(), biot * flux, 1e-13);
}

TEST(FemAssembly, CouplingDropsConstrainedColumns) {
  const auto g = unit_square(2);
  DirichletSet d;
  d.add(4, 0);
  const SparseMatrix b = assemble_coupling(g, {elastic(1.0, 0.2)}, d);
  const Eigen::MatrixXd dense(b);
  EXPECT_EQ(dense.col(displacement_dof(g, 4, 0)).cwiseAbs().sum(), 0.0);
  EXPECT_GT(dense.col(displacement_dof(g, 4, 1)).cwiseAbs().sum(), 0.0);
}

TEST(FemAssembly, ZeroLoad) {
  const auto g = unit_square(3);
  const Vector q = assemble_mech_load(g, {elastic(1.0, 0.2)}, {}, {0.0, 0.0, 0.0});
  EXPECT_EQ(q.size(), num_displacement_dofs(g));
  EXPECT_EQ(q.norm(), 0.0);
}

TEST(FemAssembly, EdgeTractionSplitsHalfHalf) {
  const std::vector<int> d{1, 1};
  const std::vector<double> e{2.0, 1.0};
  const auto g = StructuredGrid::build(d, e);
  const auto tr = side_traction(g, 1, 1, {0.0, -5.0, 0.0});
  ASSERT_EQ(tr.size(), 1u);
  const Vector q = assemble_mech_load(g, {elastic(1.0, 0.2)}, tr, {0.0, 0.0, 0.0});
  EXPECT_NEAR(q.sum(), -5.0 * 2.0, 1e-14);
  EXPECT_NEAR(q[displacement_dof(g, g.node_index(0, 1), 1)], -5.0, 1e-14);
  EXPECT_NEAR(q[displacement_dof(g, g.node_index(1, 1), 1)], -5.0, 1e-14);
  EXPECT_EQ(q[displacement_dof(g, g.node_index(0, 0), 1)], 0.0);
}

TEST(FemAssembly, InteriorTractionRejected) {
  const auto g = unit_square(2);
  Traction t;
  t.cell = 0;
  t.axis = 0;
  t.side = 1;  // shared with cell 1
  t.value = {1.0, 0.0, 0.0};
  EXPECT_THROW(assemble_mech_load(g, {elastic(1.0, 0.2)}, {t}, {0.0, 0.0, 0.0}),
               std::invalid_argument);
}

TEST(FemAssembly, BodyForceQuarterAndEighth) {
  MaterialRegion m = elastic(1.0, 0.2);
  m.solid_density = 2000.0;
  const auto g = unit_square(1, 0.5);
  const Vector q = assemble_mech_load(g, {m}, {}, {0.0, -9.81, 0.0});
  for (int n = 0; n < 4; ++n)
    EXPECT_NEAR(q[displacement_dof(g, n, 1)], -2000.0 * 9.81 * 0.25 / 4, 1e-10);

  const std::vector<int> d{1, 1, 1};
  const std::vector<double> e{1.0, 1.0, 2.0};
  const auto h = StructuredGrid::build(d, e);
  const Vector q3 = assemble_mech_load(h, {m}, {}, {0.0, 0.0, -9.81});
  for (int n = 0; n < 8; ++n)
    EXPECT_NEAR(q3[displacement_dof(h, n, 2)], -2000.0 * 9.81 * 2.0 / 8, 1e-10);
}
