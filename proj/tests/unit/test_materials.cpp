#include <gtest/gtest.h>

#include <stdexcept>

#include "porosplit/materials.hpp"

using namespace porosplit;

TEST(Materials, BarryMercerModuli) {
  const auto m = derived_moduli(1e4, 0.2);
  EXPECT_NEAR(m.shear, 1e4 / 2.4, 1e-9);
  EXPECT_NEAR(m.lambda, 2000.0 / (1.2 * 0.6), 1e-9);
  EXPECT_NEAR(m.bulk, 1e4 / 1.8, 1e-9);
  EXPECT_NEAR(m.shear, 4166.67, 0.01);
  EXPECT_NEAR(m.lambda, 2777.78, 0.01);
  EXPECT_NEAR(m.bulk, 5555.56, 0.01);
}

TEST(Materials, ZeroPoisson) {
  const auto m = derived_moduli(3.0, 0.0);
  EXPECT_DOUBLE_EQ(m.shear, 1.5);
  EXPECT_DOUBLE_EQ(m.lambda, 0.0);
  EXPECT_DOUBLE_EQ(m.bulk, 1.0);
}

TEST(Materials, FromBulk) {
  const double e = young_from_bulk(5e9, 0.25);
  EXPECT_NEAR(e, 7.5e9, 1e-3);
  const auto m = derived_moduli(e, 0.25);
  EXPECT_NEAR(m.shear, 3e9, 1e-3);
  EXPECT_NEAR(m.lambda, 3e9, 1e-3);
  EXPECT_NEAR(m.bulk, 5e9, 1e-3);
}

TEST(Materials, IncompressibleRejected) {
  EXPECT_THROW(derived_moduli(1.0, 0.5), std::invalid_argument);
}

TEST(Materials, RoundTrip) {
  for (double e : {1.0, 1e4, 7.5e9})
    for (double nu : {0.0, 0.2, 0.3, 0.49}) {
      const auto m = derived_moduli(e, nu);
      const auto back = young_poisson_from_lame(m.lambda, m.shear);
      EXPECT_NEAR(back.young_modulus, e, 1e-12 * e);
      EXPECT_NEAR(back.poisson_ratio, nu, 1e-12);
    }
}

TEST(Materials, Validate) {
  MaterialRegion m;
  m.young_modulus = 1.0;
  m.poisson_ratio = 0.2;
  EXPECT_NO_THROW(validate(m));
  auto bad = m;
  bad.young_modulus = 0.0;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = m;
  bad.biot_coefficient = 1.5;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = m;
  bad.permeability = -1.0;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = m;
  bad.viscosity = 0.0;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = m;
  bad.inv_biot_modulus = -1e-9;
  EXPECT_THROW(validate(bad), std::invalid_argument);
}

TEST(Materials, BulkDensity) {
  MaterialRegion m;
  m.solid_density = 2600.0;
  m.fluid_density = 1000.0;
  m.porosity = 0.25;
  EXPECT_DOUBLE_EQ(m.bulk_density(), 0.75 * 2600.0 + 0.25 * 1000.0);
}
