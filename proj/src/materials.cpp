#include "porosplit/materials.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace porosplit {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("material: ") + what);
}

}  // namespace

void validate(const MaterialRegion& m) {
  require(std::isfinite(m.young_modulus) && m.young_modulus > 0.0, "E must be > 0");
  require(m.poisson_ratio >= 0.0 && m.poisson_ratio < 0.5, "nu must lie in [0, 0.5)");
  require(m.biot_coefficient >= 0.0 && m.biot_coefficient <= 1.0, "b must lie in [0, 1]");
  require(m.inv_biot_modulus >= 0.0, "1/M must be >= 0");
  require(m.permeability >= 0.0, "k must be >= 0");
  require(m.viscosity > 0.0, "mu must be > 0");
  require(m.porosity >= 0.0 && m.porosity <= 1.0, "porosity must lie in [0, 1]");
}

ElasticModuli derived_moduli(double young_modulus, double poisson_ratio) {
  if (poisson_ratio == 0.5) {
    throw std::invalid_argument("material: nu = 0.5 makes lambda and K_dr singular");
  }
  if (!(young_modulus > 0.0) || poisson_ratio < 0.0 || poisson_ratio > 0.5) {
    throw std::invalid_argument("material: need E > 0 and 0 <= nu < 0.5");
  }
  const double e = young_modulus;
  const double nu = poisson_ratio;
  ElasticModuli out;
  out.shear = e / (2.0 * (1.0 + nu));
  out.lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  out.bulk = e / (3.0 * (1.0 - 2.0 * nu));
  return out;
}

ElasticModuli derived_moduli(const MaterialRegion& m) {
  return derived_moduli(m.young_modulus, m.poisson_ratio);
}

double young_from_bulk(double bulk_modulus, double poisson_ratio) {
  if (!(bulk_modulus > 0.0) || poisson_ratio < 0.0 || poisson_ratio >= 0.5) {
    throw std::invalid_argument("material: need K > 0 and 0 <= nu < 0.5");
  }
  return 3.0 * bulk_modulus * (1.0 - 2.0 * poisson_ratio);
}

YoungPoisson young_poisson_from_lame(double lambda, double shear) {
  if (!(shear > 0.0) || lambda < 0.0) {
    throw std::invalid_argument("material: need G > 0 and lambda >= 0");
  }
  YoungPoisson out;
  out.young_modulus = shear * (3.0 * lambda + 2.0 * shear) / (lambda + shear);
  out.poisson_ratio = lambda / (2.0 * (lambda + shear));
  return out;
}

}  // namespace porosplit
