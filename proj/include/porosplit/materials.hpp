#pragma once

#include <vector>

namespace porosplit {

/// Poroelastic constants of one region. SI units throughout.
struct MaterialRegion {
  double young_modulus = 0.0;     // E (Pa)
  double poisson_ratio = 0.0;     // nu
  double biot_coefficient = 1.0;  // b
  double inv_biot_modulus = 0.0;  // 1/M (1/Pa)
  double permeability = 0.0;      // k (m^2), isotropic
  double viscosity = 1.0;         // mu (Pa s)
  double solid_density = 0.0;     // kg/m^3
  double fluid_density = 0.0;     // kg/m^3
  double porosity = 0.0;          // only weights the body-force density

  bool operator==(const MaterialRegion&) const = default;

  /// Homogenized density (1 - phi) rho_s + phi rho_f.
  double bulk_density() const {
    return (1.0 - porosity) * solid_density + porosity * fluid_density;
  }
};

struct ElasticModuli {
  double lambda = 0.0;  // first Lame parameter (Pa)
  double shear = 0.0;   // G (Pa)
  double bulk = 0.0;    // drained bulk modulus K_dr (Pa)

  bool operator==(const ElasticModuli&) const = default;
};

/// Throws std::invalid_argument when any invariant is violated.
void validate(const MaterialRegion& m);

/// lambda, G and K_dr from (E, nu). nu = 0.5 is rejected.
ElasticModuli derived_moduli(const MaterialRegion& m);
ElasticModuli derived_moduli(double young_modulus, double poisson_ratio);

/// E from a drained bulk modulus and Poisson ratio, E = 3 K (1 - 2 nu).
double young_from_bulk(double bulk_modulus, double poisson_ratio);

/// (E, nu) recovered from (lambda, G).
struct YoungPoisson {
  double young_modulus = 0.0;
  double poisson_ratio = 0.0;
};
YoungPoisson young_poisson_from_lame(double lambda, double shear);

/// Region id -> material. Region ids index this table directly.
using MaterialTable = std::vector<MaterialRegion>;

}  // namespace porosplit
