#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "porosplit/cases.hpp"

namespace porosplit {

/// A malformed case file. `key` is the dotted path of the offending entry
/// (e.g. "time.dt0", "regions[1].material.k"), empty for syntax errors.
class CaseFileError : public std::invalid_argument {
 public:
  CaseFileError(std::string key, const std::string& message);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// JSON case description, SI units throughout:
///
///   name           string
///   grid           {dims: [nx, ny(, nz)], extent: [Lx, Ly(, Lz)]}          m
///   regions        [{name, box: {lo, hi} | layers: {axis, first, last},
///                    material: {E | K, nu, b, invM, k, mu, rho_s, rho_f, phi}}]
///                  Pa, -, -, 1/Pa, m^2, Pa s, kg/m^3, kg/m^3, -.
///                  A region without box/layers covers every cell; later
///                  regions override earlier ones.
///   bc.mech        [{side: "x-"|"x+"|..., type: roller|fixed|traction, value}]
///   bc.flow        [{side, pressure}]                                       Pa
///   sources        [{at: [x, y(, z)], rate: number | "sin(pi*t/100)" |
///                    {scale, omega, phase}}]                                m^3/s
///   gravity        [gx, gy, gz]                                             m/s^2
///   time           {dt0, growth, dtmax, steps | end}                        s
///   solver         {scheme, alpha, rel_tol, max_outer, fixed_iters, linear_tol}
///   stabilization  {c, regions: "all" | "none" | [names]}
///
/// Unknown keys are rejected.
CaseSpec parse_case_text(std::string_view text);
CaseSpec parse_case(const std::filesystem::path& path);

/// Serializes a case so that parse_case_text(write_case(c)) == c.
std::string write_case(const CaseSpec& spec);

}  // namespace porosplit
