#pragma once

#include "wallforge/kernels.hpp"
#include "wallforge/potential.hpp"

namespace wallforge::detail {

inline kernels::ForceCoeffs force_coeffs(const PotentialSpec& spec) {
  const PolyCoeffs& c = spec.coeffs();
  return {c.degree, c.alpha, c.c1, c.c2, c.mu, c.beta};
}

}  // namespace wallforge::detail
