#pragma once

#include "coopfb/model.hpp"

#include <vector>

namespace coopfb {

/// Positive equilibrium of the homogeneous kinetics; both residuals are
/// below 1e-12 in absolute value.
struct Equilibrium {
  Real u_star{};
  Real v_star{};
};

struct OdeTrajectory {
  std::vector<Real> times;
  std::vector<Real> U, V;
};

/// Damped Newton on the 2x2 kinetic system, with a long-time integration
/// fallback when Newton stalls. Requires b*c - a*d > 0.
Equilibrium solve_equilibrium(const ModelParams& params);

/// Classical fixed-step RK4 for the homogeneous kinetics. Throws
/// NumericalFailure when any sample exceeds 1e6 (divergence).
OdeTrajectory integrate_homogeneous(const ModelParams& params, Real U0, Real V0,
                                    Real t_end, Real dt);

} // namespace coopfb
