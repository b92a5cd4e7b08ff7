#pragma once

#include "coopfb/equilibrium.hpp"
#include "coopfb/model.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace coopfb {

struct SemiWaveSolution;

/// PDE state on the fixed reference interval. The moving habitat (g, h) maps
/// to xi in [-1, 1] through x = (h + g)/2 + xi (h - g)/2; U, V hold the node
/// values of u, v in the transformed frame, zero at both ends.
struct FrontState {
  Real t{};
  Real g{}, h{};
  Vector xi;   // M+1 uniform nodes on [-1, 1]
  Vector U, V;
  Real c_bound{};  // a-priori sup bound with 5% slack
};

struct TrajectorySample {
  Real t{}, g{}, h{};
  Real gprime{}, hprime{};
  Real max_u{}, max_v{};
  Real profile_err_left{}, profile_err_right{};  // NaN without a reference wave
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  ModelParams params;
  int M{};
  Real dt{}, t_end{}, sample_every{};
  std::string error;  // nonempty when the run stopped early; samples are partial
};

FrontState init_state(const ModelParams& params, const InitialData& initial, int M);

/// Front velocities from the transformed one-sided gradients:
///   h' = -mu (v_x(h) + rho u_x(h)),  g' = -mu (v_x(g) + rho u_x(g)).
/// Speeds are zeroed when both densities fall below 1e-14.
std::pair<Real, Real> stefan_speeds(const FrontState& state, const ModelParams& params);

/// Largest stable step: 0.4 times the advection CFL bound, further clamped
/// by the explicit reaction scale and the relative front displacement.
Real max_stable_dt(const FrontState& state, const ModelParams& params);

/// One step: explicit front advance with frozen (g', h'), then explicit
/// centered mesh advection and reaction, then implicit diffusion with zero
/// Dirichlet ends.
FrontState step(const FrontState& state, const ModelParams& params, Real dt);

struct RunOptions {
  Real dt{1e-3};
  Real t_end{10.0};
  Real sample_every{0.5};
  const SemiWaveSolution* reference = nullptr;  // fills profile_err columns
  std::function<void(const FrontState&)> observer;  // called at sample times
};

Trajectory run(const ModelParams& params, const InitialData& initial, int M,
               const RunOptions& options);

} // namespace coopfb
