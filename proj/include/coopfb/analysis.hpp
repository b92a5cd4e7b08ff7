#pragma once

#include "coopfb/fbsolver.hpp"
#include "coopfb/semiwave.hpp"

#include <string>
#include <utility>
#include <vector>

namespace coopfb {

enum class VerdictKind { Spreading, Vanishing, Undecided };

std::string to_string(VerdictKind kind);

struct VerdictThresholds {
  Real l_star{};             // habitat half-length threshold from the spectral module
  Real vanish_tol{1e-4};
  Real stall_tol{1e-3};
  Real span_factor{4.0};
  Real trailing_fraction{0.2};
};

struct Verdict {
  VerdictKind kind{VerdictKind::Undecided};
  Real final_span{};
  Real final_max_density{};
  Real speed_estimate{};
  Real stall_duration{};
};

/// Deterministic dichotomy classification: Spreading when the habitat has
/// outgrown span_factor * l_star with positive trailing speed, Vanishing when
/// densities are below vanish_tol and the fronts have stalled, Undecided
/// otherwise (including runs with fewer than 10 samples).
Verdict classify(const Trajectory& traj, const VerdictThresholds& thresholds);

struct SpeedFit {
  Real s_hat{};          // mean of the two front fits
  Real s_hat_right{}, s_hat_left{};
  Real h_star_hat{}, g_star_hat{};
  Real t_lo{}, t_hi{};
  Real max_residual{};   // max |h(t) - s_hat_right t - h_star_hat| over the window
};

/// Trailing-window line fits h(t) ~ s t + h* and g(t) ~ -s t + g*.
SpeedFit fit_speed_and_drift(const Trajectory& traj, Real window_fraction);

/// Same fits over an explicit time window [t_lo, t_hi].
SpeedFit fit_speed_and_drift_window(const Trajectory& traj, Real t_lo, Real t_hi);

/// Sup distance between the PDE state and the reflected semi-wave, separately
/// over [0, h] (right) and [g, 0] (left). The wave is evaluated by monotone
/// linear interpolation, clamped to (u*, v*) beyond its truncation length.
std::pair<Real, Real> profile_error(const FrontState& state, const ModelParams& params,
                                    const SemiWaveSolution& wave, const Equilibrium& eq);

struct SpeedSeries {
  std::vector<Real> t, hprime, minus_gprime;
  Real trailing_mean_right{};
  Real trailing_mean_left{};
};

SpeedSeries front_speed_series(const Trajectory& traj, Real trailing_fraction = 0.2);

} // namespace coopfb
