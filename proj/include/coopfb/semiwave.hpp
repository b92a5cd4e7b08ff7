#pragma once

#include "coopfb/equilibrium.hpp"
#include "coopfb/model.hpp"

#include <utility>
#include <vector>

namespace coopfb {

/// Sampled monotone wave pair (phi, psi) on [0, L] at speed s, zero at the
/// front and clamped to (u*, v*) at the far end.
struct SemiWaveSolution {
  Real s{};
  Real L{};
  Vector xi;
  Vector phi, psi;
  Real dphi0{}, dpsi0{};   // one-sided front derivatives at xi = 0
  Real fitted_tail{};      // empirical exponential approach rate to (u*, v*)
  Real residual_max{};     // max stationary residual over interior nodes
};

struct SemiWaveSettings {
  Real L{0.0};        // 0 -> choose 12 / tail_rate(s), at least 15
  int N{0};           // 0 -> choose so the grid spacing is near dxi_target
  Real dxi_target{0.015};
  Real t_relax{600.0};
  Real dt{0.05};
  Real relax_tol{1e-10};
};

/// Parabolic relaxation of the wave system: implicit linear transport,
/// explicit reaction, marched from a linear ramp until successive iterates
/// differ by at most relax_tol in sup norm.
SemiWaveSolution solve_semiwave_relax(const ModelParams& params, Real s, Real L, int N,
                                      Real t_relax = 600.0, Real dt = 0.05,
                                      Real relax_tol = 1e-10);

/// Independent route: finite-difference collocation of the stationary system
/// plus damped Newton. init (optional) seeds the iteration; otherwise a
/// linear ramp is used. Interior residual at convergence is below 1e-11.
SemiWaveSolution solve_semiwave_newton(const ModelParams& params, Real s, Real L, int N,
                                       const SemiWaveSolution* init = nullptr);

/// Relaxation to moderate tolerance followed by a Newton polish; grid chosen
/// from settings. The workhorse behind speed_residual.
SemiWaveSolution solve_semiwave(const ModelParams& params, Real s,
                                const SemiWaveSettings& settings = {});

/// Second-order one-sided estimates (-3 w0 + 4 w1 - w2) / (2 dxi) at xi = 0.
std::pair<Real, Real> front_derivatives(const SemiWaveSolution& sol);

/// f(s) = mu (psi'(0) + rho phi'(0)) - s from a converged solve.
Real speed_residual(const ModelParams& params, Real s,
                    const SemiWaveSettings& settings = {});

struct SpeedResult {
  Real s_mu_rho{};
  std::vector<std::pair<Real, Real>> f_values;  // (s, f(s)) along the bisection
  Real bracket_width{};
};

/// Bisection for the front-consistent speed: the unique zero of f on
/// (0, s*).
SpeedResult solve_speed(const ModelParams& params, Real speed_tol,
                        const SemiWaveSettings& settings = {});

/// Least-squares exponential rate of u* - phi over the window
/// xi in [0.4 L, 0.7 L].
Real fit_tail(const SemiWaveSolution& sol, const Equilibrium& eq);

} // namespace coopfb
