#include "coopfb/equilibrium.hpp"

#include <cmath>
#include <sstream>

namespace coopfb {

namespace {

Eigen::Vector2d kinetics(const ModelParams& p, const Eigen::Vector2d& w) {
  return {reaction_u(p, w[0], w[1]), reaction_v(p, w[0], w[1])};
}

Eigen::Matrix2d kinetics_jacobian(const ModelParams& p, const Eigen::Vector2d& w) {
  Eigen::Matrix2d J;
  J(0, 0) = -p.a - eval_loss(p.F_spec, w[0]).second;
  J(0, 1) = p.b;
  J(1, 0) = p.c;
  J(1, 1) = -p.d - eval_loss(p.G_spec, w[1]).second;
  return J;
}

// Damped Newton from a given start; returns true when the residual drops
// below tol.
bool newton(const ModelParams& p, Eigen::Vector2d& w, Real tol, int max_iter) {
  Real res = kinetics(p, w).lpNorm<Eigen::Infinity>();
  for (int it = 0; it < max_iter; ++it) {
    if (res <= tol) return true;
    const Eigen::Vector2d f = kinetics(p, w);
    const Eigen::Matrix2d J = kinetics_jacobian(p, w);
    const Eigen::Vector2d delta = J.fullPivLu().solve(-f);
    Real alpha = 1.0;
    bool accepted = false;
    while (alpha > 1e-8) {
      Eigen::Vector2d trial = w + alpha * delta;
      if (trial[0] > 0.0 && trial[1] > 0.0) {
        const Real trial_res = kinetics(p, trial).lpNorm<Eigen::Infinity>();
        if (trial_res < res) {
          w = trial;
          res = trial_res;
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) return res <= tol;
  }
  return res <= tol;
}

} // namespace

Equilibrium solve_equilibrium(const ModelParams& params) {
  const Real tol = 1e-13;
  // Heuristic scale from the power-law balance of the coupled system.
  const Real scale =
      std::pow(params.b * params.c / (params.a * params.d),
               1.0 / (std::min(params.F_spec.p, params.G_spec.p) - 1.0));
  Eigen::Vector2d w(scale, scale);
  if (!newton(params, w, tol, 100)) {
    // Fall back to long-time integration toward the attractor, then polish.
    OdeTrajectory traj = integrate_homogeneous(params, scale, scale, 500.0, 1e-2);
    w << traj.U.back(), traj.V.back();
    if (!newton(params, w, tol, 100)) {
      std::ostringstream msg;
      msg << "solve_equilibrium: Newton stalled at (" << w[0] << ", " << w[1]
          << ") residual " << kinetics(params, w).lpNorm<Eigen::Infinity>();
      throw NumericalFailure(msg.str());
    }
  }
  return {w[0], w[1]};
}

OdeTrajectory integrate_homogeneous(const ModelParams& params, Real U0, Real V0,
                                    Real t_end, Real dt) {
  if (!(U0 > 0.0) || !(V0 > 0.0)) {
    throw std::domain_error("integrate_homogeneous: initial values must be positive");
  }
  if (!(t_end > 0.0) || !(dt > 0.0)) {
    throw std::domain_error("integrate_homogeneous: t_end and dt must be positive");
  }
  OdeTrajectory traj;
  Eigen::Vector2d w(U0, V0);
  Real t = 0.0;
  traj.times.push_back(t);
  traj.U.push_back(w[0]);
  traj.V.push_back(w[1]);
  while (t < t_end - 1e-14 * t_end) {
    const Real h = std::min(dt, t_end - t);
    const Eigen::Vector2d k1 = kinetics(params, w);
    const Eigen::Vector2d k2 = kinetics(params, w + 0.5 * h * k1);
    const Eigen::Vector2d k3 = kinetics(params, w + 0.5 * h * k2);
    const Eigen::Vector2d k4 = kinetics(params, w + h * k3);
    w += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
    if (w.cwiseAbs().maxCoeff() > 1e6) {
      throw NumericalFailure("integrate_homogeneous: trajectory exceeded 1e6 (divergence)");
    }
    traj.times.push_back(t);
    traj.U.push_back(w[0]);
    traj.V.push_back(w[1]);
  }
  return traj;
}

} // namespace coopfb
