#include "coopfb/fbsolver.hpp"

#include "coopfb/analysis.hpp"
#include "coopfb/semiwave.hpp"
#include "detail/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace coopfb {

namespace {

Real interp_uniform(const Vector& values, Real left, Real right, Real x) {
  const Eigen::Index n = values.size();
  if (x <= left) return values[0];
  if (x >= right) return values[n - 1];
  const Real pos = (x - left) / (right - left) * static_cast<Real>(n - 1);
  const Eigen::Index i = std::min<Eigen::Index>(static_cast<Eigen::Index>(pos), n - 2);
  const Real w = pos - static_cast<Real>(i);
  return (1.0 - w) * values[i] + w * values[i + 1];
}

} // namespace

FrontState init_state(const ModelParams& params, const InitialData& initial, int M) {
  if (M < 100) throw std::domain_error("init_state: M must be at least 100");
  FrontState state;
  state.t = 0.0;
  state.g = -initial.h0;
  state.h = initial.h0;
  state.xi = Vector::LinSpaced(M + 1, -1.0, 1.0);
  state.U.resize(M + 1);
  state.V.resize(M + 1);
  for (int j = 0; j <= M; ++j) {
    const Real x = state.xi[j] * initial.h0;
    state.U[j] = interp_uniform(initial.u0, -initial.h0, initial.h0, x);
    state.V[j] = interp_uniform(initial.v0, -initial.h0, initial.h0, x);
  }
  state.U[0] = state.U[M] = 0.0;
  state.V[0] = state.V[M] = 0.0;

  Real sup = std::max(initial.u0.maxCoeff(), initial.v0.maxCoeff());
  try {
    const Equilibrium eq = solve_equilibrium(params);
    sup = std::max({sup, eq.u_star, eq.v_star});
  } catch (const NumericalFailure&) {
    // No positive equilibrium reachable; bound from the initial data alone.
  }
  state.c_bound = sup * 1.05;
  return state;
}

std::pair<Real, Real> stefan_speeds(const FrontState& state, const ModelParams& params) {
  const Eigen::Index M = state.U.size() - 1;
  const Real max_density = std::max(state.U.maxCoeff(), state.V.maxCoeff());
  if (max_density < 1e-14) return {0.0, 0.0};  // stalled habitat, no noise-driven motion

  const Real dxi = 2.0 / static_cast<Real>(M);
  const Real chain = 2.0 / (state.h - state.g);
  const auto right_grad = [&](const Vector& w) {
    return chain * (3.0 * w[M] - 4.0 * w[M - 1] + w[M - 2]) / (2.0 * dxi);
  };
  const auto left_grad = [&](const Vector& w) {
    return chain * (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * dxi);
  };
  const Real hp = -params.mu * (right_grad(state.V) + params.rho * right_grad(state.U));
  const Real gp = -params.mu * (left_grad(state.V) + params.rho * left_grad(state.U));
  if (hp < -1e-12 || gp > 1e-12) {
    std::ostringstream msg;
    msg << "stefan_speeds: sign violation (h' = " << hp << ", g' = " << gp
        << "), state corrupted";
    throw NumericalFailure(msg.str());
  }
  return {gp, hp};
}

Real max_stable_dt(const FrontState& state, const ModelParams& params) {
  const Eigen::Index M = state.U.size() - 1;
  const Real dxi = 2.0 / static_cast<Real>(M);
  const auto [gp, hp] = stefan_speeds(state, params);
  const Real span = state.h - state.g;
  const Real adv_max = (std::abs(gp + hp) + std::abs(hp - gp)) / span;

  Real dt = std::numeric_limits<Real>::infinity();
  if (adv_max > 0.0) dt = std::min(dt, 0.4 * dxi / adv_max);
  const Real lip = std::max(
      params.a + eval_loss(params.F_spec, state.c_bound).second + params.b,
      params.d + eval_loss(params.G_spec, state.c_bound).second + params.c);
  dt = std::min(dt, 0.4 / lip);
  const Real front_speed = std::max(std::abs(gp), std::abs(hp));
  if (front_speed > 0.0) dt = std::min(dt, 0.05 * span / front_speed);
  return dt;
}

FrontState step(const FrontState& state, const ModelParams& params, Real dt) {
  const Eigen::Index M = state.U.size() - 1;
  const Real dxi = 2.0 / static_cast<Real>(M);
  const auto [gp, hp] = stefan_speeds(state, params);

  FrontState next = state;
  next.t = state.t + dt;
  next.g = state.g + dt * gp;
  next.h = state.h + dt * hp;
  if (!(next.h > next.g)) {
    throw NumericalFailure("step: fronts crossed");
  }

  // Coefficients frozen at the pre-step geometry.
  const Real span = state.h - state.g;
  const Real diff_u = params.d1 * 4.0 / (span * span);
  const Real diff_v = params.d2 * 4.0 / (span * span);

  // Explicit mesh advection (centered) and reaction.
  Vector eu(M + 1), ev(M + 1);
  eu[0] = ev[0] = eu[M] = ev[M] = 0.0;
  for (Eigen::Index j = 1; j < M; ++j) {
    const Real adv = ((gp + hp) + state.xi[j] * (hp - gp)) / span;
    const Real u_xi = (state.U[j + 1] - state.U[j - 1]) / (2.0 * dxi);
    const Real v_xi = (state.V[j + 1] - state.V[j - 1]) / (2.0 * dxi);
    eu[j] = state.U[j] + dt * (adv * u_xi + reaction_u(params, state.U[j], state.V[j]));
    ev[j] = state.V[j] + dt * (adv * v_xi + reaction_v(params, state.U[j], state.V[j]));
  }

  // Implicit diffusion, zero Dirichlet at both ends.
  const Eigen::Index n = M - 1;
  const Real ru = dt * diff_u / (dxi * dxi);
  const Real rv = dt * diff_v / (dxi * dxi);
  Vector lo(n), di(n), up(n), rhs(n), scratch(n);
  lo.setConstant(-ru);
  up.setConstant(-ru);
  di.setConstant(1.0 + 2.0 * ru);
  for (Eigen::Index j = 0; j < n; ++j) rhs[j] = eu[j + 1];
  detail::solve_tridiag(lo, di, up, rhs, scratch);
  for (Eigen::Index j = 0; j < n; ++j) next.U[j + 1] = rhs[j];
  lo.setConstant(-rv);
  up.setConstant(-rv);
  di.setConstant(1.0 + 2.0 * rv);
  for (Eigen::Index j = 0; j < n; ++j) rhs[j] = ev[j + 1];
  detail::solve_tridiag(lo, di, up, rhs, scratch);
  for (Eigen::Index j = 0; j < n; ++j) next.V[j + 1] = rhs[j];

  if (next.U.maxCoeff() > next.c_bound || next.V.maxCoeff() > next.c_bound) {
    std::ostringstream msg;
    msg << "step: density exceeded a-priori bound " << next.c_bound << " at t = " << next.t;
    throw NumericalFailure(msg.str());
  }
  return next;
}

Trajectory run(const ModelParams& params, const InitialData& initial, int M,
               const RunOptions& options) {
  Trajectory traj;
  traj.params = params;
  traj.M = M;
  traj.dt = options.dt;
  traj.t_end = options.t_end;
  traj.sample_every = options.sample_every;

  Equilibrium eq{};
  bool have_eq = false;
  if (options.reference != nullptr) {
    eq = solve_equilibrium(params);
    have_eq = true;
  }

  FrontState state = init_state(params, initial, M);

  const auto record = [&](const FrontState& st) {
    const auto [gp, hp] = stefan_speeds(st, params);
    TrajectorySample sample;
    sample.t = st.t;
    sample.g = st.g;
    sample.h = st.h;
    sample.gprime = gp;
    sample.hprime = hp;
    sample.max_u = st.U.maxCoeff();
    sample.max_v = st.V.maxCoeff();
    if (options.reference != nullptr && have_eq) {
      const auto errs = profile_error(st, params, *options.reference, eq);
      sample.profile_err_right = errs.first;
      sample.profile_err_left = errs.second;
    } else {
      sample.profile_err_right = std::numeric_limits<Real>::quiet_NaN();
      sample.profile_err_left = std::numeric_limits<Real>::quiet_NaN();
    }
    traj.samples.push_back(sample);
    if (options.observer) options.observer(st);
  };

  record(state);
  Real next_sample = options.sample_every;
  try {
    while (state.t < options.t_end - 1e-12) {
      Real dt = std::min(options.dt, max_stable_dt(state, params));
      const Real target = std::min(next_sample, options.t_end);
      dt = std::min(dt, target - state.t);
      state = step(state, params, dt);
      if (state.t >= target - 1e-12) {
        record(state);
        if (target >= options.t_end - 1e-12) break;
        next_sample += options.sample_every;
      }
    }
  } catch (const NumericalFailure& failure) {
    traj.error = failure.what();
  }
  return traj;
}

} // namespace coopfb
