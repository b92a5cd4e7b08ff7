#include "coopfb/semiwave.hpp"

#include "coopfb/spectral.hpp"
#include "detail/tridiag.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace coopfb {

namespace {

struct Grid {
  Real L{};
  int N{};
  Real dxi{};
};

// Stationary residual of both equations at interior nodes; returns the max
// over nodes and components.
Real stationary_residual(const ModelParams& p, Real s, const Grid& g,
                         const Vector& phi, const Vector& psi) {
  const Real inv_h2 = 1.0 / (g.dxi * g.dxi);
  const Real inv_2h = 1.0 / (2.0 * g.dxi);
  Real worst = 0.0;
  for (int i = 1; i < g.N; ++i) {
    const Real lap_u = (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) * inv_h2;
    const Real adv_u = (phi[i + 1] - phi[i - 1]) * inv_2h;
    const Real ru = p.d1 * lap_u - s * adv_u + reaction_u(p, phi[i], psi[i]);
    const Real lap_v = (psi[i + 1] - 2.0 * psi[i] + psi[i - 1]) * inv_h2;
    const Real adv_v = (psi[i + 1] - psi[i - 1]) * inv_2h;
    const Real rv = p.d2 * lap_v - s * adv_v + reaction_v(p, phi[i], psi[i]);
    worst = std::max({worst, std::abs(ru), std::abs(rv)});
  }
  return worst;
}

void check_monotone_positive(const Vector& phi, const Vector& psi) {
  for (Eigen::Index i = 0; i + 1 < phi.size(); ++i) {
    if (!(phi[i + 1] - phi[i] > 0.0) || !(psi[i + 1] - psi[i] > 0.0)) {
      std::ostringstream msg;
      msg << "semi-wave profile not strictly increasing at node " << i
          << " (s >= s* or L too small?)";
      throw NumericalFailure(msg.str());
    }
  }
}

SemiWaveSolution assemble(const ModelParams& p, Real s, const Grid& g,
                          const Equilibrium& eq, Vector phi, Vector psi) {
  check_monotone_positive(phi, psi);
  SemiWaveSolution sol;
  sol.s = s;
  sol.L = g.L;
  sol.xi = Vector::LinSpaced(g.N + 1, 0.0, g.L);
  sol.phi = std::move(phi);
  sol.psi = std::move(psi);
  sol.residual_max = stationary_residual(p, s, g, sol.phi, sol.psi);
  const auto d0 = front_derivatives(sol);
  sol.dphi0 = d0.first;
  sol.dpsi0 = d0.second;
  try {
    sol.fitted_tail = fit_tail(sol, eq);
  } catch (const std::domain_error&) {
    sol.fitted_tail = std::numeric_limits<Real>::quiet_NaN();
  }
  return sol;
}

void validate_grid(Real s, Real L, int N) {
  if (!(s >= 0.0)) throw std::domain_error("semi-wave: s must be nonnegative");
  if (!(L > 0.0)) throw std::domain_error("semi-wave: L must be positive");
  if (N < 200) throw std::domain_error("semi-wave: N must be at least 200");
}

} // namespace

namespace {

struct RelaxOutcome {
  Vector phi, psi;
  Real delta{};  // last sup-norm change between iterates
};

// Parabolic relaxation core from a linear ramp; never throws, reports the
// final delta so callers can decide.
RelaxOutcome relax_core(const ModelParams& p, Real s, const Grid& g,
                        const Equilibrium& eq, Real t_relax, Real dt, Real tol) {
  const int N = g.N;
  Vector phi = Vector::LinSpaced(N + 1, 0.0, eq.u_star);
  Vector psi = Vector::LinSpaced(N + 1, 0.0, eq.v_star);

  // Implicit linear transport d w'' - s w', explicit reaction.
  const int n = N - 1;
  const Real inv_h2 = 1.0 / (g.dxi * g.dxi);
  const Real inv_2h = 1.0 / (2.0 * g.dxi);
  Vector lo_u(n), di_u(n), up_u(n), lo_v(n), di_v(n), up_v(n);
  for (int i = 0; i < n; ++i) {
    lo_u[i] = -dt * (p.d1 * inv_h2 + s * inv_2h);
    di_u[i] = 1.0 + 2.0 * dt * p.d1 * inv_h2;
    up_u[i] = -dt * (p.d1 * inv_h2 - s * inv_2h);
    lo_v[i] = -dt * (p.d2 * inv_h2 + s * inv_2h);
    di_v[i] = 1.0 + 2.0 * dt * p.d2 * inv_h2;
    up_v[i] = -dt * (p.d2 * inv_h2 - s * inv_2h);
  }
  Vector rhs_u(n), rhs_v(n), scratch(n);
  Real delta = std::numeric_limits<Real>::infinity();
  Real t = 0.0;
  while (t < t_relax) {
    for (int i = 1; i < N; ++i) {
      rhs_u[i - 1] = phi[i] + dt * reaction_u(p, phi[i], psi[i]);
      rhs_v[i - 1] = psi[i] + dt * reaction_v(p, phi[i], psi[i]);
    }
    // Clamped far-end values enter the last interior rows.
    rhs_u[n - 1] -= up_u[n - 1] * eq.u_star;
    rhs_v[n - 1] -= up_v[n - 1] * eq.v_star;
    detail::solve_tridiag(lo_u, di_u, up_u, rhs_u, scratch);
    detail::solve_tridiag(lo_v, di_v, up_v, rhs_v, scratch);
    delta = 0.0;
    for (int i = 1; i < N; ++i) {
      delta = std::max({delta, std::abs(rhs_u[i - 1] - phi[i]),
                        std::abs(rhs_v[i - 1] - psi[i])});
      phi[i] = rhs_u[i - 1];
      psi[i] = rhs_v[i - 1];
    }
    t += dt;
    if (delta <= tol) break;
  }
  phi[N] = eq.u_star;
  psi[N] = eq.v_star;
  return {std::move(phi), std::move(psi), delta};
}

} // namespace

SemiWaveSolution solve_semiwave_relax(const ModelParams& p, Real s, Real L, int N,
                                      Real t_relax, Real dt, Real relax_tol) {
  validate_grid(s, L, N);
  const Grid g{L, N, L / N};
  const Equilibrium eq = solve_equilibrium(p);
  RelaxOutcome outcome = relax_core(p, s, g, eq, t_relax, dt, relax_tol);
  if (outcome.delta > relax_tol) {
    std::ostringstream msg;
    msg << "solve_semiwave_relax: not converged within t_relax = " << t_relax
        << ", last sup-norm delta " << outcome.delta;
    throw NumericalFailure(msg.str());
  }
  return assemble(p, s, g, eq, std::move(outcome.phi), std::move(outcome.psi));
}

namespace {

// C1 extension of the loss terms to negative arguments so Newton iterates
// that briefly undershoot zero stay evaluable; the converged profile is
// checked positive afterwards.
std::pair<Real, Real> loss_ext(const NonlinearitySpec& spec, Real zeta) {
  if (zeta <= 0.0) return {0.0, 0.0};
  return eval_loss(spec, zeta);
}

Real reaction_u_ext(const ModelParams& p, Real u, Real v) {
  return -p.a * u + p.b * v - loss_ext(p.F_spec, u).first;
}

Real reaction_v_ext(const ModelParams& p, Real u, Real v) {
  return p.c * u - p.d * v - loss_ext(p.G_spec, v).first;
}

// Newton polish on the discrete stationary system; seeds are consumed.
SemiWaveSolution newton_core(const ModelParams& p, Real s, const Grid& g,
                             const Equilibrium& eq, Vector phi, Vector psi) {
  const int N = g.N;
  const int n = N - 1;
  const Real inv_h2 = 1.0 / (g.dxi * g.dxi);
  const Real inv_2h = 1.0 / (2.0 * g.dxi);

  // Interleaved unknowns (w_1, z_1, w_2, z_2, ...) keep the Jacobian banded.
  const auto residual = [&](const Vector& w, const Vector& z, Vector& out) {
    for (int i = 1; i < N; ++i) {
      out[2 * (i - 1)] = p.d1 * (w[i + 1] - 2.0 * w[i] + w[i - 1]) * inv_h2 -
                         s * (w[i + 1] - w[i - 1]) * inv_2h +
                         reaction_u_ext(p, w[i], z[i]);
      out[2 * (i - 1) + 1] = p.d2 * (z[i + 1] - 2.0 * z[i] + z[i - 1]) * inv_h2 -
                             s * (z[i + 1] - z[i - 1]) * inv_2h +
                             reaction_v_ext(p, w[i], z[i]);
    }
  };

  Vector res(2 * n);
  residual(phi, psi, res);
  Real res_norm = res.lpNorm<Eigen::Infinity>();
  const Real tol = 1e-12;
  // Roundoff floor of the discrete Laplacian grows like eps / dxi^2; on very
  // fine grids it dominates the nominal 1e-11 contract.
  const Real contract =
      std::max(1e-11, 8.0 * std::numeric_limits<Real>::epsilon() *
                          std::max(p.d1, p.d2) * inv_h2 *
                          std::max(eq.u_star, eq.v_star));

  Eigen::SparseMatrix<Real> J(2 * n, 2 * n);
  std::vector<Eigen::Triplet<Real>> trips;
  Eigen::SparseLU<Eigen::SparseMatrix<Real>> lu;

  for (int iter = 0; iter < 60 && res_norm > tol; ++iter) {
    trips.clear();
    for (int i = 1; i < N; ++i) {
      const int ru = 2 * (i - 1);
      const int rv = ru + 1;
      const Real fu = loss_ext(p.F_spec, phi[i]).second;
      const Real gv = loss_ext(p.G_spec, psi[i]).second;
      trips.emplace_back(ru, ru, -2.0 * p.d1 * inv_h2 - p.a - fu);
      trips.emplace_back(ru, rv, p.b);
      trips.emplace_back(rv, rv, -2.0 * p.d2 * inv_h2 - p.d - gv);
      trips.emplace_back(rv, ru, p.c);
      if (i > 1) {
        trips.emplace_back(ru, ru - 2, p.d1 * inv_h2 + s * inv_2h);
        trips.emplace_back(rv, rv - 2, p.d2 * inv_h2 + s * inv_2h);
      }
      if (i < N - 1) {
        trips.emplace_back(ru, ru + 2, p.d1 * inv_h2 - s * inv_2h);
        trips.emplace_back(rv, rv + 2, p.d2 * inv_h2 - s * inv_2h);
      }
    }
    J.setFromTriplets(trips.begin(), trips.end());
    lu.compute(J);
    if (lu.info() != Eigen::Success) {
      throw NumericalFailure("solve_semiwave_newton: Jacobian factorization failed");
    }
    const Vector step = lu.solve(-res);

    Real alpha = 1.0;
    bool accepted = false;
    Vector trial_phi = phi, trial_psi = psi, trial_res(2 * n);
    while (alpha > 1e-6) {
      for (int i = 1; i < N; ++i) {
        trial_phi[i] = phi[i] + alpha * step[2 * (i - 1)];
        trial_psi[i] = psi[i] + alpha * step[2 * (i - 1) + 1];
      }
      residual(trial_phi, trial_psi, trial_res);
      const Real trial_norm = trial_res.lpNorm<Eigen::Infinity>();
      if (trial_norm < res_norm || trial_norm <= tol) {
        phi.swap(trial_phi);
        psi.swap(trial_psi);
        res = trial_res;
        res_norm = trial_norm;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (res_norm <= contract) break;  // stalled at roundoff but within contract
      std::ostringstream msg;
      msg << "solve_semiwave_newton: line search stalled, residual " << res_norm;
      throw NumericalFailure(msg.str());
    }
  }
  if (res_norm > contract) {
    std::ostringstream msg;
    msg << "solve_semiwave_newton: residual " << res_norm << " above " << contract;
    throw NumericalFailure(msg.str());
  }
  phi[N] = eq.u_star;
  psi[N] = eq.v_star;
  // Where the tail reaches the clamp value to machine precision, roundoff can
  // flatten or invert single forward differences; restore strict increase by
  // at most one ulp per node, far below the residual tolerance.
  for (int i = N - 1; i >= 1; --i) {
    phi[i] = std::min(phi[i], std::nextafter(phi[i + 1], 0.0));
    psi[i] = std::min(psi[i], std::nextafter(psi[i + 1], 0.0));
  }
  return assemble(p, s, g, eq, std::move(phi), std::move(psi));
}

} // namespace

SemiWaveSolution solve_semiwave_newton(const ModelParams& p, Real s, Real L, int N,
                                       const SemiWaveSolution* init) {
  validate_grid(s, L, N);
  const Grid g{L, N, L / N};
  const Equilibrium eq = solve_equilibrium(p);

  Vector phi, psi;
  if (init != nullptr && init->phi.size() == N + 1 &&
      std::abs(init->L - L) < 1e-12 * L) {
    phi = init->phi;
    psi = init->psi;
  } else {
    // A raw ramp can send Newton to a spurious oscillatory root; a short
    // loose relaxation lands in the right basin.
    RelaxOutcome seed = relax_core(p, s, g, eq, 400.0, 0.05, 1e-8);
    phi = std::move(seed.phi);
    psi = std::move(seed.psi);
  }
  return newton_core(p, s, g, eq, std::move(phi), std::move(psi));
}

SemiWaveSolution solve_semiwave(const ModelParams& p, Real s,
                                const SemiWaveSettings& settings) {
  Real L = settings.L;
  int N = settings.N;
  if (L <= 0.0) {
    const Equilibrium eq = solve_equilibrium(p);
    const Real rate = tail_rate(p, s, eq);
    L = std::max(12.0 / rate, 15.0);
  }
  if (N <= 0) {
    N = std::max(200, static_cast<int>(std::ceil(L / settings.dxi_target)));
    L = N * settings.dxi_target;  // keep the spacing exactly at target
  }
  validate_grid(s, L, N);
  const Grid g{L, N, L / N};
  const Equilibrium eq = solve_equilibrium(p);
  // Near the critical speed the relaxation spectral gap collapses; run it only
  // to a loose tolerance and let the Newton polish close the remaining gap.
  RelaxOutcome seed = relax_core(p, s, g, eq, settings.t_relax, settings.dt,
                                 std::max(settings.relax_tol, 1e-6));
  return newton_core(p, s, g, eq, std::move(seed.phi), std::move(seed.psi));
}

std::pair<Real, Real> front_derivatives(const SemiWaveSolution& sol) {
  const Real dxi = sol.xi[1] - sol.xi[0];
  const Real dphi = (-3.0 * sol.phi[0] + 4.0 * sol.phi[1] - sol.phi[2]) / (2.0 * dxi);
  const Real dpsi = (-3.0 * sol.psi[0] + 4.0 * sol.psi[1] - sol.psi[2]) / (2.0 * dxi);
  if (!(dphi > 0.0) || !(dpsi > 0.0)) {
    throw NumericalFailure("front_derivatives: nonpositive front slope");
  }
  return {dphi, dpsi};
}

Real speed_residual(const ModelParams& p, Real s, const SemiWaveSettings& settings) {
  const SemiWaveSolution sol = solve_semiwave(p, s, settings);
  return p.mu * (sol.dpsi0 + p.rho * sol.dphi0) - s;
}

SpeedResult solve_speed(const ModelParams& p, Real speed_tol,
                        const SemiWaveSettings& settings) {
  if (!(p.b * p.c - p.a * p.d > 0.0)) {
    throw std::domain_error("solve_speed: requires bc - ad > 0");
  }
  const Real s_star = critical_speed(p, 1e-9);
  SpeedResult result;

  Real lo = 0.0;
  Real hi = 0.999 * s_star;
  Real f_lo = speed_residual(p, lo, settings);
  Real f_hi = speed_residual(p, hi, settings);
  result.f_values.emplace_back(lo, f_lo);
  result.f_values.emplace_back(hi, f_hi);
  if (!(f_lo > 0.0) || !(f_hi < 0.0)) {
    throw NumericalFailure("solve_speed: bracket endpoints do not change sign");
  }

  Real mid = 0.5 * (lo + hi);
  Real f_mid = 0.0;
  for (int iter = 0; iter < 120; ++iter) {
    mid = 0.5 * (lo + hi);
    f_mid = speed_residual(p, mid, settings);
    result.f_values.emplace_back(mid, f_mid);
    (f_mid > 0.0 ? lo : hi) = mid;
    if (hi - lo <= speed_tol && std::abs(f_mid) <= speed_tol) break;
    if (hi - lo < 1e-15 * s_star) break;
  }
  if (std::abs(f_mid) > speed_tol) {
    std::ostringstream msg;
    msg << "solve_speed: |f| = " << std::abs(f_mid)
        << " above tolerance at exhausted bracket";
    throw NumericalFailure(msg.str());
  }
  result.s_mu_rho = mid;
  result.bracket_width = hi - lo;
  return result;
}

Real fit_tail(const SemiWaveSolution& sol, const Equilibrium& eq) {
  const Real lo = 0.4 * sol.L;
  const Real hi = 0.7 * sol.L;
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (Eigen::Index i = 0; i < sol.xi.size(); ++i) {
    const Real xi = sol.xi[i];
    if (xi < lo || xi > hi) continue;
    const Real gap = eq.u_star - sol.phi[i];
    if (!(gap > 1e-12)) continue;
    const Real y = std::log(gap);
    sx += xi;
    sy += y;
    sxx += xi * xi;
    sxy += xi * y;
    ++count;
  }
  if (count < 10) {
    throw std::domain_error("fit_tail: fewer than 10 usable nodes in the fit window");
  }
  const Real slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return -slope;
}

} // namespace coopfb
