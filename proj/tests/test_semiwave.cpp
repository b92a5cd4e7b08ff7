#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coopfb/semiwave.hpp"
#include "coopfb/spectral.hpp"

#include <cmath>

using namespace coopfb;

namespace {

Real sup_diff_shared(const SemiWaveSolution& coarse, const SemiWaveSolution& fine,
                     int stride) {
  Real worst = 0.0;
  for (Eigen::Index i = 0; i < coarse.phi.size(); ++i) {
    worst = std::max({worst, std::abs(coarse.phi[i] - fine.phi[stride * i]),
                      std::abs(coarse.psi[i] - fine.psi[stride * i])});
  }
  return worst;
}

} // namespace

TEST_CASE("standing wave of the symmetric instance collapses to one scalar profile") {
  const ModelParams R{};
  const SemiWaveSolution sol = solve_semiwave_relax(R, 0.0, 40.0, 2000, 600.0, 0.05, 1e-10);
  CHECK(sol.phi[0] == 0.0);
  CHECK(sol.psi[0] == 0.0);
  CHECK(std::abs(sol.phi[sol.phi.size() - 1] - 1.0) < 1e-8);
  CHECK(std::abs(sol.psi[sol.psi.size() - 1] - 1.0) < 1e-8);
  CHECK((sol.phi - sol.psi).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK(sol.dphi0 > 0.0);
  CHECK(sol.dphi0 == doctest::Approx(sol.dpsi0).epsilon(1e-10));

  // First-integral oracle: with phi = psi =: w the standing profile obeys
  // w'' = -w + w^2, so w'(0)^2 = 1/3 after integrating from the far end.
  CHECK(sol.dphi0 == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-3));
}

TEST_CASE("profiles shrink toward zero as the speed approaches critical") {
  const ModelParams R{};
  const SemiWaveSolution slow = solve_semiwave_relax(R, 0.5, 40.0, 2000, 600.0, 0.05, 1e-8);
  const SemiWaveSolution fast = solve_semiwave_relax(R, 1.9, 40.0, 2000, 600.0, 0.05, 1e-8);
  Real max_slow = 0.0, max_fast = 0.0;
  for (Eigen::Index i = 0; i < slow.xi.size(); ++i) {
    if (slow.xi[i] > 10.0) break;
    max_slow = std::max(max_slow, slow.phi[i]);
    max_fast = std::max(max_fast, fast.phi[i]);
  }
  CHECK(max_fast < max_slow);
}

TEST_CASE("relaxation is self-consistent under grid refinement") {
  const ModelParams R{};
  const SemiWaveSolution coarse = solve_semiwave_relax(R, 0.5, 40.0, 1000, 600.0, 0.05, 1e-10);
  const SemiWaveSolution fine = solve_semiwave_relax(R, 0.5, 40.0, 2000, 600.0, 0.05, 1e-10);
  CHECK(sup_diff_shared(coarse, fine, 2) <= 1e-4);
}

TEST_CASE("collocation and relaxation agree and satisfy tight residuals") {
  const ModelParams R{};
  const SemiWaveSolution relax = solve_semiwave_relax(R, 0.5, 40.0, 2000, 600.0, 0.05, 1e-10);
  const SemiWaveSolution newton = solve_semiwave_newton(R, 0.5, 40.0, 2000);
  CHECK((relax.phi - newton.phi).lpNorm<Eigen::Infinity>() <= 1e-6);
  CHECK((relax.psi - newton.psi).lpNorm<Eigen::Infinity>() <= 1e-6);

  const SemiWaveSolution standing = solve_semiwave_newton(R, 0.0, 40.0, 2000);
  CHECK(standing.residual_max <= 1e-11);
}

TEST_CASE("front derivatives are insensitive to the truncation length") {
  const ModelParams R{};
  const SemiWaveSolution l40 = solve_semiwave_newton(R, 0.5, 40.0, 2000);
  const SemiWaveSolution l60 = solve_semiwave_newton(R, 0.5, 60.0, 3000);
  CHECK(std::abs(l40.dphi0 - l60.dphi0) <= 1e-8);
  CHECK(std::abs(l40.dpsi0 - l60.dpsi0) <= 1e-8);
}

TEST_CASE("one-sided stencil is exact on low-degree polynomials") {
  SemiWaveSolution sol;
  sol.xi = Vector::LinSpaced(201, 0.0, 2.0);
  sol.phi = sol.xi;                                      // slope 1
  sol.psi = 2.0 * sol.xi + 3.0 * sol.xi.array().square().matrix();  // slope 2
  const auto [dphi, dpsi] = front_derivatives(sol);
  CHECK(dphi == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dpsi == doctest::Approx(2.0).epsilon(1e-13));

  // A flat front violates the positive-slope contract.
  SemiWaveSolution flat;
  flat.xi = Vector::LinSpaced(201, 0.0, 2.0);
  flat.phi = flat.xi.array().square().matrix();
  flat.psi = flat.phi;
  CHECK_THROWS_AS(front_derivatives(flat), NumericalFailure);
}

TEST_CASE("front derivatives converge at second order and stabilize") {
  const ModelParams R{};
  const SemiWaveSolution coarse = solve_semiwave_newton(R, 0.5, 40.0, 2000);
  const SemiWaveSolution mid = solve_semiwave_newton(R, 0.5, 40.0, 4000);
  const Real jump_coarse = std::abs(coarse.dphi0 - mid.dphi0);

  // Second order: quadrupling the resolution shrinks the doubling jump ~16x.
  const SemiWaveSolution fine = solve_semiwave_newton(R, 0.5, 40.0, 8000);
  const SemiWaveSolution finest = solve_semiwave_newton(R, 0.5, 40.0, 16000);
  const Real jump_fine = std::abs(fine.dphi0 - finest.dphi0);
  CHECK(jump_fine <= jump_coarse / 8.0);

  // Absolute stability once the spacing is a few 1e-3.
  const SemiWaveSolution f12 = solve_semiwave_newton(R, 0.5, 40.0, 12000);
  const SemiWaveSolution f24 = solve_semiwave_newton(R, 0.5, 40.0, 24000);
  CHECK(std::abs(f12.dphi0 - f24.dphi0) <= 1e-6);
  CHECK(std::abs(f12.dpsi0 - f24.dpsi0) <= 1e-6);
}

TEST_CASE("speed residual has the right signs and decreases") {
  const ModelParams R{};
  CHECK(speed_residual(R, 0.0) > 0.0);
  CHECK(speed_residual(R, 1.95) < 0.0);
  CHECK(speed_residual(R, 0.3) > speed_residual(R, 0.6));
}

TEST_CASE("front-consistent speed of the reference instance") {
  const ModelParams R{};
  const SpeedResult result = solve_speed(R, 1e-6);
  CHECK(result.s_mu_rho > 0.0);
  CHECK(result.s_mu_rho < 2.0);
  CHECK(std::abs(speed_residual(R, result.s_mu_rho)) <= 1e-6);
  CHECK(result.bracket_width <= 1e-6);
  // Golden value recorded from the first converged computation.
  CHECK(result.s_mu_rho == doctest::Approx(0.5477067117691039).epsilon(1e-5));
}

TEST_CASE("speed shrinks with the Stefan coefficient and grows with rho") {
  ModelParams weak{};
  weak.mu = 0.01;
  const Real s_weak = solve_speed(weak, 1e-4).s_mu_rho;
  const Real s_ref = solve_speed(ModelParams{}, 1e-4).s_mu_rho;
  CHECK(s_weak < s_ref);

  ModelParams no_rho{};
  no_rho.rho = 0.0;
  const Real s_no_rho = solve_speed(no_rho, 1e-4).s_mu_rho;
  CHECK(s_no_rho < s_ref);
}

TEST_CASE("tail fit recovers a synthetic exponential exactly") {
  SemiWaveSolution sol;
  sol.L = 20.0;
  sol.xi = Vector::LinSpaced(1001, 0.0, sol.L);
  sol.phi = (1.0 - (-2.0 * sol.xi.array()).exp()).matrix();
  sol.psi = sol.phi;
  const Equilibrium eq{1.0, 1.0};
  CHECK(fit_tail(sol, eq) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("fitted tails match the spectral prediction within 5 percent") {
  const ModelParams R{};
  const Equilibrium eq{1.0, 1.0};
  for (Real s : {0.0, 1.0}) {
    const SemiWaveSolution sol = solve_semiwave(R, s);
    const Real predicted = tail_rate(R, s, eq);
    CHECK(sol.fitted_tail == doctest::Approx(predicted).epsilon(0.05));
  }
}

TEST_CASE("profiles and front slopes are ordered in the speed") {
  const ModelParams R{};
  const Real s_grid[] = {0.0, 0.45, 0.9, 1.35, 1.8};
  SemiWaveSolution prev = solve_semiwave_newton(R, s_grid[0], 40.0, 2000);
  for (int k = 1; k < 5; ++k) {
    const SemiWaveSolution cur = solve_semiwave_newton(R, s_grid[k], 40.0, 2000);
    for (Eigen::Index i = 0; i < cur.phi.size(); ++i) {
      CHECK(prev.phi[i] >= cur.phi[i] - 1e-8);
      CHECK(prev.psi[i] >= cur.psi[i] - 1e-8);
    }
    CHECK(cur.dphi0 <= prev.dphi0 + 1e-10);
    CHECK(cur.dpsi0 <= prev.dpsi0 + 1e-10);
    prev = cur;
  }
}

TEST_CASE("grid validation rejects bad inputs") {
  const ModelParams R{};
  CHECK_THROWS_AS(solve_semiwave_relax(R, -0.1, 40.0, 2000), std::domain_error);
  CHECK_THROWS_AS(solve_semiwave_relax(R, 0.5, 0.0, 2000), std::domain_error);
  CHECK_THROWS_AS(solve_semiwave_newton(R, 0.5, 40.0, 50), std::domain_error);
}
