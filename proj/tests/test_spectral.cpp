#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coopfb/spectral.hpp"

#include <cmath>
#include <random>

using namespace coopfb;

namespace {

ModelParams random_cooperative(std::mt19937& rng) {
  std::uniform_real_distribution<Real> coef(0.4, 2.0);
  ModelParams p{};
  p.d1 = coef(rng);
  p.d2 = coef(rng);
  p.a = coef(rng);
  p.d = coef(rng);
  do {
    p.b = coef(rng) + 0.5;
    p.c = coef(rng) + 0.5;
  } while (p.b * p.c - p.a * p.d <= 0.1);
  return p;
}

} // namespace

TEST_CASE("quartic evaluates to its closed form on the reference instance") {
  const ModelParams R{};
  CHECK(eval_quartic(R, 0.7, {0.0, 0.0}).real() == doctest::Approx(-3.0));
  CHECK(std::abs(eval_quartic(R, 0.0, {std::sqrt(3.0), 0.0})) < 1e-12);
  CHECK(std::abs(eval_quartic(R, 0.0, {0.0, 1.0})) < 1e-12);
}

TEST_CASE("roots at s = 0 split into a real and an imaginary pair") {
  const QuarticRoots qr = quartic_roots(ModelParams{}, 0.0);
  CHECK_FALSE(qr.all_real);
  int real_pair = 0, imag_pair = 0;
  for (const auto& r : qr.roots) {
    if (std::abs(r.imag()) < 1e-9) {
      CHECK(std::abs(std::abs(r.real()) - std::sqrt(3.0)) < 1e-9);
      ++real_pair;
    } else {
      CHECK(std::abs(r.real()) < 1e-9);
      CHECK(std::abs(std::abs(r.imag()) - 1.0) < 1e-9);
      ++imag_pair;
    }
  }
  CHECK(real_pair == 2);
  CHECK(imag_pair == 2);
}

TEST_CASE("roots are all real above the critical speed") {
  CHECK(quartic_roots(ModelParams{}, 3.0).all_real);

  // The collision point s = 2 carries a double root at lambda = 1.
  const QuarticRoots qr = quartic_roots(ModelParams{}, 2.0);
  CHECK(qr.all_real);
  int near_one = 0;
  for (const auto& r : qr.roots) {
    if (std::abs(r - std::complex<Real>{1.0, 0.0}) < 1e-6) ++near_one;
  }
  CHECK(near_one == 2);
}

TEST_CASE("critical speed of the reference instance is 2") {
  CHECK(critical_speed(ModelParams{}, 1e-8) == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("critical speed collapses as cooperation weakens toward (H)'s edge") {
  ModelParams p{};
  p.b = p.c = 1.001;
  const Real s_star = critical_speed(p, 1e-8);
  CHECK(s_star < 0.2);
  // Dense scan oracle: reality flips exactly once around the reported value.
  for (Real s = 0.001; s < s_star - 1e-3; s += 0.001) {
    CHECK_FALSE(quartic_roots(p, s).all_real);
  }
  for (Real s = s_star + 1e-3; s < 0.3; s += 0.001) {
    CHECK(quartic_roots(p, s).all_real);
  }
}

TEST_CASE("bisection tolerance contract") {
  const Real coarse = critical_speed(ModelParams{}, 1e-3);
  const Real fine = critical_speed(ModelParams{}, 1e-8);
  CHECK(std::abs(coarse - fine) <= 1e-3);
}

TEST_CASE("tail rate matches the closed form on the reference instance") {
  const ModelParams R{};
  const Equilibrium eq{1.0, 1.0};
  CHECK(tail_rate(R, 0.0, eq) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(tail_rate(R, 1.0, eq) ==
        doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-9));
  for (Real s : {0.0, 0.4, 0.9, 1.3, 1.8}) {
    CHECK(tail_rate(R, s, eq) ==
          doctest::Approx((std::sqrt(s * s + 4.0) - s) / 2.0).epsilon(1e-9));
  }
}

TEST_CASE("principal eigenvalue closed form and limits") {
  const ModelParams R{};
  const Real pi = std::acos(-1.0);
  for (Real l : {0.5, 1.0, pi / 2.0, 3.0}) {
    const Real k = pi / (2.0 * l);
    CHECK(principal_eigenvalue(R, l) == doctest::Approx(k * k - 1.0).epsilon(1e-12));
  }
  CHECK(std::abs(principal_eigenvalue(R, pi / 2.0)) < 1e-12);
  CHECK(principal_eigenvalue(R, 1e6) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("critical length closed forms") {
  const Real pi = std::acos(-1.0);
  CHECK(critical_length(ModelParams{}, 1e-10) == doctest::Approx(pi / 2.0).epsilon(1e-8));

  ModelParams fast{};
  fast.d1 = fast.d2 = 4.0;
  CHECK(critical_length(fast, 1e-10) == doctest::Approx(pi).epsilon(1e-8));

  ModelParams weak{};
  weak.b = weak.c = 1.1;
  CHECK(critical_length(weak, 1e-10) > pi / 2.0);
}

TEST_CASE("root residuals stay bounded on random instances") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<Real> speed(0.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    const ModelParams p = random_cooperative(rng);
    const Real s = speed(rng);
    const QuarticRoots qr = quartic_roots(p, s);
    for (const auto& r : qr.roots) {
      const Real mag = std::abs(r);
      CHECK(std::abs(eval_quartic(p, s, r)) <= 1e-9 * (1.0 + mag * mag * mag * mag));
    }
  }
}

TEST_CASE("reality is consistent on both sides of the critical speed") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const ModelParams p = random_cooperative(rng);
    const Real s_star = critical_speed(p, 1e-9);
    for (int i = 1; i <= 20; ++i) {
      const Real below = (s_star - 1e-6) * i / 20.0;
      CHECK_FALSE(quartic_roots(p, below).all_real);
      const Real above = s_star + 1e-6 + (4.0 * s_star - s_star) * i / 20.0;
      CHECK(quartic_roots(p, above).all_real);
    }
  }
}

TEST_CASE("principal eigenvalue decreases strictly in the half-length") {
  std::mt19937 rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    const ModelParams p = random_cooperative(rng);
    Real prev = principal_eigenvalue(p, 0.05);
    for (Real l = 0.1; l < 30.0; l *= 1.5) {
      const Real cur = principal_eigenvalue(p, l);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("tail rate is Lipschitz on the subcritical range") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const ModelParams p = random_cooperative(rng);
    Equilibrium eq;
    eq = solve_equilibrium(p);
    const Real s_star = critical_speed(p, 1e-9);
    const Real delta = 1e-4;
    for (int i = 0; i <= 30; ++i) {
      const Real s = 0.9 * s_star * i / 30.0;
      const Real jump = std::abs(tail_rate(p, s + delta, eq) - tail_rate(p, s, eq));
      CHECK(jump <= 20.0 * delta);
    }
  }
}
