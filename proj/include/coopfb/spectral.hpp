#pragma once

#include "coopfb/equilibrium.hpp"
#include "coopfb/model.hpp"

#include <array>
#include <complex>

namespace coopfb {

/// Roots of the dispersion quartic
///   (d1 l^2 - s l - a)(d2 l^2 - s l - d) - b c,
/// counted with multiplicity. all_real holds when every imaginary part is
/// below a magnitude-scaled tolerance.
struct QuarticRoots {
  std::array<std::complex<Real>, 4> roots;
  bool all_real{};
};

std::complex<Real> eval_quartic(const ModelParams& params, Real s,
                                std::complex<Real> lambda);

/// Companion-matrix eigendecomposition; uniformly accurate near root
/// collisions, which is exactly the regime where the critical speed lives.
QuarticRoots quartic_roots(const ModelParams& params, Real s);

/// Smallest speed above which all four dispersion roots are real, by
/// bisection with a guard scan above the bracket.
Real critical_speed(const ModelParams& params, Real tol);

/// Exponential approach rate of the semi-wave to (u*, v*): the negated
/// largest strictly negative real root of the quartic linearized at the
/// equilibrium (a -> a + F'(u*), d -> d + G'(v*)).
Real tail_rate(const ModelParams& params, Real s, const Equilibrium& eq);

/// Principal (smaller) eigenvalue of the cooperative pair on (-l, l) with
/// zero boundary values: the smaller eigenvalue of
///   [[d1 k^2 + a, -b], [-c, d2 k^2 + d]], k = pi / (2 l).
Real principal_eigenvalue(const ModelParams& params, Real l);

/// Half-length where the principal eigenvalue crosses zero.
Real critical_length(const ModelParams& params, Real tol);

} // namespace coopfb
