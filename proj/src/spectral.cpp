#include "coopfb/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace coopfb {

namespace {

// Monic coefficients of the dispersion quartic with the mortalities shifted
// to (a_eff, d_eff): l^4 + c3 l^3 + c2 l^2 + c1 l + c0.
std::array<Real, 4> monic_coeffs(const ModelParams& p, Real s, Real a_eff, Real d_eff) {
  const Real lead = p.d1 * p.d2;
  return {
      (a_eff * d_eff - p.b * p.c) / lead,       // c0
      s * (a_eff + d_eff) / lead,               // c1
      (s * s - p.d1 * d_eff - p.d2 * a_eff) / lead, // c2
      -s * (p.d1 + p.d2) / lead,                // c3
  };
}

QuarticRoots roots_from_coeffs(const std::array<Real, 4>& c) {
  Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
  companion(1, 0) = companion(2, 1) = companion(3, 2) = 1.0;
  for (int i = 0; i < 4; ++i) companion(i, 3) = -c[i];
  Eigen::EigenSolver<Eigen::Matrix4d> es(companion, /*computeEigenvectors=*/false);
  QuarticRoots out;
  bool all_real = true;
  for (int i = 0; i < 4; ++i) {
    const std::complex<Real> r = es.eigenvalues()[i];
    out.roots[i] = r;
    if (std::abs(r.imag()) > 1e-9 * (1.0 + std::abs(r))) all_real = false;
  }
  out.all_real = all_real;
  return out;
}

} // namespace

std::complex<Real> eval_quartic(const ModelParams& p, Real s,
                                std::complex<Real> lambda) {
  const std::complex<Real> p1 = p.d1 * lambda * lambda - s * lambda - p.a;
  const std::complex<Real> p2 = p.d2 * lambda * lambda - s * lambda - p.d;
  return p1 * p2 - p.b * p.c;
}

QuarticRoots quartic_roots(const ModelParams& p, Real s) {
  return roots_from_coeffs(monic_coeffs(p, s, p.a, p.d));
}

Real critical_speed(const ModelParams& p, Real tol) {
  if (!(p.b * p.c - p.a * p.d > 0.0)) {
    throw std::domain_error("critical_speed: requires bc - ad > 0");
  }
  if (!(tol > 0.0)) {
    throw std::domain_error("critical_speed: tol must be positive");
  }
  const auto all_real = [&](Real s) { return quartic_roots(p, s).all_real; };

  // Seed the bracket: complex pair at s = 0 (guaranteed by bc > ad), scan
  // upward for an all-real speed.
  Real lo = 0.0;
  Real hi = 1.0;
  const Real cap = 1e3 * std::max(1.0, std::sqrt(p.a + p.d));
  while (!all_real(hi)) {
    hi *= 2.0;
    if (hi > cap) {
      throw NumericalFailure("critical_speed: no all-real speed found below cap");
    }
  }
  while (hi - lo > tol) {
    const Real mid = 0.5 * (lo + hi);
    (all_real(mid) ? hi : lo) = mid;
  }
  // The definition is an infimum over tails; reality must persist above.
  for (Real factor : {1.5, 2.0, 4.0}) {
    if (!all_real(hi * factor)) {
      std::ostringstream msg;
      msg << "critical_speed: reality fails again at s = " << hi * factor;
      throw NumericalFailure(msg.str());
    }
  }
  return hi;
}

Real tail_rate(const ModelParams& p, Real s, const Equilibrium& eq) {
  const Real a_eff = p.a + eval_loss(p.F_spec, eq.u_star).second;
  const Real d_eff = p.d + eval_loss(p.G_spec, eq.v_star).second;
  const QuarticRoots qr = roots_from_coeffs(monic_coeffs(p, s, a_eff, d_eff));
  Real best = 0.0;
  bool found = false;
  for (const auto& r : qr.roots) {
    if (std::abs(r.imag()) <= 1e-9 * (1.0 + std::abs(r)) && r.real() < -1e-12) {
      if (!found || r.real() > best) {
        best = r.real();
        found = true;
      }
    }
  }
  if (!found) {
    throw NumericalFailure("tail_rate: linearized quartic has no negative real root");
  }
  return -best;
}

Real principal_eigenvalue(const ModelParams& p, Real l) {
  if (!(l > 0.0)) {
    throw std::domain_error("principal_eigenvalue: l must be positive");
  }
  const Real pi = std::acos(-1.0);
  const Real k = pi / (2.0 * l);
  const Real alpha = p.d1 * k * k + p.a;
  const Real beta = p.d2 * k * k + p.d;
  const Real disc = std::sqrt((alpha - beta) * (alpha - beta) + 4.0 * p.b * p.c);
  // Smaller eigenvalue; its eigenvector (b / (alpha - lambda0), 1) is
  // componentwise positive since alpha - lambda0 = (alpha - beta + disc)/2 > 0.
  return 0.5 * (alpha + beta - disc);
}

Real critical_length(const ModelParams& p, Real tol) {
  if (!(p.b * p.c - p.a * p.d > 0.0)) {
    throw std::domain_error("critical_length: requires bc - ad > 0");
  }
  Real lo = 1e-8;  // eigenvalue -> +inf as l -> 0+
  Real hi = 1.0;
  while (principal_eigenvalue(p, hi) > 0.0) hi *= 2.0;
  while (principal_eigenvalue(p, lo) < 0.0) lo *= 0.5;
  while (hi - lo > tol) {
    const Real mid = 0.5 * (lo + hi);
    (principal_eigenvalue(p, mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace coopfb
