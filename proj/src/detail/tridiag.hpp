#pragma once

#include "coopfb/types.hpp"

namespace coopfb::detail {

/// Thomas algorithm. lower[i] multiplies x[i-1] (lower[0] unused), upper[i]
/// multiplies x[i+1] (upper[n-1] unused). Overwrites rhs with the solution
/// and scratch with intermediate coefficients.
inline void solve_tridiag(const Vector& lower, const Vector& diag, const Vector& upper,
                          Vector& rhs, Vector& scratch) {
  const Eigen::Index n = diag.size();
  scratch.resize(n);
  Real piv = diag[0];
  scratch[0] = upper[0] / piv;
  rhs[0] /= piv;
  for (Eigen::Index i = 1; i < n; ++i) {
    piv = diag[i] - lower[i] * scratch[i - 1];
    scratch[i] = upper[i] / piv;
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / piv;
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    rhs[i] -= scratch[i] * rhs[i + 1];
  }
}

} // namespace coopfb::detail
