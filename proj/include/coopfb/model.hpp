#pragma once

#include "coopfb/types.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace coopfb {

/// Power-law loss F(z) = kappa * z^p with p > 1, so F(0) = F'(0) = 0 and
/// F(z)/z is strictly increasing and unbounded.
struct NonlinearitySpec {
  Real kappa{1.0};
  Real p{2.0};
};

/// Evaluates (F(zeta), F'(zeta)). zeta must be nonnegative.
std::pair<Real, Real> eval_loss(const NonlinearitySpec& spec, Real zeta);

/// All scalar coefficients of a problem instance plus the two loss laws.
/// Immutable by convention: solvers copy, never mutate.
struct ModelParams {
  Real d1{1.0}, d2{1.0};  // diffusion rates
  Real a{1.0}, d{1.0};    // mortality rates
  Real b{2.0}, c{2.0};    // cooperation coefficients
  Real mu{1.0};           // front expansion coefficient
  Real rho{1.0};          // front mixing weight
  NonlinearitySpec F_spec{};
  NonlinearitySpec G_spec{};
};

/// Kinetic right-hand sides: (-a u + b v - F(u), c u - d v - G(v)).
Real reaction_u(const ModelParams& p, Real u, Real v);
Real reaction_v(const ModelParams& p, Real u, Real v);

/// Initial densities sampled on a uniform grid over [-h0, h0], zero at the
/// endpoints and positive inside.
struct InitialData {
  Real h0{1.0};
  Vector u0, v0;
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
  bool ok() const { return violations.empty(); }
};

/// Checks every invariant; never throws. With require_H the cooperation
/// strength condition b*c - a*d > 0 is also enforced.
ValidationReport validate(const ModelParams& params, bool require_H);

ValidationReport validate_initial(const InitialData& initial);

/// Cosine-bump preset: u0(x) = amp_u * cos(pi x / (2 h0)) on n uniform nodes,
/// endpoints exactly zero.
InitialData make_initial_preset(Real h0, Real amp_u, Real amp_v, int n);

void to_json(nlohmann::json& j, const NonlinearitySpec& s);
void from_json(const nlohmann::json& j, NonlinearitySpec& s);
void to_json(nlohmann::json& j, const ModelParams& p);
void from_json(const nlohmann::json& j, ModelParams& p);

} // namespace coopfb
