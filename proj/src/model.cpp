#include "coopfb/model.hpp"

#include <cmath>

namespace coopfb {

std::pair<Real, Real> eval_loss(const NonlinearitySpec& spec, Real zeta) {
  if (zeta < 0.0) {
    throw std::domain_error("eval_loss: zeta must be nonnegative");
  }
  if (zeta == 0.0) {
    // p > 1 makes both the value and the derivative vanish at the origin;
    // avoid 0^(p-1) for p < 2.
    return {0.0, 0.0};
  }
  const Real value = spec.kappa * std::pow(zeta, spec.p);
  const Real deriv = spec.kappa * spec.p * std::pow(zeta, spec.p - 1.0);
  return {value, deriv};
}

Real reaction_u(const ModelParams& p, Real u, Real v) {
  return -p.a * u + p.b * v - eval_loss(p.F_spec, u).first;
}

Real reaction_v(const ModelParams& p, Real u, Real v) {
  return p.c * u - p.d * v - eval_loss(p.G_spec, v).first;
}

namespace {

void check_positive(std::vector<std::string>& out, Real value, const char* name) {
  if (!(value > 0.0)) {
    out.push_back(std::string(name) + " must be positive");
  }
}

void check_spec(ValidationReport& report, const NonlinearitySpec& spec, const char* name) {
  if (!(spec.kappa > 0.0)) {
    report.violations.push_back(std::string(name) + ": kappa must be positive");
  }
  if (!(spec.p > 1.0)) {
    report.violations.push_back(std::string(name) + ": exponent must exceed 1");
  } else if (spec.p < 2.0) {
    report.warnings.push_back(std::string(name) +
                              ": exponent below 2 gives unbounded curvature at 0");
  }
}

} // namespace

ValidationReport validate(const ModelParams& params, bool require_H) {
  ValidationReport report;
  check_positive(report.violations, params.d1, "d1");
  check_positive(report.violations, params.d2, "d2");
  check_positive(report.violations, params.a, "a");
  check_positive(report.violations, params.b, "b");
  check_positive(report.violations, params.c, "c");
  check_positive(report.violations, params.d, "d");
  check_positive(report.violations, params.mu, "mu");
  check_positive(report.violations, params.rho, "rho");
  check_spec(report, params.F_spec, "F_spec");
  check_spec(report, params.G_spec, "G_spec");
  if (require_H && !(params.b * params.c - params.a * params.d > 0.0)) {
    report.violations.push_back("bc-ad <= 0");
  }
  return report;
}

ValidationReport validate_initial(const InitialData& initial) {
  ValidationReport report;
  if (!(initial.h0 > 0.0)) {
    report.violations.push_back("h0 must be positive");
  }
  if (initial.u0.size() != initial.v0.size()) {
    report.violations.push_back("u0 and v0 must share a grid");
    return report;
  }
  const Eigen::Index n = initial.u0.size();
  if (n < 3) {
    report.violations.push_back("initial data needs at least 3 nodes");
    return report;
  }
  if (initial.u0[0] != 0.0 || initial.u0[n - 1] != 0.0 ||
      initial.v0[0] != 0.0 || initial.v0[n - 1] != 0.0) {
    report.violations.push_back("initial data must vanish at the endpoints");
  }
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    if (!(initial.u0[i] > 0.0) || !(initial.v0[i] > 0.0)) {
      report.violations.push_back("initial data must be positive at interior nodes");
      break;
    }
  }
  return report;
}

InitialData make_initial_preset(Real h0, Real amp_u, Real amp_v, int n) {
  if (!(h0 > 0.0) || !(amp_u > 0.0) || !(amp_v > 0.0)) {
    throw std::domain_error("make_initial_preset: h0 and amplitudes must be positive");
  }
  if (n < 3) {
    throw std::domain_error("make_initial_preset: need at least 3 nodes");
  }
  InitialData out;
  out.h0 = h0;
  out.u0.resize(n);
  out.v0.resize(n);
  const Real pi = std::acos(-1.0);
  for (int i = 0; i < n; ++i) {
    const Real x = -h0 + 2.0 * h0 * static_cast<Real>(i) / static_cast<Real>(n - 1);
    const Real bump = std::cos(pi * x / (2.0 * h0));
    out.u0[i] = amp_u * bump;
    out.v0[i] = amp_v * bump;
  }
  out.u0[0] = out.u0[n - 1] = 0.0;
  out.v0[0] = out.v0[n - 1] = 0.0;
  return out;
}

void to_json(nlohmann::json& j, const NonlinearitySpec& s) {
  j = nlohmann::json{{"kappa", s.kappa}, {"p", s.p}};
}

void from_json(const nlohmann::json& j, NonlinearitySpec& s) {
  s.kappa = j.value("kappa", s.kappa);
  s.p = j.value("p", s.p);
}

void to_json(nlohmann::json& j, const ModelParams& p) {
  j = nlohmann::json{{"d1", p.d1}, {"d2", p.d2}, {"a", p.a},   {"b", p.b},
                     {"c", p.c},   {"d", p.d},   {"mu", p.mu}, {"rho", p.rho},
                     {"F_spec", p.F_spec},       {"G_spec", p.G_spec}};
}

// Missing fields keep their defaults (the reference instance), so partial
// configs stay valid.
void from_json(const nlohmann::json& j, ModelParams& p) {
  p.d1 = j.value("d1", p.d1);
  p.d2 = j.value("d2", p.d2);
  p.a = j.value("a", p.a);
  p.b = j.value("b", p.b);
  p.c = j.value("c", p.c);
  p.d = j.value("d", p.d);
  p.mu = j.value("mu", p.mu);
  p.rho = j.value("rho", p.rho);
  if (j.contains("F_spec")) j.at("F_spec").get_to(p.F_spec);
  if (j.contains("G_spec")) j.at("G_spec").get_to(p.G_spec);
}

} // namespace coopfb
