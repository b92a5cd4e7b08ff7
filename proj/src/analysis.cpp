#include "coopfb/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace coopfb {

std::string to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::Spreading: return "Spreading";
    case VerdictKind::Vanishing: return "Vanishing";
    default: return "Undecided";
  }
}

Verdict classify(const Trajectory& traj, const VerdictThresholds& th) {
  Verdict verdict;
  const auto& samples = traj.samples;
  if (samples.size() < 10) return verdict;

  const auto& last = samples.back();
  verdict.final_span = last.h - last.g;
  verdict.final_max_density = std::max(last.max_u, last.max_v);

  const Real t_end = last.t;
  const Real t_cut = t_end - th.trailing_fraction * (t_end - samples.front().t);
  Real speed_sum = 0.0;
  int speed_count = 0;
  Real trailing_max_speed = 0.0;
  for (const auto& s : samples) {
    if (s.t < t_cut) continue;
    speed_sum += 0.5 * (s.hprime - s.gprime);
    ++speed_count;
    trailing_max_speed = std::max(trailing_max_speed,
                                  std::max(std::abs(s.hprime), std::abs(s.gprime)));
  }
  verdict.speed_estimate = speed_count > 0 ? speed_sum / speed_count : 0.0;

  // Contiguous trailing time with both fronts below the stall threshold.
  Real stall_from = t_end;
  for (auto it = samples.rbegin(); it != samples.rend(); ++it) {
    if (std::max(std::abs(it->hprime), std::abs(it->gprime)) >= th.stall_tol) break;
    stall_from = it->t;
  }
  verdict.stall_duration = t_end - stall_from;

  if (verdict.final_span > th.span_factor * th.l_star && verdict.speed_estimate > 0.0) {
    verdict.kind = VerdictKind::Spreading;
  } else if (verdict.final_max_density < th.vanish_tol &&
             trailing_max_speed < th.stall_tol) {
    verdict.kind = VerdictKind::Vanishing;
  }
  return verdict;
}

namespace {

// Least squares y ~ alpha * t + beta.
std::pair<Real, Real> line_fit(const std::vector<Real>& t, const std::vector<Real>& y) {
  const Real n = static_cast<Real>(t.size());
  Real st = 0, sy = 0, stt = 0, sty = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
    stt += t[i] * t[i];
    sty += t[i] * y[i];
  }
  const Real alpha = (n * sty - st * sy) / (n * stt - st * st);
  const Real beta = (sy - alpha * st) / n;
  return {alpha, beta};
}

} // namespace

SpeedFit fit_speed_and_drift(const Trajectory& traj, Real window_fraction) {
  if (!(window_fraction > 0.0) || !(window_fraction < 1.0)) {
    throw std::domain_error("fit_speed_and_drift: window_fraction must be in (0, 1)");
  }
  const auto& samples = traj.samples;
  if (samples.empty()) throw std::domain_error("fit_speed_and_drift: empty trajectory");
  const Real t_end = samples.back().t;
  const Real t_lo = t_end - window_fraction * (t_end - samples.front().t);
  return fit_speed_and_drift_window(traj, t_lo, t_end);
}

SpeedFit fit_speed_and_drift_window(const Trajectory& traj, Real t_lo, Real t_hi) {
  const auto& samples = traj.samples;
  std::vector<Real> t, h, g;
  for (const auto& s : samples) {
    if (s.t < t_lo - 1e-12 || s.t > t_hi + 1e-12) continue;
    t.push_back(s.t);
    h.push_back(s.h);
    g.push_back(s.g);
  }
  if (t.size() <= 2) {
    throw std::domain_error("fit_speed_and_drift: degenerate window (<= 2 samples)");
  }
  SpeedFit fit;
  fit.t_lo = t.front();
  fit.t_hi = t.back();
  const auto [sr, hr] = line_fit(t, h);
  fit.s_hat_right = sr;
  fit.h_star_hat = hr;
  const auto [sl, gl] = line_fit(t, g);
  fit.s_hat_left = -sl;
  fit.g_star_hat = gl;
  fit.s_hat = 0.5 * (fit.s_hat_right + fit.s_hat_left);
  Real worst = 0.0;
  for (size_t i = 0; i < t.size(); ++i) {
    worst = std::max(worst, std::abs(h[i] - fit.s_hat_right * t[i] - fit.h_star_hat));
  }
  fit.max_residual = worst;
  return fit;
}

namespace {

Real wave_value(const SemiWaveSolution& wave, const Vector& values, Real star, Real arg) {
  if (arg >= wave.L) return star;
  if (arg <= 0.0) return values[0];
  const Real dxi = wave.xi[1] - wave.xi[0];
  const Real pos = arg / dxi;
  const Eigen::Index i =
      std::min<Eigen::Index>(static_cast<Eigen::Index>(pos), values.size() - 2);
  const Real w = pos - static_cast<Real>(i);
  return (1.0 - w) * values[i] + w * values[i + 1];
}

} // namespace

std::pair<Real, Real> profile_error(const FrontState& state, const ModelParams& params,
                                    const SemiWaveSolution& wave, const Equilibrium& eq) {
  (void)params;
  const Eigen::Index M = state.U.size() - 1;
  Real err_right = 0.0, err_left = 0.0;
  int count_right = 0, count_left = 0;
  for (Eigen::Index j = 0; j <= M; ++j) {
    const Real x = 0.5 * (state.h + state.g) + state.xi[j] * 0.5 * (state.h - state.g);
    if (x >= 0.0 && x <= state.h) {
      const Real arg = state.h - x;
      err_right = std::max(
          {err_right,
           std::abs(state.U[j] - wave_value(wave, wave.phi, eq.u_star, arg)),
           std::abs(state.V[j] - wave_value(wave, wave.psi, eq.v_star, arg))});
      ++count_right;
    }
    if (x >= state.g && x <= 0.0) {
      const Real arg = x - state.g;
      err_left = std::max(
          {err_left,
           std::abs(state.U[j] - wave_value(wave, wave.phi, eq.u_star, arg)),
           std::abs(state.V[j] - wave_value(wave, wave.psi, eq.v_star, arg))});
      ++count_left;
    }
  }
  if (count_right == 0 || count_left == 0) {
    throw std::domain_error("profile_error: no nodes on one side of the origin");
  }
  return {err_right, err_left};
}

SpeedSeries front_speed_series(const Trajectory& traj, Real trailing_fraction) {
  const auto& samples = traj.samples;
  if (samples.size() < 3) {
    throw std::domain_error("front_speed_series: need at least 3 samples");
  }
  SpeedSeries series;
  for (const auto& s : samples) {
    series.t.push_back(s.t);
    series.hprime.push_back(s.hprime);
    series.minus_gprime.push_back(-s.gprime);
  }
  const Real t_end = samples.back().t;
  const Real t_cut = t_end - trailing_fraction * (t_end - samples.front().t);
  Real sum_r = 0.0, sum_l = 0.0;
  int count = 0;
  for (const auto& s : samples) {
    if (s.t < t_cut) continue;
    sum_r += s.hprime;
    sum_l += -s.gprime;
    ++count;
  }
  series.trailing_mean_right = count > 0 ? sum_r / count : 0.0;
  series.trailing_mean_left = count > 0 ? sum_l / count : 0.0;
  return series;
}

} // namespace coopfb
