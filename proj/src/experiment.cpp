#include "coopfb/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace coopfb {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Fixed formatting keeps repeated runs byte-identical.
std::string fmt(Real value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw NumericalFailure("cannot write " + path.string());
  out << text;
}

void write_json_file(const fs::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

void require(bool cond, const std::string& message) {
  if (!cond) throw ConfigError(message);
}

template <typename T>
T field(const json& j, const std::string& key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("field '" + key + "': " + e.what());
  }
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  out << "t,g,h,gprime,hprime,max_u,max_v,profile_err_left,profile_err_right\n";
  for (const auto& s : traj.samples) {
    out << fmt(s.t) << ',' << fmt(s.g) << ',' << fmt(s.h) << ',' << fmt(s.gprime)
        << ',' << fmt(s.hprime) << ',' << fmt(s.max_u) << ',' << fmt(s.max_v) << ','
        << fmt(s.profile_err_left) << ',' << fmt(s.profile_err_right) << '\n';
  }
  return out.str();
}

std::string semiwave_csv(const SemiWaveSolution& wave) {
  std::ostringstream out;
  out << "xi,phi,psi\n";
  for (Eigen::Index i = 0; i < wave.xi.size(); ++i) {
    out << fmt(wave.xi[i]) << ',' << fmt(wave.phi[i]) << ',' << fmt(wave.psi[i]) << '\n';
  }
  return out.str();
}

std::string snapshot_csv(const FrontState& state) {
  std::ostringstream out;
  out << "x,u,v\n";
  for (Eigen::Index j = 0; j < state.xi.size(); ++j) {
    const Real x = 0.5 * (state.h + state.g) + state.xi[j] * 0.5 * (state.h - state.g);
    out << fmt(x) << ',' << fmt(state.U[j]) << ',' << fmt(state.V[j]) << '\n';
  }
  return out.str();
}

json verdict_to_json(const Verdict& verdict) {
  return json{{"kind", to_string(verdict.kind)},
              {"evidence",
               {{"final_span", verdict.final_span},
                {"final_max_density", verdict.final_max_density},
                {"speed_estimate", verdict.speed_estimate},
                {"stall_duration", verdict.stall_duration}}}};
}

json fit_to_json(const SpeedFit& fit) {
  return json{{"s_hat", fit.s_hat},
              {"s_hat_right", fit.s_hat_right},
              {"s_hat_left", fit.s_hat_left},
              {"h_star_hat", fit.h_star_hat},
              {"g_star_hat", fit.g_star_hat},
              {"window", {fit.t_lo, fit.t_hi}},
              {"max_residual", fit.max_residual}};
}

} // namespace

ModelParams reference_params() { return ModelParams{}; }

ExperimentConfig parse_config(const json& j) {
  require(j.is_object(), "config must be a JSON object");
  require(j.contains("params"), "missing 'params'");
  ExperimentConfig config;
  try {
    config.params = j.at("params").get<ModelParams>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("params: ") + e.what());
  }
  const json initial = j.value("initial", json::object());
  config.initial.h0 = field(initial, "h0", config.initial.h0);
  config.initial.amp_u = field(initial, "amp_u", config.initial.amp_u);
  config.initial.amp_v = field(initial, "amp_v", config.initial.amp_v);
  config.initial.n = field(initial, "n", config.initial.n);
  require(config.initial.h0 > 0.0, "initial.h0 must be positive");
  require(config.initial.amp_u > 0.0, "initial.amp_u must be positive");
  require(config.initial.amp_v > 0.0, "initial.amp_v must be positive");
  require(config.initial.n >= 3, "initial.n must be at least 3");

  const json numerics = j.value("numerics", json::object());
  config.numerics.M = field(numerics, "M", config.numerics.M);
  config.numerics.dt = field(numerics, "dt", config.numerics.dt);
  config.numerics.t_end = field(numerics, "t_end", config.numerics.t_end);
  config.numerics.sample_every = field(numerics, "sample_every", config.numerics.sample_every);
  config.numerics.semiwave_dxi = field(numerics, "semiwave_dxi", config.numerics.semiwave_dxi);
  config.numerics.speed_tol = field(numerics, "speed_tol", config.numerics.speed_tol);
  config.numerics.snapshot_times =
      field(numerics, "snapshot_times", config.numerics.snapshot_times);
  require(config.numerics.M >= 100, "numerics.M must be at least 100");
  require(config.numerics.dt > 0.0, "numerics.dt must be positive");
  require(config.numerics.t_end > 0.0, "numerics.t_end must be positive");
  require(config.numerics.sample_every > 0.0, "numerics.sample_every must be positive");
  require(config.numerics.semiwave_dxi > 0.0, "numerics.semiwave_dxi must be positive");
  require(config.numerics.speed_tol > 0.0, "numerics.speed_tol must be positive");

  const json outputs = j.value("outputs", json::object());
  config.outputs.dir = field(outputs, "dir", config.outputs.dir);
  config.outputs.csv = field(outputs, "csv", config.outputs.csv);
  config.outputs.json = field(outputs, "json", config.outputs.json);
  require(!config.outputs.dir.empty(), "outputs.dir must be nonempty");
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(j);
}

json config_to_json(const ExperimentConfig& config) {
  return json{
      {"params", config.params},
      {"initial",
       {{"h0", config.initial.h0},
        {"amp_u", config.initial.amp_u},
        {"amp_v", config.initial.amp_v},
        {"n", config.initial.n}}},
      {"numerics",
       {{"M", config.numerics.M},
        {"dt", config.numerics.dt},
        {"t_end", config.numerics.t_end},
        {"sample_every", config.numerics.sample_every},
        {"semiwave_dxi", config.numerics.semiwave_dxi},
        {"speed_tol", config.numerics.speed_tol},
        {"snapshot_times", config.numerics.snapshot_times}}},
      {"outputs",
       {{"dir", config.outputs.dir},
        {"csv", config.outputs.csv},
        {"json", config.outputs.json}}}};
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult result;
  const fs::path dir(config.outputs.dir);
  fs::create_directories(dir);

  const ValidationReport report = validate(config.params, /*require_H=*/true);
  if (!report.ok()) {
    result.status = 3;
    result.error = "parameter validation failed";
    write_json_file(dir / "error.json",
                    json{{"status", 3},
                         {"error", result.error},
                         {"violations", report.violations}});
    return result;
  }

  write_json_file(dir / "manifest.json", config_to_json(config));

  try {
    const ModelParams& p = config.params;
    const Equilibrium eq = solve_equilibrium(p);
    result.s_star = critical_speed(p, 1e-9);
    result.l_star = critical_length(p, 1e-8);

    SemiWaveSettings settings;
    settings.dxi_target = config.numerics.semiwave_dxi;
    const SpeedResult speed = solve_speed(p, config.numerics.speed_tol, settings);
    result.s_mu_rho = speed.s_mu_rho;
    result.mu_hat1 = tail_rate(p, speed.s_mu_rho, eq);
    const SemiWaveSolution wave = solve_semiwave(p, speed.s_mu_rho, settings);

    write_json_file(dir / "spectral.json",
                    json{{"s_star", result.s_star},
                         {"l_star", result.l_star},
                         {"mu_hat1", result.mu_hat1}});
    json f_samples = json::array();
    for (const auto& [s, f] : speed.f_values) f_samples.push_back({{"s", s}, {"f", f}});
    write_json_file(dir / "speed.json",
                    json{{"s_mu_rho", speed.s_mu_rho},
                         {"bracket_width", speed.bracket_width},
                         {"f_values", f_samples}});
    if (config.outputs.csv) {
      write_text(dir / "semiwave_profile.csv", semiwave_csv(wave));
    }
    write_json_file(dir / "semiwave_summary.json",
                    json{{"s", wave.s},
                         {"L", wave.L},
                         {"dphi0", wave.dphi0},
                         {"dpsi0", wave.dpsi0},
                         {"fitted_tail", wave.fitted_tail},
                         {"residual_max", wave.residual_max}});

    const InitialData initial = make_initial_preset(
        config.initial.h0, config.initial.amp_u, config.initial.amp_v, config.initial.n);

    RunOptions options;
    options.dt = config.numerics.dt;
    options.t_end = config.numerics.t_end;
    options.sample_every = config.numerics.sample_every;
    options.reference = &wave;
    options.observer = [&](const FrontState& state) {
      for (Real snap : config.numerics.snapshot_times) {
        if (std::abs(state.t - snap) < 1e-9) {
          std::ostringstream name;
          name << "snapshot_t" << fmt(snap) << ".csv";
          write_text(dir / name.str(), snapshot_csv(state));
        }
      }
    };
    const Trajectory traj = run(p, initial, config.numerics.M, options);
    if (config.outputs.csv) {
      write_text(dir / "trajectory.csv", trajectory_csv(traj));
    }
    if (!traj.error.empty()) {
      result.status = 4;
      result.error = traj.error;
      write_json_file(dir / "error.json",
                      json{{"status", 4}, {"error", traj.error}});
      return result;
    }

    VerdictThresholds thresholds;
    thresholds.l_star = result.l_star;
    result.verdict = classify(traj, thresholds);
    json verdict_json = verdict_to_json(result.verdict);
    if (result.verdict.kind == VerdictKind::Spreading) {
      result.fit = fit_speed_and_drift(traj, 0.4);
      verdict_json["fit"] = fit_to_json(*result.fit);
    }
    write_json_file(dir / "verdict.json", verdict_json);
  } catch (const NumericalFailure& failure) {
    result.status = 4;
    result.error = failure.what();
    write_json_file(dir / "error.json", json{{"status", 4}, {"error", result.error}});
  } catch (const std::domain_error& failure) {
    result.status = 4;
    result.error = failure.what();
    write_json_file(dir / "error.json", json{{"status", 4}, {"error", result.error}});
  }
  return result;
}

SweepConfig load_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sweep file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sweep parse error: ") + e.what());
  }
  require(j.contains("base"), "sweep: missing 'base'");
  SweepConfig sweep;
  sweep.base = j.at("base");
  parse_config(sweep.base);  // fail early on a broken base
  sweep.max_parallel = field(j, "max_parallel", 1);
  require(sweep.max_parallel >= 1, "sweep: max_parallel must be positive");
  for (const json& axis : j.value("axes", json::array())) {
    require(axis.contains("path") && axis.contains("values"),
            "sweep: each axis needs 'path' and 'values'");
    std::vector<json> values = axis.at("values").get<std::vector<json>>();
    require(!values.empty(), "sweep: axis values must be nonempty");
    sweep.axes.emplace_back(axis.at("path").get<std::string>(), std::move(values));
  }
  return sweep;
}

namespace {

json::json_pointer to_pointer(const std::string& dotted) {
  std::string p = "/" + dotted;
  for (auto& ch : p) {
    if (ch == '.') ch = '/';
  }
  return json::json_pointer(p);
}

} // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& sweep) {
  size_t total = 1;
  for (const auto& [path, values] : sweep.axes) {
    const json::json_pointer ptr = to_pointer(path);
    require(sweep.base.contains(ptr), "sweep: unknown parameter path " + path);
    total *= values.size();
    require(total <= 1024, "sweep: grid exceeds the 1024-point cap");
  }
  const ExperimentConfig base = parse_config(sweep.base);
  const fs::path base_dir(base.outputs.dir);
  fs::create_directories(base_dir);

  std::vector<SweepRow> rows;
  for (size_t index = 0; index < total; ++index) {
    json doc = sweep.base;
    SweepRow row;
    size_t rem = index;
    // Last axis varies fastest; order is deterministic by construction.
    for (size_t ax = sweep.axes.size(); ax-- > 0;) {
      const auto& [path, values] = sweep.axes[ax];
      const json& value = values[rem % values.size()];
      rem /= values.size();
      doc[to_pointer(path)] = value;
      row.deltas.insert(row.deltas.begin(), path + "=" + value.dump());
    }
    ExperimentConfig config = parse_config(doc);
    config.outputs.dir = (base_dir / ("point_" + std::to_string(index))).string();
    row.result = run_experiment(config);
    rows.push_back(std::move(row));
  }

  std::ostringstream csv;
  csv << "point,deltas,status,error,s_star,l_star,s_mu_rho,verdict,s_hat,h_star_hat\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    std::string deltas;
    for (const auto& d : row.deltas) {
      if (!deltas.empty()) deltas += ";";
      deltas += d;
    }
    csv << i << ',' << deltas << ',' << row.result.status << ','
        << row.result.error << ',' << fmt(row.result.s_star) << ','
        << fmt(row.result.l_star) << ',' << fmt(row.result.s_mu_rho) << ','
        << to_string(row.result.verdict.kind) << ','
        << (row.result.fit ? fmt(row.result.fit->s_hat) : "") << ','
        << (row.result.fit ? fmt(row.result.fit->h_star_hat) : "") << '\n';
  }
  write_text(base_dir / "summary.csv", csv.str());
  return rows;
}

ReferenceBundle compute_reference_bundle(int M, Real t_end) {
  ReferenceBundle bundle;
  bundle.params = reference_params();
  bundle.eq = solve_equilibrium(bundle.params);
  bundle.s_star = critical_speed(bundle.params, 1e-9);
  bundle.l_star = critical_length(bundle.params, 1e-8);
  bundle.speed = solve_speed(bundle.params, 1e-6);
  bundle.wave = solve_semiwave(bundle.params, bundle.speed.s_mu_rho);

  const InitialData initial = make_initial_preset(3.0, 0.5, 0.5, 601);
  RunOptions options;
  options.dt = 2e-3;
  options.t_end = t_end;
  options.sample_every = 0.5;
  options.reference = &bundle.wave;
  bundle.spreading = run(bundle.params, initial, M, options);
  if (!bundle.spreading.error.empty()) {
    throw NumericalFailure("reference spreading run failed: " + bundle.spreading.error);
  }
  bundle.fit = fit_speed_and_drift(bundle.spreading, 0.4);
  return bundle;
}

ReproduceReport reproduce(const std::string& theorem_id, const std::string& out_dir) {
  ReproduceReport report;
  json& d = report.details;
  d["theorem"] = theorem_id;

  if (theorem_id == "dichotomy") {
    const ModelParams p = reference_params();
    const Real l_star = critical_length(p, 1e-8);
    VerdictThresholds thresholds;
    thresholds.l_star = l_star;

    RunOptions options;
    options.dt = 2e-3;
    options.t_end = 60.0;
    options.sample_every = 0.5;
    const Trajectory wide = run(p, make_initial_preset(3.0, 0.5, 0.5, 601), 400, options);
    const Trajectory narrow =
        run(p, make_initial_preset(0.5, 0.01, 0.01, 201), 400, options);
    const Verdict v_wide = classify(wide, thresholds);
    const Verdict v_narrow = classify(narrow, thresholds);
    d["l_star"] = l_star;
    d["wide"] = verdict_to_json(v_wide);
    d["narrow"] = verdict_to_json(v_narrow);
    report.pass = wide.error.empty() && narrow.error.empty() &&
                  v_wide.kind == VerdictKind::Spreading &&
                  v_narrow.kind == VerdictKind::Vanishing &&
                  v_narrow.final_max_density < 1e-4 &&
                  v_narrow.final_span <= 2.0 * l_star + 0.2;
  } else if (theorem_id == "speed") {
    const ReferenceBundle bundle = compute_reference_bundle();
    const Real s_hat_err_r =
        std::abs(bundle.fit.s_hat_right - bundle.speed.s_mu_rho) / bundle.speed.s_mu_rho;
    const Real s_hat_err_l =
        std::abs(bundle.fit.s_hat_left - bundle.speed.s_mu_rho) / bundle.speed.s_mu_rho;
    const SpeedSeries series = front_speed_series(bundle.spreading, 0.2);
    const Real mean_err =
        std::abs(series.trailing_mean_right - bundle.speed.s_mu_rho) / bundle.speed.s_mu_rho;
    d["s_mu_rho"] = bundle.speed.s_mu_rho;
    d["fit"] = fit_to_json(bundle.fit);
    d["relative_error_right"] = s_hat_err_r;
    d["relative_error_left"] = s_hat_err_l;
    d["trailing_mean_hprime"] = series.trailing_mean_right;
    d["trailing_mean_error"] = mean_err;
    report.pass = s_hat_err_r <= 0.02 && s_hat_err_l <= 0.02 && mean_err <= 0.02;
  } else if (theorem_id == "sharp_profile") {
    const ReferenceBundle bundle = compute_reference_bundle();
    const Real t_end = bundle.spreading.samples.back().t;
    const SpeedFit fit_a =
        fit_speed_and_drift_window(bundle.spreading, 0.5 * t_end, 0.75 * t_end);
    const SpeedFit fit_b =
        fit_speed_and_drift_window(bundle.spreading, 0.75 * t_end, t_end);
    const Real drift_gap_h = std::abs(fit_a.h_star_hat - fit_b.h_star_hat);
    const Real drift_gap_g = std::abs(fit_a.g_star_hat - fit_b.g_star_hat);

    const auto sample_at = [&](Real t) {
      const TrajectorySample* best = &bundle.spreading.samples.front();
      for (const auto& s : bundle.spreading.samples) {
        if (std::abs(s.t - t) < std::abs(best->t - t)) best = &s;
      }
      return *best;
    };
    const TrajectorySample final_sample = bundle.spreading.samples.back();
    const TrajectorySample quarter_sample = sample_at(0.25 * t_end);
    const Real err_cap = 0.05 * bundle.eq.u_star;
    d["drift_gap_h"] = drift_gap_h;
    d["drift_gap_g"] = drift_gap_g;
    d["profile_err_right_final"] = final_sample.profile_err_right;
    d["profile_err_left_final"] = final_sample.profile_err_left;
    d["profile_err_right_quarter"] = quarter_sample.profile_err_right;
    d["profile_err_left_quarter"] = quarter_sample.profile_err_left;
    report.pass = drift_gap_h <= 0.05 && drift_gap_g <= 0.05 &&
                  final_sample.profile_err_right <= err_cap &&
                  final_sample.profile_err_left <= err_cap &&
                  final_sample.profile_err_right < quarter_sample.profile_err_right &&
                  final_sample.profile_err_left < quarter_sample.profile_err_left;
  } else {
    throw ConfigError("reproduce: unknown theorem id '" + theorem_id +
                      "' (expected dichotomy, speed, or sharp_profile)");
  }

  d["pass"] = report.pass;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_json_file(fs::path(out_dir) / ("reproduce_" + theorem_id + ".json"), d);
  }
  return report;
}

} // namespace coopfb
