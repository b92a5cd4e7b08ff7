#include "coopfb/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

using namespace coopfb;
using nlohmann::json;

int emit_error(int status, const std::string& message) {
  json err{{"status", status}, {"error", message}};
  std::cout << err.dump(2) << std::endl;
  return status;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for a two-species cooperative system with "
               "Stefan free boundaries"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string format = "json";
  double speed_arg = 0.0;
  std::string theorem_id;

  auto add_common = [&](CLI::App* cmd, bool need_config) {
    auto* opt = cmd->add_option("--config", config_path, "experiment config JSON");
    if (need_config) opt->required();
    cmd->add_option("--out", out_dir, "output directory override");
    cmd->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  auto* cmd_validate = app.add_subcommand("validate", "check params against the invariants");
  add_common(cmd_validate, true);
  auto* cmd_eq = app.add_subcommand("equilibrium", "print the positive equilibrium");
  add_common(cmd_eq, true);
  auto* cmd_spectral = app.add_subcommand("spectral", "critical speed, tail rate, critical length");
  add_common(cmd_spectral, true);
  cmd_spectral->add_option("--speed", speed_arg, "wave speed for the tail rate");
  auto* cmd_semiwave = app.add_subcommand("semiwave", "solve the semi-wave at a given speed");
  add_common(cmd_semiwave, true);
  cmd_semiwave->add_option("--speed", speed_arg, "wave speed")->required();
  auto* cmd_speed = app.add_subcommand("speed", "front-consistent speed by bisection");
  add_common(cmd_speed, true);
  auto* cmd_simulate = app.add_subcommand("simulate", "full free-boundary experiment");
  add_common(cmd_simulate, true);
  auto* cmd_sweep = app.add_subcommand("sweep", "run a parameter sweep");
  add_common(cmd_sweep, true);
  auto* cmd_reproduce = app.add_subcommand("reproduce", "run a bundled verification recipe");
  cmd_reproduce->add_option("theorem", theorem_id, "dichotomy, speed, or sharp_profile")
      ->required();
  cmd_reproduce->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_reproduce->parsed()) {
      const ReproduceReport report = reproduce(theorem_id, out_dir);
      std::cout << report.details.dump(2) << std::endl;
      return report.pass ? 0 : 4;
    }

    ExperimentConfig config = load_config(config_path);
    if (!out_dir.empty()) config.outputs.dir = out_dir;

    if (cmd_validate->parsed()) {
      const ValidationReport report = validate(config.params, /*require_H=*/true);
      json out{{"ok", report.ok()},
               {"violations", report.violations},
               {"warnings", report.warnings}};
      std::cout << out.dump(2) << std::endl;
      return report.ok() ? 0 : 3;
    }

    const ValidationReport report = validate(config.params, /*require_H=*/true);
    if (!report.ok()) {
      json out{{"status", 3},
               {"error", "parameter validation failed"},
               {"violations", report.violations}};
      std::cout << out.dump(2) << std::endl;
      return 3;
    }

    if (cmd_eq->parsed()) {
      const Equilibrium eq = solve_equilibrium(config.params);
      std::cout << json{{"u_star", eq.u_star}, {"v_star", eq.v_star}}.dump(2)
                << std::endl;
      return 0;
    }
    if (cmd_spectral->parsed()) {
      const Equilibrium eq = solve_equilibrium(config.params);
      json out{{"s_star", critical_speed(config.params, 1e-9)},
               {"mu_hat1", tail_rate(config.params, speed_arg, eq)},
               {"l_star", critical_length(config.params, 1e-8)}};
      std::cout << out.dump(2) << std::endl;
      return 0;
    }
    if (cmd_semiwave->parsed()) {
      SemiWaveSettings settings;
      settings.dxi_target = config.numerics.semiwave_dxi;
      const SemiWaveSolution wave = solve_semiwave(config.params, speed_arg, settings);
      json out{{"s", wave.s},
               {"L", wave.L},
               {"dphi0", wave.dphi0},
               {"dpsi0", wave.dpsi0},
               {"fitted_tail", wave.fitted_tail},
               {"residual_max", wave.residual_max}};
      std::cout << out.dump(2) << std::endl;
      if (!config.outputs.dir.empty()) {
        ExperimentConfig profile_cfg = config;
        std::filesystem::create_directories(profile_cfg.outputs.dir);
        std::ofstream csv(std::filesystem::path(profile_cfg.outputs.dir) /
                          "semiwave_profile.csv");
        csv << "xi,phi,psi\n";
        for (Eigen::Index i = 0; i < wave.xi.size(); ++i) {
          char line[128];
          std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", wave.xi[i],
                        wave.phi[i], wave.psi[i]);
          csv << line;
        }
      }
      return 0;
    }
    if (cmd_speed->parsed()) {
      SemiWaveSettings settings;
      settings.dxi_target = config.numerics.semiwave_dxi;
      const SpeedResult speed =
          solve_speed(config.params, config.numerics.speed_tol, settings);
      json f_samples = json::array();
      for (const auto& [s, f] : speed.f_values) f_samples.push_back({{"s", s}, {"f", f}});
      json out{{"s_mu_rho", speed.s_mu_rho},
               {"bracket_width", speed.bracket_width},
               {"f_values", f_samples}};
      std::cout << out.dump(2) << std::endl;
      return 0;
    }
    if (cmd_simulate->parsed()) {
      const ExperimentResult result = run_experiment(config);
      json out{{"status", result.status},
               {"s_star", result.s_star},
               {"l_star", result.l_star},
               {"s_mu_rho", result.s_mu_rho},
               {"verdict", to_string(result.verdict.kind)}};
      if (!result.error.empty()) out["error"] = result.error;
      std::cout << out.dump(2) << std::endl;
      return result.status;
    }
    if (cmd_sweep->parsed()) {
      const SweepConfig sweep = load_sweep(config_path);
      const auto rows = run_sweep(sweep);
      json out = json::array();
      for (const auto& row : rows) {
        out.push_back({{"deltas", row.deltas},
                       {"status", row.result.status},
                       {"verdict", to_string(row.result.verdict.kind)},
                       {"s_mu_rho", row.result.s_mu_rho}});
      }
      std::cout << out.dump(2) << std::endl;
      return 0;
    }
  } catch (const coopfb::ConfigError& e) {
    return emit_error(2, e.what());
  } catch (const coopfb::NumericalFailure& e) {
    return emit_error(4, e.what());
  } catch (const std::domain_error& e) {
    return emit_error(3, e.what());
  } catch (const std::exception& e) {
    return emit_error(4, e.what());
  }
  return 0;
}
