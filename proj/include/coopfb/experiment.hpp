#pragma once

#include "coopfb/analysis.hpp"
#include "coopfb/fbsolver.hpp"
#include "coopfb/semiwave.hpp"
#include "coopfb/spectral.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace coopfb {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct InitialConfig {
  Real h0{3.0};
  Real amp_u{0.5};
  Real amp_v{0.5};
  int n{401};
};

struct NumericsConfig {
  int M{400};
  Real dt{2e-3};
  Real t_end{60.0};
  Real sample_every{0.5};
  Real semiwave_dxi{0.015};
  Real speed_tol{1e-6};
  std::vector<Real> snapshot_times;
};

struct OutputConfig {
  std::string dir{"out"};
  bool csv{true};
  bool json{true};
};

struct ExperimentConfig {
  ModelParams params;
  InitialConfig initial;
  NumericsConfig numerics;
  OutputConfig outputs;
};

/// The paper-agnostic reference instance used throughout the test recipes:
/// d1 = d2 = 1, a = d = 1, b = c = 2, mu = rho = 1, quadratic losses.
ModelParams reference_params();

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& config);

struct ExperimentResult {
  int status{0};           // 0 ok, 3 validation failure, 4 numerical failure
  std::string error;
  Real s_star{}, l_star{}, mu_hat1{};
  Real s_mu_rho{};
  Verdict verdict;
  std::optional<SpeedFit> fit;
};

/// Full pipeline: validation, spectral summary, front-consistent speed,
/// semi-wave profile, free-boundary run, classification, fits. Writes every
/// artifact (manifest, trajectory CSV, snapshots, JSON reports) under
/// outputs.dir.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct SweepConfig {
  nlohmann::json base;  // an ExperimentConfig document
  std::vector<std::pair<std::string, std::vector<nlohmann::json>>> axes;
  int max_parallel{1};
};

SweepConfig load_sweep(const std::string& path);

struct SweepRow {
  std::vector<std::string> deltas;
  ExperimentResult result;
};

/// Runs every grid point (deterministic order), writing one summary row per
/// point; individual failures are recorded in the row and the sweep continues.
std::vector<SweepRow> run_sweep(const SweepConfig& sweep);

/// Everything the theorem recipes need from one reference spreading
/// experiment, computed once and shared.
struct ReferenceBundle {
  ModelParams params;
  Equilibrium eq;
  Real s_star{}, l_star{};
  SpeedResult speed;
  SemiWaveSolution wave;  // at the front-consistent speed
  Trajectory spreading;   // h0 = 3, amplitude 0.5, with profile diagnostics
  SpeedFit fit;
};

ReferenceBundle compute_reference_bundle(int M = 400, Real t_end = 60.0);

struct ReproduceReport {
  bool pass{false};
  nlohmann::json details;
};

/// theorem_id in {dichotomy, speed, sharp_profile}.
ReproduceReport reproduce(const std::string& theorem_id,
                          const std::string& out_dir = "");

} // namespace coopfb
