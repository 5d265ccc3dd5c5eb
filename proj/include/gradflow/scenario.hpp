#pragma once

#include "gradflow/builtins.hpp"
#include "gradflow/diagnostics.hpp"
#include "gradflow/integrators.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gradflow {

using Json = nlohmann::ordered_json;

/// Reference curve plus optional feedforward channel parsed from a config.
struct CurveSpec {
    std::function<Vec(double)> position;        ///< t -> n-vector
    std::function<Vec(double)> feedforward;     ///< t -> m-vector, when available
    std::string description;
};

/// One diagnostic request from the config's checks list.
struct CheckSpec {
    std::string kind;          ///< exponential_envelope | polynomial_envelope |
                               ///< sampled_descent | tube_attraction |
                               ///< obstacle_run | order_test
    bool report_only = false;  ///< reported in the summary without gating the exit code
    double tol_abs = 1e-3;
    double tol_rel = 0.05;
    std::optional<double> gamma_star;  ///< defaults to the controller gain
    double rho = 0.0;
    double residual = 1e-4;
    double tol = 0.2;
    std::vector<double> eps_list;
    double slope_min = 1.4;
    int substeps = 256;
};

struct OutputSpec {
    std::string csv_prefix;  ///< one CSV per integrator kind when non-empty
    std::string summary;     ///< summary JSON path when non-empty
};

struct ScenarioConfig {
    std::string name;
    ControlSystem system;
    BracketScheme scheme;
    Potential potential;
    std::string potential_kind;
    std::optional<Vec> x_star;
    std::optional<CurveSpec> curve;
    std::optional<Workspace> workspace;
    ControllerParams params;
    bool auto_epsilon = false;
    Vec x0;
    double t0 = 0.0;
    SolverSettings solver;
    std::vector<TrajectoryKind> integrators;
    std::vector<CheckSpec> checks;
    OutputSpec outputs;
};

/// Parses and validates a scenario file (strict: unknown keys are errors,
/// cross references and dimensions are resolved here).
ScenarioConfig load_config(const std::filesystem::path& path);

/// As load_config, for an already-parsed document; base_dir resolves
/// relative table paths.
ScenarioConfig parse_config(const Json& doc, const std::filesystem::path& base_dir);

struct CheckOutcome {
    std::string kind;
    bool pass = false;
    bool report_only = false;
    Json details;
};

struct ScenarioResult {
    std::vector<Trajectory> trajectories;
    std::vector<CheckOutcome> checks;
    std::vector<std::string> errors;  ///< collected per-item failures; the run continues
    Json extras;                      ///< switch crossings, critical-point flags, tuned epsilon

    bool all_required_pass() const;
};

/// Runs the requested integrators and checks; deterministic for a given
/// config. Item failures are collected, not thrown.
ScenarioResult run_scenario(const ScenarioConfig& config);

/// CSV export: header t,x1,...,xn,P[,u1,...,um]; one row per recorded
/// substep; 17 significant digits.
void emit_csv(const Trajectory& traj, const std::filesystem::path& path);

/// Structured summary of the scenario outcome.
void emit_summary(const ScenarioConfig& config, const ScenarioResult& result,
                  const std::filesystem::path& path);

Json summary_document(const ScenarioConfig& config, const ScenarioResult& result);

/// 17-significant-digit locale-independent float formatting (CSV cells).
std::string format_double(double v);

}  // namespace gradflow
