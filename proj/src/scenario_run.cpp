#include "gradflow/scenario.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

namespace gradflow {

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto res =
        std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

bool ScenarioResult::all_required_pass() const {
    for (const auto& check : checks)
        if (!check.report_only && !check.pass) return false;
    return errors.empty();
}

namespace {

Json vec_to_json(const Vec& v) {
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

const Trajectory* find_trajectory(const ScenarioResult& result, TrajectoryKind kind) {
    for (const auto& traj : result.trajectories)
        if (traj.kind == kind) return &traj;
    return nullptr;
}

Json envelope_details(const EnvelopeReport& report) {
    Json j;
    j["worst_margin"] = report.worst_margin;
    j["worst_time"] = report.worst_time;
    j["worst_distance"] = report.worst_distance;
    j["worst_envelope"] = report.worst_envelope;
    j["instants_checked"] = report.instants_checked;
    j["worst_intra_period_margin"] = report.worst_intra_period_margin;
    return j;
}

void run_checks(const ScenarioConfig& config, ScenarioResult& result) {
    const Trajectory* pi = find_trajectory(result, TrajectoryKind::pi_epsilon);

    for (const auto& spec : config.checks) {
        CheckOutcome outcome;
        outcome.kind = spec.kind;
        outcome.report_only = spec.report_only;
        try {
            if (spec.kind == "order_test") {
                std::vector<double> eps_list = spec.eps_list;
                if (eps_list.empty()) eps_list = {0.1, 0.05, 0.025, 0.0125};
                const auto report = order_test_one_step(
                    config.system, config.scheme, config.potential, config.params.gamma,
                    config.x0, config.t0, eps_list, spec.substeps, spec.slope_min);
                outcome.pass = report.pass;
                outcome.details["slope"] = report.slope;
                outcome.details["slope_min"] = report.slope_min;
                outcome.details["degenerate"] = report.degenerate;
                outcome.details["eps"] = report.eps_values;
                outcome.details["errors"] = report.errors;
                result.checks.push_back(std::move(outcome));
                continue;
            }

            if (!pi) throw ConfigError(spec.kind + " requires the pi_epsilon integrator");

            if (spec.kind == "exponential_envelope" || spec.kind == "polynomial_envelope") {
                const double gamma_star = spec.gamma_star.value_or(config.params.gamma);
                EnvelopeSpec env = EnvelopeSpec::from_potential(config.potential, gamma_star,
                                                                spec.rho);
                EnvelopeTolerance tol{spec.tol_abs, spec.tol_rel};
                const EnvelopeReport report =
                    spec.kind == "exponential_envelope"
                        ? check_exponential_envelope(*pi, *config.x_star, env, config.params,
                                                     config.potential, tol)
                        : check_polynomial_envelope(*pi, *config.x_star, env, config.params,
                                                    config.potential, tol);
                outcome.pass = report.pass;
                outcome.details = envelope_details(report);
            } else if (spec.kind == "sampled_descent") {
                const double m_p = config.potential.lower_bound.value_or(0.0);
                const DescentReport report = check_sampled_descent(*pi, spec.residual, m_p);
                outcome.pass = report.pass;
                outcome.details["violations"] = report.violations;
                outcome.details["instants_checked"] = report.instants_checked;
                outcome.details["final_potential"] = report.final_potential;
                outcome.details["residual"] = report.residual_threshold;
                if (report.first_violation_time)
                    outcome.details["first_violation_time"] = *report.first_violation_time;
            } else if (spec.kind == "tube_attraction") {
                const TubeReport report =
                    check_tube_attraction(*pi, config.curve->position, spec.rho);
                outcome.pass = report.pass;
                outcome.details["rho"] = report.rho;
                if (report.entry_time) outcome.details["entry_time"] = *report.entry_time;
                outcome.details["final_distance"] = report.final_distance;
                outcome.details["max_distance_tail"] = report.max_distance_tail;
                outcome.details["max_intra_period_distance"] = report.max_intra_period_distance;
                outcome.details["fitted_rate"] = report.fitted_rate;
                outcome.details["fitted_beta"] = report.fitted_beta;
            } else if (spec.kind == "obstacle_run") {
                const ObstacleReport report =
                    check_obstacle_run(*pi, *config.workspace, *config.x_star, spec.tol);
                outcome.pass = report.pass;
                outcome.details["collision_free"] = report.collision_free;
                outcome.details["converged"] = report.converged;
                outcome.details["min_phi"] = report.min_phi;
                outcome.details["min_phi_time"] = report.min_phi_time;
                outcome.details["terminal_distance"] = report.terminal_distance;
                outcome.details["tol"] = report.tol;
                if (report.first_violation_time)
                    outcome.details["first_violation_time"] = *report.first_violation_time;
            } else {
                throw ConfigError("unknown check kind '" + spec.kind + "'");
            }
        } catch (const Error& err) {
            outcome.pass = false;
            outcome.details["error"] = err.what();
            result.errors.push_back(spec.kind + ": " + err.what());
        }
        result.checks.push_back(std::move(outcome));
    }
}

void record_switch_crossings(const ScenarioConfig& config, ScenarioResult& result) {
    if (!config.potential.switch_surface) return;
    Json crossings = Json::array();
    for (const auto& traj : result.trajectories) {
        int count = 0;
        double max_jump = 0.0;
        double first_time = 0.0;
        double prev = 0.0;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const double s = config.potential.switch_surface(traj.states[i]);
            if (i > 0 && s * prev < 0.0) {
                if (count == 0) first_time = traj.times[i];
                ++count;
                max_jump = std::max(max_jump, config.potential.switch_jump(traj.states[i]));
            }
            prev = s;
        }
        Json entry;
        entry["trajectory"] = to_string(traj.kind);
        entry["crossings"] = count;
        if (count > 0) {
            entry["first_time"] = first_time;
            entry["max_value_jump"] = max_jump;
        }
        crossings.push_back(std::move(entry));
    }
    result.extras["switch_surface_crossings"] = std::move(crossings);
}

void record_critical_point_flags(const ScenarioConfig& config, ScenarioResult& result) {
    if (!config.workspace || !config.x_star) return;
    constexpr double kGradTol = 1e-2;
    constexpr double kDistTol = 0.25;
    Json flags = Json::array();
    for (const auto& traj : result.trajectories) {
        if (traj.states.empty()) continue;
        const Vec& xT = traj.states.back();
        const double tT = traj.times.back();
        double grad_norm = std::numeric_limits<double>::quiet_NaN();
        try {
            grad_norm = config.potential.grad(xT, tT).norm();
        } catch (const Error&) {
            // leave NaN; the trajectory record already notes the exit
        }
        const double dist = (xT - *config.x_star).norm();
        Json entry;
        entry["trajectory"] = to_string(traj.kind);
        entry["final_gradient_norm"] = grad_norm;
        entry["final_target_distance"] = dist;
        entry["spurious_critical_point"] = grad_norm < kGradTol && dist > kDistTol;
        flags.push_back(std::move(entry));
    }
    result.extras["critical_point_diagnostics"] = std::move(flags);
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& config) {
    ScenarioResult result;
    result.extras = Json::object();

    ControllerParams params = config.params;
    if (config.auto_epsilon) {
        const auto tuned = auto_tune_epsilon(config.system, config.scheme, config.potential,
                                             params, config.x0, config.t0, config.solver);
        params.epsilon = tuned.epsilon;
        result.extras["auto_epsilon"] = {{"epsilon", tuned.epsilon},
                                         {"halvings", tuned.halvings},
                                         {"descent_ok", tuned.descent_ok}};
    }

    for (TrajectoryKind kind : config.integrators) {
        try {
            switch (kind) {
                case TrajectoryKind::pi_epsilon:
                    result.trajectories.push_back(integrate_pi_eps(
                        config.system, config.scheme, config.potential, params, config.x0,
                        config.t0, config.solver));
                    break;
                case TrajectoryKind::classical:
                    result.trajectories.push_back(integrate_classical(
                        config.system, config.scheme, config.potential, params, config.x0,
                        config.t0, config.solver));
                    break;
                case TrajectoryKind::gradient_flow:
                    result.trajectories.push_back(
                        integrate_gradient_flow(config.potential, params.gamma, config.x0,
                                                config.t0, params, config.solver));
                    break;
            }
        } catch (const Error& err) {
            result.errors.push_back(std::string(to_string(kind)) + ": " + err.what());
        }
    }

    // checks run against the possibly retuned controller parameters
    ScenarioConfig effective = config;
    effective.params = params;
    run_checks(effective, result);
    record_switch_crossings(config, result);
    record_critical_point_flags(config, result);
    return result;
}

void emit_csv(const Trajectory& traj, const std::filesystem::path& path) {
    if (traj.times.empty()) throw ConfigError("refusing to export an empty trajectory");
    std::string out;
    out.reserve(traj.size() * 96);
    const Eigen::Index n = traj.states.front().size();
    const bool with_controls = !traj.controls.empty();
    const Eigen::Index m = with_controls ? traj.controls.front().size() : 0;

    out += "t";
    for (Eigen::Index i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
    out += ",P";
    for (Eigen::Index i = 1; i <= m; ++i) out += ",u" + std::to_string(i);
    out += "\n";

    for (std::size_t row = 0; row < traj.size(); ++row) {
        out += format_double(traj.times[row]);
        for (Eigen::Index i = 0; i < n; ++i) {
            out += ',';
            out += format_double(traj.states[row](i));
        }
        out += ',';
        out += format_double(traj.potential_values[row]);
        if (with_controls) {
            for (Eigen::Index i = 0; i < m; ++i) {
                out += ',';
                out += format_double(traj.controls[row](i));
            }
        }
        out += '\n';
    }

    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot write CSV '" + path.string() + "'");
    file << out;
}

Json summary_document(const ScenarioConfig& config, const ScenarioResult& result) {
    Json doc;
    doc["scenario"] = config.name;
    doc["system"] = config.system.name;
    doc["potential"] = config.potential_kind;
    doc["gamma"] = config.params.gamma;
    doc["epsilon"] = config.params.epsilon;

    Json checks = Json::array();
    for (const auto& outcome : result.checks) {
        Json c;
        c["kind"] = outcome.kind;
        c["pass"] = outcome.pass;
        c["report_only"] = outcome.report_only;
        c["details"] = outcome.details;
        checks.push_back(std::move(c));
    }
    doc["checks"] = std::move(checks);

    Json trajectories = Json::array();
    for (const auto& traj : result.trajectories) {
        Json t;
        t["kind"] = to_string(traj.kind);
        t["samples"] = traj.size();
        t["truncated"] = traj.truncated;
        if (traj.exit) {
            t["exit"] = {{"time", traj.exit->time},
                         {"state", vec_to_json(traj.exit->state)},
                         {"reason", traj.exit->reason}};
        }
        if (!traj.states.empty()) {
            t["final_time"] = traj.times.back();
            t["final_state"] = vec_to_json(traj.states.back());
            t["final_potential"] = traj.potential_values.back();
        }
        trajectories.push_back(std::move(t));
    }
    doc["trajectories"] = std::move(trajectories);

    doc["errors"] = result.errors;
    if (!result.extras.empty()) doc["diagnostics"] = result.extras;
    doc["all_required_pass"] = result.all_required_pass();
    return doc;
}

void emit_summary(const ScenarioConfig& config, const ScenarioResult& result,
                  const std::filesystem::path& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot write summary '" + path.string() + "'");
    file << summary_document(config, result).dump(2) << "\n";
}

}  // namespace gradflow
