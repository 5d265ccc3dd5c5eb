#include "gradflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gradflow {

EnvelopeSpec EnvelopeSpec::from_potential(const Potential& potential, double gamma_star,
                                          double rho) {
    if (!potential.envelope)
        throw ConfigError("potential '" + potential.kind +
                          "' carries no envelope metadata; decay diagnostics unavailable");
    const EnvelopeMeta& m = *potential.envelope;
    EnvelopeSpec spec;
    spec.kind = m.nu == 1.0 ? Kind::exponential : Kind::polynomial;
    spec.mu = m.mu;
    spec.nu = m.nu;
    spec.gamma_star = gamma_star;
    spec.rho = rho;
    spec.omega11 = m.omega11;
    spec.omega12 = m.omega12;
    spec.v1 = m.v1;
    spec.v2 = m.v2;
    spec.validate();
    return spec;
}

void EnvelopeSpec::validate() const {
    if ((kind == Kind::exponential) != (nu == 1.0))
        throw ConfigError("envelope kind/exponent mismatch: exponential requires nu = 1");
    if (!(mu > 0.0) || !(gamma_star > 0.0) || nu < 1.0 || rho < 0.0)
        throw ConfigError("envelope constants out of range (mu, gamma* > 0, nu >= 1, rho >= 0)");
    if (!(omega11 > 0.0) || !(omega12 > 0.0) || !(v1 > 0.0) || !(v2 > 0.0))
        throw ConfigError("envelope sandwich constants must be positive");
}

double EnvelopeSpec::evaluate(double t, double t0, double epsilon, double d0) const {
    const double dt = t - t0 - epsilon;
    if (kind == Kind::exponential) {
        const double beta = std::pow(omega12 / omega11, 1.0 / v1);
        return beta * std::pow(d0, v2 / v1) * std::exp(-(mu * gamma_star / v1) * dt) + rho;
    }
    const double beta1 = std::pow(omega12 / omega11, 1.0 - nu);
    const double beta2 = mu * gamma_star * (nu - 1.0) / std::pow(omega11, 1.0 - nu);
    const double base = beta1 * std::pow(d0, v2 * (1.0 - nu)) + beta2 * dt;
    // negative base means the bound is vacuous at this early instant
    if (!(base > 0.0)) return std::numeric_limits<double>::infinity();
    return std::pow(base, 1.0 / (v1 * (1.0 - nu))) + rho;
}

namespace {

EnvelopeReport run_envelope_check(const Trajectory& traj, const Vec& x_star,
                                  const EnvelopeSpec& spec, const ControllerParams& params,
                                  const EnvelopeTolerance& tol) {
    if (traj.states.empty()) throw ConfigError("envelope check on an empty trajectory");
    EnvelopeReport report;
    const double d0 = (traj.states.front() - x_star).norm();

    auto margin_at = [&](std::size_t i) {
        const double env = spec.evaluate(traj.times[i], traj.t0, params.epsilon, d0);
        const double d = (traj.states[i] - x_star).norm();
        if (std::isinf(env)) return std::make_pair(env, env);
        const double slack = tol.abs + tol.rel * env;
        return std::make_pair(env + slack - d, env);
    };

    report.pass = true;
    report.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i : traj.sampling_indices()) {
        const auto [margin, env] = margin_at(i);
        ++report.instants_checked;
        if (margin < report.worst_margin) {
            report.worst_margin = margin;
            report.worst_time = traj.times[i];
            report.worst_distance = (traj.states[i] - x_star).norm();
            report.worst_envelope = env;
        }
        if (margin < 0.0) report.pass = false;
    }
    report.worst_intra_period_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto [margin, env] = margin_at(i);
        report.worst_intra_period_margin = std::min(report.worst_intra_period_margin, margin);
    }
    return report;
}

}  // namespace

EnvelopeReport check_exponential_envelope(const Trajectory& traj, const Vec& x_star,
                                          const EnvelopeSpec& spec,
                                          const ControllerParams& params,
                                          const Potential& potential,
                                          const EnvelopeTolerance& tol) {
    if (spec.kind != EnvelopeSpec::Kind::exponential)
        throw ConfigError("exponential envelope check received a polynomial spec");
    if (potential.kind != "power2" && potential.kind != "tracking")
        throw ConfigError("exponential envelope check requires a quadratic-distance potential, got '" +
                          potential.kind + "'");
    spec.validate();
    return run_envelope_check(traj, x_star, spec, params, tol);
}

EnvelopeReport check_polynomial_envelope(const Trajectory& traj, const Vec& x_star,
                                         const EnvelopeSpec& spec,
                                         const ControllerParams& params,
                                         const Potential& potential,
                                         const EnvelopeTolerance& tol) {
    if (spec.kind != EnvelopeSpec::Kind::polynomial)
        throw ConfigError("polynomial envelope check received an exponential spec");
    if (potential.kind != "power4")
        throw ConfigError("polynomial envelope check requires the quartic potential, got '" +
                          potential.kind + "'");
    spec.validate();
    return run_envelope_check(traj, x_star, spec, params, tol);
}

DescentReport check_sampled_descent(const Trajectory& traj, double residual_threshold,
                                    double m_p) {
    DescentReport report;
    report.residual_threshold = residual_threshold;
    const auto idx = traj.sampling_indices();
    if (idx.empty()) throw ConfigError("descent check on an empty trajectory");
    report.final_potential = traj.potential_values.back();
    report.pass = true;
    for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
        const double p_now = traj.potential_values[idx[i]];
        if (p_now - m_p < residual_threshold) break;
        ++report.instants_checked;
        const double p_next = traj.potential_values[idx[i + 1]];
        if (p_next > p_now) {
            ++report.violations;
            report.pass = false;
            if (!report.first_violation_time)
                report.first_violation_time = traj.times[idx[i + 1]];
            report.worst_increase = std::max(report.worst_increase, p_next - p_now);
        }
    }
    return report;
}

TubeReport check_tube_attraction(const Trajectory& traj, const std::function<Vec(double)>& curve,
                                 double rho) {
    if (!(rho > 0.0)) throw ConfigError("tube radius rho must be positive");
    TubeReport report;
    report.rho = rho;
    const auto idx = traj.sampling_indices();
    if (idx.empty()) throw ConfigError("tube check on an empty trajectory");

    std::vector<double> distances(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        distances[i] = (traj.states[idx[i]] - curve(traj.times[idx[i]])).norm();
    report.instants_checked = static_cast<int>(idx.size());
    report.final_distance = distances.back();

    // first sampling instant from which the tube is never left again
    std::size_t entry = idx.size();
    for (std::size_t i = idx.size(); i-- > 0;) {
        if (distances[i] > rho) break;
        entry = i;
    }
    if (entry < idx.size()) {
        report.pass = true;
        report.entry_time = traj.times[idx[entry]];
        double worst = 0.0;
        for (std::size_t i = entry; i < idx.size(); ++i) worst = std::max(worst, distances[i]);
        report.max_distance_tail = worst;
    }

    for (std::size_t i = 0; i < traj.size(); ++i)
        report.max_intra_period_distance =
            std::max(report.max_intra_period_distance, (traj.states[i] - curve(traj.times[i])).norm());

    // informational least-squares fit of log(d - rho) over the approach phase
    const std::size_t fit_end = entry < idx.size() ? entry : idx.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < fit_end; ++i) {
        const double excess = distances[i] - rho;
        if (excess <= 1e-12) continue;
        const double tx = traj.times[idx[i]] - traj.t0 - traj.epsilon;
        const double ty = std::log(excess);
        sx += tx;
        sy += ty;
        sxx += tx * tx;
        sxy += tx * ty;
        ++n;
    }
    if (n >= 2 && sxx * n - sx * sx > 0.0) {
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double intercept = (sy - slope * sx) / n;
        report.fitted_rate = -slope;
        const double d0 = distances.front();
        report.fitted_beta = d0 > 0.0 ? std::exp(intercept) / d0 : 0.0;
    }
    return report;
}

ObstacleReport check_obstacle_run(const Trajectory& traj, const Workspace& ws, const Vec& x_star,
                                  double tol) {
    if (traj.states.empty()) throw ConfigError("obstacle check on an empty trajectory");
    ObstacleReport report;
    report.tol = tol;
    report.min_phi = std::numeric_limits<double>::infinity();
    const auto fields = ws.all_fields();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        for (const auto* f : fields) {
            const double v = f->eval(traj.states[i]);
            if (v < report.min_phi) {
                report.min_phi = v;
                report.min_phi_time = traj.times[i];
            }
            if (v <= 0.0 && !report.first_violation_time)
                report.first_violation_time = traj.times[i];
        }
    }
    report.collision_free = !report.first_violation_time.has_value() && report.min_phi > 0.0;
    report.terminal_distance = (traj.states.back() - x_star).norm();
    report.converged = report.terminal_distance <= tol && !traj.truncated;
    report.pass = report.collision_free && report.converged;
    return report;
}

OrderTestReport order_test_one_step(const ControlSystem& sys, const BracketScheme& scheme,
                                    const Potential& potential, double gamma, const Vec& x0,
                                    double t0, const std::vector<double>& eps_list, int substeps,
                                    double slope_min) {
    if (eps_list.size() < 3)
        throw ConfigError("order test needs at least three epsilon values");
    for (std::size_t i = 0; i + 1 < eps_list.size(); ++i) {
        if (!(eps_list[i + 1] < eps_list[i]) || !(eps_list[i + 1] > 0.0))
            throw ConfigError("order test epsilon list must be positive and decreasing");
        if (i + 2 < eps_list.size()) {
            const double r1 = eps_list[i + 1] / eps_list[i];
            const double r2 = eps_list[i + 2] / eps_list[i + 1];
            if (std::abs(r1 - r2) > 1e-9 * r1)
                throw ConfigError("order test epsilon list must be geometric");
        }
    }

    OrderTestReport report;
    report.eps_values = eps_list;
    report.slope_min = slope_min;
    const Vec grad0 = potential.grad(x0, t0);

    for (double eps : eps_list) {
        ControllerParams params;
        params.gamma = gamma;
        params.epsilon = eps;
        SolverSettings settings;
        settings.substeps_per_period = substeps;
        settings.horizon = eps;
        settings.record_controls = false;
        const Trajectory traj =
            integrate_pi_eps(sys, scheme, potential, params, x0, t0, settings);
        const Vec reference = x0 - eps * gamma * grad0;
        report.errors.push_back((traj.states.back() - reference).norm());
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (report.errors[i] < 1e-13) continue;  // degenerate point, excluded from fit
        const double lx = std::log(eps_list[i]);
        const double ly = std::log(report.errors[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) {
        report.degenerate = true;
        report.slope = std::numeric_limits<double>::quiet_NaN();
        report.pass = false;
        return report;
    }
    report.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    report.pass = report.slope >= slope_min;
    return report;
}

}  // namespace gradflow
