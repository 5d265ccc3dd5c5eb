#include "gradflow/integrators.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace gradflow {

const char* to_string(TrajectoryKind kind) {
    switch (kind) {
        case TrajectoryKind::pi_epsilon: return "pi_epsilon";
        case TrajectoryKind::classical: return "classical";
        case TrajectoryKind::gradient_flow: return "gradient_flow";
    }
    return "unknown";
}

void SolverSettings::validate() const {
    if (substeps_per_period < 20)
        throw ConfigError("substeps_per_period must be at least 20 to resolve the dithers (got " +
                          std::to_string(substeps_per_period) + ")");
    if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
}

std::vector<std::size_t> Trajectory::sampling_indices() const {
    std::vector<std::size_t> idx;
    if (substeps_per_interval <= 0) return idx;
    for (std::size_t i = 0; i < times.size(); i += static_cast<std::size_t>(substeps_per_interval))
        idx.push_back(i);
    return idx;
}

namespace {

struct GridClock {
    double t0;
    double epsilon;
    int substeps;

    /// t0 + epsilon * (j*M + s) / M without repeated addition.
    double at(long interval, int substep) const {
        const double steps = static_cast<double>(interval) * substeps + substep;
        return t0 + epsilon * (steps / substeps);
    }
};

using Derivative = std::function<Vec(const Vec&, double)>;

Vec rk4_step(const Derivative& f, const Vec& x, double t, double h) {
    const Vec k1 = f(x, t);
    const Vec k2 = f(x + 0.5 * h * k1, t + 0.5 * h);
    const Vec k3 = f(x + 0.5 * h * k2, t + 0.5 * h);
    const Vec k4 = f(x + h * k3, t + h);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

long interval_count(double horizon, double epsilon) {
    return static_cast<long>(std::ceil(horizon / epsilon - 1e-12));
}

struct Recorder {
    Trajectory traj;
    const Potential* potential;
    const SolverSettings* settings;

    Recorder(TrajectoryKind kind, const Potential& pot, const SolverSettings& s,
             double t0, double epsilon) {
        traj.kind = kind;
        traj.t0 = t0;
        traj.epsilon = epsilon;
        traj.substeps_per_interval = s.substeps_per_period;
        potential = &pot;
        settings = &s;
    }

    /// Appends the point; returns false when the domain guard rejects it or
    /// the potential cannot be evaluated there (trajectory truncates).
    bool record(double t, const Vec& x, const Vec* u) {
        if (!x.allFinite()) {
            traj.truncated = true;
            traj.exit = ExitRecord{t, x, "non-finite state"};
            return false;
        }
        if (settings->domain_guard && !settings->domain_guard(x, t)) {
            traj.truncated = true;
            traj.exit = ExitRecord{t, x, "domain guard violated"};
            return false;
        }
        double p = 0.0;
        try {
            p = potential->eval(x, t);
        } catch (const Error& err) {
            traj.truncated = true;
            traj.exit = ExitRecord{t, x, err.what()};
            return false;
        }
        traj.times.push_back(t);
        traj.states.push_back(x);
        traj.potential_values.push_back(p);
        if (u) traj.controls.push_back(*u);
        return true;
    }
};

}  // namespace

Trajectory integrate_pi_eps(const ControlSystem& sys, const BracketScheme& scheme,
                            const Potential& potential, const ControllerParams& params,
                            const Vec& x0, double t0, const SolverSettings& settings) {
    sys.validate();
    scheme.validate(sys);
    params.validate();
    settings.validate();

    const GridClock clock{t0, params.epsilon, settings.substeps_per_period};
    const long intervals = interval_count(settings.horizon, params.epsilon);
    const double h = params.epsilon / settings.substeps_per_period;

    Recorder rec(TrajectoryKind::pi_epsilon, potential, settings, t0, params.epsilon);
    Vec x = x0;

    for (long j = 0; j < intervals; ++j) {
        const double tj = clock.at(j, 0);
        CoefficientVector a;
        try {
            a = compute_a(sys, scheme, potential, params.gamma, x, tj, settings.cond_limit);
        } catch (const RankDegeneracyError& err) {
            std::ostringstream os;
            os << "rank degeneracy at sampling instant j=" << j << ", t_j=" << tj << ": "
               << err.what();
            throw RankDegeneracyError(os.str(), err.condition());
        }
        auto control_at = [&](double t) { return eval_control(sys, scheme, params, a, t); };
        auto xdot = [&](const Vec& y, double t) -> Vec {
            const Vec u = control_at(t);
            Vec dy = Vec::Zero(sys.state_dim);
            for (int k = 1; k <= sys.control_dim; ++k) dy += eval_field(sys, k, y, t) * u(k - 1);
            return dy;
        };

        if (j == 0) {
            const Vec u0 = control_at(tj);
            if (!rec.record(tj, x, settings.record_controls ? &u0 : nullptr)) break;
        }
        bool exited = false;
        for (int s = 0; s < settings.substeps_per_period; ++s) {
            const double tl = clock.at(j, s);
            x = rk4_step(xdot, x, tl, h);
            const double tn = clock.at(j, s + 1);
            const Vec un = control_at(tn);
            if (!rec.record(tn, x, settings.record_controls ? &un : nullptr)) {
                exited = true;
                break;
            }
        }
        if (exited) break;
    }
    return rec.traj;
}

Trajectory integrate_classical(const ControlSystem& sys, const BracketScheme& scheme,
                               const Potential& potential, const ControllerParams& params,
                               const Vec& x0, double t0, const SolverSettings& settings) {
    sys.validate();
    scheme.validate(sys);
    params.validate();
    settings.validate();

    const GridClock clock{t0, params.epsilon, settings.substeps_per_period};
    const long intervals = interval_count(settings.horizon, params.epsilon);
    const double h = params.epsilon / settings.substeps_per_period;
    const long total_steps = intervals * settings.substeps_per_period;

    auto control_at = [&](const Vec& y, double t) {
        const CoefficientVector a =
            compute_a(sys, scheme, potential, params.gamma, y, t, settings.cond_limit);
        return eval_control(sys, scheme, params, a, t);
    };
    auto xdot = [&](const Vec& y, double t) -> Vec {
        const Vec u = control_at(y, t);
        Vec dy = Vec::Zero(sys.state_dim);
        for (int k = 1; k <= sys.control_dim; ++k) dy += eval_field(sys, k, y, t) * u(k - 1);
        return dy;
    };

    Recorder rec(TrajectoryKind::classical, potential, settings, t0, params.epsilon);
    Vec x = x0;
    {
        const Vec u0 = control_at(x, t0);
        if (!rec.record(t0, x, settings.record_controls ? &u0 : nullptr)) return rec.traj;
    }
    for (long i = 0; i < total_steps; ++i) {
        const long j = i / settings.substeps_per_period;
        const int s = static_cast<int>(i % settings.substeps_per_period);
        const double tl = clock.at(j, s);
        x = rk4_step(xdot, x, tl, h);
        const double tn = clock.at(j, s + 1);
        const Vec un = control_at(x, tn);
        if (!rec.record(tn, x, settings.record_controls ? &un : nullptr)) break;
    }
    return rec.traj;
}

Trajectory integrate_gradient_flow(const Potential& potential, double gamma, const Vec& x0,
                                   double t0, const ControllerParams& params,
                                   const SolverSettings& settings) {
    params.validate();
    settings.validate();
    if (!(gamma > 0.0)) throw ConfigError("gain gamma must be positive");

    const GridClock clock{t0, params.epsilon, settings.substeps_per_period};
    const long intervals = interval_count(settings.horizon, params.epsilon);
    const double h = params.epsilon / settings.substeps_per_period;
    const long total_steps = intervals * settings.substeps_per_period;

    auto xdot = [&](const Vec& y, double t) -> Vec { return -gamma * potential.grad(y, t); };

    Recorder rec(TrajectoryKind::gradient_flow, potential, settings, t0, params.epsilon);
    Vec x = x0;
    if (!rec.record(t0, x, nullptr)) return rec.traj;
    for (long i = 0; i < total_steps; ++i) {
        const long j = i / settings.substeps_per_period;
        const int s = static_cast<int>(i % settings.substeps_per_period);
        const double tl = clock.at(j, s);
        try {
            x = rk4_step(xdot, x, tl, h);
        } catch (const Error& err) {
            rec.traj.truncated = true;
            rec.traj.exit = ExitRecord{tl, x, err.what()};
            break;
        }
        if (!rec.record(clock.at(j, s + 1), x, nullptr)) break;
    }
    return rec.traj;
}

AutoEpsilonResult auto_tune_epsilon(const ControlSystem& sys, const BracketScheme& scheme,
                                    const Potential& potential, ControllerParams params,
                                    const Vec& x0, double t0, const SolverSettings& settings,
                                    int probe_intervals, int max_halvings) {
    AutoEpsilonResult result;
    result.epsilon = params.epsilon;
    for (int attempt = 0; attempt <= max_halvings; ++attempt) {
        SolverSettings probe = settings;
        probe.horizon = params.epsilon * probe_intervals;
        probe.record_controls = false;
        const Trajectory traj =
            integrate_pi_eps(sys, scheme, potential, params, x0, t0, probe);
        bool ok = !traj.truncated;
        if (ok) {
            const auto idx = traj.sampling_indices();
            for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
                if (traj.potential_values[idx[i + 1]] > traj.potential_values[idx[i]]) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) {
            result.epsilon = params.epsilon;
            result.halvings = attempt;
            result.descent_ok = true;
            return result;
        }
        params.epsilon *= 0.5;
    }
    result.epsilon = params.epsilon;
    result.halvings = max_halvings;
    result.descent_ok = false;
    return result;
}

}  // namespace gradflow
