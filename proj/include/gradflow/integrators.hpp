#pragma once

#include "gradflow/control_synthesis.hpp"
#include "gradflow/potentials.hpp"
#include "gradflow/system_model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gradflow {

enum class TrajectoryKind { pi_epsilon, classical, gradient_flow };

const char* to_string(TrajectoryKind kind);

struct ExitRecord {
    double time = 0.0;
    Vec state;
    std::string reason;
};

/// Closed-loop trajectory on a fixed grid of substeps_per_interval RK4 steps
/// per sampling interval; sampling instants t0 + j*epsilon sit at row
/// indices j * substeps_per_interval exactly.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<double> potential_values;
    std::vector<Vec> controls;  ///< empty when not recorded
    TrajectoryKind kind = TrajectoryKind::pi_epsilon;

    double t0 = 0.0;
    double epsilon = 0.0;
    int substeps_per_interval = 0;

    bool truncated = false;
    std::optional<ExitRecord> exit;

    std::size_t size() const { return times.size(); }
    /// Row indices of the sampling instants t0 + j*epsilon.
    std::vector<std::size_t> sampling_indices() const;
};

struct SolverSettings {
    int substeps_per_period = 64;  ///< RK4 steps per epsilon interval (>= 20)
    double horizon = 10.0;         ///< seconds
    std::function<bool(const Vec&, double)> domain_guard;  ///< true = inside D
    bool record_controls = true;
    double cond_limit = kDefaultCondLimit;

    void validate() const;
};

/// Sampled closed loop: coefficients a frozen at each t_j = t0 + j*epsilon,
/// dithers evolving in continuous time across each hold interval.
Trajectory integrate_pi_eps(const ControlSystem& sys, const BracketScheme& scheme,
                            const Potential& potential, const ControllerParams& params,
                            const Vec& x0, double t0, const SolverSettings& settings);

/// Classical closed loop: a(x(t), t) recomputed continuously.
Trajectory integrate_classical(const ControlSystem& sys, const BracketScheme& scheme,
                               const Potential& potential, const ControllerParams& params,
                               const Vec& x0, double t0, const SolverSettings& settings);

/// Reference dynamics xdot = -gamma grad_x P(x, t) on the same grid.
Trajectory integrate_gradient_flow(const Potential& potential, double gamma, const Vec& x0,
                                   double t0, const ControllerParams& params,
                                   const SolverSettings& settings);

struct AutoEpsilonResult {
    double epsilon = 0.0;
    int halvings = 0;
    bool descent_ok = false;
};

/// Empirical sampling-period aid: halve epsilon (at most max_halvings times)
/// until the potential is non-increasing over the first probe_intervals
/// sampling instants.
AutoEpsilonResult auto_tune_epsilon(const ControlSystem& sys, const BracketScheme& scheme,
                                    const Potential& potential, ControllerParams params,
                                    const Vec& x0, double t0, const SolverSettings& settings,
                                    int probe_intervals = 20, int max_halvings = 8);

}  // namespace gradflow
