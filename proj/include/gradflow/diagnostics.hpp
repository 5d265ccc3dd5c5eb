#pragma once

#include "gradflow/integrators.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gradflow {

/// Decay-envelope data: kind, rate exponents, and the sandwich constants.
/// kind == exponential requires nu == 1.
struct EnvelopeSpec {
    enum class Kind { exponential, polynomial };
    Kind kind = Kind::exponential;
    double mu = 4.0;
    double nu = 1.0;
    double gamma_star = 1.0;
    double rho = 0.0;
    double omega11 = 1.0;
    double omega12 = 1.0;
    double v1 = 2.0;
    double v2 = 2.0;

    /// Built from the potential's envelope metadata; throws ConfigError when
    /// the metadata is absent.
    static EnvelopeSpec from_potential(const Potential& potential, double gamma_star,
                                       double rho = 0.0);

    void validate() const;

    /// Envelope value at time t for initial distance d0 released at t0;
    /// +infinity where the polynomial bound is vacuous (nonpositive base).
    double evaluate(double t, double t0, double epsilon, double d0) const;
};

struct EnvelopeTolerance {
    double abs = 1e-3;
    double rel = 0.05;
};

struct EnvelopeReport {
    bool pass = false;
    double worst_margin = 0.0;  ///< min over sampling instants of env + slack - distance
    double worst_time = 0.0;
    double worst_distance = 0.0;
    double worst_envelope = 0.0;
    int instants_checked = 0;
    /// Worst margin over all recorded substeps (reported, not gating).
    double worst_intra_period_margin = 0.0;
};

/// Distance-to-target decay check against the exponential envelope at the
/// sampling instants. Requires a quadratic-distance potential.
EnvelopeReport check_exponential_envelope(const Trajectory& traj, const Vec& x_star,
                                          const EnvelopeSpec& spec,
                                          const ControllerParams& params,
                                          const Potential& potential,
                                          const EnvelopeTolerance& tol = {});

/// Same with the polynomial envelope; requires the quartic potential.
EnvelopeReport check_polynomial_envelope(const Trajectory& traj, const Vec& x_star,
                                         const EnvelopeSpec& spec,
                                         const ControllerParams& params,
                                         const Potential& potential,
                                         const EnvelopeTolerance& tol = {});

struct DescentReport {
    bool pass = false;
    int violations = 0;
    std::optional<double> first_violation_time;
    double worst_increase = 0.0;
    double residual_threshold = 0.0;
    double final_potential = 0.0;
    int instants_checked = 0;
};

/// P(x(t_{j+1})) <= P(x(t_j)) at sampling instants until P - m_P drops
/// below the residual threshold.
DescentReport check_sampled_descent(const Trajectory& traj, double residual_threshold,
                                    double m_p = 0.0);

struct TubeReport {
    bool pass = false;
    std::optional<double> entry_time;  ///< first instant after which d <= rho holds throughout
    double rho = 0.0;
    double max_distance_tail = 0.0;   ///< max |x - curve| at instants >= entry
    double final_distance = 0.0;
    double max_intra_period_distance = 0.0;  ///< max |x - curve| over all substeps
    /// Least-squares fit of log(d - rho) over the approach phase
    /// (informational; the paper's constants are not asserted).
    double fitted_rate = 0.0;
    double fitted_beta = 0.0;
    int instants_checked = 0;
};

/// Tube distance d(t_j) = max(0, |x(t_j) - curve(t_j)| - rho) at sampling
/// instants; pass iff d is eventually zero, with the entry time reported.
TubeReport check_tube_attraction(const Trajectory& traj, const std::function<Vec(double)>& curve,
                                 double rho);

struct ObstacleReport {
    bool pass = false;
    bool collision_free = false;
    bool converged = false;
    double min_phi = 0.0;
    double min_phi_time = 0.0;
    std::optional<double> first_violation_time;
    double terminal_distance = 0.0;
    double tol = 0.0;
};

/// Collision-free motion (every workspace field positive along the whole
/// recorded trajectory) plus terminal convergence |x(T) - x*| <= tol.
ObstacleReport check_obstacle_run(const Trajectory& traj, const Workspace& ws, const Vec& x_star,
                                  double tol);

struct OrderTestReport {
    std::vector<double> eps_values;
    std::vector<double> errors;
    double slope = 0.0;
    double slope_min = 0.0;
    bool degenerate = false;  ///< fewer than two non-trivial errors to fit
    bool pass = false;
};

/// One-step consistency order: e(eps) = |x_pi(t0+eps) - x0 + eps*gamma*gradP(x0,t0)|
/// over a decreasing geometric eps list; pass iff the log-log slope
/// reaches slope_min.
OrderTestReport order_test_one_step(const ControlSystem& sys, const BracketScheme& scheme,
                                    const Potential& potential, double gamma, const Vec& x0,
                                    double t0, const std::vector<double>& eps_list,
                                    int substeps = 256, double slope_min = 1.4);

}  // namespace gradflow
