#pragma once

#include "gradflow/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gradflow {

/// Gradient-domination and norm-sandwich exponents:
///   mu (P - m_P)^nu <= |grad P|^2,
///   omega11 |x - x*|^v1 <= P - m_P <= omega12 |x - x*|^v2.
struct EnvelopeMeta {
    double mu = 0.0;
    double nu = 1.0;
    double omega11 = 1.0;
    double omega12 = 1.0;
    double v1 = 2.0;
    double v2 = 2.0;
};

/// Scalar objective P(x,t) with spatial gradient.
struct Potential {
    std::function<double(const Vec&, double)> value;
    std::function<Vec(const Vec&, double)> gradient;  ///< empty -> central differences
    std::optional<double> lower_bound;                ///< m_P
    std::optional<EnvelopeMeta> envelope;
    bool time_varying = false;
    std::string kind = "custom";

    /// Set for the piecewise attractive/repulsive potential: signed distance
    /// to the switching surface and the value jump magnitude there.
    std::function<double(const Vec&)> switch_surface;
    std::function<double(const Vec&)> switch_jump;

    double eval(const Vec& x, double t) const;
    Vec grad(const Vec& x, double t) const;
};

/// Scalar field phi(x) with optional analytic gradient (central differences
/// otherwise). Positive on the allowed side of its zero set.
struct ScalarField {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;

    double eval(const Vec& x) const;
    Vec grad(const Vec& x) const;
};

/// radius^2 - |p - center|^2 over the first two state components
/// (positive inside the disk).
ScalarField disk_interior(double cx, double cy, double radius);

/// |p - center|^2 - radius^2 over the first two state components
/// (positive outside the disk).
ScalarField disk_exterior(double cx, double cy, double radius);

/// Free space description: boundary function positive inside the workspace,
/// obstacle functions positive outside their obstacle.
struct Workspace {
    ScalarField boundary;
    std::vector<ScalarField> obstacles;

    /// boundary, then obstacles, as one list.
    std::vector<const ScalarField*> all_fields() const;

    /// Product of all fields, and its gradient.
    double product(const Vec& x) const;
    Vec product_gradient(const Vec& x) const;
};

/// Axis-aligned sampling grid for the workspace validity check.
struct GridSpec {
    Vec lo;
    Vec hi;
    std::vector<int> divisions;  ///< cells per dimension (>= 1)
};

struct WorkspaceValidityReport {
    bool valid = true;
    int points_checked = 0;
    std::string violation;  ///< empty when valid
    Vec violation_point;
};

/// Grid test that obstacle closures are pairwise disjoint and contained in
/// the workspace interior.
WorkspaceValidityReport check_workspace_valid(const Workspace& ws, const GridSpec& grid);

/// |x - x*|^p for p in {2, 4}, with the matching envelope exponents.
Potential make_power_potential(const Vec& x_star, int p);

/// |x - x*(t)|^2 toward a moving reference.
Potential make_tracking_potential(std::function<Vec(double)> curve);

/// |x-x*|^2 / (|x-x*|^(2K) + phi(x))^(1/K) with phi the product of all
/// workspace fields; range [0,1] on free space, 1 on the boundary.
Potential make_navigation_potential(const Workspace& ws, const Vec& x_star, int K);

/// Piecewise attractive/repulsive field with influence threshold xi_level on
/// phi; the value jump at the switching surface is preserved and exposed via
/// switch_surface / switch_jump.
Potential make_artificial_khatib(const Vec& x_star, const Workspace& ws, double K,
                                 double xi_level);

/// |x-x*|^2 (1 + K / phi(x)).
Potential make_artificial_ratio(const Vec& x_star, const Workspace& ws, double K);

}  // namespace gradflow
