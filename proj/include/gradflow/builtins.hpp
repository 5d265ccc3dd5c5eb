#pragma once

#include "gradflow/potentials.hpp"
#include "gradflow/system_model.hpp"

#include <string>
#include <vector>

namespace gradflow {

/// Planar unicycle: n = 3, m = 2,
/// f1 = (cos x3, sin x3, 0), f2 = (0, 0, 1), analytic Jacobians.
ControlSystem make_unicycle();

/// Coordinate fields e1, e2 on the plane: n = m = 2, degree-1 case.
ControlSystem make_fully_actuated_2d();

/// Scalar integrator xdot = u: n = m = 1, f1 = 1.
ControlSystem make_scalar_integrator();

/// Built-in system registry used by scenario configs.
ControlSystem make_system(const std::string& name);
std::vector<std::string> builtin_system_names();

/// Default index scheme for a built-in system (s1/s2/kappa).
BracketScheme default_scheme(const ControlSystem& sys);

/// The bundled disk workspace: radius-3.5 boundary with seven circular
/// obstacles, fields positive on free space.
Workspace bundled_obstacle_workspace();

}  // namespace gradflow
