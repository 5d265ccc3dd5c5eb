#include "gradflow/builtins.hpp"

#include <cmath>

namespace gradflow {

ControlSystem make_unicycle() {
    ControlSystem sys;
    sys.name = "unicycle";
    sys.state_dim = 3;
    sys.control_dim = 2;
    sys.field = [](int k, const Vec& x, double) -> Vec {
        Vec f(3);
        if (k == 1)
            f << std::cos(x(2)), std::sin(x(2)), 0.0;
        else
            f << 0.0, 0.0, 1.0;
        return f;
    };
    sys.jacobian = [](int k, const Vec& x, double) -> Mat {
        Mat J = Mat::Zero(3, 3);
        if (k == 1) {
            J(0, 2) = -std::sin(x(2));
            J(1, 2) = std::cos(x(2));
        }
        return J;
    };
    return sys;
}

ControlSystem make_fully_actuated_2d() {
    ControlSystem sys;
    sys.name = "fully_actuated_2d";
    sys.state_dim = 2;
    sys.control_dim = 2;
    sys.field = [](int k, const Vec&, double) -> Vec {
        Vec f = Vec::Zero(2);
        f(k - 1) = 1.0;
        return f;
    };
    sys.jacobian = [](int, const Vec&, double) -> Mat { return Mat::Zero(2, 2); };
    return sys;
}

ControlSystem make_scalar_integrator() {
    ControlSystem sys;
    sys.name = "scalar_integrator";
    sys.state_dim = 1;
    sys.control_dim = 1;
    sys.field = [](int, const Vec&, double) -> Vec { return Vec::Ones(1); };
    sys.jacobian = [](int, const Vec&, double) -> Mat { return Mat::Zero(1, 1); };
    return sys;
}

ControlSystem make_system(const std::string& name) {
    if (name == "unicycle") return make_unicycle();
    if (name == "fully_actuated_2d") return make_fully_actuated_2d();
    if (name == "scalar_integrator") return make_scalar_integrator();
    std::string known;
    for (const auto& n : builtin_system_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown system '" + name + "' (known: " + known + ")");
}

std::vector<std::string> builtin_system_names() {
    return {"unicycle", "fully_actuated_2d", "scalar_integrator"};
}

BracketScheme default_scheme(const ControlSystem& sys) {
    if (sys.name == "unicycle") return BracketScheme::with_default_kappa({1, 2}, {{1, 2}});
    if (sys.name == "fully_actuated_2d") return BracketScheme::with_default_kappa({1, 2}, {});
    if (sys.name == "scalar_integrator") return BracketScheme::with_default_kappa({1}, {});
    throw ConfigError("no default scheme for system '" + sys.name + "'");
}

Workspace bundled_obstacle_workspace() {
    Workspace ws;
    ws.boundary = disk_interior(0.0, 0.0, 3.5);
    ws.obstacles.push_back(disk_exterior(2.0, 1.0, 1.0));
    ws.obstacles.push_back(disk_exterior(0.0, -0.25, 0.5));
    ws.obstacles.push_back(disk_exterior(-1.5, 2.0, 0.75));
    ws.obstacles.push_back(disk_exterior(-2.0, 0.0, 0.75));
    ws.obstacles.push_back(disk_exterior(1.5, -2.0, 0.75));
    ws.obstacles.push_back(disk_exterior(0.5, 2.5, 0.5));
    ws.obstacles.push_back(disk_exterior(-1.0, -2.0, 1.0));
    return ws;
}

}  // namespace gradflow
