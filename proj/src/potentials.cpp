#include "gradflow/potentials.hpp"

#include "gradflow/system_model.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace gradflow {

namespace {

Vec central_diff_gradient(const std::function<double(const Vec&)>& f, const Vec& x) {
    const double h = fd_step(x);
    Vec g(x.size());
    Vec xp = x, xm = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        xp(i) += h;
        xm(i) -= h;
        g(i) = (f(xp) - f(xm)) / (2.0 * h);
        xp(i) = x(i);
        xm(i) = x(i);
    }
    return g;
}

void check_dim(const Vec& x, const Vec& x_star, const char* what) {
    if (x.size() != x_star.size()) {
        std::ostringstream os;
        os << what << ": state dimension " << x.size() << " does not match target dimension "
           << x_star.size();
        throw ConfigError(os.str());
    }
}

}  // namespace

double Potential::eval(const Vec& x, double t) const {
    const double v = value(x, t);
    if (!std::isfinite(v))
        throw EvaluationError("non-finite potential value at x=" + format_vector(x) +
                              ", t=" + std::to_string(t));
    return v;
}

Vec Potential::grad(const Vec& x, double t) const {
    Vec g = gradient ? gradient(x, t)
                     : central_diff_gradient([&](const Vec& y) { return value(y, t); }, x);
    if (!g.allFinite())
        throw EvaluationError("non-finite potential gradient at x=" + format_vector(x) +
                              ", t=" + std::to_string(t));
    return g;
}

double ScalarField::eval(const Vec& x) const { return value(x); }

Vec ScalarField::grad(const Vec& x) const {
    if (gradient) return gradient(x);
    return central_diff_gradient(value, x);
}

ScalarField disk_interior(double cx, double cy, double radius) {
    ScalarField f;
    f.value = [=](const Vec& x) {
        const double dx = x(0) - cx, dy = x(1) - cy;
        return radius * radius - dx * dx - dy * dy;
    };
    f.gradient = [=](const Vec& x) {
        Vec g = Vec::Zero(x.size());
        g(0) = -2.0 * (x(0) - cx);
        g(1) = -2.0 * (x(1) - cy);
        return g;
    };
    return f;
}

ScalarField disk_exterior(double cx, double cy, double radius) {
    ScalarField f;
    f.value = [=](const Vec& x) {
        const double dx = x(0) - cx, dy = x(1) - cy;
        return dx * dx + dy * dy - radius * radius;
    };
    f.gradient = [=](const Vec& x) {
        Vec g = Vec::Zero(x.size());
        g(0) = 2.0 * (x(0) - cx);
        g(1) = 2.0 * (x(1) - cy);
        return g;
    };
    return f;
}

std::vector<const ScalarField*> Workspace::all_fields() const {
    std::vector<const ScalarField*> fields;
    fields.push_back(&boundary);
    for (const auto& o : obstacles) fields.push_back(&o);
    return fields;
}

double Workspace::product(const Vec& x) const {
    double p = boundary.eval(x);
    for (const auto& o : obstacles) p *= o.eval(x);
    return p;
}

Vec Workspace::product_gradient(const Vec& x) const {
    const auto fields = all_fields();
    std::vector<double> vals(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) vals[i] = fields[i]->eval(x);
    Vec g = Vec::Zero(x.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
        double rest = 1.0;
        for (std::size_t j = 0; j < fields.size(); ++j)
            if (j != i) rest *= vals[j];
        g += rest * fields[i]->grad(x);
    }
    return g;
}

WorkspaceValidityReport check_workspace_valid(const Workspace& ws, const GridSpec& grid) {
    if (grid.lo.size() != grid.hi.size() ||
        static_cast<std::size_t>(grid.lo.size()) != grid.divisions.size())
        throw ConfigError("grid lo/hi/divisions dimensions disagree");

    WorkspaceValidityReport report;
    const Eigen::Index dim = grid.lo.size();
    std::vector<int> idx(dim, 0);
    Vec x(dim);
    while (true) {
        for (Eigen::Index d = 0; d < dim; ++d) {
            const int div = grid.divisions[d];
            x(d) = div <= 1 ? grid.lo(d)
                            : grid.lo(d) + (grid.hi(d) - grid.lo(d)) * idx[d] / (div - 1);
        }
        ++report.points_checked;

        int inside_count = 0;
        int first_inside = -1, second_inside = -1;
        for (std::size_t i = 0; i < ws.obstacles.size(); ++i) {
            if (ws.obstacles[i].eval(x) <= 0.0) {
                ++inside_count;
                (first_inside < 0 ? first_inside : second_inside) = static_cast<int>(i);
            }
        }
        if (inside_count >= 2) {
            report.valid = false;
            std::ostringstream os;
            os << "obstacles " << first_inside + 1 << " and " << second_inside + 1
               << " overlap at " << format_vector(x);
            report.violation = os.str();
            report.violation_point = x;
            return report;
        }
        if (inside_count >= 1 && ws.boundary.eval(x) <= 0.0) {
            report.valid = false;
            std::ostringstream os;
            os << "obstacle " << first_inside + 1 << " reaches the workspace boundary at "
               << format_vector(x);
            report.violation = os.str();
            report.violation_point = x;
            return report;
        }

        Eigen::Index d = 0;
        while (d < dim && ++idx[d] >= std::max(1, grid.divisions[d])) idx[d++] = 0;
        if (d == dim) break;
    }
    return report;
}

Potential make_power_potential(const Vec& x_star, int p) {
    if (p != 2 && p != 4)
        throw ConfigError("unsupported power potential exponent p=" + std::to_string(p) +
                          " (expected 2 or 4)");
    Potential pot;
    pot.kind = p == 2 ? "power2" : "power4";
    pot.lower_bound = 0.0;
    EnvelopeMeta meta;
    meta.omega11 = meta.omega12 = 1.0;
    meta.v1 = meta.v2 = static_cast<double>(p);
    if (p == 2) {
        meta.mu = 4.0;
        meta.nu = 1.0;
    } else {
        // |grad P|^2 = 16 |x-x*|^6 = 16 P^(3/2)
        meta.mu = 16.0;
        meta.nu = 1.5;
    }
    pot.envelope = meta;
    pot.value = [x_star, p](const Vec& x, double) {
        check_dim(x, x_star, "power potential");
        const double d2 = (x - x_star).squaredNorm();
        return p == 2 ? d2 : d2 * d2;
    };
    pot.gradient = [x_star, p](const Vec& x, double) -> Vec {
        check_dim(x, x_star, "power potential");
        const Vec d = x - x_star;
        if (p == 2) return 2.0 * d;
        return 4.0 * d.squaredNorm() * d;
    };
    return pot;
}

Potential make_tracking_potential(std::function<Vec(double)> curve) {
    if (!curve) throw ConfigError("tracking potential requires a curve");
    auto eval_curve = [curve = std::move(curve)](double t) {
        Vec c = curve(t);
        if (!c.allFinite())
            throw ConfigError("curve evaluation failed (non-finite) at t=" + std::to_string(t));
        return c;
    };
    Potential pot;
    pot.kind = "tracking";
    pot.time_varying = true;
    pot.lower_bound = 0.0;
    EnvelopeMeta meta;
    meta.mu = 4.0;
    meta.nu = 1.0;
    pot.envelope = meta;
    pot.value = [eval_curve](const Vec& x, double t) {
        const Vec c = eval_curve(t);
        check_dim(x, c, "tracking potential");
        return (x - c).squaredNorm();
    };
    pot.gradient = [eval_curve](const Vec& x, double t) -> Vec {
        const Vec c = eval_curve(t);
        check_dim(x, c, "tracking potential");
        return 2.0 * (x - c);
    };
    return pot;
}

namespace {

struct WorkspaceEval {
    std::vector<double> values;
    double product = 1.0;

    WorkspaceEval(const Workspace& ws, const Vec& x) {
        const auto fields = ws.all_fields();
        values.reserve(fields.size());
        for (const auto* f : fields) {
            values.push_back(f->eval(x));
            product *= values.back();
        }
    }
    double min_value() const {
        double m = values.front();
        for (double v : values) m = std::min(m, v);
        return m;
    }
};

void require_free_space(const Workspace& ws, const Vec& x, const char* what) {
    WorkspaceEval e(ws, x);
    if (e.min_value() <= 0.0)
        throw ConfigError(std::string(what) +
                          ": target point is not strictly inside the free space, x*=" +
                          format_vector(x));
}

[[noreturn]] void domain_violation(const Vec& x, double phi) {
    std::ostringstream os;
    os << "potential evaluated outside the free space (phi=" << phi << ") at x="
       << format_vector(x);
    throw DomainViolationError(os.str());
}

}  // namespace

Potential make_navigation_potential(const Workspace& ws, const Vec& x_star, int K) {
    if (K < 1) throw ConfigError("navigation exponent K must be a positive integer");
    require_free_space(ws, x_star, "navigation potential");

    Potential pot;
    pot.kind = "navigation";
    pot.lower_bound = 0.0;
    pot.value = [ws, x_star, K](const Vec& x, double) {
        check_dim(x, x_star, "navigation potential");
        WorkspaceEval e(ws, x);
        if (e.min_value() < 0.0) domain_violation(x, e.product);
        const double n = (x - x_star).squaredNorm();
        return n / std::pow(std::pow(n, K) + e.product, 1.0 / K);
    };
    pot.gradient = [ws, x_star, K](const Vec& x, double) -> Vec {
        check_dim(x, x_star, "navigation potential");
        WorkspaceEval e(ws, x);
        if (e.min_value() < 0.0) domain_violation(x, e.product);
        const Vec d = x - x_star;
        const double n = d.squaredNorm();
        const Vec grad_n = 2.0 * d;
        const double s = std::pow(n, K) + e.product;
        const Vec grad_s = K * std::pow(n, K - 1) * grad_n + ws.product_gradient(x);
        return std::pow(s, -1.0 / K) * (grad_n - (n / (K * s)) * grad_s);
    };
    return pot;
}

Potential make_artificial_khatib(const Vec& x_star, const Workspace& ws, double K,
                                 double xi_level) {
    if (K <= 0.0) throw ConfigError("khatib potential gain K must be positive");
    if (xi_level <= 0.0) throw ConfigError("khatib influence level must be positive");
    require_free_space(ws, x_star, "khatib potential");

    Potential pot;
    pot.kind = "khatib";
    pot.lower_bound = 0.0;
    pot.value = [ws, x_star, K, xi_level](const Vec& x, double) {
        check_dim(x, x_star, "khatib potential");
        const double phi = ws.product(x);
        if (phi <= 0.0) domain_violation(x, phi);
        const double d2 = (x - x_star).squaredNorm();
        if (phi <= xi_level) {
            const double r = 1.0 / phi - 1.0 / xi_level;
            return d2 + K * r * r;
        }
        return K * d2;
    };
    pot.gradient = [ws, x_star, K, xi_level](const Vec& x, double) -> Vec {
        check_dim(x, x_star, "khatib potential");
        const double phi = ws.product(x);
        if (phi <= 0.0) domain_violation(x, phi);
        const Vec d = x - x_star;
        if (phi <= xi_level) {
            const double r = 1.0 / phi - 1.0 / xi_level;
            return 2.0 * d - (2.0 * K * r / (phi * phi)) * ws.product_gradient(x);
        }
        return 2.0 * K * d;
    };
    pot.switch_surface = [ws, xi_level](const Vec& x) { return ws.product(x) - xi_level; };
    pot.switch_jump = [x_star, K](const Vec& x) {
        return std::abs(K - 1.0) * (x - x_star).squaredNorm();
    };
    return pot;
}

Potential make_artificial_ratio(const Vec& x_star, const Workspace& ws, double K) {
    if (K <= 0.0) throw ConfigError("ratio potential gain K must be positive");
    require_free_space(ws, x_star, "ratio potential");

    Potential pot;
    pot.kind = "ratio";
    pot.lower_bound = 0.0;
    pot.value = [ws, x_star, K](const Vec& x, double) {
        check_dim(x, x_star, "ratio potential");
        const double phi = ws.product(x);
        if (phi <= 0.0) domain_violation(x, phi);
        return (x - x_star).squaredNorm() * (1.0 + K / phi);
    };
    pot.gradient = [ws, x_star, K](const Vec& x, double) -> Vec {
        check_dim(x, x_star, "ratio potential");
        const double phi = ws.product(x);
        if (phi <= 0.0) domain_violation(x, phi);
        const Vec d = x - x_star;
        return 2.0 * (1.0 + K / phi) * d -
               (d.squaredNorm() * K / (phi * phi)) * ws.product_gradient(x);
    };
    return pot;
}

}  // namespace gradflow
