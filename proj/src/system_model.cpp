#include "gradflow/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace gradflow {

std::string format_vector(const Vec& x) {
    std::ostringstream os;
    os << "(";
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (i > 0) os << ", ";
        os << x(i);
    }
    os << ")";
    return os.str();
}

void ControlSystem::validate() const {
    if (state_dim <= 0 || control_dim <= 0)
        throw ConfigError("system dimensions must be positive (n=" +
                          std::to_string(state_dim) + ", m=" + std::to_string(control_dim) + ")");
    if (control_dim > state_dim)
        throw ConfigError("control dimension m=" + std::to_string(control_dim) +
                          " exceeds state dimension n=" + std::to_string(state_dim));
    if (!field) throw ConfigError("system '" + name + "' has no field evaluator");
}

BracketScheme BracketScheme::with_default_kappa(std::vector<int> s1,
                                                std::vector<std::pair<int, int>> s2) {
    BracketScheme scheme;
    scheme.s1 = std::move(s1);
    scheme.s2 = std::move(s2);
    scheme.kappa.resize(scheme.s2.size());
    for (std::size_t i = 0; i < scheme.kappa.size(); ++i) scheme.kappa[i] = static_cast<int>(i + 1);
    return scheme;
}

void BracketScheme::validate(const ControlSystem& sys) const {
    if (static_cast<int>(s1.size() + s2.size()) != sys.state_dim)
        throw ConfigError("|s1| + |s2| = " + std::to_string(s1.size() + s2.size()) +
                          " does not match state dimension n=" + std::to_string(sys.state_dim));
    std::set<int> seen;
    for (int i : s1) {
        if (i < 1 || i > sys.control_dim)
            throw ConfigError("s1 index " + std::to_string(i) + " outside 1.." +
                              std::to_string(sys.control_dim));
        if (!seen.insert(i).second)
            throw ConfigError("s1 index " + std::to_string(i) + " repeated");
    }
    for (const auto& [j1, j2] : s2) {
        if (j1 < 1 || j1 > sys.control_dim || j2 < 1 || j2 > sys.control_dim)
            throw ConfigError("s2 pair (" + std::to_string(j1) + "," + std::to_string(j2) +
                              ") outside 1.." + std::to_string(sys.control_dim));
    }
    if (kappa.size() != s2.size())
        throw ConfigError("kappa has " + std::to_string(kappa.size()) + " entries for " +
                          std::to_string(s2.size()) + " bracket pairs");
    std::set<int> kset;
    for (int k : kappa) {
        if (k < 1) throw ConfigError("kappa values must be positive integers");
        if (!kset.insert(k).second)
            throw ConfigError("kappa value " + std::to_string(k) + " repeated; multipliers must be pairwise distinct");
    }
}

int BracketScheme::kappa_for(const std::pair<int, int>& pair) const {
    for (std::size_t i = 0; i < s2.size(); ++i)
        if (s2[i] == pair) return kappa[i];
    throw ConfigError("pair (" + std::to_string(pair.first) + "," + std::to_string(pair.second) +
                      ") is not in s2");
}

double fd_step(const Vec& x) {
    static const double cbrt_eps = std::cbrt(std::numeric_limits<double>::epsilon());
    return std::max(1.0, x.norm()) * cbrt_eps;
}

Vec eval_field(const ControlSystem& sys, int k, const Vec& x, double t) {
    Vec f = sys.field(k, x, t);
    if (f.size() != sys.state_dim)
        throw EvaluationError("field f_" + std::to_string(k) + " returned dimension " +
                              std::to_string(f.size()) + ", expected " +
                              std::to_string(sys.state_dim));
    if (!f.allFinite())
        throw EvaluationError("non-finite value of f_" + std::to_string(k) + " at x=" +
                              format_vector(x) + ", t=" + std::to_string(t));
    return f;
}

Mat field_jacobian(const ControlSystem& sys, int k, const Vec& x, double t) {
    if (sys.jacobian) {
        Mat J = sys.jacobian(k, x, t);
        if (!J.allFinite())
            throw EvaluationError("non-finite Jacobian of f_" + std::to_string(k) + " at x=" +
                                  format_vector(x) + ", t=" + std::to_string(t));
        return J;
    }
    const double h = fd_step(x);
    Mat J(sys.state_dim, sys.state_dim);
    Vec xp = x, xm = x;
    for (int j = 0; j < sys.state_dim; ++j) {
        xp(j) += h;
        xm(j) -= h;
        J.col(j) = (eval_field(sys, k, xp, t) - eval_field(sys, k, xm, t)) / (2.0 * h);
        xp(j) = x(j);
        xm(j) = x(j);
    }
    return J;
}

Vec eval_lie_bracket(const ControlSystem& sys, int j1, int j2, const Vec& x, double t) {
    const Vec f1 = eval_field(sys, j1, x, t);
    const Vec f2 = eval_field(sys, j2, x, t);
    const Mat J1 = field_jacobian(sys, j1, x, t);
    const Mat J2 = field_jacobian(sys, j2, x, t);
    return J2 * f1 - J1 * f2;
}

Mat assemble_F(const ControlSystem& sys, const BracketScheme& scheme, const Vec& x, double t) {
    Mat F(sys.state_dim, sys.state_dim);
    int col = 0;
    for (int i : scheme.s1) F.col(col++) = eval_field(sys, i, x, t);
    for (const auto& [j1, j2] : scheme.s2) F.col(col++) = eval_lie_bracket(sys, j1, j2, x, t);
    return F;
}

InversionResult invert_F(const Mat& F, double cond_limit, const Vec* x, const double* t) {
    if (!F.allFinite()) throw EvaluationError("bracket matrix has non-finite entries");

    Eigen::PartialPivLU<Mat> lu(F);
    const Mat identity = Mat::Identity(F.rows(), F.cols());
    Mat inv = lu.solve(identity);
    // one step of iterative refinement
    inv += lu.solve(identity - F * inv);

    double condition = std::numeric_limits<double>::infinity();
    if (inv.allFinite()) {
        const double norm_f = F.cwiseAbs().colwise().sum().maxCoeff();
        const double norm_inv = inv.cwiseAbs().colwise().sum().maxCoeff();
        condition = norm_f * norm_inv;
    }

    if (!(condition <= cond_limit)) {
        std::ostringstream os;
        os << "bracket matrix rank-degenerate (cond=" << condition
           << " > limit " << cond_limit << ")";
        if (x) os << " at x=" << format_vector(*x);
        if (t) os << ", t=" << *t;
        throw RankDegeneracyError(os.str(), condition);
    }

    const double residual = (F * inv - identity).cwiseAbs().rowwise().sum().maxCoeff();
    if (residual > 1e-10 * condition)
        throw EvaluationError("matrix inversion residual " + std::to_string(residual) +
                              " exceeds 1e-10 * cond");
    return {std::move(inv), condition};
}

RankReport check_rank_condition(const ControlSystem& sys, const BracketScheme& scheme,
                                const std::vector<std::pair<Vec, double>>& samples,
                                double cond_limit) {
    if (samples.empty()) throw ConfigError("rank check requires a non-empty sample list");
    RankReport report;
    report.cond_limit = cond_limit;
    report.pass = true;
    for (const auto& [x, t] : samples) {
        const Mat F = assemble_F(sys, scheme, x, t);
        double condition = std::numeric_limits<double>::infinity();
        try {
            condition = invert_F(F, std::numeric_limits<double>::infinity()).condition;
        } catch (const EvaluationError&) {
            // exactly singular; condition stays infinite
        }
        report.samples.push_back({x, t, condition});
        report.max_condition = std::max(report.max_condition, condition);
        if (!(condition <= cond_limit)) report.pass = false;
    }
    return report;
}

}  // namespace gradflow
