#include "gradflow/control_synthesis.hpp"

#include <cmath>

namespace gradflow {

void ControllerParams::validate() const {
    if (!(gamma > 0.0)) throw ConfigError("gain gamma must be positive");
    if (!(epsilon > 0.0)) throw ConfigError("sampling period epsilon must be positive");
}

Vec CoefficientVector::stacked() const {
    Vec a(first.size() + second.size());
    a << first, second;
    return a;
}

CoefficientVector compute_a(const ControlSystem& sys, const BracketScheme& scheme,
                            const Potential& potential, double gamma, const Vec& x, double t,
                            double cond_limit) {
    const Mat F = assemble_F(sys, scheme, x, t);
    const auto inv = invert_F(F, cond_limit, &x, &t);
    const Vec a = -gamma * (inv.inverse * potential.grad(x, t));
    CoefficientVector coeffs;
    coeffs.first = a.head(static_cast<Eigen::Index>(scheme.s1.size()));
    coeffs.second = a.tail(static_cast<Eigen::Index>(scheme.s2.size()));
    return coeffs;
}

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double eval_dither(const BracketScheme& scheme, const std::pair<int, int>& pair, int k,
                   double a_pair, double t, double epsilon) {
    if (k != pair.first && k != pair.second) return 0.0;
    const double kappa = static_cast<double>(scheme.kappa_for(pair));
    const double amplitude = 2.0 * std::sqrt(M_PI * kappa);
    const double phase = 2.0 * M_PI * kappa * t / epsilon;
    double value = 0.0;
    if (k == pair.first) value += sign_of(a_pair) * std::cos(phase);
    if (k == pair.second) value += std::sin(phase);
    return amplitude * value;
}

Vec eval_control(const ControlSystem& sys, const BracketScheme& scheme,
                 const ControllerParams& params, const CoefficientVector& a_held, double t) {
    Vec u = Vec::Zero(sys.control_dim);
    for (std::size_t i = 0; i < scheme.s1.size(); ++i)
        u(scheme.s1[i] - 1) += a_held.first(static_cast<Eigen::Index>(i));

    const double inv_sqrt_eps = 1.0 / std::sqrt(params.epsilon);
    for (std::size_t p = 0; p < scheme.s2.size(); ++p) {
        const double a_pair = a_held.second(static_cast<Eigen::Index>(p));
        const double amp = inv_sqrt_eps * std::sqrt(std::abs(a_pair));
        if (amp == 0.0) continue;
        const auto& pair = scheme.s2[p];
        u(pair.first - 1) += amp * eval_dither(scheme, pair, pair.first, a_pair, t, params.epsilon);
        if (pair.second != pair.first)
            u(pair.second - 1) +=
                amp * eval_dither(scheme, pair, pair.second, a_pair, t, params.epsilon);
    }

    if (params.feedforward) {
        const Vec ff = params.feedforward(t);
        if (ff.size() != sys.control_dim)
            throw ConfigError("feedforward dimension " + std::to_string(ff.size()) +
                              " does not match control dimension " +
                              std::to_string(sys.control_dim));
        u += ff;
    }
    return u;
}

}  // namespace gradflow
