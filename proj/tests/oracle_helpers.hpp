#pragma once

// Test-only numerical oracles, kept independent of the library's own
// finite-difference and quadrature paths.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Richardson-extrapolated central differences (4th order in h).
inline Vec richardson_gradient(const std::function<double(const Vec&)>& f, const Vec& x,
                               double h) {
    Vec g(x.size());
    Vec e = Vec::Zero(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        e(i) = 1.0;
        const double d1 = (f(x + h * e) - f(x - h * e)) / (2.0 * h);
        const double d2 = (f(x + 0.5 * h * e) - f(x - 0.5 * h * e)) / h;
        g(i) = (4.0 * d2 - d1) / 3.0;
        e(i) = 0.0;
    }
    return g;
}

/// Plain central-difference Jacobian.
inline Mat central_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h) {
    const Vec f0 = f(x);
    Mat J(f0.size(), x.size());
    Vec e = Vec::Zero(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        e(i) = 1.0;
        J.col(i) = (f(x + h * e) - f(x - h * e)) / (2.0 * h);
        e(i) = 0.0;
    }
    return J;
}

/// max(1, |x|) * cbrt(double epsilon), the step the consistency tolerances
/// are expressed in.
inline double fd_step(const Vec& x) {
    return std::max(1.0, x.norm()) * std::cbrt(2.220446049250313e-16);
}

inline double rel_error(const Vec& a, const Vec& b) {
    return (a - b).norm() / std::max({a.norm(), b.norm(), 1.0});
}

/// Iterated integrals of two scalar channels over [0, T] on a uniform grid:
///   A = ∫ u1(s) (∫_0^s u2) ds,  B = ∫ u2(s) (∫_0^s u1) ds,
/// plus the plain integrals I1, I2. Cumulative trapezoid inside, trapezoid
/// outside.
struct IteratedIntegrals {
    double A = 0.0;
    double B = 0.0;
    double I1 = 0.0;
    double I2 = 0.0;
};

inline IteratedIntegrals iterated_integrals(const std::function<double(double)>& u1,
                                            const std::function<double(double)>& u2, double T,
                                            int points) {
    const int n = points;
    const double h = T / (n - 1);
    std::vector<double> v1(n), v2(n), c1(n), c2(n);
    for (int i = 0; i < n; ++i) {
        const double t = T * i / (n - 1);
        v1[i] = u1(t);
        v2[i] = u2(t);
    }
    c1[0] = c2[0] = 0.0;
    for (int i = 1; i < n; ++i) {
        c1[i] = c1[i - 1] + 0.5 * h * (v1[i - 1] + v1[i]);
        c2[i] = c2[i - 1] + 0.5 * h * (v2[i - 1] + v2[i]);
    }
    IteratedIntegrals out;
    auto trapz = [&](auto&& f) {
        double s = 0.0;
        for (int i = 1; i < n; ++i) s += 0.5 * h * (f(i - 1) + f(i));
        return s;
    };
    out.A = trapz([&](int i) { return v1[i] * c2[i]; });
    out.B = trapz([&](int i) { return v2[i] * c1[i]; });
    out.I1 = c1[n - 1];
    out.I2 = c2[n - 1];
    return out;
}

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(x.size());
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Deterministic uniform sampler for property tests.
class Sampler {
public:
    explicit Sampler(unsigned seed) : rng_(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }
    Vec vector(Eigen::Index n, double lo, double hi) {
        Vec v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform(lo, hi);
        return v;
    }

private:
    std::mt19937 rng_;
};

}  // namespace oracle
