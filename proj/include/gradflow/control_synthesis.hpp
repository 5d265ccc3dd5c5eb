#pragma once

#include "gradflow/potentials.hpp"
#include "gradflow/system_model.hpp"

#include <functional>
#include <utility>

namespace gradflow {

/// Gain, sampling period, and optional additive feedforward ũ(t).
struct ControllerParams {
    double gamma = 1.0;
    double epsilon = 0.1;
    std::function<Vec(double)> feedforward;

    void validate() const;
};

/// Components of a = -gamma F^{-1} grad P, split by scheme ordering:
/// first[i] pairs with s1[i], second[p] with s2[p].
struct CoefficientVector {
    Vec first;
    Vec second;

    Vec stacked() const;
};

/// a(x,t) = -gamma F^{-1}(x,t) grad_x P(x,t). Rank degeneracy at (x,t)
/// propagates with the state in the message.
CoefficientVector compute_a(const ControlSystem& sys, const BracketScheme& scheme,
                            const Potential& potential, double gamma, const Vec& x, double t,
                            double cond_limit = kDefaultCondLimit);

/// sign with sign(0) = 0.
double sign_of(double v);

/// Oscillating component for control k of the pair (j1,j2):
/// 2 sqrt(pi kappa) (delta_{k,j1} sign(a) cos(2 pi kappa t / eps)
///                   + delta_{k,j2} sin(2 pi kappa t / eps)).
double eval_dither(const BracketScheme& scheme, const std::pair<int, int>& pair, int k,
                   double a_pair, double t, double epsilon);

/// Control vector at time t with coefficients held fixed:
/// u_k = sum_{i in s1} a_i delta_{ki}
///       + eps^{-1/2} sum_{pairs} sqrt(|a_pair|) * dither + feedforward.
Vec eval_control(const ControlSystem& sys, const BracketScheme& scheme,
                 const ControllerParams& params, const CoefficientVector& a_held, double t);

}  // namespace gradflow
