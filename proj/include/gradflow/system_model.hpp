#pragma once

#include "gradflow/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gradflow {

/// f_k(x, t) for control index k (1-based, matching the scheme declarations).
using FieldFn = std::function<Vec(int k, const Vec& x, double t)>;

/// d f_k / dx as an n-by-n matrix.
using FieldJacobianFn = std::function<Mat(int k, const Vec& x, double t)>;

/// A driftless control-affine system  xdot = sum_k f_k(x,t) u_k.
struct ControlSystem {
    int state_dim = 0;    ///< n
    int control_dim = 0;  ///< m, with m <= n
    FieldFn field;
    FieldJacobianFn jacobian;  ///< optional; central differences when absent
    bool time_varying = false;
    std::string name;

    void validate() const;
};

/// Index data selecting which fields and brackets span the state space:
/// |s1| + |s2| = n, and kappa assigns a distinct positive frequency
/// multiplier to each pair in s2 (same ordering).
struct BracketScheme {
    std::vector<int> s1;
    std::vector<std::pair<int, int>> s2;
    std::vector<int> kappa;

    /// kappa = 1, 2, ..., |s2| in enumeration order.
    static BracketScheme with_default_kappa(std::vector<int> s1,
                                            std::vector<std::pair<int, int>> s2);

    void validate(const ControlSystem& sys) const;

    /// Frequency multiplier for a pair; throws ConfigError if absent from s2.
    int kappa_for(const std::pair<int, int>& pair) const;
};

/// Central-difference step max(1, |x|) * cbrt(machine epsilon).
double fd_step(const Vec& x);

/// Evaluates f_k with finite-value checking.
Vec eval_field(const ControlSystem& sys, int k, const Vec& x, double t);

/// Analytic Jacobian when declared, central differences otherwise.
Mat field_jacobian(const ControlSystem& sys, int k, const Vec& x, double t);

/// Lie bracket [f_j1, f_j2](x,t) = (df_j2/dx) f_j1 - (df_j1/dx) f_j2.
Vec eval_lie_bracket(const ControlSystem& sys, int j1, int j2, const Vec& x, double t);

/// Bracket matrix: columns f_j1 for j1 in s1, then [f_j1, f_j2] for pairs
/// in s2, in declared enumeration order.
Mat assemble_F(const ControlSystem& sys, const BracketScheme& scheme, const Vec& x, double t);

inline constexpr double kDefaultCondLimit = 1e8;

struct InversionResult {
    Mat inverse;
    double condition;  ///< 1-norm condition number
};

/// LU inverse with one residual refinement step. Throws RankDegeneracyError
/// when the 1-norm condition number exceeds cond_limit; the optional state
/// context is included in the message.
InversionResult invert_F(const Mat& F, double cond_limit,
                         const Vec* x = nullptr, const double* t = nullptr);

struct RankSample {
    Vec x;
    double t = 0.0;
    double condition = 0.0;
};

struct RankReport {
    std::vector<RankSample> samples;
    double max_condition = 0.0;
    double cond_limit = kDefaultCondLimit;
    bool pass = false;
};

/// Condition number of F at each sample; pass iff all stay below cond_limit.
RankReport check_rank_condition(const ControlSystem& sys, const BracketScheme& scheme,
                                const std::vector<std::pair<Vec, double>>& samples,
                                double cond_limit = kDefaultCondLimit);

}  // namespace gradflow
