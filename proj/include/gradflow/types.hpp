#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace gradflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A vector field or potential produced a non-finite value.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// The bracket matrix is numerically rank-deficient at some state.
class RankDegeneracyError : public Error {
public:
    RankDegeneracyError(const std::string& msg, double condition)
        : Error(msg), condition_(condition) {}
    double condition() const { return condition_; }

private:
    double condition_;
};

/// A potential was evaluated outside its valid domain (e.g. inside an obstacle).
class DomainViolationError : public Error {
public:
    using Error::Error;
};

/// Configuration file or parameter validation failure.
class ConfigError : public Error {
public:
    using Error::Error;
};

std::string format_vector(const Vec& x);

}  // namespace gradflow
