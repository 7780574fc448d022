#pragma once

#include <stdexcept>
#include <string>

namespace relpend {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inadmissible problem parameters.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation (|v| >= 1, E < 1, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// The adaptive integrator ran out of its step budget.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double last_time)
        : Error(what), last_time_(last_time) {}

    [[nodiscard]] double last_time() const noexcept { return last_time_; }

private:
    double last_time_;
};

/// Q(q, +p~) - q <= 0 or Q(q, -p~) - q >= 0 somewhere on the sampled circle.
class BoundaryTwistError : public Error {
public:
    BoundaryTwistError(const std::string& what, double q)
        : Error(what), q_(q) {}

    [[nodiscard]] double offending_q() const noexcept { return q_; }

private:
    double q_;
};

/// r -> Q(theta, r) was observed to be non-monotone.
class TwistViolationError : public Error {
public:
    using Error::Error;
};

/// Index circle so small that the displacement field vanishes numerically.
class CircleTooSmallError : public Error {
public:
    using Error::Error;
};

/// Results that contradict each other (winding check, index range, ...).
class InconsistencyError : public Error {
public:
    using Error::Error;
};

/// Newton or bisection did not reach the requested tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace relpend
