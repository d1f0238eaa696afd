#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace paradiag {

/// Base class for every error raised by the solver kit.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Configuration rejected before any compute started.
struct ConfigError : Error {
    using Error::Error;
};

/// A frequency block's linear system is numerically singular
/// (LU pivot below 1e-14 of the largest entry).
struct SingularBlockError : Error {
    int frequency = -1;
    SingularBlockError(const std::string& msg, int k = -1)
        : Error(msg), frequency(k) {}
};

/// An iterative solve hit its iteration cap before reaching tolerance.
/// Carries the residual history up to the failure.
struct MaxIterationsError : Error {
    std::vector<double> history;
    int frequency = -1;  // set when raised by a per-frequency block solve
    MaxIterationsError(const std::string& msg, std::vector<double> hist = {},
                       int k = -1)
        : Error(msg), history(std::move(hist)), frequency(k) {}
};

/// Newton failed: residual increased over three consecutive iterations or
/// the iteration cap was reached.
struct NewtonDivergedError : Error {
    int step_index = -1;  // failing serial step or window, when known
    NewtonDivergedError(const std::string& msg, int idx = -1)
        : Error(msg), step_index(idx) {}
};

/// Arnoldi basis norm underflowed without convergence.
struct BreakdownError : Error {
    using Error::Error;
};

/// A psi ratio is undefined because some lambda2 eigenvalue is zero.
struct DivisionByZeroError : Error {
    int frequency = -1;
    DivisionByZeroError(const std::string& msg, int k)
        : Error(msg), frequency(k) {}
};

/// Performance-model inputs outside the domain of the requested quantity.
struct InvalidInputError : Error {
    using Error::Error;
};

/// Serial and parallel reports come from different problems.
struct MismatchedReportsError : Error {
    using Error::Error;
};

}  // namespace paradiag
