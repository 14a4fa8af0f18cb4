#pragma once

#include <stdexcept>
#include <string>

namespace misobc {

// Errors raised by the core library. Non-convergence of iterative solvers is
// reported through SolveStatus on the result objects, never by throwing.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Mismatched or invalid matrix/vector dimensions.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Problem too large for an exhaustive method (e.g. 2^K subset enumeration).
class CapacityError : public Error {
public:
    using Error::Error;
};

// A rate target cannot be met with finite power.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

// Requested configuration is outside what the method supports (ZF with K > M).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

// A Monte-Carlo quantity has no finite expectation.
class DivergenceError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

enum class SolveStatus { converged, max_iterations };

inline const char* to_string(SolveStatus s) {
    return s == SolveStatus::converged ? "converged" : "max_iterations";
}

}  // namespace misobc
