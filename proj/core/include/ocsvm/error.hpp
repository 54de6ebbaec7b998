#pragma once

#include <stdexcept>
#include <string>

namespace ocsvm {

// Base class for all failures raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid configuration or argument values: bad hyperparameters, malformed
// kernel specifications, out-of-range options.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Problems with input data: parse failures, dimension or count mismatches,
// missing labels, truncated files.
class DataError : public Error {
public:
    using Error::Error;
};

// Optimizer failures: exhausted iteration budget, non-convex curvature,
// infeasible constraints.
class SolverError : public Error {
public:
    using Error::Error;
};

} // namespace ocsvm
