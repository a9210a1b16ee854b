#pragma once

#include <stdexcept>
#include <string>

namespace flowerbed {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Point lies outside the chart domain of a model.
struct DomainError : Error {
    using Error::Error;
};

// Geodesic integration left the atlas without a valid chart handoff.
struct IntegrationError : Error {
    using Error::Error;
};

// Two-point shooting failed to converge; carries the offending pair so the
// caller can subdivide.
struct NoConvergenceError : Error {
    NoConvergenceError(const std::string& what, double gap)
        : Error(what), gap_length(gap) {}
    double gap_length = 0.0;
};

struct DegenerateEdgeError : Error {
    using Error::Error;
};

struct InvalidCageError : Error {
    using Error::Error;
};

// certify() refuses flowers whose certificate is not stationary.
struct NotCertifiedError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    ConfigError(const std::string& file, int line, const std::string& msg)
        : Error(file + ":" + std::to_string(line) + ": " + msg), line_no(line) {}
    explicit ConfigError(const std::string& msg) : Error(msg), line_no(0) {}
    int line_no = 0;
};

}  // namespace flowerbed
