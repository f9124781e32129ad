#pragma once

#include <stdexcept>
#include <string>

namespace cksf {

/// Base class of every error raised by the simulator.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A file-loaded initial density has a negative entry.
class CustomFieldNegative : public Error {
public:
    using Error::Error;
};

/// Two fields (or a field and a grid) disagree on shape.
class GridMismatch : public Error {
public:
    using Error::Error;
};

class NegativeDensity : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, int iterations, double last_residual)
        : Error(what), iterations_(iterations), last_residual_(last_residual) {}

    int iterations() const noexcept { return iterations_; }
    double last_residual() const noexcept { return last_residual_; }

private:
    int iterations_;
    double last_residual_;
};

class CflViolation : public Error {
public:
    using Error::Error;
};

/// A substep broke a monotonicity post-condition. This indicates a time-step
/// contract bug, never a tolerance to tune.
class MonotonicityViolation : public Error {
public:
    using Error::Error;
};

class InvariantViolation : public Error {
public:
    InvariantViolation(std::string check, const std::string& detail)
        : Error(check + ": " + detail), check_(std::move(check)) {}

    const std::string& check() const noexcept { return check_; }

private:
    std::string check_;
};

class ConfigError : public Error {
public:
    enum class Kind { unknown_key, type_error, range_error };

    ConfigError(Kind kind, int line, const std::string& message)
        : Error(label(kind) + " at line " + std::to_string(line) + ": " + message),
          kind_(kind), line_(line) {}

    Kind kind() const noexcept { return kind_; }
    int line() const noexcept { return line_; }

    static std::string label(Kind kind) {
        switch (kind) {
        case Kind::unknown_key: return "UnknownKey";
        case Kind::type_error: return "TypeError";
        case Kind::range_error: return "RangeError";
        }
        return "ConfigError";
    }

private:
    Kind kind_;
    int line_;
};

/// Malformed CKSF1 snapshot (bad header or wrong payload length).
class SnapshotError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace cksf
