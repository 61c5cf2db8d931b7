#pragma once

#include <stdexcept>
#include <string>

namespace surfdk {

/// Error categories shared between the C++ core and the C API.
enum class ErrorCode {
    invalid_argument = 1,
    config = 2,
    dimension = 3,
    size_guard = 4,
    blowup = 5,
    no_convergence = 6,
    io = 7,
    internal = 8,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorCode::config, what) {}
};

struct DimensionError : Error {
    explicit DimensionError(const std::string& what) : Error(ErrorCode::dimension, what) {}
};

struct SizeGuardError : Error {
    explicit SizeGuardError(const std::string& what) : Error(ErrorCode::size_guard, what) {}
};

/// Thrown when an integrator produces a non-finite value.
struct BlowupError : Error {
    BlowupError(const std::string& what, long long index, double time)
        : Error(ErrorCode::blowup, what), index(index), time(time) {}
    long long index;  // particle index or step index
    double time;
};

struct NoConvergenceError : Error {
    explicit NoConvergenceError(const std::string& what) : Error(ErrorCode::no_convergence, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

}  // namespace surfdk
