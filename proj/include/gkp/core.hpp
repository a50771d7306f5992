#pragma once
// Shared scalar types, constants and the error model used across the library.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gkp {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// Every failure raised by the library carries a kind so that front ends can
// map it onto an exit status without string matching.
enum class ErrorKind {
    parameter,        // value outside the documented range
    usage,            // structurally wrong call (dimension / mode mismatch)
    numeric,          // arithmetic precondition violated (e.g. overlap > 1)
    resolution,       // grid cannot represent the requested state
    domain_overflow,  // support would leave the simulation grid
    capability,       // operation not available in this backend
    capacity,         // configured size limit exceeded
    precondition,     // mathematical precondition of a formula not met
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::parameter: return "parameter";
        case ErrorKind::usage: return "usage";
        case ErrorKind::numeric: return "numeric";
        case ErrorKind::resolution: return "resolution";
        case ErrorKind::domain_overflow: return "domain-overflow";
        case ErrorKind::capability: return "capability";
        case ErrorKind::capacity: return "capacity";
        case ErrorKind::precondition: return "precondition";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool ok, ErrorKind kind, const std::string& what) {
    if (!ok) fail(kind, what);
}

// CLI exit-status contract: 2 usage/parameter, 4 numerical capability failure.
inline int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::parameter:
        case ErrorKind::usage: return 2;
        default: return 4;
    }
}

inline double sq(double x) { return x * x; }
inline double norm2(cplx z) { return std::norm(z); }

// Round half toward zero: ties at ±k.5 go to the integer nearer zero, so
// x - round_half_to_zero(x) always lies in [-1/2, 1/2].
inline long round_half_to_zero(double x) {
    double f = std::floor(x);
    double frac = x - f;
    if (frac > 0.5) return static_cast<long>(f) + 1;
    if (frac < 0.5) return static_cast<long>(f);
    return x > 0 ? static_cast<long>(f) : static_cast<long>(f) + 1;
}

}  // namespace gkp
