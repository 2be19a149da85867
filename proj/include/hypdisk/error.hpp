#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hypdisk {

enum class ErrorKind {
    parse,            // malformed DSL text
    non_real_exponent,
    unknown_identifier,
    branch_cut,       // log / pow evaluated on the negative real axis
    pole,             // division by (near) zero, coth pole
    zero_derivative,  // operator needs phi'(z) != 0
    zero_a,           // operator needs A_phi(z) != 0
    not_critical,     // point fails the critical-point residual test
    not_saddle,
    invalid_argument,
    domain,           // |z| >= 1 or |phi(z)| >= 1
    quadrature,
    io,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::non_real_exponent: return "non_real_exponent";
    case ErrorKind::unknown_identifier: return "unknown_identifier";
    case ErrorKind::branch_cut: return "branch_cut";
    case ErrorKind::pole: return "pole";
    case ErrorKind::zero_derivative: return "zero_derivative";
    case ErrorKind::zero_a: return "zero_a";
    case ErrorKind::not_critical: return "not_critical";
    case ErrorKind::not_saddle: return "not_saddle";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::domain: return "domain";
    case ErrorKind::quadrature: return "quadrature";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// True for errors caused by the input text rather than by numerics.
    bool is_usage() const noexcept {
        return kind_ == ErrorKind::parse || kind_ == ErrorKind::non_real_exponent ||
               kind_ == ErrorKind::unknown_identifier ||
               kind_ == ErrorKind::invalid_argument || kind_ == ErrorKind::io;
    }

private:
    ErrorKind kind_;
};

class ParseError : public Error {
public:
    ParseError(ErrorKind kind, std::size_t position, const std::string& msg)
        : Error(kind, msg + " at position " + std::to_string(position)),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

} // namespace hypdisk
