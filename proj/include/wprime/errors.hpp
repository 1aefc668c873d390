#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace wprime {

/// Machine-greppable failure category. Every exception thrown by the library
/// carries one of these; the CLI prints it verbatim as the first token of the
/// failure line.
enum class ErrorCode { Parse, Dim, Wellposed, Domain, Io, Threshold };

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::Parse: return "E_PARSE";
        case ErrorCode::Dim: return "E_DIM";
        case ErrorCode::Wellposed: return "E_WELLPOSED";
        case ErrorCode::Domain: return "E_DOMAIN";
        case ErrorCode::Io: return "E_IO";
        case ErrorCode::Threshold: return "E_THRESHOLD";
    }
    return "E_UNKNOWN";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Malformed model text, bad dimensions or missing fields.
class ModelError : public Error {
public:
    using Error::Error;
};

/// A scheduling point outside the box, or an out-of-range configuration value.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorCode::Domain, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

/// I - A(p) Ts/2 is (numerically) singular. Carries the offending matrix and
/// sampling time so callers can report where the discretization broke down.
class WellposednessError : public Error {
public:
    WellposednessError(const std::string& what, Eigen::MatrixXd a_p, double ts)
        : Error(ErrorCode::Wellposed, what), a_p_(std::move(a_p)), ts_(ts) {}

    const Eigen::MatrixXd& a_p() const noexcept { return a_p_; }
    double ts() const noexcept { return ts_; }

private:
    Eigen::MatrixXd a_p_;
    double ts_;
};

}  // namespace wprime
