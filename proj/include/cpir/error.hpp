#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cpir {

enum class ErrorCode {
    domain,      // unknown variable, bad label, malformed table
    validation,  // input that parses but violates a precondition
    size_cap,    // enumeration or search above its configured cap
    resolution,  // grid too coarse for the requested construction
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::domain: return "domain_error";
        case ErrorCode::validation: return "validation_error";
        case ErrorCode::size_cap: return "size_cap_exceeded";
        case ErrorCode::resolution: return "resolution_error";
    }
    return "unknown_error";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& message) : Error(ErrorCode::domain, message) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& message) : Error(ErrorCode::validation, message) {}
};

struct SizeError : Error {
    explicit SizeError(const std::string& message) : Error(ErrorCode::size_cap, message) {}
};

struct ResolutionError : Error {
    explicit ResolutionError(const std::string& message) : Error(ErrorCode::resolution, message) {}
};

}  // namespace cpir
