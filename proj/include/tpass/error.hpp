#pragma once

#include <stdexcept>
#include <string>

namespace tpass {

enum class ErrorKind {
    invalid_params,
    degenerate_geometry,
    order_violation,
    spacing_infeasible,
    config_error,
    io_error,
};

inline const char* to_string(ErrorKind kind)
{
    switch (kind) {
        case ErrorKind::invalid_params: return "invalid-params";
        case ErrorKind::degenerate_geometry: return "degenerate-geometry";
        case ErrorKind::order_violation: return "order-violation";
        case ErrorKind::spacing_infeasible: return "spacing-infeasible";
        case ErrorKind::config_error: return "config-error";
        case ErrorKind::io_error: return "io-error";
    }
    return "unknown";
}

class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what)
    {}

    ErrorKind kind() const noexcept { return kind_; }

    /// Message without the kind prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

} // namespace tpass
