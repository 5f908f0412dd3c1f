#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dkp {

enum class ErrorKind {
    domain,              // argument outside the operation's domain
    grid_mismatch,       // profiles sampled on different grids
    discretization,      // grid too coarse for the stencil
    singular_node,       // node at r = 0
    boundary_condition,  // input does not decay as the quadrature assumes
    regularity,          // weighted integral diverges at the origin
    pole,                // Kummer second parameter is a non-positive integer
    accuracy,            // series failed to converge within the iteration cap
    degenerate,          // coincident eigenvalues / vanishing leading coefficient
    singular_map,        // epsilon^2 = k^2 in the (F, G) <-> (Phi0, Phi2) map
    configuration,       // invalid run configuration
};

inline std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::grid_mismatch: return "grid_mismatch";
    case ErrorKind::discretization: return "discretization";
    case ErrorKind::singular_node: return "singular_node";
    case ErrorKind::boundary_condition: return "boundary_condition";
    case ErrorKind::regularity: return "regularity";
    case ErrorKind::pole: return "pole";
    case ErrorKind::accuracy: return "accuracy";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::singular_map: return "singular_map";
    case ErrorKind::configuration: return "configuration";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& message() const noexcept { return message_; }

    /// Same error with `context` prepended to the message.
    Error within(const std::string& context) const { return {kind_, context + ": " + message_}; }

private:
    ErrorKind kind_;
    std::string message_;
};

} // namespace dkp
