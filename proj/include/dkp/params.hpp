#pragma once

#include "dkp/error.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

namespace dkp {

/// Inputs in natural units: M = Mc/hbar, B = eB/(2 hbar), k the longitudinal
/// momentum, sigma the polarizability coupling (0 for the ordinary particle).
struct PhysicalParams {
    double M = 1.0;
    double B = 0.5;
    double k = 0.0;
    double sigma = 0.0;

    void validate() const
    {
        if (!(M > 0.0) || !std::isfinite(M))
            throw Error(ErrorKind::domain, "mass M must be positive and finite");
        if (!(B > 0.0) || !std::isfinite(B))
            throw Error(ErrorKind::domain, "magnetic field parameter B must be positive and finite");
        if (!std::isfinite(k) || !std::isfinite(sigma))
            throw Error(ErrorKind::domain, "k and sigma must be finite");
    }

    /// beta = 4 B^2 sigma / M^2
    double beta() const { return 4.0 * B * B * sigma / (M * M); }
};

/// The three linearly independent solution families: the scalar family with
/// only F nonzero, and the two eigenlines of the (g, G) coupling.
enum class Branch { scalar_f, g_plus, g_minus };

inline constexpr Branch all_branches[] = {Branch::scalar_f, Branch::g_plus, Branch::g_minus};

inline std::string_view to_string(Branch b)
{
    switch (b) {
    case Branch::scalar_f: return "scalar_f";
    case Branch::g_plus: return "g_plus";
    case Branch::g_minus: return "g_minus";
    }
    return "unknown";
}

inline std::optional<Branch> parse_branch(std::string_view s)
{
    for (auto b : all_branches)
        if (to_string(b) == s)
            return b;
    return std::nullopt;
}

/// Sign convention of the polarizable (g, G) coupling. `printed` follows the
/// reduced equations as published; `first_order_consistent` flips the sign of
/// the beta*gamma entry (and the matching term of the f relation), which is the
/// form actually implied by the 15-equation first-order system.
enum class CouplingConvention { printed, first_order_consistent };

inline std::string_view to_string(CouplingConvention c)
{
    return c == CouplingConvention::printed ? "printed" : "consistent";
}

inline std::optional<CouplingConvention> parse_convention(std::string_view s)
{
    if (s == "printed")
        return CouplingConvention::printed;
    if (s == "consistent")
        return CouplingConvention::first_order_consistent;
    return std::nullopt;
}

struct QuantumNumbers {
    int n = 0;
    int m = 0;
};

} // namespace dkp
