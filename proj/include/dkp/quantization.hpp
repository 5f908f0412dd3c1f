#pragma once

#include "dkp/error.hpp"

#include <algorithm>

namespace dkp {

/// lambda^2 = 4B (n + 1/2 + (|m| + m)/2), computed with a single rounding.
inline double lambda2_quantized(int n, int m, double b_field)
{
    if (n < 0)
        throw Error(ErrorKind::domain, "radial quantum number n must be non-negative");
    if (!(b_field > 0.0))
        throw Error(ErrorKind::domain, "magnetic field parameter B must be positive");
    const long long units = 4LL * n + 2 + 4LL * std::max(m, 0);
    return b_field * static_cast<double>(units);
}

} // namespace dkp
