#pragma once

#include "dkp/error.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace dkp {

/// Parameters of the confluent hypergeometric function M(alpha, gamma_c; x).
struct KummerParams {
    double alpha;
    double gamma_c;
};

inline bool is_nonpositive_integer(double v)
{
    return v <= 0.0 && v == std::floor(v);
}

/// Coefficients c_k of the terminating series M(-n, gamma_c; x) = sum_k c_k x^k.
inline std::vector<double> kummer_polynomial(int n, double gamma_c)
{
    if (n < 0)
        throw Error(ErrorKind::domain, "polynomial degree must be non-negative");
    if (is_nonpositive_integer(gamma_c))
        throw Error(ErrorKind::pole, "second Kummer parameter is a non-positive integer");
    std::vector<double> c(static_cast<std::size_t>(n) + 1);
    c[0] = 1.0;
    for (int k = 0; k < n; ++k)
        c[static_cast<std::size_t>(k) + 1] =
            c[static_cast<std::size_t>(k)] * (k - n) / ((gamma_c + k) * (k + 1.0));
    return c;
}

inline constexpr int kummer_max_terms = 500;

/// Kummer's function M(alpha, gamma_c; x) for x >= 0.
inline double kummer_m(const KummerParams& p, double x)
{
    if (is_nonpositive_integer(p.gamma_c))
        throw Error(ErrorKind::pole, "second Kummer parameter is a non-positive integer");
    if (!(x >= 0.0))
        throw Error(ErrorKind::domain, "Kummer function evaluated at negative argument");
    if (is_nonpositive_integer(p.alpha)) {
        const auto c = kummer_polynomial(static_cast<int>(-p.alpha), p.gamma_c);
        double acc = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it)
            acc = acc * x + *it;
        return acc;
    }
    double term = 1.0;
    double sum = 1.0;
    int small_run = 0;
    for (int k = 0; k < kummer_max_terms; ++k) {
        term *= (p.alpha + k) / ((p.gamma_c + k) * (k + 1.0)) * x;
        sum += term;
        small_run = std::abs(term) < 1e-17 * std::abs(sum) ? small_run + 1 : 0;
        if (small_run == 3)
            return sum;
    }
    throw Error(ErrorKind::accuracy, "Kummer series did not converge within the term cap");
}

} // namespace dkp
