#pragma once

#include "dkp/kummer.hpp"
#include "dkp/ladder.hpp"
#include "dkp/profile.hpp"
#include "dkp/quantization.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

namespace dkp {

/// phi(r) = scale * x^{|m|/2} e^{-x/2} P(x) with x = B r^2 and
/// P = M(-n, |m| + 1; x), sampled on a grid and carried as a closed form.
struct RadialEigenfunction {
    int n = 0;
    int m = 0;
    double b_field = 0.0;
    double lambda2 = 0.0;
    double scale = 1.0;
    std::vector<double> poly;  // coefficients of P in powers of x
    RadialProfile profile;
    std::vector<std::string> warnings;

    double half_power() const { return 0.5 * std::abs(m); }

    double poly_value(double x, int derivative = 0) const
    {
        double acc = 0.0;
        for (std::size_t k = poly.size(); k-- > static_cast<std::size_t>(derivative);) {
            double c = poly[k];
            for (int d = 0; d < derivative; ++d)
                c *= static_cast<double>(k) - d;
            acc = acc * x + c;
        }
        return acc;
    }

    /// Value and first two x-derivatives of phi at x > 0.
    struct Jet {
        double value, d1, d2;
    };

    Jet at_x(double x) const
    {
        const double a = half_power();
        const double p = poly_value(x), p1 = poly_value(x, 1), p2 = poly_value(x, 2);
        const double xa = std::pow(x, a);
        const double q = xa * p;
        const double q1 = (a != 0.0 ? a * xa / x * p : 0.0) + xa * p1;
        const double q2 = (a != 0.0 ? a * (a - 1.0) * xa / (x * x) * p + 2.0 * a * xa / x * p1 : 0.0) + xa * p2;
        const double e = scale * std::exp(-0.5 * x);
        return {e * q, e * (q1 - 0.5 * q), e * (q2 - q1 + 0.25 * q)};
    }

    double value_x(double x) const { return at_x(x).value; }

    /// Sign changes of P on (0, inf); P has real positive roots only, all
    /// below 2n + |m| + 2 + 2 sqrt(n (n + |m|)), so a dense scan past that bound suffices.
    int polynomial_sign_changes() const
    {
        const double upper = 4.0 * n + 2.0 * std::abs(m) + 10.0;
        const int samples = 20000;
        int changes = 0;
        double previous = poly_value(0.0);
        for (int i = 1; i <= samples; ++i) {
            const double v = poly_value(upper * i / samples);
            if ((v < 0.0) != (previous < 0.0) && v != 0.0)
                ++changes;
            if (v != 0.0)
                previous = v;
        }
        return changes;
    }
};

namespace detail {

/// r-space closed form of scale * (B r^2)^{|m|/2} e^{-B r^2/2} sum_k c_k (B r^2)^k.
inline GaussianSeries eigen_series(int m, double b_field, double scale, const std::vector<double>& poly)
{
    const int am = std::abs(m);
    std::vector<cplx> coeffs(2 * poly.size() - 1, 0.0);
    const double base = scale * std::pow(b_field, 0.5 * am);
    double bk = 1.0;
    for (std::size_t k = 0; k < poly.size(); ++k) {
        coeffs[2 * k] = base * poly[k] * bk;
        bk *= b_field;
    }
    return {b_field, am, std::move(coeffs)};
}

inline void check_tail(RadialEigenfunction& f)
{
    const double peak = f.profile.max_norm();
    const double tail = std::abs(f.profile[f.profile.size() - 1]);
    if (peak > 0.0 && tail > 1e-12 * peak)
        f.warnings.emplace_back("truncation: profile has not decayed below 1e-12 of its peak at r_max");
}

} // namespace detail

inline RadialEigenfunction build_eigenfunction(int n, int m, double b_field, const RadialGrid& grid)
{
    if (n < 0)
        throw Error(ErrorKind::domain, "radial quantum number n must be non-negative");
    detail::require_positive_field(b_field);
    auto poly = kummer_polynomial(n, std::abs(m) + 1.0);
    RadialProfile profile(grid, detail::eigen_series(m, b_field, 1.0, poly), m);
    RadialEigenfunction f{n, m, b_field, lambda2_quantized(n, m, b_field), 1.0, std::move(poly), std::move(profile), {}};
    detail::check_tail(f);
    return f;
}

/// Rescales so that int |phi|^2 r dr = 1: exact Gaussian moments on [0, inf)
/// for closed forms, composite Simpson on the grid (plus the small gap below
/// r_min) otherwise.
inline RadialEigenfunction normalize(const RadialEigenfunction& f)
{
    double norm2 = 0.0;
    if (f.profile.has_closed_form()) {
        norm2 = f.profile.closed_form()->weighted_norm2();
    } else {
        std::vector<cplx> density(f.profile.size());
        for (std::size_t i = 0; i < density.size(); ++i)
            density[i] = std::norm(f.profile[i]) * f.profile.grid().node(i);
        norm2 = integrate_from_origin(f.profile.grid(), density).real();
    }
    if (!(norm2 > 0.0))
        throw Error(ErrorKind::domain, "cannot normalize a zero profile");
    RadialEigenfunction out = f;
    const double factor = 1.0 / std::sqrt(norm2);
    out.scale *= factor;
    out.profile = f.profile * factor;
    if (out.warnings.empty())
        detail::check_tail(out);
    return out;
}

/// Relative residual of x phi'' + phi' - (m^2/(4x) + x/4 + m/2 - lambda^2/(4B)) phi
/// on `samples` evenly spaced points of [x_lo, x_hi], normalized by the largest term.
inline double ode_residual_x(const RadialEigenfunction& f, double x_lo = 0.1, double x_hi = 20.0,
                             int samples = 2000)
{
    const double md = static_cast<double>(f.m);
    const double shift = md / 2.0 - f.lambda2 / (4.0 * f.b_field);
    double worst = 0.0, scale = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double x = x_lo + (x_hi - x_lo) * i / samples;
        const auto j = f.at_x(x);
        const double t1 = x * j.d2, t2 = j.d1, t3 = -(md * md / (4.0 * x) + x / 4.0 + shift) * j.value;
        worst = std::max(worst, std::abs(t1 + t2 + t3));
        scale = std::max({scale, std::abs(t1), std::abs(t2), std::abs(t3)});
    }
    return scale > 0.0 ? worst / scale : 0.0;
}

/// Relative residual of Delta_m phi + lambda^2 phi over interior nodes; the
/// sampled variant goes through the finite-difference path.
inline double ode_residual_r(const RadialEigenfunction& f, bool sampled = false)
{
    const RadialProfile p = sampled ? f.profile.sampled() : f.profile;
    const RadialProfile lap = laplacian(f.m, f.b_field, p);
    return relative_interior_difference(lap, -f.lambda2 * p, std::max(lap.interior_max_norm(),
                                                                       f.lambda2 * p.interior_max_norm()));
}

} // namespace dkp
