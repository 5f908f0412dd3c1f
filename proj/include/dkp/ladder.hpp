#pragma once

#include "dkp/error.hpp"
#include "dkp/gaussian_series.hpp"
#include "dkp/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

namespace dkp {

enum class LadderKind { a, b_hat };

/// a_m = (d/dr + (m + B r^2)/r) / sqrt2,  b_m = (-d/dr + (m + B r^2)/r) / sqrt2.
struct LadderOperator {
    LadderKind kind;
    int m_index;
    double b_field;
};

namespace detail {

inline void require_positive_field(double b_field)
{
    if (!(b_field > 0.0) || !std::isfinite(b_field))
        throw Error(ErrorKind::domain, "magnetic field parameter B must be positive");
}

inline GaussianSeries ladder_exact(LadderKind kind, int m, double b_field, const GaussianSeries& f)
{
    const double sign = kind == LadderKind::a ? 1.0 : -1.0;
    GaussianSeries out = f.derivative() * cplx(sign);
    out += f.times_power(-1) * cplx(static_cast<double>(m));
    out += f.times_power(1) * cplx(b_field);
    return out * cplx((1.0 / std::numbers::sqrt2));
}

inline std::vector<cplx> ladder_sampled(LadderKind kind, int m, double b_field, const RadialProfile& f)
{
    const auto& grid = f.grid();
    auto d = fd::first_derivative(grid, f.values());
    const double sign = kind == LadderKind::a ? 1.0 : -1.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double r = grid.node(i);
        d[i] = (sign * d[i] + (m + b_field * r * r) / r * f[i]) * (1.0 / std::numbers::sqrt2);
    }
    return d;
}

} // namespace detail

/// Applies the operator. The m_index of the result is the input's: callers
/// track which azimuthal index each component carries.
inline RadialProfile apply_ladder(const LadderOperator& op, const RadialProfile& f)
{
    detail::require_positive_field(op.b_field);
    return transform_profile(
        f, [&](const GaussianSeries& s) { return detail::ladder_exact(op.kind, op.m_index, op.b_field, s); },
        [&](const RadialProfile& p) { return detail::ladder_sampled(op.kind, op.m_index, op.b_field, p); });
}

inline RadialProfile a_op(int m, double b_field, const RadialProfile& f)
{
    return apply_ladder({LadderKind::a, m, b_field}, f);
}

inline RadialProfile b_op(int m, double b_field, const RadialProfile& f)
{
    return apply_ladder({LadderKind::b_hat, m, b_field}, f);
}

/// f'' + f'/r - ((m + B r^2)/r)^2 f.
inline RadialProfile laplacian(int m, double b_field, const RadialProfile& f)
{
    detail::require_positive_field(b_field);
    const double md = static_cast<double>(m);
    return transform_profile(
        f,
        [&](const GaussianSeries& s) {
            GaussianSeries d1 = s.derivative();
            GaussianSeries out = d1.derivative();
            out += d1.times_power(-1);
            out += s.times_power(-2) * cplx(-md * md);
            out += s * cplx(-2.0 * md * b_field);
            out += s.times_power(2) * cplx(-b_field * b_field);
            return out;
        },
        [&](const RadialProfile& p) {
            const auto& grid = p.grid();
            const auto d1 = fd::first_derivative(grid, p.values());
            auto out = fd::second_derivative(grid, p.values());
            for (std::size_t i = 0; i < out.size(); ++i) {
                const double r = grid.node(i);
                const double w = (md + b_field * r * r) / r;
                out[i] += d1[i] / r - w * w * p[i];
            }
            return out;
        });
}

/// Max-norm of (a - b) over interior nodes divided by `scale` (0 when both vanish).
inline double relative_interior_difference(const RadialProfile& a, const RadialProfile& b, double scale)
{
    if (!(a.grid() == b.grid()))
        throw Error(ErrorKind::grid_mismatch, "profiles live on different grids");
    double diff = 0.0;
    for (std::size_t i = interior_margin; i + interior_margin < a.size(); ++i)
        diff = std::max(diff, std::abs(a[i] - b[i]));
    if (diff == 0.0)
        return 0.0;
    return scale > 0.0 ? diff / scale : std::numeric_limits<double>::infinity();
}

struct IdentityResiduals {
    double laplacian = 0.0;  // |(-b_{m-1} a_m - a_{m+1} b_m) f - Lap_m f| / |f|
    double two_b = 0.0;      // |(-b_{m-1} a_m + a_{m+1} b_m) f - 2B f| / |f|
};

inline IdentityResiduals verify_operator_identities(int m, double b_field, const RadialProfile& f)
{
    const RadialProfile ba = b_op(m - 1, b_field, a_op(m, b_field, f));
    const RadialProfile ab = a_op(m + 1, b_field, b_op(m, b_field, f));
    const double scale = f.interior_max_norm();
    IdentityResiduals out;
    out.laplacian = relative_interior_difference(-(ba + ab), laplacian(m, b_field, f), scale);
    out.two_b = relative_interior_difference(ab - ba, 2.0 * b_field * f, scale);
    return out;
}

enum class InversionMethod { automatic, quadrature };

struct Inversion {
    RadialProfile solution;
    double residual = 0.0;  // |L(solution) - Z| / |Z| over interior nodes
    bool analytic = false;
};

namespace detail {

/// Decaying solution of b_{m-1} phi = z inside the closed-form class, if it
/// exists there. Solves the two-term recurrence downward from the top power.
inline std::optional<GaussianSeries> invert_b_exact(int op_m, double b_field, const GaussianSeries& z)
{
    if (z.is_zero())
        return GaussianSeries{};
    const double g = z.gauss();
    const double lift = b_field + g;  // coefficient of r^{j+1} in b_{m-1} r^j
    if (!(g > 0.0) || lift == 0.0)
        return std::nullopt;
    const int hi = z.highest_power();
    const int lo = z.lowest_power();
    constexpr int extra_depth = 64;
    // phi_{p-1} = (sqrt2 z_p - (op_m - 1 - p) phi_{p+1}) / lift
    std::vector<cplx> phi;  // phi[k] holds power hi + 1 - k
    auto at = [&](int power) -> cplx {
        const int k = hi + 1 - power;
        return (k >= 0 && k < static_cast<int>(phi.size())) ? phi[static_cast<std::size_t>(k)] : cplx(0.0);
    };
    phi.push_back(0.0);  // power hi + 1
    phi.push_back(0.0);  // power hi
    for (int p = hi;; --p) {
        const cplx next =
            (std::numbers::sqrt2 * z.coefficient(p) - static_cast<double>(op_m - 1 - p) * at(p + 1)) / lift;
        phi.push_back(next);  // power p - 1
        if (p < lo && next == 0.0 && at(p) == 0.0)
            break;
        if (p < lo - extra_depth)
            return std::nullopt;
    }
    const int lowest = hi + 1 - static_cast<int>(phi.size()) + 1;
    std::reverse(phi.begin(), phi.end());
    // singular powers that only carry cancellation noise are dropped
    double peak = 0.0;
    for (auto c : phi)
        peak = std::max(peak, std::abs(c));
    for (int k = 0; k < static_cast<int>(phi.size()) && lowest + k < 0; ++k)
        if (std::abs(phi[static_cast<std::size_t>(k)]) <= 1e-12 * peak)
            phi[static_cast<std::size_t>(k)] = 0.0;
    return GaussianSeries(g, lowest, std::move(phi));
}

/// Solution of a_{m+1} phi = z with zero coefficient on the kernel power.
inline std::optional<GaussianSeries> invert_a_exact(int m, double b_field, const GaussianSeries& z)
{
    if (z.is_zero())
        return GaussianSeries{};
    if (z.gauss() != b_field)
        return std::nullopt;  // the r^{j+1} terms no longer cancel
    std::vector<cplx> phi;
    for (int j = z.lowest_power(); j <= z.highest_power(); ++j) {
        const int denom = j + m + 2;
        if (denom == 0)
            return std::nullopt;
        phi.push_back(std::numbers::sqrt2 * z.coefficient(j) / static_cast<double>(denom));
    }
    return GaussianSeries(z.gauss(), z.lowest_power() + 1, std::move(phi));
}

inline double log_abs(cplx z)
{
    const double a = std::abs(z);
    return a > 0.0 ? std::log(a) : -std::numeric_limits<double>::infinity();
}

} // namespace detail

namespace detail {

/// Integrating-factor sweeps: phi = (c / w) * int w Z dt on the grid, with
/// log w(r) = power * ln r + quad * r^2. Each interval is integrated as a cubic
/// interpolant of Z times the exact weight, so the rapidly varying factor
/// (t / r)^power near the origin costs no accuracy. Weights are only ever used
/// as ratios exp(log w(t) - log w(r_i)), so nothing overflows.
struct Sweep {
    const RadialGrid& grid;
    const RadialProfile& z;
    double power;
    double quad;
    std::vector<double> log_w;

    Sweep(const RadialGrid& g, const RadialProfile& profile, double power_, double quad_)
        : grid(g), z(profile), power(power_), quad(quad_), log_w(g.size())
    {
        for (std::size_t i = 0; i < g.size(); ++i)
            log_w[i] = weight(g.node(i));
    }

    double weight(double r) const { return power * std::log(r) + quad * r * r; }

    /// int_{r_i}^{r_{i+1}} exp(log w(t) - ref) Z(t) dt
    cplx segment(std::size_t i, double ref) const
    {
        // 6-point Gauss-Legendre on [0, 1]
        static constexpr double nodes[6] = {0.033765242898423987, 0.16939530676686776, 0.38069040695840156,
                                            0.61930959304159844,  0.83060469323313224, 0.96623475710157601};
        static constexpr double weights[6] = {0.085662246189585173, 0.18038078652406931, 0.23395696728634552,
                                              0.23395696728634552,  0.18038078652406931, 0.085662246189585173};
        const std::size_t n = grid.size();
        const std::size_t j0 = std::min(i > 0 ? i - 1 : 0, n - 4);
        const double offset = static_cast<double>(i - j0);
        const double h = grid.step();
        const double r0 = grid.node(i);
        cplx total = 0.0;
        for (int q = 0; q < 6; ++q) {
            const double u = nodes[q];
            const double x = offset + u;  // position in node units relative to j0
            const double l0 = -(x - 1) * (x - 2) * (x - 3) / 6.0;
            const double l1 = x * (x - 2) * (x - 3) / 2.0;
            const double l2 = -x * (x - 1) * (x - 3) / 2.0;
            const double l3 = x * (x - 1) * (x - 2) / 6.0;
            const cplx zi = l0 * z[j0] + l1 * z[j0 + 1] + l2 * z[j0 + 2] + l3 * z[j0 + 3];
            double t = 0.0, jac = 1.0;
            if (grid.spacing() == Spacing::uniform) {
                t = r0 + u * h;
            } else {
                t = r0 * std::exp(u * h);
                jac = t;
            }
            total += weights[q] * std::exp(weight(t) - ref) * jac * zi;
        }
        return total * h;
    }

    /// phi_{i+1} = (w_i phi_i + factor int_{r_i}^{r_{i+1}} w Z) / w_{i+1}, for i < last.
    void outward(std::vector<cplx>& phi, double factor, std::size_t last) const
    {
        for (std::size_t i = 0; i < last; ++i) {
            const double ref = log_w[i + 1];
            phi[i + 1] = std::exp(log_w[i] - ref) * phi[i] + factor * segment(i, ref);
        }
    }

    /// phi_i = (w_{i+1} phi_{i+1} - factor int_{r_i}^{r_{i+1}} w Z) / w_i, for i >= first.
    void inward(std::vector<cplx>& phi, double factor, std::size_t first) const
    {
        for (std::size_t i = grid.size() - 1; i-- > first;) {
            const double ref = log_w[i];
            phi[i] = std::exp(log_w[i + 1] - ref) * phi[i + 1] - factor * segment(i, ref);
        }
    }

    /// Local power law of the weighted integrand between nodes 0 and 2.
    std::optional<double> origin_exponent() const
    {
        if (z[0] == 0.0 || z[2] == 0.0)
            return std::nullopt;
        return (log_w[2] + log_abs(z[2]) - log_w[0] - log_abs(z[0])) / std::log(grid.node(2) / grid.node(0));
    }

    /// (1 / w_0) int_0^{r_min} w Z dt. A regular Z behaves as t^s (c0 + c2 t^2)
    /// with integer s, fitted from the first two nodes and integrated against
    /// t^power (1 + quad t^2); anything else is treated as a pure power law.
    cplx origin_piece() const
    {
        const auto q = origin_exponent();
        if (!q)
            return 0.0;
        const double r0 = grid.node(0), r1 = grid.node(1);
        if (z[1] != 0.0) {
            const double s_fit = std::log(std::abs(z[1]) / std::abs(z[0])) / std::log(r1 / r0);
            const double s = std::round(s_fit);
            const double e = power + s;
            if (std::abs(s_fit - s) < 0.25 && e > -1.0) {
                const cplx u0 = z[0] / std::pow(r0, s), u1 = z[1] / std::pow(r1, s);
                const cplx c2 = (u1 - u0) / (r1 * r1 - r0 * r0);
                const cplx c0 = u0 - c2 * (r0 * r0);
                const cplx integral =
                    c0 * std::pow(r0, e + 1) / (e + 1) + (c2 + quad * c0) * std::pow(r0, e + 3) / (e + 3);
                return integral / std::exp(log_w[0]);
            }
        }
        return z[0] * r0 / (*q + 1.0);
    }
};

inline void check_decay(const Sweep& sw)
{
    const std::size_t n = sw.grid.size();
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        peak = std::max(peak, sw.log_w[i] + log_abs(sw.z[i]));
    if (std::isfinite(peak) && sw.log_w[n - 1] + log_abs(sw.z[n - 1]) > peak + std::log(1e-8))
        throw Error(ErrorKind::boundary_condition,
                    "weighted integrand does not vanish at r_max; input does not decay fast enough");
}

/// For a negative operator index the decaying solution is regular only when
/// int_0^inf w Z dt vanishes, i.e. Z is orthogonal to the kernel of the adjoint.
inline void check_solvable(const Sweep& sw)
{
    const std::size_t n = sw.grid.size();
    const double ref = *std::max_element(sw.log_w.begin(), sw.log_w.end());
    cplx total = sw.origin_piece() * std::exp(sw.log_w[0] - ref);
    double scale = std::abs(total);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const cplx piece = sw.segment(i, ref);
        total += piece;
        scale += std::abs(piece);
    }
    if (scale > 0.0 && std::abs(total) > 1e-6 * scale)
        throw Error(ErrorKind::regularity,
                    "right-hand side has a component along the adjoint kernel; no regular decaying solution");
}

} // namespace detail

/// Solves b_{m_index-1} phi = z for the solution decaying at r_max:
///   phi(r) = sqrt2 r^{m-1} e^{B r^2/2} int_r^{r_max} t^{-(m-1)} e^{-B t^2/2} z(t) dt.
/// `allow_singular` accepts a decaying solution that blows up at the origin
/// (m_index <= 0 with a source along the adjoint kernel) instead of raising.
inline Inversion invert_b(int m_index, double b_field, const RadialProfile& z,
                          InversionMethod method = InversionMethod::automatic, bool allow_singular = false)
{
    detail::require_positive_field(b_field);
    const int op_m = m_index - 1;
    const auto& grid = z.grid();
    const std::size_t n = grid.size();
    if (n < 5)
        throw Error(ErrorKind::discretization, "inversion needs at least 5 nodes");

    auto finish = [&](RadialProfile phi, bool analytic) {
        const RadialProfile back = b_op(op_m, b_field, phi);
        const double res = relative_interior_difference(back, z, z.interior_max_norm());
        return Inversion{std::move(phi), res, analytic};
    };

    if (method == InversionMethod::automatic && z.has_closed_form()) {
        if (auto exact = detail::invert_b_exact(op_m, b_field, *z.closed_form())) {
            if (!allow_singular && !exact->is_zero() && exact->lowest_power() < 0 &&
                exact->lowest_power() <= z.closed_form()->lowest_power())
                throw Error(ErrorKind::regularity, "the decaying solution is singular at the origin");
            return finish(RadialProfile(grid, *exact, z.m_index()), true);
        }
    }

    const detail::Sweep sw(grid, z, -static_cast<double>(op_m), -0.5 * b_field);
    detail::check_decay(sw);
    if (op_m < 0 && !allow_singular)
        detail::check_solvable(sw);

    std::vector<cplx> phi(n, 0.0);
    // For op_m < 0 the homogeneous solution r^{op_m} e^{B r^2/2} blows up at the
    // origin, so an inward sweep would amplify quadrature error there. The
    // decaying solution is then also the regular one: sweep outward up to the
    // kernel minimum r* = sqrt(-op_m / B) and inward beyond it.
    std::size_t split = 0;
    const auto q = sw.origin_exponent();
    if (op_m < 0 && !allow_singular && (!q || *q > -0.9)) {
        const double r_star = std::sqrt(-static_cast<double>(op_m) / b_field);
        while (split + 1 < n && grid.node(split) < r_star)
            ++split;
        phi[0] = -std::numbers::sqrt2 * sw.origin_piece();
        sw.outward(phi, -std::numbers::sqrt2, split);
    }
    if (split + 1 < n) {
        phi[n - 1] = 0.0;
        sw.inward(phi, -std::numbers::sqrt2, split);
    }
    return finish(RadialProfile(grid, std::move(phi), z.m_index()), false);
}

/// Solves a_{m_index+1} phi = z for the solution regular at the origin:
///   phi(r) = sqrt2 r^{-(m+1)} e^{-B r^2/2} int_0^r t^{m+1} e^{B t^2/2} z(t) dt.
/// For m_index + 1 <= 0 the kernel r^{-(m+1)} e^{-B r^2/2} is itself regular;
/// the returned solution carries none of it.
inline Inversion invert_a(int m_index, double b_field, const RadialProfile& z,
                          InversionMethod method = InversionMethod::automatic)
{
    detail::require_positive_field(b_field);
    const int op_m = m_index + 1;
    const auto& grid = z.grid();
    const std::size_t n = grid.size();
    if (n < 5)
        throw Error(ErrorKind::discretization, "inversion needs at least 5 nodes");

    auto finish = [&](RadialProfile phi, bool analytic) {
        const RadialProfile back = a_op(op_m, b_field, phi);
        const double res = relative_interior_difference(back, z, z.interior_max_norm());
        return Inversion{std::move(phi), res, analytic};
    };

    if (z.has_closed_form() && !z.closed_form()->is_zero()) {
        // t^{m+1} z(t) must be integrable at 0
        if (z.closed_form()->lowest_power() + op_m <= -1)
            throw Error(ErrorKind::regularity, "weighted integral diverges at the origin");
    }
    if (method == InversionMethod::automatic && z.has_closed_form()) {
        if (auto exact = detail::invert_a_exact(m_index, b_field, *z.closed_form()))
            return finish(RadialProfile(grid, *exact, z.m_index()), true);
    }

    const detail::Sweep sw(grid, z, static_cast<double>(op_m), 0.5 * b_field);
    if (const auto q = sw.origin_exponent(); q && *q <= -0.9)
        throw Error(ErrorKind::regularity, "weighted integral diverges at the origin");

    std::vector<cplx> phi(n, 0.0);
    phi[0] = std::numbers::sqrt2 * sw.origin_piece();
    sw.outward(phi, std::numbers::sqrt2, n - 1);
    return finish(RadialProfile(grid, std::move(phi), z.m_index()), false);
}

/// Kernel of a_{m_index+1}: r^{-(m+1)} e^{-B r^2/2}.
inline GaussianSeries a_kernel(int m_index, double b_field)
{
    return GaussianSeries::monomial(b_field, -(m_index + 1));
}

} // namespace dkp
