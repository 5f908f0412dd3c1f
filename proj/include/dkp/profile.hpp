#pragma once

#include "dkp/error.hpp"
#include "dkp/gaussian_series.hpp"
#include "dkp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace dkp {

/// Nodes excluded at each end of the grid when taking residual norms: two
/// widths of the 5-point stencil, so one-sided edge formulas never leak in
/// even after two successive derivative applications.
inline constexpr std::size_t interior_margin = 4;

/// A complex radial function sampled on a grid. When a closed form is attached
/// the samples are its values at the nodes, and operators act on the closed
/// form exactly (the analytic path); otherwise finite differences are used.
class RadialProfile {
public:
    RadialProfile(RadialGrid grid, std::vector<cplx> values, int m_index = 0)
        : grid_(std::move(grid)), values_(std::move(values)), m_index_(m_index)
    {
        if (values_.size() != grid_.size())
            throw Error(ErrorKind::grid_mismatch, "value count differs from grid size");
    }

    RadialProfile(RadialGrid grid, GaussianSeries closed_form, int m_index = 0)
        : grid_(std::move(grid)), m_index_(m_index), closed_form_(std::move(closed_form))
    {
        values_.resize(grid_.size());
        for (std::size_t i = 0; i < values_.size(); ++i)
            values_[i] = (*closed_form_)(grid_.node(i));
    }

    static RadialProfile zero(const RadialGrid& grid, int m_index = 0)
    {
        return {grid, GaussianSeries{}, m_index};
    }

    template <class Fn>
    static RadialProfile from_function(const RadialGrid& grid, Fn&& fn, int m_index = 0)
    {
        std::vector<cplx> values(grid.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            values[i] = fn(grid.node(i));
        return {grid, std::move(values), m_index};
    }

    const RadialGrid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const cplx> values() const noexcept { return values_; }
    cplx operator[](std::size_t i) const noexcept { return values_[i]; }
    int m_index() const noexcept { return m_index_; }
    const std::optional<GaussianSeries>& closed_form() const noexcept { return closed_form_; }
    bool has_closed_form() const noexcept { return closed_form_.has_value(); }

    /// Copy that forgets the closed form, forcing the finite-difference path.
    RadialProfile sampled() const { return {grid_, values_, m_index_}; }

    RadialProfile with_m_index(int m) const
    {
        RadialProfile out = *this;
        out.m_index_ = m;
        return out;
    }

    double max_norm() const
    {
        double out = 0.0;
        for (auto v : values_)
            out = std::max(out, std::abs(v));
        return out;
    }

    double interior_max_norm(std::size_t margin = interior_margin) const
    {
        double out = 0.0;
        for (std::size_t i = margin; i + margin < values_.size(); ++i)
            out = std::max(out, std::abs(values_[i]));
        return out;
    }

    RadialProfile& operator+=(const RadialProfile& other) { return combine(other, 1.0); }
    RadialProfile& operator-=(const RadialProfile& other) { return combine(other, -1.0); }

    RadialProfile& operator*=(cplx s)
    {
        for (auto& v : values_)
            v *= s;
        if (closed_form_)
            *closed_form_ *= s;
        return *this;
    }

    RadialProfile& operator/=(cplx s) { return *this *= (1.0 / s); }

    friend RadialProfile operator+(RadialProfile a, const RadialProfile& b) { return a += b; }
    friend RadialProfile operator-(RadialProfile a, const RadialProfile& b) { return a -= b; }
    friend RadialProfile operator-(RadialProfile a) { return a *= -1.0; }
    friend RadialProfile operator*(RadialProfile a, cplx s) { return a *= s; }
    friend RadialProfile operator*(cplx s, RadialProfile a) { return a *= s; }
    friend RadialProfile operator*(RadialProfile a, double s) { return a *= cplx(s); }
    friend RadialProfile operator*(double s, RadialProfile a) { return a *= cplx(s); }
    friend RadialProfile operator/(RadialProfile a, cplx s) { return a /= s; }
    friend RadialProfile operator/(RadialProfile a, double s) { return a /= cplx(s); }

private:
    RadialProfile& combine(const RadialProfile& other, double sign)
    {
        if (!(grid_ == other.grid_))
            throw Error(ErrorKind::grid_mismatch, "profiles live on different grids");
        if (other.closed_form_ && other.closed_form_->is_zero())
            return *this;  // adding an exact zero leaves the samples untouched
        if (closed_form_ && other.closed_form_ && closed_form_->compatible(*other.closed_form_)) {
            *closed_form_ += *other.closed_form_ * cplx(sign);
            for (std::size_t i = 0; i < values_.size(); ++i)
                values_[i] = (*closed_form_)(grid_.node(i));
            return *this;
        }
        closed_form_.reset();
        for (std::size_t i = 0; i < values_.size(); ++i)
            values_[i] += sign * other.values_[i];
        return *this;
    }

    RadialGrid grid_;
    std::vector<cplx> values_;
    int m_index_ = 0;
    std::optional<GaussianSeries> closed_form_;
};

/// Build a profile by applying an exact operation to the closed form when
/// present, otherwise evaluating the sampled fallback.
template <class Exact, class Sampled>
RadialProfile transform_profile(const RadialProfile& f, Exact&& exact, Sampled&& sampled)
{
    if (f.has_closed_form())
        return {f.grid(), exact(*f.closed_form()), f.m_index()};
    return {f.grid(), sampled(f), f.m_index()};
}

namespace fd {

/// dF/dr: 4th-order central differences in the interior, 2nd-order at the two
/// outermost nodes on each side. Log-uniform grids go through the chain rule.
inline std::vector<cplx> first_derivative(const RadialGrid& grid, std::span<const cplx> f)
{
    const std::size_t n = f.size();
    if (n < 5)
        throw Error(ErrorKind::discretization, "finite differences need at least 5 nodes");
    const double h = grid.step();
    std::vector<cplx> d(n);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[1] = (f[2] - f[0]) / (2.0 * h);
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    d[n - 2] = (f[n - 1] - f[n - 3]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    if (grid.spacing() == Spacing::log_uniform)
        for (std::size_t i = 0; i < n; ++i)
            d[i] /= grid.jacobian(i);
    return d;
}

inline std::vector<cplx> second_derivative(const RadialGrid& grid, std::span<const cplx> f)
{
    const std::size_t n = f.size();
    if (n < 5)
        throw Error(ErrorKind::discretization, "finite differences need at least 5 nodes");
    const double h = grid.step();
    const double h2 = h * h;
    std::vector<cplx> d(n);
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    d[1] = (f[0] - 2.0 * f[1] + f[2]) / h2;
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) / (12.0 * h2);
    d[n - 2] = (f[n - 1] - 2.0 * f[n - 2] + f[n - 3]) / h2;
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    if (grid.spacing() == Spacing::log_uniform) {
        // f_rr = (f_ss - f_s r_ss / r_s) / r_s^2, and for r = e^s: r_s = r_ss = r
        const auto ds = first_derivative(grid, f);  // already divided by r_s
        for (std::size_t i = 0; i < n; ++i) {
            const double rs = grid.jacobian(i);
            d[i] = (d[i] - ds[i] * grid.jacobian2(i)) / (rs * rs);
        }
    }
    return d;
}

} // namespace fd

/// Composite Simpson for  int f(r) dr  over the whole grid; an odd number of
/// intervals closes with the 3/8 rule on the last three.
inline cplx integrate(const RadialGrid& grid, std::span<const cplx> f)
{
    const std::size_t n = f.size();
    const double h = grid.step();
    auto g = [&](std::size_t i) { return f[i] * grid.jacobian(i); };
    const std::size_t intervals = n - 1;
    const std::size_t simpson_end = (intervals % 2 == 0) ? intervals : intervals - 3;
    cplx total = 0.0;
    for (std::size_t i = 0; i + 2 <= simpson_end; i += 2)
        total += h / 3.0 * (g(i) + 4.0 * g(i + 1) + g(i + 2));
    if (simpson_end != intervals) {
        const std::size_t i = simpson_end;
        total += 3.0 * h / 8.0 * (g(i) + 3.0 * g(i + 1) + 3.0 * g(i + 2) + g(i + 3));
    }
    return total;
}

/// int_0^{r_max} f(r) dr: the grid integral plus the gap [0, r_min], where f is
/// taken to follow the power law fitted through nodes 0 and 2.
inline cplx integrate_from_origin(const RadialGrid& grid, std::span<const cplx> f)
{
    cplx total = integrate(grid, f);
    if (f[0] != 0.0 && f[2] != 0.0) {
        const double q = std::log(std::abs(f[2]) / std::abs(f[0])) / std::log(grid.node(2) / grid.node(0));
        if (q > -1.0)
            total += f[0] * grid.node(0) / (q + 1.0);
    }
    return total;
}

} // namespace dkp
