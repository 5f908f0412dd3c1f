#pragma once

#include "dkp/error.hpp"

#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <vector>

namespace dkp {

enum class Spacing { uniform, log_uniform };

/// Discretization of the radial coordinate. Nodes are generated on demand from
/// a uniform parameter s: r = s (uniform) or r = exp(s) (log-uniform).
class RadialGrid {
public:
    RadialGrid(double r_min, double r_max, std::size_t points, Spacing spacing = Spacing::uniform)
        : r_min_(r_min), r_max_(r_max), points_(points), spacing_(spacing)
    {
        if (!(r_min >= 0.0) || !std::isfinite(r_max))
            throw Error(ErrorKind::domain, "grid bounds must be finite and non-negative");
        if (r_min == 0.0)
            throw Error(ErrorKind::singular_node, "grid contains the coordinate singularity r = 0");
        if (!(r_min < r_max))
            throw Error(ErrorKind::domain, "grid requires r_min < r_max");
        if (points < 3)
            throw Error(ErrorKind::discretization, "grid requires at least 3 points");
        if (spacing_ == Spacing::uniform)
            step_ = (r_max_ - r_min_) / static_cast<double>(points_ - 1);
        else
            step_ = (std::log(r_max_) - std::log(r_min_)) / static_cast<double>(points_ - 1);
    }

    double r_min() const noexcept { return r_min_; }
    double r_max() const noexcept { return r_max_; }
    std::size_t size() const noexcept { return points_; }
    Spacing spacing() const noexcept { return spacing_; }

    /// Step in the uniform parameter s.
    double step() const noexcept { return step_; }

    double node(std::size_t i) const noexcept
    {
        if (i + 1 == points_)
            return r_max_;
        if (spacing_ == Spacing::uniform)
            return r_min_ + static_cast<double>(i) * step_;
        return r_min_ * std::exp(static_cast<double>(i) * step_);
    }

    std::vector<double> nodes() const
    {
        std::vector<double> out(points_);
        for (std::size_t i = 0; i < points_; ++i)
            out[i] = node(i);
        return out;
    }

    /// dr/ds at node i.
    double jacobian(std::size_t i) const noexcept
    {
        return spacing_ == Spacing::uniform ? 1.0 : node(i);
    }

    /// d^2r/ds^2 at node i.
    double jacobian2(std::size_t i) const noexcept
    {
        return spacing_ == Spacing::uniform ? 0.0 : node(i);
    }

    /// Same interval with the step halved.
    RadialGrid refined() const { return {r_min_, r_max_, 2 * (points_ - 1) + 1, spacing_}; }

    bool operator==(const RadialGrid& other) const noexcept
    {
        return r_min_ == other.r_min_ && r_max_ == other.r_max_ && points_ == other.points_ &&
               spacing_ == other.spacing_;
    }

private:
    double r_min_;
    double r_max_;
    std::size_t points_;
    Spacing spacing_;
    double step_ = 0.0;
};

inline constexpr double default_r_min = 1e-3;
inline constexpr std::size_t default_grid_points = 4001;

/// Smallest x = B r_max^2 (at least 40) past which x^p e^{-x/2}, with
/// p = n + |m|/2 + 2, has fallen 1e-14 below its peak. The two extra powers
/// cover the ladder-shifted components built from the eigenfunction.
inline double default_x_max(int n, int m)
{
    const double p = static_cast<double>(n) + 0.5 * std::abs(m) + 2.0;
    const double log_peak = p * std::log(2.0 * p) - p;
    const double log_floor = log_peak + std::log(1e-14);
    double x = 40.0;
    while (p * std::log(x) - 0.5 * x > log_floor)
        x += 1.0;
    return x;
}

inline double default_r_max(double b_field, int n, int m)
{
    if (!(b_field > 0.0))
        throw Error(ErrorKind::domain, "magnetic field parameter B must be positive");
    return std::sqrt(default_x_max(n, m) / b_field);
}

inline RadialGrid default_grid(double b_field, int n, int m, std::size_t points = default_grid_points)
{
    return {default_r_min, default_r_max(b_field, n, m), points, Spacing::uniform};
}

} // namespace dkp
