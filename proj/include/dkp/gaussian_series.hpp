#pragma once

#include "dkp/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace dkp {

using cplx = std::complex<double>;

/// Closed form  f(r) = exp(-b r^2 / 2) * sum_j c_j r^j  over a contiguous range
/// of integer powers j. Every radial function produced by the solver has this
/// shape, and the class is closed under d/dr, multiplication by r^{+-1}, and
/// hence under the ladder operators.
class GaussianSeries {
public:
    GaussianSeries() = default;

    GaussianSeries(double gauss, int lowest_power, std::vector<cplx> coefficients)
        : gauss_(gauss), lowest_(lowest_power), coeffs_(std::move(coefficients))
    {
        trim();
    }

    static GaussianSeries monomial(double gauss, int power, cplx coefficient = 1.0)
    {
        return {gauss, power, {coefficient}};
    }

    double gauss() const noexcept { return gauss_; }
    bool is_zero() const noexcept { return coeffs_.empty(); }
    int lowest_power() const noexcept { return lowest_; }
    int highest_power() const noexcept { return lowest_ + static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<cplx>& coefficients() const noexcept { return coeffs_; }

    cplx coefficient(int power) const noexcept
    {
        if (is_zero() || power < lowest_ || power > highest_power())
            return 0.0;
        return coeffs_[static_cast<std::size_t>(power - lowest_)];
    }

    /// The zero series is compatible with every Gaussian exponent.
    bool compatible(const GaussianSeries& other) const noexcept
    {
        return is_zero() || other.is_zero() || gauss_ == other.gauss_;
    }

    cplx operator()(double r) const
    {
        if (is_zero())
            return 0.0;
        cplx acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
            acc = acc * r + *it;
        return acc * std::pow(r, lowest_) * std::exp(-0.5 * gauss_ * r * r);
    }

    GaussianSeries derivative() const
    {
        if (is_zero())
            return *this;
        // d/dr [r^j e^{-b r^2/2}] = j r^{j-1} - b r^{j+1}
        std::vector<cplx> out(coeffs_.size() + 2, 0.0);
        for (std::size_t k = 0; k < coeffs_.size(); ++k) {
            const int j = lowest_ + static_cast<int>(k);
            out[k] += static_cast<double>(j) * coeffs_[k];
            out[k + 2] -= gauss_ * coeffs_[k];
        }
        return {gauss_, lowest_ - 1, std::move(out)};
    }

    /// Multiply by r^shift.
    GaussianSeries times_power(int shift) const
    {
        if (is_zero())
            return *this;
        return {gauss_, lowest_ + shift, coeffs_};
    }

    GaussianSeries& operator+=(const GaussianSeries& other)
    {
        if (!compatible(other))
            throw Error(ErrorKind::domain, "cannot add closed forms with different Gaussian exponents");
        if (other.is_zero())
            return *this;
        if (is_zero()) {
            *this = other;
            return *this;
        }
        const int lo = std::min(lowest_, other.lowest_);
        const int hi = std::max(highest_power(), other.highest_power());
        std::vector<cplx> out(static_cast<std::size_t>(hi - lo + 1), 0.0);
        for (std::size_t k = 0; k < coeffs_.size(); ++k)
            out[static_cast<std::size_t>(lowest_ - lo) + k] += coeffs_[k];
        for (std::size_t k = 0; k < other.coeffs_.size(); ++k)
            out[static_cast<std::size_t>(other.lowest_ - lo) + k] += other.coeffs_[k];
        lowest_ = lo;
        coeffs_ = std::move(out);
        trim();
        return *this;
    }

    GaussianSeries& operator*=(cplx s)
    {
        for (auto& c : coeffs_)
            c *= s;
        trim();
        return *this;
    }

    friend GaussianSeries operator+(GaussianSeries a, const GaussianSeries& b) { return a += b; }
    friend GaussianSeries operator-(GaussianSeries a, const GaussianSeries& b)
    {
        return a += b * cplx(-1.0);
    }
    friend GaussianSeries operator*(GaussianSeries a, cplx s) { return a *= s; }
    friend GaussianSeries operator*(cplx s, GaussianSeries a) { return a *= s; }

    /// Exact  int_0^inf |f|^2 r dr. Requires gauss > 0 and a finite integrand at 0.
    double weighted_norm2() const
    {
        if (is_zero())
            return 0.0;
        if (!(gauss_ > 0.0))
            throw Error(ErrorKind::domain, "closed form does not decay");
        if (2 * lowest_ + 2 <= 0)
            throw Error(ErrorKind::regularity, "closed form is not square integrable at the origin");
        // int_0^inf r^{p+1} e^{-b r^2} dr = Gamma(p/2 + 1) / (2 b^{p/2 + 1})
        double total = 0.0;
        for (std::size_t j = 0; j < coeffs_.size(); ++j) {
            for (std::size_t k = 0; k < coeffs_.size(); ++k) {
                const int p = 2 * lowest_ + static_cast<int>(j + k);
                const double half = 0.5 * p + 1.0;
                const double moment = std::exp(std::lgamma(half) - half * std::log(gauss_)) / 2.0;
                total += (coeffs_[j] * std::conj(coeffs_[k])).real() * moment;
            }
        }
        return total;
    }

private:
    void trim()
    {
        auto first = std::find_if(coeffs_.begin(), coeffs_.end(), [](cplx c) { return c != 0.0; });
        if (first == coeffs_.end()) {
            coeffs_.clear();
            lowest_ = 0;
            return;
        }
        lowest_ += static_cast<int>(first - coeffs_.begin());
        coeffs_.erase(coeffs_.begin(), first);
        while (!coeffs_.empty() && coeffs_.back() == 0.0)
            coeffs_.pop_back();
    }

    double gauss_ = 0.0;
    int lowest_ = 0;
    std::vector<cplx> coeffs_;
};

} // namespace dkp
