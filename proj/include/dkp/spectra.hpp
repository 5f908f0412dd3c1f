#pragma once

#include "dkp/error.hpp"
#include "dkp/params.hpp"
#include "dkp/quantization.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

namespace dkp {

using cplx = std::complex<double>;

/// Diagnostic flags carried by a spectrum entry instead of dropping it.
struct LevelFlags {
    bool sub_threshold = false;  // eps^2 < k^2
    bool evanescent = false;     // complex root of the squared relation
    bool spurious = false;       // root satisfies neither sign of the unsquared relation
    bool degenerate = false;     // vanishing leading coefficient of the quadratic

    bool any() const { return sub_threshold || evanescent || spurious || degenerate; }

    std::string to_string() const
    {
        std::string out;
        auto add = [&](bool on, const char* name) {
            if (!on)
                return;
            if (!out.empty())
                out += '|';
            out += name;
        };
        add(sub_threshold, "sub_threshold");
        add(evanescent, "evanescent");
        add(spurious, "spurious");
        add(degenerate, "degenerate");
        return out;
    }

    friend bool operator==(const LevelFlags&, const LevelFlags&) = default;
};

struct SpectrumEntry {
    Branch branch = Branch::scalar_f;
    int n = 0;
    int m = 0;
    double k = 0.0;
    double sigma = 0.0;
    double lambda2 = 0.0;
    double eps2 = 0.0;
    double eps = 0.0;
    int root_sign = 0;            // +1 / -1: sign of the unsquared relation satisfied; 0 for scalar_f
    double root_residual = 0.0;   // relative residual of that unsquared relation
    LevelFlags flags;
    std::string provenance;
    CouplingConvention convention = CouplingConvention::printed;
};

/// Auxiliary couplings of the polarizable problem at a given energy.
struct PolarizableAux {
    double gamma;  // (eps^2 - k^2) / M^2
    double beta;   // 4 B^2 sigma / M^2
    double rho;    // 1 - 4 B^2 sigma^2 / M^4
    double alpha;  // gamma * rho
    double x;      // gamma - 1
};

inline PolarizableAux make_aux(const PhysicalParams& p, double eps2)
{
    const double gamma = (eps2 - p.k * p.k) / (p.M * p.M);
    const double rho = 1.0 - 4.0 * p.B * p.B * p.sigma * p.sigma / (p.M * p.M * p.M * p.M);
    return {gamma, p.beta(), rho, gamma * rho, gamma - 1.0};
}

/// Dense 2x2 complex matrix.
class Mat2 {
public:
    Mat2() = default;
    Mat2(cplx a11, cplx a12, cplx a21, cplx a22) : a_{{{a11, a12}, {a21, a22}}} {}

    static Mat2 diagonal(cplx d1, cplx d2) { return {d1, 0.0, 0.0, d2}; }

    cplx operator()(int i, int j) const { return a_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }
    cplx trace() const { return a_[0][0] + a_[1][1]; }
    cplx det() const { return a_[0][0] * a_[1][1] - a_[0][1] * a_[1][0]; }

    Mat2 inverse() const
    {
        const cplx d = det();
        if (d == 0.0)
            throw Error(ErrorKind::degenerate, "singular 2x2 matrix");
        return {a_[1][1] / d, -a_[0][1] / d, -a_[1][0] / d, a_[0][0] / d};
    }

    friend Mat2 operator*(const Mat2& x, const Mat2& y)
    {
        Mat2 out;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                out.a_[i][j] = x(i, 0) * y(0, j) + x(i, 1) * y(1, j);
        return out;
    }

    /// Matrix times column vector.
    std::array<cplx, 2> apply(cplx v0, cplx v1) const
    {
        return {a_[0][0] * v0 + a_[0][1] * v1, a_[1][0] * v0 + a_[1][1] * v1};
    }

    double max_abs_diff(const Mat2& other) const
    {
        double out = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                out = std::max(out, std::abs((*this)(i, j) - other(i, j)));
        return out;
    }

private:
    std::array<std::array<cplx, 2>, 2> a_{};
};

/// S with rows the left eigenvectors of A, so that S A S^{-1} = diag(lambda1, lambda2).
struct CouplingDiagonalization {
    Mat2 s_matrix;
    Mat2 s_inverse;
    std::array<cplx, 2> eigenvalues;
};

/// Right-hand coupling matrix acting on (g, G) in
/// (Delta + eps^2 - M^2 - k^2)(g, G)^T = A (g, G)^T.
inline Mat2 coupling_matrix(const PhysicalParams& p, double eps2,
                            CouplingConvention convention = CouplingConvention::printed)
{
    p.validate();
    const auto aux = make_aux(p, eps2);
    if (!(aux.gamma > 0.0))
        throw Error(ErrorKind::domain, "coupling matrix needs eps^2 > k^2");
    const cplx two_ib(0.0, 2.0 * p.B);
    const double corner = convention == CouplingConvention::printed ? aux.beta * aux.gamma : -aux.beta * aux.gamma;
    return {aux.beta, two_ib, -two_ib * aux.alpha, corner};
}

/// Closed-form eigenvalues (lambda1, lambda2) of the coupling matrix.
inline std::array<double, 2> coupling_eigenvalues(const PhysicalParams& p, double eps2,
                                                  CouplingConvention convention = CouplingConvention::printed)
{
    const auto a = make_aux(p, eps2);
    const double b2 = p.B * p.B;
    if (convention == CouplingConvention::printed) {
        const double root = std::sqrt(a.beta * a.beta * (1 - a.gamma) * (1 - a.gamma) + 16 * b2 * a.rho * a.gamma);
        return {(a.beta * (1 + a.gamma) + root) / 2, (a.beta * (1 + a.gamma) - root) / 2};
    }
    const double root = std::sqrt(a.beta * a.beta * (1 + a.gamma) * (1 + a.gamma) + 16 * b2 * a.rho * a.gamma);
    return {(a.beta * (1 - a.gamma) + root) / 2, (a.beta * (1 - a.gamma) - root) / 2};
}

/// Diagonalizes any coupling matrix with A12 != 0. lambda1 takes the + branch of
/// the square root, which for positive discriminant is the larger eigenvalue;
/// S rows are (lambda_j - A22) / A12 and 1.
inline CouplingDiagonalization diagonalize_coupling(const Mat2& a)
{
    if (a(0, 1) == 0.0)
        throw Error(ErrorKind::degenerate, "coupling matrix has no off-diagonal term");
    const cplx tr = a.trace();
    const cplx disc = tr * tr - 4.0 * a.det();
    const double scale = std::max({std::abs(a(0, 0)), std::abs(a(0, 1)), std::abs(a(1, 0)), std::abs(a(1, 1))});
    if (std::abs(disc) <= 1e-24 * scale * scale)
        throw Error(ErrorKind::degenerate, "coupling matrix has coincident eigenvalues");
    cplx root = std::sqrt(disc);
    if (disc.imag() == 0.0 && disc.real() > 0.0)
        root = std::sqrt(disc.real());
    const cplx l1 = (tr + root) / 2.0, l2 = (tr - root) / 2.0;
    const cplx s11 = (l1 - a(1, 1)) / a(0, 1), s21 = (l2 - a(1, 1)) / a(0, 1);
    const Mat2 s(s11, 1.0, s21, 1.0);
    const cplx d = s11 - s21;
    const Mat2 s_inv(1.0 / d, -1.0 / d, -s21 / d, s11 / d);
    return {s, s_inv, {l1, l2}};
}

/// The ordinary S of the sigma = 0 problem: rows (-i sqrt(gamma), 1), (i sqrt(gamma), 1).
inline Mat2 ordinary_s_matrix(double gamma)
{
    const double sg = std::sqrt(gamma);
    return {cplx(0.0, -sg), 1.0, cplx(0.0, sg), 1.0};
}

inline double diagonalization_residual(const Mat2& a, const CouplingDiagonalization& d)
{
    return (d.s_matrix * a * d.s_inverse).max_abs_diff(Mat2::diagonal(d.eigenvalues[0], d.eigenvalues[1]));
}

namespace detail {

inline void finish_energy(SpectrumEntry& e)
{
    if (!std::isfinite(e.eps2)) {
        e.eps = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    e.flags.sub_threshold = e.eps2 < e.k * e.k;
    e.eps = e.eps2 >= 0.0 ? std::sqrt(e.eps2) : std::numeric_limits<double>::quiet_NaN();
}

} // namespace detail

/// Levels of the ordinary particle (sigma must be 0). For the G branches
/// sqrt(eps^2 - k^2) = (+-B + sqrt(B^2 + M^2 (M^2 + lambda^2))) / M.
inline SpectrumEntry ordinary_branch_energy(const PhysicalParams& p, Branch branch, double lambda2, int n = 0,
                                            int m = 0)
{
    p.validate();
    if (p.sigma != 0.0)
        throw Error(ErrorKind::domain, "ordinary branch energies require sigma = 0");
    SpectrumEntry e;
    e.branch = branch;
    e.n = n;
    e.m = m;
    e.k = p.k;
    e.lambda2 = lambda2;
    const double m2 = p.M * p.M;
    if (branch == Branch::scalar_f) {
        e.eps2 = m2 + p.k * p.k + lambda2;
        e.provenance = "scalar_closed_form";
    } else {
        const double root = std::sqrt(p.B * p.B + m2 * (m2 + lambda2));
        // the minus branch in cancellation-free form
        const double s = branch == Branch::g_plus ? (p.B + root) / p.M : p.M * (m2 + lambda2) / (p.B + root);
        e.eps2 = s * s + p.k * p.k;
        e.root_sign = branch == Branch::g_plus ? 1 : -1;
        // unsquared relation M^2 x - lambda^2 = +-2B sqrt(x + 1) with x = gamma - 1
        const double x = s * s / m2 - 1.0;
        const double lhs = m2 * x - lambda2, rhs = e.root_sign * 2.0 * p.B * s / p.M;
        e.root_residual = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), m2});
        e.provenance = "ordinary_closed_form";
    }
    detail::finish_energy(e);
    return e;
}

/// Coefficients (a, b, c) of a x^2 + b x + c = 0 for x = gamma - 1.
inline std::array<double, 3> polarizable_quadratic(const PhysicalParams& p, double lambda2,
                                                   CouplingConvention convention = CouplingConvention::printed)
{
    const double m2 = p.M * p.M, beta = p.beta(), b4 = 4.0 * p.B * p.B;
    if (convention == CouplingConvention::printed) {
        const double lb = lambda2 + beta;
        return {m2 * (m2 - beta), -(lb * (2 * m2 - beta) + (b4 - beta * beta)), lb * lb - (b4 - beta * beta)};
    }
    return {m2 * (m2 + beta), -(lambda2 * (2 * m2 + beta) + b4), lambda2 * lambda2 - b4};
}

/// Both sides of the unsquared relation whose square is the quadratic.
inline std::array<double, 2> unsquared_sides(const PhysicalParams& p, double lambda2, double x,
                                             CouplingConvention convention = CouplingConvention::printed)
{
    const double m2 = p.M * p.M, beta = p.beta(), b16 = 16.0 * p.B * p.B;
    double lhs = 0.0, radicand = 0.0;
    if (convention == CouplingConvention::printed) {
        lhs = (2 * m2 - beta) * x - 2 * (lambda2 + beta);
        radicand = beta * beta * x * x + (b16 - 4 * beta * beta) * (x + 1);
    } else {
        lhs = (2 * m2 + beta) * x - 2 * lambda2;
        radicand = beta * beta * (x + 2) * (x + 2) + (b16 - 4 * beta * beta) * (x + 1);
    }
    return {lhs, radicand >= 0.0 ? std::sqrt(radicand) : std::numeric_limits<double>::quiet_NaN()};
}

inline constexpr double root_tolerance = 1e-9;

/// G-branch levels of the polarizable particle from the squared relation; each
/// real root is tagged with the sign of the unsquared relation it satisfies
/// (+ for lambda1 / g_plus, - for lambda2 / g_minus).
inline std::vector<SpectrumEntry> polarizable_spectrum(const PhysicalParams& p, double lambda2, int n = 0, int m = 0,
                                                       CouplingConvention convention = CouplingConvention::printed)
{
    p.validate();
    const auto [a, b, c] = polarizable_quadratic(p, lambda2, convention);
    const double scale = std::max(std::abs(b), std::abs(c));
    if (std::abs(a) <= 1e-14 * std::max(scale, p.M * p.M * p.M * p.M))
        throw Error(ErrorKind::degenerate, "leading coefficient of the polarizable quadratic vanishes");

    auto make = [&](Branch branch) {
        SpectrumEntry e;
        e.branch = branch;
        e.n = n;
        e.m = m;
        e.k = p.k;
        e.sigma = p.sigma;
        e.lambda2 = lambda2;
        e.convention = convention;
        e.provenance = "polarizable_quadratic";
        return e;
    };

    std::vector<SpectrumEntry> out;
    const double disc = b * b - 4 * a * c;
    if (disc < 0.0) {
        for (auto br : {Branch::g_plus, Branch::g_minus}) {
            auto e = make(br);
            e.flags.evanescent = true;
            e.eps2 = std::numeric_limits<double>::quiet_NaN();
            detail::finish_energy(e);
            out.push_back(e);
        }
        return out;
    }
    // cancellation-free pair of roots
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    std::array<double, 2> roots{q / a, q != 0.0 ? c / q : 0.0};
    if (roots[0] < roots[1])
        std::swap(roots[0], roots[1]);

    for (std::size_t i = 0; i < 2; ++i) {
        const double x = roots[i];
        const auto [lhs, rhs] = unsquared_sides(p, lambda2, x, convention);
        const double denom = std::max({std::abs(lhs), std::abs(rhs), p.M * p.M});
        const double res_plus = std::abs(lhs - rhs) / denom, res_minus = std::abs(lhs + rhs) / denom;
        const int sign = std::isnan(rhs) ? (i == 0 ? 1 : -1) : (res_plus <= res_minus ? 1 : -1);
        auto e = make(sign > 0 ? Branch::g_plus : Branch::g_minus);
        e.root_sign = sign;
        e.root_residual = std::isnan(rhs) ? std::numeric_limits<double>::infinity() : std::min(res_plus, res_minus);
        e.flags.spurious = !(e.root_residual <= root_tolerance);
        e.eps2 = p.M * p.M * (x + 1.0) + p.k * p.k;
        detail::finish_energy(e);
        out.push_back(e);
    }
    return out;
}

/// The scalar family: eps^2 = M^2 + k^2 + lambda^2 for every sigma.
inline SpectrumEntry scalar_branch_energy(const PhysicalParams& p, double lambda2, int n = 0, int m = 0)
{
    PhysicalParams ordinary = p;
    ordinary.sigma = 0.0;
    auto e = ordinary_branch_energy(ordinary, Branch::scalar_f, lambda2, n, m);
    e.sigma = p.sigma;
    return e;
}

/// Levels of one branch at (n, m): the ordinary closed forms at sigma = 0,
/// otherwise the polarizable quadratic. Missing or failed roots come back as
/// flagged entries with NaN energies.
inline SpectrumEntry branch_level(const PhysicalParams& p, Branch branch, int n, int m,
                                  CouplingConvention convention = CouplingConvention::printed)
{
    const double lambda2 = lambda2_quantized(n, m, p.B);
    if (branch == Branch::scalar_f)
        return scalar_branch_energy(p, lambda2, n, m);
    if (p.sigma == 0.0)
        return ordinary_branch_energy(p, branch, lambda2, n, m);

    SpectrumEntry missing;
    missing.branch = branch;
    missing.n = n;
    missing.m = m;
    missing.k = p.k;
    missing.sigma = p.sigma;
    missing.lambda2 = lambda2;
    missing.convention = convention;
    missing.provenance = "polarizable_quadratic";
    missing.eps2 = missing.eps = std::numeric_limits<double>::quiet_NaN();
    std::vector<SpectrumEntry> roots;
    try {
        roots = polarizable_spectrum(p, lambda2, n, m, convention);
    } catch (const Error& err) {
        if (err.kind() != ErrorKind::degenerate)
            throw;
        missing.flags.degenerate = true;
        return missing;
    }
    // prefer a valid root of the requested sign, then any root of that sign
    for (bool need_valid : {true, false})
        for (const auto& e : roots)
            if (e.branch == branch && (!need_valid || !e.flags.any()))
                return e;
    missing.flags.spurious = true;
    return missing;
}

/// All levels for n <= n_max and m in [m_min, m_max], sorted by branch, then
/// energy (NaN last), then n and m.
inline std::vector<SpectrumEntry> full_spectrum_table(const PhysicalParams& p, int n_max, int m_min, int m_max,
                                                      CouplingConvention convention = CouplingConvention::printed,
                                                      std::optional<Branch> only = std::nullopt)
{
    p.validate();
    if (n_max < 0)
        throw Error(ErrorKind::domain, "n_max must be non-negative");
    std::vector<SpectrumEntry> out;
    for (auto branch : all_branches) {
        if (only && *only != branch)
            continue;
        for (int n = 0; n <= n_max; ++n)
            for (int m = m_min; m <= m_max; ++m)
                out.push_back(branch_level(p, branch, n, m, convention));
    }
    std::stable_sort(out.begin(), out.end(), [](const SpectrumEntry& x, const SpectrumEntry& y) {
        if (x.branch != y.branch)
            return x.branch < y.branch;
        const bool xn = std::isnan(x.eps), yn = std::isnan(y.eps);
        if (xn != yn)
            return yn;
        if (!xn && x.eps != y.eps)
            return x.eps < y.eps;
        if (x.n != y.n)
            return x.n < y.n;
        return x.m < y.m;
    });
    return out;
}

/// One row of the polarizability comparison: eps^2(sigma) - eps^2(0).
struct PolarizabilityShift {
    Branch branch;
    int n;
    int m;
    double sigma;
    double eps2_ordinary;
    double eps2_polarizable;
    double delta_eps2;
    LevelFlags flags;
};

inline std::vector<PolarizabilityShift> polarizability_shifts(const PhysicalParams& p, const std::vector<double>& sigmas,
                                                              int n_max, int m_min, int m_max,
                                                              CouplingConvention convention = CouplingConvention::printed,
                                                              std::optional<Branch> only = std::nullopt)
{
    p.validate();
    if (sigmas.empty())
        throw Error(ErrorKind::configuration, "polarizability comparison needs at least one sigma");
    if (n_max < 0)
        throw Error(ErrorKind::domain, "n_max must be non-negative");
    PhysicalParams base = p;
    base.sigma = 0.0;
    std::vector<PolarizabilityShift> out;
    for (double sigma : sigmas) {
        PhysicalParams pol = p;
        pol.sigma = sigma;
        for (auto branch : all_branches) {
            if (only && *only != branch)
                continue;
            for (int n = 0; n <= n_max; ++n)
                for (int m = m_min; m <= m_max; ++m) {
                    const auto ref = branch_level(base, branch, n, m, convention);
                    const auto lev = branch_level(pol, branch, n, m, convention);
                    // scalar levels do not depend on sigma: the shift is an exact zero
                    const double delta = branch == Branch::scalar_f ? 0.0 : lev.eps2 - ref.eps2;
                    out.push_back({branch, n, m, sigma, ref.eps2, lev.eps2, delta, lev.flags});
                }
        }
    }
    return out;
}

} // namespace dkp
