#pragma once

#include "dkp/eigenfunction.hpp"
#include "dkp/ladder.hpp"
#include "dkp/params.hpp"
#include "dkp/profile.hpp"
#include "dkp/spectra.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dkp {

/// How Phi1 and Phi3 are recovered from Z1, Z3: exact closed-form inversion
/// (every later derivative is then exact too), or quadrature on sampled data
/// followed by finite differences.
enum class RecoveryPath { analytic, quadrature };

inline std::string_view to_string(RecoveryPath p)
{
    return p == RecoveryPath::analytic ? "analytic" : "quadrature";
}

struct AssemblyOptions {
    RecoveryPath path = RecoveryPath::analytic;
    CouplingConvention convention = CouplingConvention::printed;
    /// Keep a Phi1 that is singular at the origin instead of raising a
    /// regularity error. Such a state satisfies the equations away from r = 0
    /// but is not an admissible solution.
    bool allow_singular = false;
};

/// Intermediate fields of the reduction chain, kept for inspection.
struct ReducedFields {
    std::optional<RadialProfile> F, G, f, g, z1, z3, g_prime, G_prime;
};

struct DkpState10 {
    Branch branch = Branch::scalar_f;
    int n = 0;
    int m = 0;
    PhysicalParams params;
    SpectrumEntry entry;
    RecoveryPath path = RecoveryPath::analytic;
    CouplingConvention convention = CouplingConvention::printed;
    RadialProfile phi0, phi1, phi2, phi3;
    RadialProfile e1, e2, e3, h1, h2, h3;
    ReducedFields reduced;
    cplx kernel_coefficient = 0.0;  // multiple of r^{-(m+1)} e^{-B r^2/2} added to Phi3
    std::vector<std::string> provenance;

    double eps() const { return entry.eps; }
    const RadialGrid& grid() const { return phi0.grid(); }
};

struct DkpState15 : DkpState10 {
    RadialProfile c, c0, c1, c2, c3;
};

/// (F, G) = [[k, eps], [eps, k]] (Phi0, Phi2) inverted.
inline std::pair<RadialProfile, RadialProfile> solve_phi0_phi2(const RadialProfile& F, const RadialProfile& G,
                                                               double eps, double k)
{
    const double det = k * k - eps * eps;
    if (std::abs(det) <= 1e-14 * std::max(k * k, eps * eps) || det == 0.0)
        throw Error(ErrorKind::singular_map, "eps^2 = k^2: (F, G) do not determine (Phi0, Phi2)");
    return {(k * F - eps * G) / det, (k * G - eps * F) / det};
}

/// Linear relation expressing f through G and g; sigma = 0 gives f = -iG + (2B/M^2) g.
inline RadialProfile assemble_f(const RadialProfile& G, const RadialProfile& g, const PhysicalParams& p,
                                CouplingConvention convention = CouplingConvention::printed)
{
    if (!(G.grid() == g.grid()))
        throw Error(ErrorKind::grid_mismatch, "G and g live on different grids");
    const double m2 = p.M * p.M, m4 = m2 * m2, b2 = p.B * p.B;
    const double g_coef = 2.0 * p.B * (1.0 - p.sigma - p.sigma * p.sigma * 4.0 * b2 / m4) / m2;
    const double shift = p.sigma * 4.0 * b2 / m2;
    const cplx G_coef = convention == CouplingConvention::printed ? cplx(0.0, (-m2 + shift) / m2)
                                                                   : cplx(0.0, -(m2 + shift) / m2);
    return G_coef * G + g_coef * g;
}

namespace detail {

constexpr cplx I{0.0, 1.0};

struct Ops {
    double B;
    RadialProfile a(int m, const RadialProfile& f) const { return a_op(m, B, f); }
    RadialProfile b(int m, const RadialProfile& f) const { return b_op(m, B, f); }
};

inline void fill_tensors(DkpState10& s)
{
    const Ops op{s.params.B};
    const double M = s.params.M, k = s.params.k, eps = s.entry.eps;
    const int m = s.m;
    s.e1 = ((op.a(m, s.phi0) - I * eps * s.phi1) / M).with_m_index(m - 1);
    s.h1 = ((-I * op.a(m, s.phi2) + k * s.phi1) / M).with_m_index(m - 1);
    s.e3 = ((op.b(m, s.phi0) - I * eps * s.phi3) / M).with_m_index(m + 1);
    s.h3 = ((I * op.b(m, s.phi2) - k * s.phi3) / M).with_m_index(m + 1);
    s.e2 = ((-I * eps * s.phi2 - I * k * s.phi0) / M).with_m_index(m);
    s.h2 = ((I * op.b(m - 1, s.phi1) - I * op.a(m + 1, s.phi3)) / M).with_m_index(m);
}

inline RadialProfile maybe_sampled(const RadialProfile& p, RecoveryPath path)
{
    return path == RecoveryPath::quadrature ? p.sampled() : p;
}

/// Builds the 10-component core from the active primed field. `sigma_terms`
/// switches on the polarizable couplings.
inline DkpState10 build_core(Branch branch, const SpectrumEntry& entry, const PhysicalParams& p,
                             const RadialProfile& active, const AssemblyOptions& opt)
{
    p.validate();
    if (!std::isfinite(entry.eps) || entry.flags.any())
        throw Error(ErrorKind::domain, "spectrum entry is not an admissible level");
    const auto& grid = active.grid();
    const int m = active.m_index();
    const double eps = entry.eps, k = p.k, M = p.M;
    const Ops op{p.B};
    const auto zero = RadialProfile::zero(grid, m);

    DkpState10 s{branch, entry.n, m, p, entry, opt.path, opt.convention,
                 zero, zero.with_m_index(m - 1), zero, zero.with_m_index(m + 1),
                 zero, zero, zero, zero, zero, zero, {}, 0.0, {}};

    if (branch == Branch::scalar_f) {
        s.reduced.F = active;
        s.reduced.G = zero;
        s.reduced.f = zero;
        s.reduced.g = zero;
        auto [phi0, phi2] = solve_phi0_phi2(active, zero, eps, k);
        s.phi0 = maybe_sampled(phi0, opt.path);
        s.phi2 = maybe_sampled(phi2, opt.path);
        s.provenance.emplace_back("scalar family: F = radial eigenfunction, f = g = G = 0, Phi1 = Phi3 = 0");
        fill_tensors(s);
        return s;
    }

    const auto diag = diagonalize_coupling(coupling_matrix(p, entry.eps2, opt.convention));
    const bool plus = branch == Branch::g_plus;
    const RadialProfile g = diag.s_inverse(0, plus ? 0 : 1) * active;
    const RadialProfile G = diag.s_inverse(1, plus ? 0 : 1) * active;
    const RadialProfile f = assemble_f(G, g, p, opt.convention);
    const RadialProfile z1 = ((f + g) * 0.5).with_m_index(m);
    const RadialProfile z3 = ((f - g) * 0.5).with_m_index(m);
    s.reduced.F = zero;
    s.reduced.G = G;
    s.reduced.f = f;
    s.reduced.g = g;
    s.reduced.z1 = z1;
    s.reduced.z3 = z3;
    (plus ? s.reduced.g_prime : s.reduced.G_prime) = active;
    (plus ? s.reduced.G_prime : s.reduced.g_prime) = zero;

    const auto method = opt.path == RecoveryPath::analytic ? InversionMethod::automatic : InversionMethod::quadrature;
    auto recover = [](const char* name, auto&& fn) {
        try {
            return fn();
        } catch (const Error& e) {
            throw e.within(name);
        }
    };
    const auto inv1 = recover("Phi1", [&] { return invert_b(m, p.B, maybe_sampled(z1, opt.path), method, opt.allow_singular); });
    const auto inv3 = recover("Phi3", [&] { return invert_a(m, p.B, maybe_sampled(z3, opt.path), method); });
    s.phi1 = inv1.solution.with_m_index(m - 1);
    RadialProfile phi3 = inv3.solution.with_m_index(m + 1);
    s.provenance.emplace_back(std::string("Phi1: decaying solution of b_{m-1} Phi1 = Z1 (") +
                              (inv1.analytic ? "closed form" : "quadrature") + ")");
    if (opt.allow_singular && m <= 0)
        s.provenance.emplace_back("Phi1: singular solutions admitted; regularity at the origin not enforced");
    s.provenance.emplace_back(std::string("Phi3: regular solution of a_{m+1} Phi3 = Z3 (") +
                              (inv3.analytic ? "closed form" : "quadrature") + ")");

    // For m + 1 <= 0 the kernel of a_{m+1} is regular and the boundary condition
    // leaves its coefficient free; the second-order row
    //   kappa Phi3 = b_m(-g - iG + M sigma C)
    // pins it whenever kappa = eps^2 - k^2 - M^2 is not zero.
    const double kappa = entry.eps2 - k * k - M * M;
    if (m + 1 <= 0 && std::abs(kappa) > 1e-9 * std::max(1.0, entry.eps2)) {
        const RadialProfile C = (-2.0 * p.B / (M * M * M)) * g;
        const RadialProfile rhs =
            op.b(m, maybe_sampled(-1.0 * g - I * G + M * p.sigma * C, opt.path)) / kappa;
        const RadialProfile kernel(grid, a_kernel(m, p.B), m + 1);
        cplx c = 0.0;
        if (rhs.has_closed_form() && phi3.has_closed_form()) {
            const int power = -(m + 1);
            c = rhs.closed_form()->coefficient(power) - phi3.closed_form()->coefficient(power);
        } else {
            cplx num = 0.0;
            double den = 0.0;
            for (std::size_t i = interior_margin; i + interior_margin < grid.size(); ++i) {
                num += std::conj(kernel[i]) * (rhs[i] - phi3[i]);
                den += std::norm(kernel[i]);
            }
            c = num / den;
        }
        s.kernel_coefficient = c;
        if (c != 0.0)
            phi3 = phi3 + c * (opt.path == RecoveryPath::quadrature ? kernel.sampled() : kernel);
        s.provenance.emplace_back("Phi3: kernel r^{-(m+1)} e^{-B r^2/2} coefficient fixed by the second-order Phi3 row");
    } else if (m + 1 <= 0) {
        s.provenance.emplace_back("Phi3: kappa = 0, kernel coefficient left at zero (any value solves the system)");
    }
    s.phi3 = phi3;

    auto [phi0, phi2] = solve_phi0_phi2(maybe_sampled(zero, opt.path), maybe_sampled(G, opt.path), eps, k);
    s.phi0 = phi0.with_m_index(m);
    s.phi2 = phi2.with_m_index(m);
    fill_tensors(s);
    return s;
}

inline RadialProfile active_field(int n, int m, double b_field, const RadialGrid& grid)
{
    return normalize(build_eigenfunction(n, m, b_field, grid)).profile;
}

} // namespace detail

/// Assembles the 10-component state from an explicit active primed field
/// (F for the scalar family, g' or G' for the G branches).
inline DkpState10 assemble_state10_from(Branch branch, const SpectrumEntry& entry, const PhysicalParams& p,
                                        const RadialProfile& active, const AssemblyOptions& opt = {})
{
    if (p.sigma != 0.0)
        throw Error(ErrorKind::configuration, "the 10-component system describes sigma = 0; use assemble_state15");
    return detail::build_core(branch, entry, p, active, opt);
}

inline DkpState10 assemble_state10(Branch branch, int n, int m, const PhysicalParams& p, const SpectrumEntry& entry,
                                   const RadialGrid& grid, const AssemblyOptions& opt = {})
{
    return assemble_state10_from(branch, entry, p, detail::active_field(n, m, p.B, grid), opt);
}

inline DkpState15 assemble_state15_from(Branch branch, const SpectrumEntry& entry, const PhysicalParams& p,
                                        const RadialProfile& active, const AssemblyOptions& opt = {})
{
    const auto zero = RadialProfile::zero(active.grid(), active.m_index());
    DkpState15 s{detail::build_core(branch, entry, p, active, opt), zero, zero, zero, zero, zero};
    const double M = p.M, k = p.k, eps = entry.eps, sigma = p.sigma;
    const detail::Ops op{p.B};
    const int m = s.m;
    const RadialProfile g = detail::maybe_sampled(*s.reduced.g, opt.path);
    s.c = ((-2.0 * p.B / (M * M * M)) * g).with_m_index(m);
    if (sigma == 0.0) {
        s.c0 = s.phi0;
        s.c1 = s.phi1;
        s.c2 = s.phi2;
        s.c3 = s.phi3;
    } else {
        s.c0 = (s.phi0 + detail::I * (eps * sigma / M) * s.c).with_m_index(m);
        s.c1 = (s.phi1 + (sigma / M) * op.a(m, s.c)).with_m_index(m - 1);
        s.c2 = (s.phi2 - detail::I * (k * sigma / M) * s.c).with_m_index(m);
        s.c3 = (s.phi3 + (sigma / M) * op.b(m, s.c)).with_m_index(m + 1);
    }
    s.provenance.emplace_back("C = -(2B/M^3) g; C_a from Phi_a and C");
    return s;
}

inline DkpState15 assemble_state15(Branch branch, int n, int m, const PhysicalParams& p, const SpectrumEntry& entry,
                                   const RadialGrid& grid, const AssemblyOptions& opt = {})
{
    return assemble_state15_from(branch, entry, p, detail::active_field(n, m, p.B, grid), opt);
}

/// One equation of a system: a labelled residual norm.
struct EquationResidual {
    std::string label;
    double norm = 0.0;
};

/// Per-equation relative residuals of a radial system.
struct SystemResidual {
    std::vector<EquationResidual> equations;

    double max() const
    {
        double out = 0.0;
        for (const auto& e : equations)
            out = std::max(out, e.norm);
        return out;
    }

    bool pass(double tolerance) const { return max() <= tolerance; }

    double at(std::string_view label) const
    {
        for (const auto& e : equations)
            if (e.label == label)
                return e.norm;
        throw Error(ErrorKind::domain, "no equation labelled " + std::string(label));
    }
};

/// ||sum of terms|| / max ||term||, max-norms over interior nodes (0 when all vanish).
/// `floor` bounds the denominator from below, so an equation whose terms all
/// vanish identically reports its discretization noise against the size of the
/// state rather than against the noise itself.
inline double equation_residual(const std::vector<RadialProfile>& terms, double floor = 0.0)
{
    const auto& grid = terms.front().grid();
    double scale = floor;
    for (const auto& t : terms) {
        if (!(t.grid() == grid))
            throw Error(ErrorKind::grid_mismatch, "equation terms live on different grids");
        scale = std::max(scale, t.interior_max_norm());
    }
    double worst = 0.0;
    for (std::size_t i = interior_margin; i + interior_margin < grid.size(); ++i) {
        cplx sum = 0.0;
        for (const auto& t : terms)
            sum += t[i];
        worst = std::max(worst, std::abs(sum));
    }
    if (worst == 0.0)
        return 0.0;
    return worst / scale;
}

/// Fraction of the state scale below which an equation counts as trivially
/// satisfied and is measured against the state instead of its own terms.
inline constexpr double residual_floor_fraction = 1e-2;

namespace detail {

/// M times the largest interior max-norm over the ten core components.
inline double state_scale(const DkpState10& s)
{
    double out = 0.0;
    for (const RadialProfile* f : {&s.phi0, &s.phi1, &s.phi2, &s.phi3, &s.e1, &s.e2, &s.e3, &s.h1, &s.h2, &s.h3})
        out = std::max(out, f->interior_max_norm());
    return s.params.M * out;
}

inline double residual_floor(const DkpState10& s) { return residual_floor_fraction * state_scale(s); }

inline void tensor_definitions(const DkpState10& s, SystemResidual& out)
{
    const Ops op{s.params.B};
    const double M = s.params.M, k = s.params.k, eps = s.entry.eps;
    const int m = s.m;
    const double floor = residual_floor(s);
    auto add = [&](const char* label, std::vector<RadialProfile> terms) {
        out.equations.push_back({label, equation_residual(terms, floor)});
    };
    add("def_E1", {op.a(m, s.phi0), -I * eps * s.phi1, -M * s.e1});
    add("def_H1", {-I * op.a(m, s.phi2), k * s.phi1, -M * s.h1});
    add("def_E3", {op.b(m, s.phi0), -I * eps * s.phi3, -M * s.e3});
    add("def_H3", {I * op.b(m, s.phi2), -k * s.phi3, -M * s.h3});
    add("def_E2", {-I * eps * s.phi2, -I * k * s.phi0, -M * s.e2});
    add("def_H2", {I * op.b(m - 1, s.phi1), -I * op.a(m + 1, s.phi3), -M * s.h2});
}

} // namespace detail

/// The 10-equation first-order system: four vector rows and six tensor definitions.
inline SystemResidual residual_first_order(const DkpState10& s)
{
    using detail::I;
    const detail::Ops op{s.params.B};
    const double M = s.params.M, k = s.params.k, eps = s.entry.eps;
    const int m = s.m;
    SystemResidual out;
    const double floor = detail::residual_floor(s);
    auto add = [&](const char* label, std::vector<RadialProfile> terms) {
        out.equations.push_back({label, equation_residual(terms, floor)});
    };
    add("eq_Phi0", {-1.0 * op.b(m - 1, s.e1), -1.0 * op.a(m + 1, s.e3), -I * k * s.e2, -M * s.phi0});
    add("eq_Phi2", {-I * op.b(m - 1, s.h1), I * op.a(m + 1, s.h3), I * eps * s.e2, -M * s.phi2});
    add("eq_Phi1", {I * op.a(m, s.h2), I * eps * s.e1, -k * s.h1, -M * s.phi1});
    add("eq_Phi3", {-I * op.b(m, s.h2), I * eps * s.e3, k * s.h3, -M * s.phi3});
    detail::tensor_definitions(s, out);
    return out;
}

/// The 15-equation first-order system of the polarizable particle.
inline SystemResidual residual_first_order(const DkpState15& s)
{
    using detail::I;
    const detail::Ops op{s.params.B};
    const double M = s.params.M, k = s.params.k, eps = s.entry.eps, sigma = s.params.sigma;
    const int m = s.m;
    SystemResidual out;
    const double floor = detail::residual_floor(s);
    auto add = [&](const char* label, std::vector<RadialProfile> terms) {
        out.equations.push_back({label, equation_residual(terms, floor)});
    };
    add("eq_C", {-I * eps * s.c0, -1.0 * op.b(m - 1, s.c1), -1.0 * op.a(m + 1, s.c3), -I * k * s.c2, -M * s.c});
    add("eq_C0", {-1.0 * op.b(m - 1, s.e1), -1.0 * op.a(m + 1, s.e3), -I * k * s.e2, -M * s.c0});
    add("eq_C1", {I * eps * s.e1, I * op.a(m, s.h2), -k * s.h1, -M * s.c1});
    add("eq_C2", {I * eps * s.e2, -I * op.b(m - 1, s.h1), I * op.a(m + 1, s.h3), -M * s.c2});
    add("eq_C3", {I * eps * s.e3, -I * op.b(m, s.h2), k * s.h3, -M * s.c3});
    add("eq_Phi0",
        {-I * eps * sigma * s.c, -1.0 * op.b(m - 1, s.e1), -1.0 * op.a(m + 1, s.e3), -I * k * s.e2, -M * s.phi0});
    add("eq_Phi1", {I * eps * s.e1, -sigma * op.a(m, s.c), I * op.a(m, s.h2), -k * s.h1, -M * s.phi1});
    add("eq_Phi2",
        {I * eps * s.e2, -I * op.b(m - 1, s.h1), I * op.a(m + 1, s.h3), I * k * sigma * s.c, -M * s.phi2});
    add("eq_Phi3", {I * eps * s.e3, -sigma * op.b(m, s.c), -I * op.b(m, s.h2), k * s.h3, -M * s.phi3});
    detail::tensor_definitions(s, out);
    return out;
}

/// The four second-order equations for Phi_a implied by the first-order system.
inline SystemResidual residual_second_order(const DkpState10& s)
{
    using detail::I;
    const detail::Ops op{s.params.B};
    const double M = s.params.M, k = s.params.k, eps = s.entry.eps;
    const double kappa = eps * eps - k * k - M * M;
    const int m = s.m;
    const auto div = op.b(m - 1, s.phi1) + op.a(m + 1, s.phi3);
    auto lap = [&](const RadialProfile& f) { return -1.0 * op.b(m - 1, op.a(m, f)) - op.a(m + 1, op.b(m, f)); };
    SystemResidual out;
    const double floor = detail::residual_floor(s);
    auto add = [&](const char* label, std::vector<RadialProfile> terms) {
        out.equations.push_back({label, equation_residual(terms, floor)});
    };
    add("second_Phi0", {lap(s.phi0), -(k * k + M * M) * s.phi0, -eps * k * s.phi2, I * eps * div});
    add("second_Phi2", {lap(s.phi2), (eps * eps - M * M) * s.phi2, eps * k * s.phi0, -I * k * div});
    add("second_Phi1", {-1.0 * op.a(m, op.b(m - 1, s.phi1)), kappa * s.phi1, op.a(m, op.a(m + 1, s.phi3)),
                        I * eps * op.a(m, s.phi0), I * k * op.a(m, s.phi2)});
    add("second_Phi3", {-1.0 * op.b(m, op.a(m + 1, s.phi3)), kappa * s.phi3, op.b(m, op.b(m - 1, s.phi1)),
                        I * eps * op.b(m, s.phi0), I * k * op.b(m, s.phi2)});
    return out;
}

/// Pointwise checks of the polarizable linear constraints: C = -(2B/M^3) g and
/// 2iB H2 = M^2 C, each relative to the larger side.
inline std::pair<double, double> polarizable_constraints(const DkpState15& s)
{
    const double M = s.params.M, B = s.params.B;
    const RadialProfile lhs_c = s.c, rhs_c = (-2.0 * B / (M * M * M)) * *s.reduced.g;
    const RadialProfile lhs_h = detail::I * (2.0 * B) * s.h2, rhs_h = (M * M) * s.c;
    return {equation_residual({lhs_c, -1.0 * rhs_c}), equation_residual({lhs_h, -1.0 * rhs_h})};
}

/// Max relative deviation of (k Phi0 + eps Phi2, eps Phi0 + k Phi2) from (F, G).
inline double chain_consistency(const DkpState10& s)
{
    const double k = s.params.k, eps = s.entry.eps;
    const RadialProfile F = k * s.phi0 + eps * s.phi2;
    const RadialProfile G = eps * s.phi0 + k * s.phi2;
    const double floor = residual_floor_fraction * std::max(s.reduced.F->interior_max_norm(), s.reduced.G->interior_max_norm());
    return std::max(equation_residual({F, -1.0 * *s.reduced.F}, floor),
                    equation_residual({G, -1.0 * *s.reduced.G}, floor));
}

} // namespace dkp
