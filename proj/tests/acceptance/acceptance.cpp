// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "dkp/dkp.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

using namespace dkp;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& fn)
{
    Outcome o{false, ""};
    try {
        o = fn();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass)
        ++failures;
    std::printf("%s %2d %s (%s)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str());
}

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

const PhysicalParams base{1.0, 0.5, 0.0, 0.0};
constexpr double momenta[] = {0.0, 0.3};

/// Six closed-form test profiles, independent of the library's own probes.
std::vector<GaussianSeries> test_profiles(double b)
{
    return {GaussianSeries(b, 1, {1.0}),
            GaussianSeries(b, 0, {1.0, 0.0, 0.5}),
            GaussianSeries(0.7, 2, {cplx(1.0, 0.5)}),
            GaussianSeries(1.2, 3, {1.0, -0.4}),
            GaussianSeries(0.9, 2, {0.0, 0.0, 1.0}),
            GaussianSeries(0.5 * b + 0.4, 4, {cplx(0.0, 1.0), 0.0, 0.1})};
}

/// Identity residuals on nodes with 0.25 <= r <= r_max - 0.25.
std::pair<double, double> identity_error(int m, double b, const RadialProfile& f)
{
    const auto ba = b_op(m - 1, b, a_op(m, b, f));
    const auto ab = a_op(m + 1, b, b_op(m, b, f));
    const auto lap = laplacian(m, b, f);
    double scale = 0.0, e1 = 0.0, e2 = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double r = f.grid().node(i);
        if (r < 0.25 || r > f.grid().r_max() - 0.25)
            continue;
        scale = std::max(scale, std::abs(f[i]));
        e1 = std::max(e1, std::abs(-(ba[i] + ab[i]) - lap[i]));
        e2 = std::max(e2, std::abs(ab[i] - ba[i] - 2.0 * b * f[i]));
    }
    return {e1 / scale, e2 / scale};
}

Outcome criterion1()
{
    double worst_analytic = 0.0, worst_order = 1e9;
    for (double b : {0.25, 0.5, 1.0}) {
        for (int m = -3; m <= 3; ++m) {
            for (const auto& prof : test_profiles(b)) {
                const RadialGrid grid(1e-3, 14.0, 2001);
                const auto r = verify_operator_identities(m, b, RadialProfile(grid, prof, m));
                worst_analytic = std::max({worst_analytic, r.laplacian, r.two_b});

                double err[2][3];
                const std::size_t pts[3] = {501, 1001, 2001};
                double h[3];
                for (int g = 0; g < 3; ++g) {
                    const RadialGrid gg(1e-3, 14.0, pts[g]);
                    h[g] = gg.step();
                    const auto [e1, e2] = identity_error(m, b, RadialProfile(gg, prof, m).sampled());
                    err[0][g] = e1;
                    err[1][g] = e2;
                }
                for (auto& e : err) {
                    // least-squares slope of log err against log h
                    double sx = 0, sy = 0, sxx = 0, sxy = 0;
                    for (int g = 0; g < 3; ++g) {
                        const double x = std::log(h[g]), y = std::log(e[g]);
                        sx += x, sy += y, sxx += x * x, sxy += x * y;
                    }
                    worst_order = std::min(worst_order, (3 * sxy - sx * sy) / (3 * sxx - sx * sx));
                }
            }
        }
    }
    return {worst_analytic <= 1e-10 && worst_order >= 3.5,
            "analytic max " + sci(worst_analytic) + ", min FD order " + std::to_string(worst_order).substr(0, 5)};
}

Outcome criterion2()
{
    int bad = 0;
    // dyadic fields keep 4B(n + 1/2 + (|m|+m)/2) = B (4n + 2 + 2(|m|+m)) exact in binary floating point
    for (double b : {0.25, 0.5, 1.0, 2.0}) {
        for (int n = 0; n <= 10; ++n) {
            for (int m = -10; m <= 10; ++m) {
                const long long units = 4LL * n + 2 + 2LL * (std::abs(m) + m);
                if (lambda2_quantized(n, m, b) != b * static_cast<double>(units))
                    ++bad;
                if (m <= 0 && lambda2_quantized(n, m, b) != lambda2_quantized(n, 0, b))
                    ++bad;
            }
        }
    }
    return {bad == 0, std::to_string(bad) + " mismatches over n<=10, |m|<=10"};
}

Outcome criterion3()
{
    // M = 1, k = 0, lambda^2 = 1: scalar eps^2 = 1 + lambda^2; for the G branches
    // s = sqrt(gamma) = eps solves s^2 - 1 - lambda^2 = +-2B s
    const long double l2 = 1.0L;
    const long double scalar = std::sqrt(1.0L + l2);
    const long double bb = 0.5L;
    const long double s_plus = bb + std::sqrt(bb * bb + 1.0L + l2);
    const long double s_minus = -bb + std::sqrt(bb * bb + 1.0L + l2);
    const long double oracle[3] = {scalar, s_plus, s_minus};
    double worst = 0.0;
    int i = 0;
    for (auto br : all_branches) {
        const auto e = branch_level(base, br, 0, 0);
        worst = std::max(worst, static_cast<double>(std::abs(static_cast<long double>(e.eps) - oracle[i++])));
    }
    return {worst <= 1e-12, "max |eps - oracle| " + sci(worst)};
}

Outcome criterion4()
{
    double worst = 0.0;
    int count = 0;
    for (double k : momenta) {
        const PhysicalParams p{1.0, 0.5, k, 0.0};
        for (auto br : {Branch::g_plus, Branch::g_minus})
            for (int n = 0; n <= 2; ++n)
                for (int m = -2; m <= 2; ++m) {
                    const auto e = branch_level(p, br, n, m);
                    if (e.flags.any())
                        continue;
                    const double gamma = (e.eps2 - k * k) / 1.0;
                    const double sign = br == Branch::g_plus ? 1.0 : -1.0;
                    const double lhs = e.eps2 - k * k - 1.0 - sign * 2.0 * 0.5 * std::sqrt(gamma);
                    worst = std::max(worst, std::abs(lhs - e.lambda2) / e.lambda2);
                    ++count;
                }
    }
    return {worst <= 1e-10 && count == 60, std::to_string(count) + " levels, max rel " + sci(worst)};
}

Outcome criterion5()
{
    double worst = 0.0;
    for (double k : momenta) {
        const PhysicalParams p{1.0, 0.5, k, 0.0};
        for (int n = 0; n <= 2; ++n)
            for (int m = -2; m <= 2; ++m) {
                const double l2 = lambda2_quantized(n, m, p.B);
                const auto pol = polarizable_spectrum(p, l2, n, m);
                for (auto br : {Branch::g_plus, Branch::g_minus}) {
                    const auto ord = ordinary_branch_energy(p, br, l2, n, m);
                    double best = 1e300;
                    for (const auto& e : pol)
                        if (e.branch == br)
                            best = std::min(best, std::abs(e.eps2 - ord.eps2) / ord.eps2);
                    worst = std::max(worst, best);
                }
            }
    }
    const auto roots = polarizable_spectrum({1.0, 0.5, 0.0, 0.1}, 1.0);
    const double expected[2] = {3.349234, 0.072988};
    double root_dev = 0.0, root_res = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        root_dev = std::max(root_dev, std::abs(roots.at(i).eps2 - 1.0 - expected[i]));
        root_res = std::max(root_res, roots.at(i).root_residual);
    }
    return {worst <= 1e-10 && root_dev <= 1e-5 && root_res <= 1e-9,
            "sigma=0 max rel " + sci(worst) + ", root dev " + sci(root_dev) + ", unsquared residual " +
                sci(root_res)};
}

Outcome criterion6()
{
    int bad = 0, count = 0;
    for (double k : momenta)
        for (int n = 0; n <= 2; ++n)
            for (int m = -2; m <= 2; ++m) {
                const double ref = branch_level({1.0, 0.5, k, 0.0}, Branch::scalar_f, n, m).eps;
                for (double s : {0.05, 0.1, 0.5}) {
                    ++count;
                    if (branch_level({1.0, 0.5, k, s}, Branch::scalar_f, n, m).eps != ref)
                        ++bad;
                }
            }
    return {bad == 0, std::to_string(count) + " comparisons, " + std::to_string(bad) + " differ"};
}

double laguerre(int n, double a, double x)
{
    // explicit sum: L_n^a(x) = sum_j (-1)^j C(n + a, n - j) x^j / j!
    double sum = 0.0;
    for (int j = 0; j <= n; ++j) {
        double binom = 1.0;  // C(n + a, n - j) = prod_{i=1}^{n-j} (a + j + i) / i
        for (int i = 1; i <= n - j; ++i)
            binom *= (a + j + i) / i;
        sum += (j % 2 ? -1.0 : 1.0) * binom * std::pow(x, j) / std::tgamma(j + 1.0);
    }
    return sum;
}

Outcome criterion7()
{
    double worst_ode = 0.0, worst_kl = 0.0;
    for (int n = 0; n <= 3; ++n)
        for (int m = -3; m <= 3; ++m) {
            const auto f = normalize(build_eigenfunction(n, m, 0.5, default_grid(0.5, n, m)));
            worst_ode = std::max(worst_ode, ode_residual_x(f, 0.1, 20.0));
            const double a = std::abs(m);
            double ratio = 1.0;  // n! / (a + 1)_n
            for (int j = 1; j <= n; ++j)
                ratio *= j / (a + j);
            for (int i = 0; i <= 400; ++i) {
                const double x = 0.05 * i;
                const double lg = laguerre(n, a, x) * ratio;
                const double km = kummer_m({-static_cast<double>(n), a + 1.0}, x);
                worst_kl = std::max(worst_kl, std::abs(km - lg) / std::max(1.0, std::abs(lg)));
            }
        }
    return {worst_ode <= 1e-8 && worst_kl <= 1e-10, "ODE max " + sci(worst_ode) + ", Kummer-Laguerre " + sci(worst_kl)};
}

Outcome criterion8()
{
    double scalar_first = 0.0, g_second = 0.0, g_first = 0.0, constraints = 0.0;
    int states = 0, irregular = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (double k : momenta) {
        for (double sigma : {0.0, 0.1}) {
            const PhysicalParams p{1.0, 0.5, k, sigma};
            const auto conv = sigma == 0.0 ? CouplingConvention::printed : CouplingConvention::first_order_consistent;
            for (auto br : all_branches)
                for (int n = 0; n <= 2; ++n)
                    for (int m = -2; m <= 2; ++m) {
                        const auto e = branch_level(p, br, n, m, conv);
                        if (e.flags.any())
                            continue;
                        const auto grid = default_grid(p.B, n, m);
                        const auto path = br == Branch::scalar_f ? RecoveryPath::analytic : RecoveryPath::quadrature;
                        try {
                            if (sigma == 0.0) {
                                const auto s = assemble_state10(br, n, m, p, e, grid, {path, conv});
                                if (br == Branch::scalar_f) {
                                    scalar_first = std::max(scalar_first, residual_first_order(s).max());
                                } else {
                                    g_second = std::max(g_second, residual_second_order(s).max());
                                    g_first = std::max(g_first, residual_first_order(s).max());
                                }
                            } else {
                                const auto s = assemble_state15(br, n, m, p, e, grid, {path, conv});
                                const auto [c1, c2] = polarizable_constraints(s);
                                constraints = std::max({constraints, c1, c2});
                                if (br != Branch::scalar_f)
                                    g_first = std::max(g_first, residual_first_order(s).max());
                            }
                            ++states;
                        } catch (const Error& err) {
                            if (err.kind() != ErrorKind::regularity)
                                throw;
                            ++irregular;
                        }
                    }
        }
    }
    const auto suite = run_canonical_suite();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = scalar_first <= 1e-6 && g_second <= 1e-6 && g_first <= 1e-5 && constraints <= 1e-8 &&
                    suite.pass() && secs <= 60.0;
    return {ok, std::to_string(states) + " states (" + std::to_string(irregular) +
                    " levels without a regular state skipped); scalar first " + sci(scalar_first) + ", G second " +
                    sci(g_second) + ", G first " + sci(g_first) + ", constraints " + sci(constraints) +
                    "; full suite " + std::to_string(suite.checks.size()) + " checks, " +
                    std::to_string(suite.failures()) + " failures, " + std::to_string(secs).substr(0, 4) + " s"};
}

Outcome criterion9()
{
    double worst = 0.0;
    int count = 0;
    for (double k : momenta)
        for (double sigma : {0.0, 0.1})
            for (auto conv : {CouplingConvention::printed, CouplingConvention::first_order_consistent})
                for (auto br : {Branch::g_plus, Branch::g_minus})
                    for (int n = 0; n <= 2; ++n)
                        for (int m = -2; m <= 2; ++m) {
                            const PhysicalParams p{1.0, 0.5, k, sigma};
                            const auto e = branch_level(p, br, n, m, conv);
                            if (e.flags.any())
                                continue;
                            const Mat2 a = coupling_matrix(p, e.eps2, conv);
                            worst = std::max(worst, diagonalization_residual(a, diagonalize_coupling(a)));
                            ++count;
                        }
    return {worst <= 1e-12, std::to_string(count) + " matrices, max " + sci(worst)};
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

int shell(const std::string& cmd) { return std::system(cmd.c_str()); }

Outcome criterion10()
{
    const std::string cli = DKP_CLI, dir = DKP_WORK_DIR;
    const std::string flags = " --mass 1 --bfield 0.5 --kz 0.3 --sigma 0.1 --n-max 2 --m-min -2 --m-max 2";
    int rc = 0;
    rc |= shell(cli + " spectrum" + flags + " --output " + dir + "/run1.csv");
    rc |= shell(cli + " spectrum" + flags + " --output " + dir + "/run2.csv");
    rc |= shell(cli + " spectrum" + flags + " --format json --output " + dir + "/run1.json");
    rc |= shell(cli + " spectrum" + flags + " --format json --output " + dir + "/run2.json");
    const std::string a = slurp(dir + "/run1.csv"), b = slurp(dir + "/run2.csv");
    const bool identical = !a.empty() && a == b && slurp(dir + "/run1.json") == slurp(dir + "/run2.json");

    rc |= shell(cli + " polarizability --sigmas 0.05 0.1 --format json --output " + dir + "/polar.json");
    rc |= shell(cli + " wavefunction --branch g_plus --n 1 --m 1 --output " + dir + "/wave.csv 2>/dev/null");
    rc |= shell(cli + " verify --quick --output " + dir + "/verify.json 2>/dev/null");
    const std::string reports = dir + "/run1.json " + dir + "/polar.json " + dir + "/wave.csv.json " + dir +
                                "/verify.json";
    const int valid = shell(std::string(DKP_PYTHON) + " " + DKP_VALIDATOR + " " + DKP_SCHEMA + " " + reports);
    return {rc == 0 && identical && valid == 0,
            std::string(identical ? "byte-identical" : "outputs differ") + ", schema " +
                (valid == 0 ? "valid" : "INVALID") + ", cli status " + std::to_string(rc)};
}

} // namespace

int main()
{
    report(1, "operator identities, analytic and finite-difference convergence", criterion1);
    report(2, "Landau quantization", criterion2);
    report(3, "three-branch benchmark", criterion3);
    report(4, "self-consistency of ordinary G levels", criterion4);
    report(5, "polarizable reduction and unsquared roots", criterion5);
    report(6, "sigma-invariance of the scalar family", criterion6);
    report(7, "eigenfunction ODE and Kummer-Laguerre agreement", criterion7);
    report(8, "full-system certification", criterion8);
    report(9, "coupling diagonalization", criterion9);
    report(10, "CLI determinism and schema validity", criterion10);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
