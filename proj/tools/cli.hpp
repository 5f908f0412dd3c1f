#pragma once

#include "dkp/dkp.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace dkp::cli {

enum ExitCode : int { ok = 0, failure = 1, config_error = 2 };

struct RunConfig {
    std::string command;
    PhysicalParams params;
    int n_max = 2;
    int m_min = -2;
    int m_max = 2;
    std::optional<std::string> branch;
    std::size_t grid_points = default_grid_points;
    std::optional<double> r_max;
    std::string format;
    std::optional<std::string> output;
    std::optional<double> tolerance;
    bool quick = false;
    std::string coupling = "printed";

    // wavefunction
    int n = 0;
    int m = 0;
    std::string path = "analytic";
    std::optional<int> components;
    bool allow_singular = false;
    std::optional<std::string> sidecar;

    // polarizability
    std::vector<double> sigmas;

    // set by the parser: whether k / sigma were given explicitly
    bool kz_given = false;
    bool sigma_given = false;
};

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Json config_json(const RunConfig& c)
{
    Json j{{"command", c.command},
           {"params", to_json(c.params)},
           {"n_max", c.n_max},
           {"m_min", c.m_min},
           {"m_max", c.m_max},
           {"branch", c.branch ? Json(*c.branch) : Json(nullptr)},
           {"coupling", c.coupling},
           {"grid_points", c.grid_points},
           {"r_max", c.r_max ? Json(format_number(*c.r_max)) : Json(nullptr)},
           {"format", c.format}};
    if (c.command == "wavefunction") {
        j["n"] = c.n;
        j["m"] = c.m;
        j["path"] = c.path;
        j["components"] = c.components.value_or(0);
        j["allow_singular"] = c.allow_singular;
    } else if (c.command == "verify") {
        j["quick"] = c.quick;
        j["tolerance"] = c.tolerance ? Json(format_number(*c.tolerance)) : Json(nullptr);
    } else if (c.command == "polarizability") {
        Json s = Json::array();
        for (double v : c.sigmas)
            s.push_back(format_number(v));
        j["sigmas"] = s;
    }
    return j;
}

inline CouplingConvention convention_of(const RunConfig& c)
{
    if (c.coupling == "consistent")
        return CouplingConvention::first_order_consistent;
    return CouplingConvention::printed;
}

inline std::optional<Branch> branch_of(const RunConfig& c)
{
    if (!c.branch)
        return std::nullopt;
    return parse_branch(*c.branch);
}

inline void validate(const RunConfig& c)
{
    c.params.validate();
    if (c.n_max < 0)
        throw ConfigError("--n-max must be non-negative");
    if (c.m_min > c.m_max)
        throw ConfigError("--m-min must not exceed --m-max");
    if (c.grid_points < 5)
        throw ConfigError("--grid-points must be at least 5");
    if (c.r_max && !(*c.r_max > default_r_min))
        throw ConfigError("--r-max must exceed the inner grid radius");
    if (c.tolerance && !(*c.tolerance > 0.0))
        throw ConfigError("--tolerance must be positive");
    if (c.command == "wavefunction") {
        if (c.n < 0)
            throw ConfigError("--n must be non-negative");
        if (!c.branch)
            throw ConfigError("wavefunction needs --branch");
        if (c.components && *c.components == 10 && c.params.sigma != 0.0)
            throw ConfigError("the 10-component state describes sigma = 0; use --components 15");
    }
}

/// Writes to --output when given, otherwise to `out`.
class Sink {
public:
    Sink(const std::optional<std::string>& path, std::ostream& out) : out_(&out)
    {
        if (path) {
            file_ = std::make_unique<std::ofstream>(*path, std::ios::binary);
            if (!*file_)
                throw ConfigError("cannot open output file " + *path);
            out_ = file_.get();
        }
    }

    std::ostream& stream() { return *out_; }

private:
    std::ostream* out_;
    std::unique_ptr<std::ofstream> file_;
};

inline void write_json(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

inline int cmd_spectrum(const RunConfig& c, std::ostream& out)
{
    const auto entries = full_spectrum_table(c.params, c.n_max, c.m_min, c.m_max, convention_of(c), branch_of(c));
    Sink sink(c.output, out);
    if (c.format == "json") {
        write_json(sink.stream(), make_report(config_json(c), entries, {}));
    } else {
        CsvWriter csv(sink.stream());
        csv.row(spectrum_header());
        for (const auto& e : entries)
            csv.row(spectrum_row(e));
    }
    return ok;
}

inline int cmd_polarizability(const RunConfig& c, std::ostream& out)
{
    const auto rows = polarizability_shifts(c.params, c.sigmas, c.n_max, c.m_min, c.m_max, convention_of(c),
                                            branch_of(c));
    Sink sink(c.output, out);
    if (c.format == "json") {
        write_json(sink.stream(), make_report(config_json(c), rows, {}));
    } else {
        CsvWriter csv(sink.stream());
        csv.row(shift_header());
        for (const auto& r : rows)
            csv.row(shift_row(r));
    }
    return ok;
}

inline int cmd_wavefunction(RunConfig c, std::ostream& out, std::ostream& err)
{
    const Branch branch = *branch_of(c);
    const auto conv = convention_of(c);
    const auto path = c.path == "quadrature" ? RecoveryPath::quadrature : RecoveryPath::analytic;
    if (!c.components)
        c.components = c.params.sigma == 0.0 ? 10 : 15;

    const auto entry = branch_level(c.params, branch, c.n, c.m, conv);
    if (entry.flags.any())
        throw Error(ErrorKind::domain, "level " + std::string(to_string(branch)) + " n=" + std::to_string(c.n) +
                                           " m=" + std::to_string(c.m) + " is flagged " + entry.flags.to_string());

    const RadialGrid grid = c.r_max ? RadialGrid(default_r_min, *c.r_max, c.grid_points)
                                    : default_grid(c.params.B, c.n, c.m, c.grid_points);
    std::vector<std::string> warnings;
    const double reach = c.params.B * grid.r_max() * grid.r_max();
    if (reach < 40.0 + std::abs(c.m))
        warnings.push_back("grid too short for |m| = " + std::to_string(std::abs(c.m)) + ": B r_max^2 = " +
                           format_number(reach) + " < " + std::to_string(40 + std::abs(c.m)));
    const auto eig = normalize(build_eigenfunction(c.n, c.m, c.params.B, grid));
    warnings.insert(warnings.end(), eig.warnings.begin(), eig.warnings.end());
    for (const auto& w : warnings)
        err << "warning: " << w << '\n';

    const AssemblyOptions opt{path, conv, c.allow_singular};
    const double first_tol = path == RecoveryPath::analytic ? 1e-6 : 1e-5;
    std::vector<ResidualReport> checks;
    std::ostringstream body;
    if (*c.components == 10) {
        const auto s = assemble_state10_from(branch, entry, c.params, eig.profile, opt);
        write_state_csv(body, s);
        const auto n = grid.size();
        for (auto& r : as_reports("first_order", residual_first_order(s), first_tol, n))
            checks.push_back(r);
        for (auto& r : as_reports("second_order", residual_second_order(s), 1e-6, n))
            checks.push_back(r);
        if (branch != Branch::scalar_f)
            checks.emplace_back("chain_consistency", chain_consistency(s), 1e-10, n);
    } else {
        const auto s = assemble_state15_from(branch, entry, c.params, eig.profile, opt);
        write_state_csv(body, s);
        const auto n = grid.size();
        for (auto& r : as_reports("first_order_15", residual_first_order(s), first_tol, n))
            checks.push_back(r);
        const auto [c_g, h_c] = polarizable_constraints(s);
        checks.emplace_back("constraint_C_g", c_g, 1e-8, n);
        checks.emplace_back("constraint_H2_C", h_c, 1e-8, n);
    }
    std::size_t failed = 0;
    for (const auto& r : checks)
        failed += r.pass() ? 0 : 1;
    if (failed)
        err << "warning: " << failed << " residual check(s) above tolerance; see the JSON summary\n";

    Json report = make_report(config_json(c), std::vector<SpectrumEntry>{entry}, checks);
    report["warnings"] = warnings;

    Sink sink(c.output, out);
    if (c.format == "json") {
        write_json(sink.stream(), report);
        return ok;
    }
    sink.stream() << body.str();
    std::optional<std::string> sidecar = c.sidecar;
    if (!sidecar && c.output)
        sidecar = *c.output + ".json";
    if (sidecar) {
        std::ofstream side(*sidecar, std::ios::binary);
        if (!side)
            throw ConfigError("cannot open sidecar file " + *sidecar);
        write_json(side, report);
    }
    return ok;
}

inline int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    SuiteOptions opt;
    opt.M = c.params.M;
    opt.B = c.params.B;
    if (c.kz_given)
        opt.momenta = {c.params.k};
    if (c.sigma_given)
        opt.sigmas = {c.params.sigma};
    opt.n_max = c.n_max;
    opt.m_min = c.m_min;
    opt.m_max = c.m_max;
    opt.r_max = c.r_max;
    opt.tolerance = c.tolerance;
    opt.quick = c.quick;
    if (c.grid_points != default_grid_points)
        opt.grid_points = c.grid_points;
    const auto rep = run_canonical_suite(opt);

    Sink sink(c.output, out);
    if (c.format == "csv") {
        CsvWriter csv(sink.stream());
        csv.row({"label", "norm", "tolerance", "grid_points", "convergence_order", "pass"});
        for (const auto& r : rep.checks)
            csv.row({r.label, format_number(r.norm), format_number(r.tolerance), std::to_string(r.grid_points),
                     r.convergence_order ? format_number(*r.convergence_order) : "",
                     r.pass() ? "true" : "false"});
    } else {
        Json j = make_report(config_json(c), rep.entries, rep.checks);
        j["excluded"] = Json::array();
        for (const auto& e : rep.excluded)
            j["excluded"].push_back(to_json(e));
        j["summary"] = {{"checks", rep.checks.size()},
                        {"failures", rep.failures()},
                        {"excluded", rep.excluded.size()}};
        write_json(sink.stream(), j);
    }
    err << "verify: " << rep.checks.size() << " checks, " << rep.failures() << " failures, " << rep.excluded.size()
        << " states excluded\n";
    for (const auto& r : rep.checks)
        if (!r.pass())
            err << "FAIL " << r.label << " norm=" << format_number(r.norm) << " tol=" << format_number(r.tolerance)
                << '\n';
    return rep.pass() ? ok : failure;
}

inline bool is_config_kind(ErrorKind k)
{
    return k == ErrorKind::domain || k == ErrorKind::configuration || k == ErrorKind::singular_node ||
           k == ErrorKind::discretization;
}

/// Parses `args` (without the program name) and runs the command.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Spin-1 particle in a uniform magnetic field: Landau levels, states and their verification", "dkp"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(version));

    RunConfig c;
    std::optional<double> kz, sigma;
    std::optional<std::string> format;
    const std::vector<std::string> branches{"scalar_f", "g_plus", "g_minus"};

    auto common = [&](CLI::App* sub) {
        sub->add_option("--mass", c.params.M, "M = Mc/hbar")->capture_default_str();
        sub->add_option("--bfield", c.params.B, "B = eB/(2 hbar)")->capture_default_str();
        sub->add_option("--kz", kz, "longitudinal momentum k (default 0)");
        sub->add_option("--sigma", sigma, "polarizability sigma (default 0)");
        sub->add_option("--n-max", c.n_max, "largest radial quantum number")->capture_default_str();
        sub->add_option("--m-min", c.m_min, "smallest azimuthal index")->capture_default_str();
        sub->add_option("--m-max", c.m_max, "largest azimuthal index")->capture_default_str();
        sub->add_option("--branch", c.branch, "restrict to one branch")->check(CLI::IsMember(branches));
        sub->add_option("--grid-points", c.grid_points, "radial grid size")->capture_default_str();
        sub->add_option("--r-max", c.r_max, "outer grid radius (default: from B, n, m)");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--output", c.output, "output file (default: standard output)");
        sub->add_option("--coupling", c.coupling, "coupling convention of the polarizable problem")
            ->check(CLI::IsMember({"printed", "consistent"}))
            ->capture_default_str();
    };

    auto* spectrum = app.add_subcommand("spectrum", "Landau-level table for every branch");
    common(spectrum);

    auto* wave = app.add_subcommand("wavefunction", "sampled radial components of one state");
    common(wave);
    wave->add_option("--n", c.n, "radial quantum number")->capture_default_str();
    wave->add_option("--m", c.m, "azimuthal index")->capture_default_str();
    wave->add_option("--path", c.path, "recovery of Phi1, Phi3")
        ->check(CLI::IsMember({"analytic", "quadrature"}))
        ->capture_default_str();
    wave->add_option("--components", c.components, "10 or 15 (default: 10 at sigma = 0, else 15)")
        ->check(CLI::IsMember({10, 15}));
    wave->add_flag("--allow-singular", c.allow_singular, "keep a Phi1 that is singular at the origin");
    wave->add_option("--sidecar", c.sidecar, "residual summary path (default: OUTPUT.json)");

    auto* verify = app.add_subcommand("verify", "certification suite over the canonical parameter set");
    common(verify);
    verify->add_option("--tolerance", c.tolerance, "replace every stated tolerance");
    verify->add_flag("--quick", c.quick, "analytic path only");

    auto* polar = app.add_subcommand("polarizability", "level shifts eps^2(sigma) - eps^2(0)");
    common(polar);
    polar->add_option("--sigmas", c.sigmas, "list of sigma values (default: --sigma)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, e_out;
        const int code = app.exit(e, o, e_out);
        out << o.str();
        err << e_out.str();
        return code == 0 ? ok : config_error;
    }

    c.command = app.get_subcommands().front()->get_name();
    c.kz_given = kz.has_value();
    c.sigma_given = sigma.has_value();
    c.params.k = kz.value_or(0.0);
    c.params.sigma = sigma.value_or(0.0);
    c.format = format.value_or(c.command == "verify" ? "json" : "csv");
    if (c.command == "polarizability" && c.sigmas.empty())
        c.sigmas = {c.params.sigma};

    try {
        validate(c);
        if (c.command == "spectrum")
            return cmd_spectrum(c, out);
        if (c.command == "wavefunction")
            return cmd_wavefunction(c, out, err);
        if (c.command == "verify")
            return cmd_verify(c, out, err);
        return cmd_polarizability(c, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return config_error;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return is_config_kind(e.kind()) ? config_error : failure;
    }
}

} // namespace dkp::cli
