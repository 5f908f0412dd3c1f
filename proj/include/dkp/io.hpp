#pragma once

#include "dkp/assembly.hpp"
#include "dkp/spectra.hpp"
#include "dkp/verification.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace dkp {

inline constexpr std::string_view version = "1.0.0";

/// Shortest round-trip decimal, capped at 12 significant digits. Negative
/// zero prints as 0 and non-finite values as nan / inf / -inf.
inline std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (v == 0.0)
        return "0";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    std::string_view shortest(buf, static_cast<std::size_t>(res.ptr - buf));
    // significant digits of the shortest form: mantissa digits without leading zeros
    const auto mantissa = shortest.substr(0, shortest.find('e'));
    int digits = 0;
    bool leading = true;
    for (char c : mantissa) {
        if (c < '0' || c > '9')
            continue;
        if (leading && c == '0')
            continue;
        leading = false;
        ++digits;
    }
    if (digits <= 12)
        return std::string(shortest);
    res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

/// RFC 4180 rows: CRLF terminators, fields quoted when they contain a comma,
/// a quote or a line break.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void row(const std::vector<std::string>& fields)
    {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i)
                out_ << ',';
            write_field(fields[i]);
        }
        out_ << "\r\n";
    }

private:
    void write_field(const std::string& f)
    {
        if (f.find_first_of(",\"\r\n") == std::string::npos) {
            out_ << f;
            return;
        }
        out_ << '"';
        for (char c : f) {
            if (c == '"')
                out_ << '"';
            out_ << c;
        }
        out_ << '"';
    }

    std::ostream& out_;
};

using Json = nlohmann::ordered_json;

inline std::vector<std::string> spectrum_header()
{
    return {"branch", "n", "m", "k", "sigma", "lambda2", "eps2", "eps", "flags"};
}

inline std::vector<std::string> spectrum_row(const SpectrumEntry& e)
{
    return {std::string(to_string(e.branch)), std::to_string(e.n), std::to_string(e.m), format_number(e.k),
            format_number(e.sigma), format_number(e.lambda2), format_number(e.eps2), format_number(e.eps),
            e.flags.to_string()};
}

inline Json to_json(const SpectrumEntry& e)
{
    return {{"branch", to_string(e.branch)},
            {"n", e.n},
            {"m", e.m},
            {"k", format_number(e.k)},
            {"sigma", format_number(e.sigma)},
            {"lambda2", format_number(e.lambda2)},
            {"eps2", format_number(e.eps2)},
            {"eps", format_number(e.eps)},
            {"root_sign", e.root_sign},
            {"root_residual", format_number(e.root_residual)},
            {"flags", e.flags.to_string()},
            {"convention", to_string(e.convention)},
            {"provenance", e.provenance}};
}

inline std::vector<std::string> shift_header()
{
    return {"branch", "n", "m", "sigma", "eps2_ordinary", "eps2_polarizable", "delta_eps2", "flags"};
}

inline std::vector<std::string> shift_row(const PolarizabilityShift& s)
{
    return {std::string(to_string(s.branch)), std::to_string(s.n), std::to_string(s.m), format_number(s.sigma),
            format_number(s.eps2_ordinary), format_number(s.eps2_polarizable), format_number(s.delta_eps2),
            s.flags.to_string()};
}

inline Json to_json(const PolarizabilityShift& s)
{
    return {{"branch", to_string(s.branch)},
            {"n", s.n},
            {"m", s.m},
            {"sigma", format_number(s.sigma)},
            {"eps2_ordinary", format_number(s.eps2_ordinary)},
            {"eps2_polarizable", format_number(s.eps2_polarizable)},
            {"delta_eps2", format_number(s.delta_eps2)},
            {"flags", s.flags.to_string()}};
}

inline Json to_json(const ResidualReport& r)
{
    Json j{{"label", r.label},
           {"norm", format_number(r.norm)},
           {"tolerance", format_number(r.tolerance)},
           {"grid_points", r.grid_points},
           {"pass", r.pass()}};
    j["convergence_order"] = r.convergence_order ? Json(format_number(*r.convergence_order)) : Json(nullptr);
    if (r.required_order)
        j["required_order"] = format_number(*r.required_order);
    if (r.saturated)
        j["saturated"] = true;
    if (r.inconclusive)
        j["inconclusive"] = true;
    if (r.expect_violation)
        j["expect_violation"] = true;
    return j;
}

inline Json to_json(const ExcludedState& e) { return {{"label", e.label}, {"reason", e.reason}}; }

inline Json to_json(const PhysicalParams& p)
{
    return {{"M", format_number(p.M)}, {"B", format_number(p.B)}, {"k", format_number(p.k)},
            {"sigma", format_number(p.sigma)}};
}

/// The common report envelope {config, entries, checks, version}.
template <class Entry>
Json make_report(Json config, const std::vector<Entry>& entries, const std::vector<ResidualReport>& checks)
{
    Json out{{"config", std::move(config)}, {"entries", Json::array()}, {"checks", Json::array()},
             {"version", version}};
    for (const auto& e : entries)
        out["entries"].push_back(to_json(e));
    for (const auto& c : checks)
        out["checks"].push_back(to_json(c));
    return out;
}

/// Named radial components of an assembled state, in output order.
inline std::vector<std::pair<std::string, const RadialProfile*>> components(const DkpState10& s)
{
    return {{"Phi0", &s.phi0}, {"Phi1", &s.phi1}, {"Phi2", &s.phi2}, {"Phi3", &s.phi3}, {"E1", &s.e1},
            {"E2", &s.e2},     {"E3", &s.e3},     {"H1", &s.h1},     {"H2", &s.h2},     {"H3", &s.h3}};
}

inline std::vector<std::pair<std::string, const RadialProfile*>> components(const DkpState15& s)
{
    auto out = components(static_cast<const DkpState10&>(s));
    out.insert(out.end(), {{"C", &s.c}, {"C0", &s.c0}, {"C1", &s.c1}, {"C2", &s.c2}, {"C3", &s.c3}});
    return out;
}

/// r followed by re_X, im_X for every component.
template <class State>
void write_state_csv(std::ostream& out, const State& s)
{
    const auto comps = components(s);
    std::vector<std::string> header{"r"};
    for (const auto& [name, _] : comps) {
        header.push_back("re_" + name);
        header.push_back("im_" + name);
    }
    CsvWriter csv(out);
    csv.row(header);
    const auto& grid = s.grid();
    std::vector<std::string> row;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        row.assign(1, format_number(grid.node(i)));
        for (const auto& [_, f] : comps) {
            row.push_back(format_number((*f)[i].real()));
            row.push_back(format_number((*f)[i].imag()));
        }
        csv.row(row);
    }
}

/// One report per equation of a residual system, all against one tolerance.
inline std::vector<ResidualReport> as_reports(const std::string& prefix, const SystemResidual& sys, double tolerance,
                                              std::size_t points)
{
    std::vector<ResidualReport> out;
    for (const auto& e : sys.equations)
        out.emplace_back(prefix + "/" + e.label, e.norm, tolerance, points);
    return out;
}

} // namespace dkp
