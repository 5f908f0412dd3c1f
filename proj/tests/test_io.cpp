#include "dkp/io.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <limits>
#include <random>
#include <sstream>

using namespace dkp;

TEST(FormatNumber, ShortFormsAreKept)
{
    EXPECT_EQ(format_number(1.0), "1");
    EXPECT_EQ(format_number(0.5), "0.5");
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(-2.25), "-2.25");
    EXPECT_EQ(format_number(1e-15), "1e-15");
}

TEST(FormatNumber, LongFormsAreCappedAtTwelveDigits)
{
    EXPECT_EQ(format_number(std::sqrt(2.0)), "1.41421356237");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_number(2.0 / 3.0 * 1e-20), "6.66666666667e-21");
}

TEST(FormatNumber, SpecialValues)
{
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
    EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(FormatNumber, RoundTripsToTwelveDigits)
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> mant(-10.0, 10.0);
    std::uniform_int_distribution<int> expo(-30, 30);
    for (int i = 0; i < 2000; ++i) {
        const double v = mant(rng) * std::pow(10.0, expo(rng));
        const std::string s = format_number(v);
        const double back = std::strtod(s.c_str(), nullptr);
        EXPECT_LE(std::abs(back - v), 5e-12 * std::abs(v)) << s;
        // fixed digits: formatting the parsed value again is a fixed point
        EXPECT_EQ(format_number(back), s);
    }
}

TEST(Csv, QuotesOnlyWhenNeeded)
{
    std::ostringstream out;
    CsvWriter csv(out);
    csv.row({"a", "b,c", "say \"hi\"", "two\nlines", ""});
    EXPECT_EQ(out.str(), "a,\"b,c\",\"say \"\"hi\"\"\",\"two\nlines\",\r\n");
}

TEST(Csv, SpectrumRowsMatchHeader)
{
    const auto entries = full_spectrum_table({1.0, 0.5, 0.0, 0.0}, 0, 0, 0);
    ASSERT_EQ(entries.size(), 3u);
    EXPECT_EQ(spectrum_row(entries[0]).size(), spectrum_header().size());
    EXPECT_EQ(spectrum_row(entries[0])[0], "scalar_f");
    EXPECT_EQ(spectrum_row(entries[0])[7], "1.41421356237");
}

TEST(Json, ReportEnvelope)
{
    const auto entries = full_spectrum_table({1.0, 0.5, 0.0, 0.1}, 0, 0, 0);
    const std::vector<ResidualReport> checks{{"x", 1e-9, 1e-8, 11}};
    const Json j = make_report(Json{{"command", "spectrum"}}, entries, checks);
    EXPECT_EQ(j["version"], version);
    ASSERT_EQ(j["entries"].size(), 3u);
    EXPECT_TRUE(j["entries"][1]["eps2"].is_string());
    EXPECT_EQ(j["entries"][1]["branch"], "g_plus");
    EXPECT_EQ(j["checks"][0]["norm"], "1e-09");
    EXPECT_TRUE(j["checks"][0]["pass"].get<bool>());
    EXPECT_TRUE(j["checks"][0]["convergence_order"].is_null());
    // insertion order is kept
    auto it = j.begin();
    EXPECT_EQ(it.key(), "config");
}

TEST(Json, ConvergenceFieldsOnlyWhenSet)
{
    ResidualReport r{"c", 1e-7, 1e-3, 2001};
    r.required_order = 3.5;
    r.convergence_order = 4.0;
    const Json j = to_json(r);
    EXPECT_EQ(j["convergence_order"], "4");
    EXPECT_EQ(j["required_order"], "3.5");
    EXPECT_FALSE(j.contains("saturated"));
    EXPECT_FALSE(j.contains("expect_violation"));
}

TEST(StateCsv, ColumnsAndRows)
{
    const PhysicalParams p{1.0, 0.5, 0.0, 0.0};
    const RadialGrid grid(1e-3, 12.0, 101);
    const auto entry = branch_level(p, Branch::scalar_f, 0, 0);
    const auto s = assemble_state10(Branch::scalar_f, 0, 0, p, entry, grid);
    std::ostringstream out;
    write_state_csv(out, s);
    const std::string text = out.str();
    EXPECT_EQ(text.substr(0, text.find("\r\n")),
              "r,re_Phi0,im_Phi0,re_Phi1,im_Phi1,re_Phi2,im_Phi2,re_Phi3,im_Phi3,re_E1,im_E1,re_E2,im_E2,re_E3,im_E3,"
              "re_H1,im_H1,re_H2,im_H2,re_H3,im_H3");
    std::size_t lines = 0;
    for (std::size_t pos = 0; (pos = text.find("\r\n", pos)) != std::string::npos; pos += 2)
        ++lines;
    EXPECT_EQ(lines, 102u);

    const auto s15 = assemble_state15(Branch::scalar_f, 0, 0, p, entry, grid);
    EXPECT_EQ(components(s15).size(), 15u);
    EXPECT_EQ(components(s15)[10].first, "C");
}
