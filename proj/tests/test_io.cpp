#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "gridhmm/error.hpp"
#include "gridhmm/io.hpp"

using namespace gridhmm;

namespace {

const char* kBase = R"(
[detector]
m_neg = 49
m_zero = 50
m_pos = 51
sigma = 0.2
priors = 0.1, 0.8, 0.1

[transitions]
0.2, 0.7, 0.1
0.1  0.8  0.1   # whitespace works too
0.1, 0.7, 0.2
)";

std::vector<std::string> violations_of(std::string_view text)
{
    try {
        parse_config_text(text);
    } catch (const ValidationError& e) {
        return e.violations();
    }
    return {};
}

bool mentions(const std::vector<std::string>& v, std::string_view needle)
{
    return std::any_of(v.begin(), v.end(),
                       [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("parse a complete configuration")
{
    const RunConfig cfg = parse_config_text(kBase);
    CHECK(cfg.detector.m_neg() == 49.0);
    CHECK(cfg.detector.sigma() == 0.2);
    REQUIRE(cfg.transitions.has_value());
    CHECK(cfg.transitions->p[1][1] == 0.8);
    CHECK_FALSE(cfg.explicit_emissions.has_value());
    CHECK(cfg.length == 100);
    CHECK(cfg.trials == 10000);
    CHECK(cfg.notices.empty());
    const HmmModel m = cfg.model();
    CHECK(std::abs(m.emissions.r[0][0] - 0.9814) <= 5e-5);
    CHECK(m.initial == Vector3{0.1, 0.8, 0.1});
}

TEST_CASE("nominal-frequency convention converts to means")
{
    const RunConfig cfg = parse_config_text(R"(
[detector]
f0 = 50
delta_f_min = 1
delta_f_max = 1
sigma = 0.2
priors = 0.1, 0.8, 0.1
)");
    CHECK(cfg.detector.means() == Vector3{49.0, 50.0, 51.0});
    CHECK_FALSE(cfg.transitions.has_value());
    CHECK_THROWS_AS(cfg.model(), ValidationError);
}

TEST_CASE("both mean conventions are rejected")
{
    const auto v = violations_of(R"(
[detector]
m_neg = 49
m_zero = 50
m_pos = 51
f0 = 50
delta_f_min = 1
delta_f_max = 1
sigma = 0.2
)");
    CHECK(mentions(v, "one convention"));
}

TEST_CASE("priors that do not sum to one name the field")
{
    std::string text = kBase;
    text.replace(text.find("0.1, 0.8, 0.1"), 13, "0.5, 0.5, 0.5");
    const auto v = violations_of(text);
    REQUIRE(v.size() == 1);
    CHECK(mentions(v, "priors"));
    CHECK(mentions(v, "sum to 1"));
}

TEST_CASE("missing priors default to equal with a notice")
{
    std::string text = kBase;
    text.erase(text.find("priors"), std::string("priors = 0.1, 0.8, 0.1").size());
    const RunConfig cfg = parse_config_text(text);
    CHECK(std::abs(cfg.detector.priors()[1] - 1.0 / 3) <= 1e-15);
    REQUIRE(cfg.notices.size() == 1);
    CHECK(cfg.notices[0].find("equal priors") != std::string::npos);
}

TEST_CASE("every violation is reported in one pass")
{
    const auto v = violations_of(R"(
[detector]
m_neg = 49
m_zero = fifty
m_pos = 51
sigma = -1
priors = 0.5, 0.5, 0.5
colour = blue
[transitions]
0.2, 0.7, 0.2
0.1, 0.8, 0.1
0.1, 0.7, 0.2
[emissions]
1, 0
[simulation]
K = -3
trials = 0
snr_db = 1, 2
sigma_grid = 0.1
stray line
)");
    CHECK(mentions(v, "line 4: `m_zero`"));
    CHECK(mentions(v, "sigma: must be positive"));
    CHECK(mentions(v, "priors"));
    CHECK(mentions(v, "unknown key `colour`"));
    CHECK(mentions(v, "transition matrix row 0 sums to"));
    CHECK(mentions(v, "emissions: expected 3 rows"));
    CHECK(mentions(v, "`K`"));
    CHECK(mentions(v, "trials"));
    CHECK(mentions(v, "not both"));
    CHECK(mentions(v, "line 20: expected `key = value`"));
    CHECK(v.size() >= 10);
}

TEST_CASE("syntax errors carry line numbers")
{
    const auto v = violations_of("[detector\nm_neg = 1\n");
    CHECK(mentions(v, "line 1: unterminated section header"));
    CHECK(mentions(v, "line 2: entry outside of any section"));
    CHECK(mentions(violations_of("[nonsense]\n"), "unknown section"));
    CHECK(mentions(violations_of(std::string(kBase) + "[detector]\nsigma = 0.3\n"), "duplicate key"));
}

TEST_CASE("explicit emission matrix overrides the analytic one")
{
    const RunConfig cfg = parse_config_text(std::string(kBase) + R"(
[emissions]
0.9, 0.05, 0.0
0.1, 0.9, 0.1
0.0, 0.05, 0.9
)");
    REQUIRE(cfg.explicit_emissions.has_value());
    CHECK(cfg.model().emissions.r[1][1] == 0.9);

    const auto v = violations_of(std::string(kBase) + R"(
[emissions]
0.9, 0.05, 0.0
0.05, 0.9, 0.05
0.05, 0.05, 0.9
)");
    CHECK(mentions(v, "emission matrix column 2 sums to"));
}

TEST_CASE("degenerate thresholds are a config violation")
{
    const auto v = violations_of(R"(
[detector]
m_neg = 49.9
m_zero = 50
m_pos = 50.1
sigma = 1
priors = 0.45, 0.1, 0.45
)");
    CHECK(mentions(v, "degenerate"));
}

TEST_CASE("missing config file is an I/O error")
{
    CHECK_THROWS_AS(parse_config("/nonexistent/gridhmm.cfg"), IoError);
    CHECK_THROWS_AS(load_measurements("/nonexistent/z.csv"), IoError);
}

TEST_CASE("measurement CSV parsing")
{
    const auto s = parse_measurements("k,z_hz\n1,49.97\n2,50.02");
    CHECK(s.key_column == "k");
    REQUIRE(s.records.size() == 2);
    CHECK(s.records[0].z_hz == 49.97);
    CHECK(s.records[1].key_text == "2");
    CHECK(s.records[1].line == 3);

    const auto t = parse_measurements("# trace\r\ntimestamp,z_hz\r\n0.5,50.0\r\n1.0,49.9\r\n");
    CHECK(t.key_column == "timestamp");
    CHECK(t.records.size() == 2);

    // Extra columns, as in simulate output, are ignored.
    const auto u = parse_measurements("k,s,z_hz,x\n1,0,50.01,0\n2,1,50.6,1\n# command=simulate\n");
    REQUIRE(u.records.size() == 2);
    CHECK(u.records[1].z_hz == 50.6);
}

TEST_CASE("measurement CSV errors cite the row")
{
    auto message = [](std::string_view text) -> std::string {
        try {
            parse_measurements(text);
        } catch (const ValidationError& e) {
            return e.what();
        }
        return "";
    };
    CHECK(message("k,z_hz\n1,50\n3,50\n2,50\n").find("row 4") != std::string::npos);
    CHECK(message("k,z_hz\n1,50\n1,50\n").find("does not increase") != std::string::npos);
    CHECK(message("k,z_hz\n1,NaN\n").find("row 2: cannot parse z_hz `NaN`") != std::string::npos);
    CHECK(message("k,z_hz\n1,inf\n").find("cannot parse") != std::string::npos);
    CHECK(message("k,z_hz\n1,50,7\n").find("expected 2 fields") != std::string::npos);
    CHECK(message("").find("empty") != std::string::npos);
    CHECK(message("k,z_hz\n").find("no records") != std::string::npos);
    CHECK(message("time,z_hz\n1,50\n").find("header") != std::string::npos);
    CHECK(message("k,freq\n1,50\n").find("z_hz") != std::string::npos);
}

TEST_CASE("format_double round-trips")
{
    for (double v : {49.97, 0.1, 1.0 / 3, 50.123456789012345, -1e-300, 6.02e23}) {
        const std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("config files are read from disk")
{
    const auto path = std::filesystem::temp_directory_path() / "gridhmm_test_io.cfg";
    {
        std::ofstream out(path);
        out << kBase;
    }
    CHECK(parse_config(path).detector.m_pos() == 51.0);
    std::filesystem::remove(path);
}
