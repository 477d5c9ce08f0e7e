#include "perilat/experiment.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace perilat;

namespace {

std::size_t count(const std::string& haystack, const std::string& needle)
{
    std::size_t n = 0;
    for (auto p = haystack.find(needle); p != std::string::npos; p = haystack.find(needle, p + 1)) ++n;
    return n;
}

std::string slurp(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace

TEST(Builtin, Examples)
{
    const auto quad = builtin_function(TestFunction::QuadraticUnivar, 1);
    std::vector<double> y0{0.0}, yh{0.5};
    EXPECT_EQ(quad(y0), cplx(0.75));
    EXPECT_EQ(quad(yh), cplx(0.5));
    const auto sum = builtin_function(TestFunction::CoordinateSum, 5);
    std::vector<double> y5(5, 0.5);
    EXPECT_EQ(sum(y5), cplx(2.5));
    EXPECT_THROW(builtin_function(TestFunction::QuadraticUnivar, 2), DimensionMismatch);
    EXPECT_THROW(builtin_function(TestFunction::UserPolynomial, 2), DomainError);
}

TEST(Config, Validation)
{
    ExperimentConfig cfg;
    cfg.dim = 2;
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg.test_function = TestFunction::CoordinateSum;
    EXPECT_NO_THROW(cfg.validate());
    cfg.oversampling_factor = 0.5;
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg.oversampling_factor = 2.0;
    cfg.transform = "log:2,log:2,log:2";
    EXPECT_THROW(cfg.validate(), ParseError);
}

TEST(Config, RangeParsing)
{
    EXPECT_EQ(parse_range("4:80:1").values().size(), 77u);
    EXPECT_EQ(parse_range("4:8").values(), (std::vector<std::int64_t>{4, 5, 6, 7, 8}));
    EXPECT_EQ(parse_range("16").values(), std::vector<std::int64_t>{16});
    EXPECT_EQ(parse_range("2:10:4").values(), (std::vector<std::int64_t>{2, 6, 10}));
    EXPECT_THROW(parse_range("8:4"), ParseError);
    EXPECT_THROW(parse_range("4:8:0"), ParseError);
    EXPECT_THROW(parse_range("a:b"), ParseError);
    EXPECT_THROW(parse_range("1:2:3:4"), ParseError);
}

TEST(Config, KeyValueFile)
{
    std::stringstream ss(R"(# univariate sweep
dim = 1
test_function = quad
transform = log:4
N_range = 4:20:2
oversampling_factor = 3
seed = 99
output_path = out.csv
strategy = cbc
lattice_search = exhaustive
extra_nodes = 1
)");
    const auto cfg = parse_config(ss);
    EXPECT_EQ(cfg.dim, 1u);
    EXPECT_EQ(cfg.test_function, TestFunction::QuadraticUnivar);
    EXPECT_EQ(cfg.transform, "log:4");
    EXPECT_EQ(cfg.N_range.values().size(), 9u);
    EXPECT_EQ(cfg.oversampling_factor, 3.0);
    EXPECT_EQ(cfg.seed, 99u);
    EXPECT_EQ(cfg.output_path, "out.csv");
    EXPECT_EQ(cfg.strategy, SearchStrategy::CBC);
    EXPECT_EQ(cfg.lattice_search, SearchMode::Exhaustive);
    EXPECT_EQ(cfg.extra_nodes, 1u);

    std::stringstream unknown("dimension = 3\n");
    EXPECT_THROW(parse_config(unknown), ParseError);
    std::stringstream noeq("dim 3\n");
    EXPECT_THROW(parse_config(noeq), ParseError);
    std::stringstream badnum("seed = -4\n");
    EXPECT_THROW(parse_config(badnum), ParseError);
}

TEST(Sweep, QuadraticSineRows)
{
    ExperimentConfig cfg;
    cfg.transform = "sine";
    cfg.N_range = {4, 8, 1};
    const auto rows = run_sweep(cfg);
    ASSERT_EQ(rows.size(), 5u);
    for (const auto& r : rows) {
        EXPECT_GT(r.eps_inf, 0.0);
        EXPECT_TRUE(std::isfinite(r.eps_inf));
        EXPECT_GE(r.M, 2 * r.set_size);
        EXPECT_EQ(r.set_size, static_cast<std::uint64_t>(2 * r.N + 1));
    }
    EXPECT_EQ(rows.front().M, 18u);
}

TEST(Sweep, PolynomialFixtureIsExact)
{
    for (const char* t : {"sine", "log:2", "log:8", "erf:3", "id"}) {
        ExperimentConfig cfg;
        cfg.test_function = TestFunction::UserPolynomial;
        cfg.transform = t;
        cfg.N_range = {4, 24, 4};
        cfg.seed = 1234;
        for (const auto& r : run_sweep(cfg)) EXPECT_LE(r.eps_inf, 1e-10) << t << " N=" << r.N;
    }
    ExperimentConfig cfg;
    cfg.dim = 3;
    cfg.test_function = TestFunction::UserPolynomial;
    cfg.transform = "log:4,sine,erf:2";
    cfg.N_range = {4, 8, 4};
    for (const auto& r : run_sweep(cfg)) EXPECT_LE(r.eps_inf, 1e-10);
}

TEST(Sweep, ExtraNodesFloor)
{
    ExperimentConfig cfg;
    cfg.transform = "sine";
    cfg.N_range = {4, 4, 1};
    cfg.oversampling_factor = 1.0;
    cfg.extra_nodes = 1;
    const auto rows = run_sweep(cfg);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].M, 10u);
    EXPECT_NEAR(rows[0].eps_inf, 4.2248e-02, 5e-7);
    EXPECT_EQ(lattice_floor(9, 2.0, 0), 18u);
    EXPECT_EQ(lattice_floor(9, 1.0, 0), 9u);
    EXPECT_EQ(lattice_floor(9, 1.5, 0), 14u);
    EXPECT_EQ(lattice_floor(9, 1.0, 5), 14u);
}

TEST(Sweep, BivariateOrdering)
{
    ExperimentConfig cfg;
    cfg.dim = 2;
    cfg.test_function = TestFunction::CoordinateSum;
    cfg.N_range = {64, 64, 1};
    cfg.transform = "log:4,log:4";
    const double e4 = run_sweep(cfg).at(0).eps_inf;
    cfg.transform = "log:2,log:2";
    const double e2 = run_sweep(cfg).at(0).eps_inf;
    EXPECT_LT(e4, e2);
}

TEST(Sweep, Deterministic)
{
    ExperimentConfig cfg;
    cfg.dim = 2;
    cfg.test_function = TestFunction::UserPolynomial;
    cfg.transform = "log:3";
    cfg.N_range = {2, 10, 2};
    auto a = run_sweep(cfg), b = run_sweep(cfg);
    for (auto* rows : {&a, &b})
        for (auto& r : *rows) r.wall_time_ms = 0;
    EXPECT_EQ(a, b);
}

TEST(Csv, Format)
{
    std::stringstream empty;
    write_csv(empty, {});
    EXPECT_EQ(empty.str(), "N,M,set_size,eps_inf,wall_time_ms\n");

    std::stringstream one;
    write_csv(one, {SweepRow{4, 18, 9, 4.2248e-02, 1.0}});
    EXPECT_EQ(one.str(), "N,M,set_size,eps_inf,wall_time_ms\n4,18,9,4.22480e-02,1.00000e+00\n");
}

TEST(Csv, Roundtrip)
{
    std::vector<SweepRow> rows{{4, 18, 9, 4.22480e-02, 1.5}, {80, 322, 161, 7.54960e-07, 0.0}, {5, 20, 11, 0.0, 12.25}};
    std::stringstream ss;
    write_csv(ss, rows);
    EXPECT_EQ(parse_csv(ss), rows);

    std::stringstream bad("N,M\n1,2\n");
    EXPECT_THROW(parse_csv(bad), ParseError);
    std::stringstream short_row("N,M,set_size,eps_inf,wall_time_ms\n1,2,3\n");
    EXPECT_THROW(parse_csv(short_row), ParseError);
}

TEST(Csv, FileErrorsNameThePath)
{
    try {
        write_csv({}, "/nonexistent-directory/rows.csv");
        FAIL();
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent-directory/rows.csv"), std::string::npos);
    }
    const auto path = (std::filesystem::temp_directory_path() / "perilat_csv_test.csv").string();
    write_csv({SweepRow{1, 3, 3, 0.5, 0}}, path);
    EXPECT_EQ(slurp(path), "N,M,set_size,eps_inf,wall_time_ms\n1,3,3,5.00000e-01,0.00000e+00\n");
    std::remove(path.c_str());
}

TEST(Plot, SingleGroup)
{
    std::stringstream ss;
    render_plot(ss, {{"sine", {{4, 18, 9, 4e-2, 0}, {5, 22, 11, 3e-2, 0}}}});
    const auto svg = ss.str();
    EXPECT_EQ(count(svg, "<polyline"), 1u);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Plot, ZeroIsClampedWithWarning)
{
    std::stringstream ss;
    std::vector<std::string> warnings;
    render_plot(ss, {{"exact", {{4, 18, 9, 0.0, 0}, {5, 22, 11, 1e-3, 0}}}}, &warnings);
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_NE(warnings[0].find("1e-16"), std::string::npos);
    EXPECT_NE(ss.str().find(">1e-16<"), std::string::npos);
}

TEST(Plot, LegendOrder)
{
    std::vector<PlotSeries> series;
    for (const char* label : {"sine", "log:2", "log:4", "a<b"}) series.push_back({label, {{4, 18, 9, 1e-3, 0}}});
    std::stringstream ss;
    render_plot(ss, series);
    const auto svg = ss.str();
    EXPECT_EQ(count(svg, "<polyline"), 4u);
    const auto legend = svg.substr(svg.find("class=\"legend\""));
    std::size_t prev = 0;
    for (const char* label : {">sine<", ">log:2<", ">log:4<", ">a&lt;b<"}) {
        const auto p = legend.find(label);
        ASSERT_NE(p, std::string::npos) << label;
        EXPECT_GT(p, prev);
        prev = p;
    }
    EXPECT_THROW(render_plot(ss, {}), DegenerateInput);
}
