#pragma once

// Error-decay experiments: built-in test functions, parameter sweeps over
// hyperbolic crosses, CSV output and static SVG plots.

#include "perilat/errors.hpp"
#include "perilat/freqset.hpp"
#include "perilat/lattice.hpp"
#include "perilat/rng.hpp"
#include "perilat/spectral.hpp"
#include "perilat/transform.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace perilat {

enum class TestFunction {
    QuadraticUnivar, ///< h(y) = y^2 - y + 3/4, d = 1
    CoordinateSum,   ///< h(y) = y_1 + ... + y_d
    UserPolynomial,  ///< transformed polynomial with seeded random coefficients on I_N^d
};

inline TestFunction parse_test_function(std::string_view s)
{
    if (s == "quad" || s == "QuadraticUnivar") return TestFunction::QuadraticUnivar;
    if (s == "sum" || s == "CoordinateSum") return TestFunction::CoordinateSum;
    if (s == "poly" || s == "UserPolynomial") return TestFunction::UserPolynomial;
    throw ParseError("unknown test function '" + std::string(s) + "' (expected quad, sum or poly)");
}

inline std::string to_string(TestFunction f)
{
    switch (f) {
    case TestFunction::QuadraticUnivar:
        return "quad";
    case TestFunction::CoordinateSum:
        return "sum";
    case TestFunction::UserPolynomial:
        break;
    }
    return "poly";
}

inline CubeFunction builtin_function(TestFunction name, std::size_t dim)
{
    switch (name) {
    case TestFunction::QuadraticUnivar:
        if (dim != 1) throw DimensionMismatch("the quadratic test function is univariate");
        return [](std::span<const double> y) { return cplx(y[0] * y[0] - y[0] + 0.75); };
    case TestFunction::CoordinateSum:
        if (dim < 1) throw DimensionMismatch("dimension must be >= 1");
        return [](std::span<const double> y) {
            double s = 0.0;
            for (double v : y) s += v;
            return cplx(s);
        };
    case TestFunction::UserPolynomial:
        break;
    }
    throw DomainError("UserPolynomial depends on a seed and frequency set; use random_polynomial");
}

/// Coefficients drawn uniformly from the unit disk, one per element of I in
/// set order.
inline CoefficientVector random_coefficients(const FrequencySet& I, std::uint64_t seed)
{
    SplitMix64 rng(seed);
    CoefficientVector c(I);
    for (auto& v : c.values) v = rng.unit_disk();
    return c;
}

struct IntRange {
    std::int64_t first = 1;
    std::int64_t last = 1;
    std::int64_t stride = 1;

    std::vector<std::int64_t> values() const
    {
        std::vector<std::int64_t> v;
        for (std::int64_t n = first; n <= last; n += stride) v.push_back(n);
        return v;
    }
};

/// "a:b:s", "a:b" or "a".
inline IntRange parse_range(std::string_view s)
{
    IntRange r;
    std::vector<long long> parts;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto colon = s.find(':', start);
        if (colon == std::string_view::npos) colon = s.size();
        const std::string item(s.substr(start, colon - start));
        char* end = nullptr;
        const long long v = std::strtoll(item.c_str(), &end, 10);
        if (item.empty() || end != item.c_str() + item.size()) throw ParseError("bad range '" + std::string(s) + "'");
        parts.push_back(v);
        start = colon + 1;
    }
    if (parts.size() > 3) throw ParseError("bad range '" + std::string(s) + "'");
    r.first = parts[0];
    r.last = parts.size() > 1 ? parts[1] : parts[0];
    r.stride = parts.size() > 2 ? parts[2] : 1;
    if (r.stride < 1 || r.first < 1 || r.last < r.first) throw ParseError("empty or invalid range '" + std::string(s) + "'");
    return r;
}

struct ExperimentConfig {
    std::size_t dim = 1;
    TestFunction test_function = TestFunction::QuadraticUnivar;
    std::string transform = "sine";
    IntRange N_range{4, 4, 1};
    /// Lattice size floor as a multiple of |I_N^d|.
    double oversampling_factor = 2.0;
    /// Additional floor |I_N^d| + extra_nodes (0 = none).
    std::uint64_t extra_nodes = 0;
    std::uint64_t seed = 1;
    std::string output_path = "-";
    SearchStrategy strategy = SearchStrategy::Korobov;
    SearchMode lattice_search = SearchMode::Budgeted;

    void validate() const
    {
        if (dim < 1) throw DomainError("dim must be >= 1");
        if (test_function == TestFunction::QuadraticUnivar && dim != 1)
            throw DomainError("the quadratic test function requires dim = 1");
        if (!(oversampling_factor >= 1.0)) throw DomainError("oversampling_factor must be >= 1");
        if (N_range.values().empty()) throw DomainError("N_range is empty");
        parse_product_transform(transform, dim);
    }
};

inline SearchStrategy parse_strategy(std::string_view s)
{
    if (s == "korobov" || s == "Korobov") return SearchStrategy::Korobov;
    if (s == "cbc" || s == "CBC") return SearchStrategy::CBC;
    throw ParseError("unknown search strategy '" + std::string(s) + "'");
}

inline SearchMode parse_search_mode(std::string_view s)
{
    if (s == "exhaustive") return SearchMode::Exhaustive;
    if (s == "budgeted") return SearchMode::Budgeted;
    throw ParseError("unknown lattice search mode '" + std::string(s) + "'");
}

/// Key/value config: one "key = value" per line, '#' starts a comment. Keys
/// are the ExperimentConfig field names.
inline ExperimentConfig parse_config(std::istream& is)
{
    ExperimentConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string v) {
        const auto b = v.find_first_not_of(" \t\r");
        const auto e = v.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
    };
    auto number = [&](const std::string& v, const std::string& key) {
        char* end = nullptr;
        const double x = std::strtod(v.c_str(), &end);
        if (v.empty() || end != v.c_str() + v.size()) throw ParseError("config: '" + key + "' expects a number");
        return x;
    };
    auto integer = [&](const std::string& v, const std::string& key) {
        char* end = nullptr;
        const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
        if (v.empty() || end != v.c_str() + v.size() || v[0] == '-')
            throw ParseError("config: '" + key + "' expects a non-negative integer");
        return static_cast<std::uint64_t>(x);
    };
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "dim")
            cfg.dim = integer(value, key);
        else if (key == "test_function")
            cfg.test_function = parse_test_function(value);
        else if (key == "transform")
            cfg.transform = value;
        else if (key == "N_range")
            cfg.N_range = parse_range(value);
        else if (key == "oversampling_factor")
            cfg.oversampling_factor = number(value, key);
        else if (key == "extra_nodes")
            cfg.extra_nodes = integer(value, key);
        else if (key == "seed")
            cfg.seed = integer(value, key);
        else if (key == "output_path")
            cfg.output_path = value;
        else if (key == "strategy")
            cfg.strategy = parse_strategy(value);
        else if (key == "lattice_search")
            cfg.lattice_search = parse_search_mode(value);
        else
            throw ParseError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    return cfg;
}

struct SweepRow {
    std::int64_t N = 0;
    std::uint64_t M = 0;
    std::uint64_t set_size = 0;
    double eps_inf = 0.0;
    double wall_time_ms = 0.0;

    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// Lattice size floor used by the sweep for a set of n frequencies.
inline std::uint64_t lattice_floor(std::uint64_t n, double oversampling_factor, std::uint64_t extra_nodes)
{
    const auto scaled = static_cast<std::uint64_t>(std::ceil(oversampling_factor * static_cast<double>(n) - 1e-9));
    return std::max({n, scaled, extra_nodes ? n + extra_nodes : 0});
}

inline LatticeSearchOptions search_options(const ExperimentConfig& cfg, std::uint64_t set_size)
{
    LatticeSearchOptions opt;
    opt.strategy = cfg.strategy;
    opt.mode = cfg.lattice_search;
    opt.min_size = lattice_floor(set_size, cfg.oversampling_factor, cfg.extra_nodes);
    return opt;
}

/// epsilon_inf of the configured test function for one frequency set and
/// lattice.
inline double approximation_error(const ExperimentConfig& cfg, const FrequencySet& I, const Rank1Lattice& L)
{
    const auto P = parse_product_transform(cfg.transform, cfg.dim);
    const auto w = WeightSpec::constant();
    if (cfg.test_function == TestFunction::UserPolynomial) {
        TransformedPolynomial h(random_coefficients(I, cfg.seed), w, P);
        return rel_discrete_error(h, w, P, I, L, false);
    }
    return rel_discrete_error(builtin_function(cfg.test_function, cfg.dim), w, P, I, L, false);
}

/// One row per N in the configured range, N ascending. Rows whose samples
/// hit a divergent density are skipped and reported through `warnings`.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, std::vector<std::string>* warnings = nullptr)
{
    cfg.validate();
    std::vector<SweepRow> rows;
    for (std::int64_t N : cfg.N_range.values()) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto I = hyperbolic_cross(cfg.dim, N);
        const auto L = find_reconstructing_lattice(I, search_options(cfg, I.size()));
        SweepRow row;
        row.N = N;
        row.M = L.size();
        row.set_size = I.size();
        try {
            row.eps_inf = approximation_error(cfg, I, L);
        } catch (const RangeError& e) {
            if (warnings) warnings->push_back("N=" + std::to_string(N) + " skipped: " + e.what());
            continue;
        }
        row.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        rows.push_back(row);
    }
    return rows;
}

// --- CSV -------------------------------------------------------------------

inline constexpr std::string_view kCsvHeader = "N,M,set_size,eps_inf,wall_time_ms";

inline std::string format_sci(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.5e", v);
    return buf;
}

inline void write_csv(std::ostream& os, const std::vector<SweepRow>& rows)
{
    os << kCsvHeader << '\n';
    for (const auto& r : rows)
        os << r.N << ',' << r.M << ',' << r.set_size << ',' << format_sci(r.eps_inf) << ',' << format_sci(r.wall_time_ms)
           << '\n';
}

inline void write_csv(const std::vector<SweepRow>& rows, const std::string& path)
{
    if (path == "-") {
        write_csv(std::cout, rows);
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    write_csv(os, rows);
    if (!os) throw IoError("write to '" + path + "' failed");
}

inline std::vector<SweepRow> parse_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != kCsvHeader) throw ParseError("csv: missing or unexpected header");
    std::vector<SweepRow> rows;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        SweepRow r;
        long long N = 0;
        unsigned long long M = 0, n = 0;
        double e = 0, t = 0;
        int consumed = 0;
        if (std::sscanf(line.c_str(), "%lld,%llu,%llu,%lf,%lf%n", &N, &M, &n, &e, &t, &consumed) != 5 ||
            static_cast<std::size_t>(consumed) != line.size())
            throw ParseError("csv: malformed row on line " + std::to_string(lineno));
        r.N = N;
        r.M = M;
        r.set_size = n;
        r.eps_inf = e;
        r.wall_time_ms = t;
        rows.push_back(r);
    }
    return rows;
}

// --- SVG -------------------------------------------------------------------

struct PlotSeries {
    std::string label;
    std::vector<SweepRow> rows;
};

inline constexpr double kPlotFloor = 1e-16;

namespace detail {

inline std::string xml_escape(std::string_view s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace detail

/// Static log-scale plot of eps_inf against N, one polyline per series.
/// Zero errors are drawn at kPlotFloor and reported through `warnings`.
inline void render_plot(std::ostream& os, const std::vector<PlotSeries>& series,
                        std::vector<std::string>* warnings = nullptr)
{
    if (series.empty()) throw DegenerateInput("render_plot needs at least one series");
    static constexpr const char* kColors[] = {"#d62728", "#1f77b4", "#ff7f0e", "#9467bd", "#2ca02c",
                                              "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    const double W = 720, H = 480, left = 80, right = 20, top = 20, bottom = 60;
    const double legend_h = 18.0 * static_cast<double>(series.size()) + 10.0;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (const auto& r : s.rows) {
            double e = r.eps_inf;
            if (!(e > 0.0)) {
                if (warnings)
                    warnings->push_back("series '" + s.label + "', N=" + std::to_string(r.N) +
                                        ": eps_inf = 0 drawn at the plot floor 1e-16");
                e = kPlotFloor;
            }
            e = std::max(e, kPlotFloor);
            xmin = std::min(xmin, double(r.N));
            xmax = std::max(xmax, double(r.N));
            ymin = std::min(ymin, std::log10(e));
            ymax = std::max(ymax, std::log10(e));
        }
    if (!std::isfinite(xmin)) {
        xmin = 0;
        xmax = 1;
        ymin = -1;
        ymax = 0;
    }
    if (xmax == xmin) xmax = xmin + 1;
    ymin = std::floor(ymin);
    ymax = std::ceil(ymax);
    if (ymax == ymin) ymax = ymin + 1;

    const double pw = W - left - right, ph = H - top - bottom;
    auto px = [&](double n) { return left + (n - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double e) { return top + (ymax - std::log10(std::max(e, kPlotFloor))) / (ymax - ymin) * ph; };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H + legend_h
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H + legend_h << "\" fill=\"white\"/>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int dec = static_cast<int>(ymin); dec <= static_cast<int>(ymax); ++dec) {
        const double y = py(std::pow(10.0, dec));
        os << "<line x1=\"" << left << "\" y1=\"" << detail::fmt(y) << "\" x2=\"" << left + pw << "\" y2=\""
           << detail::fmt(y) << "\" stroke=\"#dddddd\"/>\n";
        os << "<text x=\"" << left - 6 << "\" y=\"" << detail::fmt(y + 4) << "\" text-anchor=\"end\">1e" << dec
           << "</text>\n";
    }
    const int xticks = 5;
    for (int i = 0; i <= xticks; ++i) {
        const double n = xmin + (xmax - xmin) * i / xticks;
        os << "<text x=\"" << detail::fmt(px(n)) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
           << detail::fmt(n) << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << top + ph + 40 << "\" text-anchor=\"middle\">N</text>\n";
    os << "<text x=\"16\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 16 " << top + ph / 2
       << ")\" text-anchor=\"middle\">eps_inf</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kColors[i % std::size(kColors)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (const auto& r : series[i].rows) {
            if (!first) os << ' ';
            first = false;
            os << detail::fmt(px(double(r.N))) << ',' << detail::fmt(py(r.eps_inf > 0 ? r.eps_inf : kPlotFloor));
        }
        os << "\"/>\n";
    }
    os << "<g class=\"legend\">\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double y = H + 8 + 18.0 * static_cast<double>(i);
        os << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + 30 << "\" y2=\"" << y << "\" stroke=\""
           << kColors[i % std::size(kColors)] << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << left + 38 << "\" y=\"" << y + 4 << "\">" << detail::xml_escape(series[i].label)
           << "</text>\n";
    }
    os << "</g>\n</svg>\n";
}

inline void render_plot(const std::vector<PlotSeries>& series, const std::string& path,
                        std::vector<std::string>* warnings = nullptr)
{
    if (path == "-") {
        render_plot(std::cout, series, warnings);
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    render_plot(os, series, warnings);
    if (!os) throw IoError("write to '" + path + "' failed");
}

} // namespace perilat
