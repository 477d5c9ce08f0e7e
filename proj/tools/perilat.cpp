// perilat: command line front end.
//
//   perilat hc --dim 5 --N 100 --out cross.txt
//   perilat lattice --dim 2 --N 2
//   perilat approx --dim 1 --N 16 --function quad --transform log:4
//   perilat sweep --dim 1 --function quad --transform sine --transform log:4 --N-range 4:80:1 --format both --out fig
//   perilat selftest
//
// Exit status: 0 success, 1 usage error, 2 numerical or search failure.

#include "perilat/oracles.hpp"
#include "perilat/perilat.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace perilat;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::size_t dim = 1;
    std::int64_t N = 4;
    std::string N_range;
    std::vector<std::string> transforms;
    std::string function;
    double oversample = 2.0;
    std::uint64_t extra_nodes = 0;
    std::string lattice;
    std::uint64_t seed = 1;
    std::string out = "-";
    std::string format = "csv";
    std::string strategy = "korobov";
    std::string search;
    std::string config;
    bool timing = false;
};

class Output {
public:
    explicit Output(const std::string& path)
    {
        if (path == "-") return;
        file_.open(path, std::ios::binary);
        if (!file_) throw IoError("cannot open '" + path + "' for writing");
        path_ = path;
    }
    std::ostream& stream() { return path_.empty() ? std::cout : file_; }
    void finish()
    {
        stream().flush();
        if (!stream()) throw IoError("write to '" + (path_.empty() ? std::string("stdout") : path_) + "' failed");
    }

private:
    std::ofstream file_;
    std::string path_;
};

LatticeSearchOptions search_options_from(const Options& o, std::uint64_t set_size, SearchMode fallback)
{
    LatticeSearchOptions opt;
    opt.strategy = parse_strategy(o.strategy);
    opt.mode = o.search.empty() ? fallback : parse_search_mode(o.search);
    opt.min_size = lattice_floor(set_size, o.oversample, o.extra_nodes);
    return opt;
}

bool given(const CLI::App& app, const std::string& name)
{
    const auto* opt = app.get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
}

ExperimentConfig config_from(const Options& o, const CLI::App& app)
{
    ExperimentConfig cfg;
    if (!o.config.empty()) {
        std::ifstream is(o.config);
        if (!is) throw IoError("cannot open config '" + o.config + "'");
        cfg = parse_config(is);
    }
    if (given(app, "--dim")) cfg.dim = o.dim;
    if (given(app, "--function")) cfg.test_function = parse_test_function(o.function);
    if (!o.transforms.empty()) cfg.transform = o.transforms.front();
    if (given(app, "--N-range"))
        cfg.N_range = parse_range(o.N_range);
    else if (given(app, "--N"))
        cfg.N_range = IntRange{o.N, o.N, 1};
    if (given(app, "--oversample")) cfg.oversampling_factor = o.oversample;
    if (given(app, "--extra-nodes")) cfg.extra_nodes = o.extra_nodes;
    if (given(app, "--seed")) cfg.seed = o.seed;
    if (given(app, "--out")) cfg.output_path = o.out;
    if (given(app, "--strategy")) cfg.strategy = parse_strategy(o.strategy);
    if (given(app, "--search")) cfg.lattice_search = parse_search_mode(o.search);
    return cfg;
}

// --- subcommands -------------------------------------------------------------

int cmd_hc(const Options& o)
{
    if (o.N < 1 || o.dim < 1) throw UsageError("hc needs --dim >= 1 and --N >= 1");
    const auto I = hyperbolic_cross(o.dim, o.N);
    Output out(o.out);
    write_frequency_set(out.stream(), I, o.N);
    out.finish();
    return 0;
}

int cmd_lattice(const Options& o, const CLI::App& app)
{
    if (o.N < 1 || o.dim < 1) throw UsageError("lattice needs --dim >= 1 and --N >= 1");
    const auto I = hyperbolic_cross(o.dim, o.N);
    Output out(o.out);
    if (!o.lattice.empty()) {
        const auto L = parse_lattice_arg(o.lattice);
        if (L.dim() != o.dim) throw DimensionMismatch("--lattice dimension does not match --dim");
        const bool ok = is_reconstructing(L, I);
        out.stream() << to_string(L) << (ok ? " reconstructing\n" : " not-reconstructing\n");
        out.finish();
        return ok ? 0 : 2;
    }
    // Without --oversample the search starts at M = |I|.
    Options local = o;
    if (!given(app, "--oversample")) local.oversample = 1.0;
    const auto L = find_reconstructing_lattice(I, search_options_from(local, I.size(), SearchMode::Exhaustive));
    out.stream() << to_string(L) << '\n';
    out.finish();
    return 0;
}

int cmd_approx(const Options& o, const CLI::App& app)
{
    auto cfg = config_from(o, app);
    if (cfg.N_range.first != cfg.N_range.last) throw UsageError("approx takes a single --N");
    cfg.validate();
    const auto I = hyperbolic_cross(cfg.dim, cfg.N_range.first);
    std::optional<Rank1Lattice> L;
    if (!o.lattice.empty()) {
        L = parse_lattice_arg(o.lattice);
        if (L->dim() != cfg.dim) throw DimensionMismatch("--lattice dimension does not match --dim");
        if (!is_reconstructing(*L, I)) throw NotReconstructing("lattice " + to_string(*L) + " does not reconstruct I");
    } else {
        L = find_reconstructing_lattice(I, search_options(cfg, I.size()));
    }
    SweepRow row{cfg.N_range.first, L->size(), I.size(), approximation_error(cfg, I, *L), 0.0};
    Output out(cfg.output_path);
    write_csv(out.stream(), {row});
    out.finish();
    return 0;
}

std::string file_label(std::string s)
{
    for (auto& c : s)
        if (c == ':' || c == ',' || c == '^' || c == '/' || c == ' ') c = '_';
    return s;
}

std::string strip_extension(const std::string& path)
{
    for (const char* ext : {".csv", ".svg"}) {
        const std::string e(ext);
        if (path.size() > e.size() && path.compare(path.size() - e.size(), e.size(), e) == 0)
            return path.substr(0, path.size() - e.size());
    }
    return path;
}

int cmd_sweep(const Options& o, const CLI::App& app)
{
    const auto base = config_from(o, app);
    std::vector<std::string> transforms = o.transforms;
    if (transforms.empty()) transforms.push_back(base.transform);
    const bool want_csv = o.format == "csv" || o.format == "both";
    const bool want_svg = o.format == "svg" || o.format == "both";
    const std::string& path = base.output_path;
    if (path == "-" && (o.format == "both" || (want_csv && transforms.size() > 1)))
        throw UsageError("--out - carries a single output; give a file stem for several");

    std::vector<PlotSeries> series;
    std::vector<std::string> warnings;
    for (const auto& t : transforms) {
        auto cfg = base;
        cfg.transform = t;
        auto rows = run_sweep(cfg, &warnings);
        if (!o.timing)
            for (auto& r : rows) r.wall_time_ms = 0.0;
        series.push_back({t, std::move(rows)});
    }

    const std::string stem = strip_extension(path);
    if (want_csv) {
        for (const auto& s : series) {
            std::string target = path;
            if (o.format == "both" || series.size() > 1)
                target = stem + (series.size() > 1 ? "-" + file_label(s.label) : std::string()) + ".csv";
            write_csv(s.rows, target);
        }
    }
    if (want_svg) render_plot(series, o.format == "both" ? stem + ".svg" : path, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    return 0;
}

// --- selftest ----------------------------------------------------------------

int cmd_selftest()
{
    int failures = 0;
    auto report = [&](const std::string& name, bool ok) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << '\n';
        if (!ok) ++failures;
    };

    {
        bool ok = true;
        for (std::size_t d = 1; d <= 3; ++d)
            for (std::int64_t N : {1, 2, 5, 8, 16}) {
                auto ref = FrequencySet::from_indices(d, oracle::box_scan_cross(d, N));
                ok = ok && hyperbolic_cross(d, N) == ref;
            }
        report("hyperbolic cross equals box scan (d <= 3, N <= 16)", ok);
    }
    {
        SplitMix64 rng(7);
        double worst = 0.0;
        for (std::size_t M : {1, 2, 3, 5, 7, 12, 31, 64, 97, 128, 210}) {
            std::vector<cplx> v(M);
            for (auto& x : v) x = rng.unit_disk();
            auto fast = dft_forward(v);
            auto ref = oracle::naive_dft(v, -1);
            for (std::size_t i = 0; i < M; ++i) worst = std::max(worst, std::abs(fast[i] - ref[i]));
        }
        report("DFT equals naive summation", worst <= 1e-10);
    }
    {
        SplitMix64 rng(11);
        bool ok = true;
        for (int trial = 0; trial < 40; ++trial) {
            const auto I = hyperbolic_cross(2, 1 + static_cast<std::int64_t>(rng.below(6)));
            const std::uint64_t M = I.size() + rng.below(3 * I.size());
            std::vector<std::int64_t> z{1, static_cast<std::int64_t>(rng.below(M))};
            std::vector<MultiIndex> ks;
            for (auto k : I) ks.emplace_back(k.begin(), k.end());
            ok = ok && is_reconstructing(Rank1Lattice(z, M), I) == oracle::difference_set_condition(z, M, ks);
        }
        report("injectivity check equals difference-set check", ok);
    }
    {
        const auto I = hyperbolic_cross(2, 8);
        const auto L = find_reconstructing_lattice(I, SearchStrategy::Korobov);
        auto c = random_coefficients(I, 3);
        auto s = evaluate_at_lattice(c, L);
        std::vector<MultiIndex> ks;
        for (auto k : I) ks.emplace_back(k.begin(), k.end());
        auto ref = oracle::direct_lattice_sum(ks, c.values, L.generator(), L.size());
        double worst = 0.0;
        for (std::size_t j = 0; j < ref.size(); ++j) worst = std::max(worst, std::abs(ref[j] - s.values[j]));
        report("lattice evaluation equals direct summation", worst <= 1e-10);
        auto back = reconstruct_from_lattice(s, I, L);
        double err = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) err = std::max(err, std::abs(back.values[i] - c.values[i]));
        report("reconstruction recovers coefficients", err <= 1e-10);
    }
    std::cout << (failures ? "selftest failed\n" : "selftest passed\n");
    return failures ? 2 : 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Periodized rank-1 lattice approximation"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--dim", o.dim, "dimension d");
        sub->add_option("--N", o.N, "hyperbolic cross parameter N");
        sub->add_option("--out", o.out, "output path, - for stdout");
    };
    auto search = [&](CLI::App* sub) {
        sub->add_option("--strategy", o.strategy, "korobov or cbc");
        sub->add_option("--search", o.search, "exhaustive or budgeted");
        sub->add_option("--oversample", o.oversample, "lattice size floor as a multiple of |I|");
        sub->add_option("--extra-nodes", o.extra_nodes, "lattice size floor |I| + n");
        sub->add_option("--lattice", o.lattice, "fixed lattice M:z1,z2,...");
    };
    auto experiment = [&](CLI::App* sub) {
        sub->add_option("--transform", o.transforms, "transform spec such as sine, log:4 or erf:2^3");
        sub->add_option("--function", o.function, "quad, sum or poly");
        sub->add_option("--seed", o.seed, "seed for random fixtures");
        sub->add_option("--config", o.config, "key = value config file");
    };

    auto* hc = app.add_subcommand("hc", "emit a hyperbolic cross");
    common(hc);
    auto* lat = app.add_subcommand("lattice", "search or verify a reconstructing lattice");
    common(lat);
    search(lat);
    auto* approx = app.add_subcommand("approx", "relative discrete error for one N");
    common(approx);
    search(approx);
    experiment(approx);
    auto* sweep = app.add_subcommand("sweep", "error sweep over a range of N");
    common(sweep);
    search(sweep);
    experiment(sweep);
    sweep->add_option("--N-range", o.N_range, "a:b:s");
    sweep->add_option("--format", o.format, "csv, svg or both")->check(CLI::IsMember({"csv", "svg", "both"}));
    sweep->add_flag("--timing", o.timing, "record wall time per row");
    auto* self = app.add_subcommand("selftest", "run the oracle equivalence checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (*hc) return cmd_hc(o);
        if (*lat) return cmd_lattice(o, *lat);
        if (*approx) return cmd_approx(o, *approx);
        if (*sweep) return cmd_sweep(o, *sweep);
        if (*self) return cmd_selftest();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const DimensionMismatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
