#include "perilat/lattice.hpp"
#include "perilat/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace perilat;

namespace {

std::vector<MultiIndex> rows(const FrequencySet& I)
{
    std::vector<MultiIndex> out;
    for (auto k : I) out.emplace_back(k.begin(), k.end());
    return out;
}

FrequencySet l1_ball_2()
{
    std::vector<MultiIndex> ks;
    for (std::int64_t a = -2; a <= 2; ++a)
        for (std::int64_t b = -2; b <= 2; ++b)
            if (std::abs(a) + std::abs(b) <= 2) ks.push_back({a, b});
    return FrequencySet::from_indices(2, ks);
}

} // namespace

TEST(Lattice, ReducesGenerator)
{
    Rank1Lattice L({-1, 27}, 13);
    EXPECT_EQ(L.generator(), (std::vector<std::int64_t>{12, 1}));
    EXPECT_THROW(Rank1Lattice({1}, 0), DomainError);
    EXPECT_THROW(Rank1Lattice({}, 5), DimensionMismatch);
}

TEST(Nodes, Examples)
{
    EXPECT_EQ(lattice_nodes(Rank1Lattice({0}, 1)), std::vector<double>{0.0});
    EXPECT_EQ(lattice_nodes(Rank1Lattice({1}, 4)), (std::vector<double>{0.0, 0.25, -0.5, -0.25}));
    std::vector<double> x(2);
    Rank1Lattice({1, 7}, 150).node(1, x);
    EXPECT_NEAR(x[0], 0.006667, 5e-7);
    EXPECT_NEAR(x[1], 0.04667, 5e-6);
}

TEST(Nodes, RangeAndPeriodicity)
{
    const Rank1Lattice L({1, 33, 1089}, 1009);
    std::vector<double> a(3), b(3);
    for (std::uint64_t j = 0; j < L.size(); ++j) {
        L.node(j, a);
        L.node(j + L.size(), b);
        EXPECT_EQ(a, b);
        for (double v : a) {
            EXPECT_GE(v, -0.5);
            EXPECT_LT(v, 0.5);
        }
        const auto ref = oracle::node(L.generator(), L.size(), j);
        for (std::size_t s = 0; s < 3; ++s) EXPECT_NEAR(a[s], ref[s], 1e-15);
    }
}

TEST(Nodes, LargeArgumentsStayExact)
{
    // j * z overflows 64 bits here; the residue path must not.
    const std::uint64_t M = (std::uint64_t(1) << 40) + 15;
    const Rank1Lattice L({static_cast<std::int64_t>(M - 1)}, M);
    std::vector<double> x(1);
    L.node(M - 1, x);
    EXPECT_DOUBLE_EQ(x[0], 1.0 / static_cast<double>(M));
}

TEST(TransformedNodes, Examples)
{
    const Rank1Lattice L({1, 7}, 150);
    const auto id = transformed_nodes({L, ProductTransform(2, TransformSpec::identity())});
    EXPECT_EQ(id, lattice_nodes(L));

    const auto s = transformed_nodes({L, ProductTransform(2, TransformSpec::sine())});
    EXPECT_NEAR(s[2], 0.01047, 5e-6);
    EXPECT_NEAR(s[3], 0.07304, 5e-6);

    const auto g = transformed_nodes({L, ProductTransform(2, TransformSpec::logarithmic(3))});
    EXPECT_NEAR(g[2], 0.01999, 5e-6);
    EXPECT_NEAR(g[3], 0.1368, 5e-5);
    for (double v : g) {
        EXPECT_GE(v, -0.5);
        EXPECT_LE(v, 0.5);
    }
    EXPECT_THROW(TransformedLattice(L, ProductTransform(3, TransformSpec::sine())), DimensionMismatch);
}

TEST(Reconstructing, Examples)
{
    for (std::int64_t N : {1, 4, 10}) {
        const auto I = hyperbolic_cross(1, N);
        EXPECT_TRUE(is_reconstructing(Rank1Lattice({1}, 2 * N + 1), I));
        EXPECT_FALSE(is_reconstructing(Rank1Lattice({1}, 2 * N), I));
    }
    // I_2^2 has 21 elements, so no lattice with 13 nodes reconstructs it
    const auto hc = hyperbolic_cross(2, 2);
    ASSERT_EQ(hc.size(), 21u);
    EXPECT_FALSE(is_reconstructing(Rank1Lattice({1, 5}, 13), hc));
    EXPECT_TRUE(is_reconstructing(Rank1Lattice({1, 5}, 23), hc));

    // the 13-element set {|k_1| + |k_2| <= 2}
    const auto I = l1_ball_2();
    ASSERT_EQ(I.size(), 13u);
    EXPECT_TRUE(is_reconstructing(Rank1Lattice({1, 5}, 13), I));
    EXPECT_FALSE(is_reconstructing(Rank1Lattice({1, 4}, 13), I));
    const Rank1Lattice bad({1, 4}, 13);
    EXPECT_EQ(bad.residue(MultiIndex{1, 1}), bad.residue(MultiIndex{0, -2}));
    EXPECT_THROW(is_reconstructing(Rank1Lattice({1}, 13), I), DimensionMismatch);
}

TEST(Reconstructing, AgreesWithDifferenceSetOracle)
{
    SplitMix64 rng(2024);
    int positives = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t d = 1 + rng.below(3);
        const std::int64_t N = 1 + static_cast<std::int64_t>(rng.below(d == 1 ? 60 : 8));
        auto I = hyperbolic_cross(d, N);
        if (I.size() > 200) continue;
        const std::uint64_t M = I.size() + rng.below(4 * I.size());
        std::vector<std::int64_t> z(d);
        for (auto& v : z) v = static_cast<std::int64_t>(rng.below(M));
        const bool fast = is_reconstructing(Rank1Lattice(z, M), I);
        EXPECT_EQ(fast, oracle::difference_set_condition(Rank1Lattice(z, M).generator(), M, rows(I)));
        positives += fast;
    }
    EXPECT_GT(positives, 5);
}

TEST(Search, Examples)
{
    const auto L1 = find_reconstructing_lattice(hyperbolic_cross(1, 4), SearchStrategy::Korobov);
    EXPECT_EQ(L1.size(), 9u);
    EXPECT_EQ(L1.generator(), std::vector<std::int64_t>{1});

    const auto L2 = find_reconstructing_lattice(hyperbolic_cross(2, 2), SearchStrategy::Korobov);
    EXPECT_EQ(to_string(L2), "23 1 5");
    EXPECT_EQ(to_string(find_reconstructing_lattice(l1_ball_2(), SearchStrategy::Korobov)), "13 1 5");

    const auto zero = FrequencySet::from_indices(3, std::vector<std::int64_t>{0, 0, 0});
    for (auto s : {SearchStrategy::Korobov, SearchStrategy::CBC}) {
        const auto L0 = find_reconstructing_lattice(zero, s);
        EXPECT_EQ(L0.size(), 1u);
        EXPECT_EQ(L0.generator(), (std::vector<std::int64_t>{0, 0, 0}));
    }
}

TEST(Search, KorobovIsSmallestFirst)
{
    // brute force over (M, a) in the documented order
    const auto I = hyperbolic_cross(2, 6);
    const auto found = find_reconstructing_lattice(I, SearchStrategy::Korobov);
    for (std::uint64_t M = I.size(); M <= found.size(); ++M)
        for (std::uint64_t a = 1; a < M; ++a) {
            const Rank1Lattice L(korobov_vector(2, a, M), M);
            if (oracle::difference_set_condition(L.generator(), M, rows(I))) {
                EXPECT_EQ(L, found);
                return;
            }
        }
    FAIL() << "oracle found nothing up to " << found.size();
}

TEST(Search, CbcIsSmallestFirst)
{
    const auto I = hyperbolic_cross(2, 6);
    const auto found = find_reconstructing_lattice(I, SearchStrategy::CBC);
    EXPECT_EQ(found.generator()[0], 1);
    for (std::uint64_t M = I.size(); M <= found.size(); ++M)
        for (std::uint64_t z2 = 0; z2 < M; ++z2) {
            if (oracle::difference_set_condition({1, static_cast<std::int64_t>(z2)}, M, rows(I))) {
                EXPECT_EQ(found, Rank1Lattice({1, static_cast<std::int64_t>(z2)}, M));
                return;
            }
        }
    FAIL();
}

TEST(Search, ResultsReconstructInEveryMode)
{
    for (std::size_t d : {2, 3, 4})
        for (auto strategy : {SearchStrategy::Korobov, SearchStrategy::CBC})
            for (auto mode : {SearchMode::Exhaustive, SearchMode::Budgeted}) {
                const auto I = hyperbolic_cross(d, 8);
                LatticeSearchOptions opt;
                opt.strategy = strategy;
                opt.mode = mode;
                opt.min_size = 2 * I.size();
                const auto L = find_reconstructing_lattice(I, opt);
                EXPECT_TRUE(is_reconstructing(L, I));
                EXPECT_GE(L.size(), 2 * I.size());
                EXPECT_EQ(L, find_reconstructing_lattice(I, opt)) << "search must be deterministic";
            }
}

TEST(Search, CapRaises)
{
    LatticeSearchOptions opt;
    opt.cap_factor = 0.5;
    opt.min_size = 0;
    // {0, 2} first reconstructs at M = 3, above the cap 0.5 * |I|^2 = 2
    const auto I = FrequencySet::from_indices(1, std::vector<std::int64_t>{0, 2});
    EXPECT_THROW(find_reconstructing_lattice(I, opt), SearchExhausted);
    EXPECT_THROW(find_reconstructing_lattice(FrequencySet(2), opt), DegenerateInput);
}

TEST(TextForms, Roundtrip)
{
    const Rank1Lattice L({1, 33, 1089}, 1009);
    EXPECT_EQ(to_string(L), "1009 1 33 80");
    EXPECT_EQ(parse_lattice_line("1009 1 33 80"), L);
    EXPECT_EQ(parse_lattice_line("1009 1 33 1089"), L);
    EXPECT_EQ(parse_lattice_arg("1009:1,33,80"), L);
    EXPECT_THROW(parse_lattice_arg("1009"), ParseError);
    EXPECT_THROW(parse_lattice_line("0 1"), ParseError);
    EXPECT_THROW(parse_lattice_line("13 1 x"), ParseError);
}
