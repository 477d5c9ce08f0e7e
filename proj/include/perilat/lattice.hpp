#pragma once

// Rank-1 lattices { j z / M mod 1 }, their transformed images, the
// reconstruction property and generating-vector search.

#include "perilat/errors.hpp"
#include "perilat/freqset.hpp"
#include "perilat/rng.hpp"
#include "perilat/transform.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace perilat {

namespace detail {

/// (a mod m) in [0, m) for a signed 128-bit a.
inline std::uint64_t mod_floor(__int128 a, std::uint64_t m) noexcept
{
    __int128 r = a % static_cast<__int128>(m);
    if (r < 0) r += m;
    return static_cast<std::uint64_t>(r);
}

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) noexcept
{
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

} // namespace detail

class Rank1Lattice {
public:
    Rank1Lattice() = default;

    /// Components of z are reduced into [0, M).
    Rank1Lattice(std::vector<std::int64_t> z, std::uint64_t M) : z_(std::move(z)), M_(M)
    {
        if (M_ < 1) throw DomainError("lattice size M must be >= 1");
        if (z_.empty()) throw DimensionMismatch("generating vector must have dimension >= 1");
        for (auto& v : z_) v = static_cast<std::int64_t>(detail::mod_floor(v, M_));
    }

    std::size_t dim() const noexcept { return z_.size(); }
    std::uint64_t size() const noexcept { return M_; }
    const std::vector<std::int64_t>& generator() const noexcept { return z_; }

    /// k . z mod M, exact for any 64-bit k and z.
    std::uint64_t residue(std::span<const std::int64_t> k) const
    {
        if (k.size() != z_.size()) throw DimensionMismatch("frequency dimension does not match lattice dimension");
        __int128 acc = 0;
        for (std::size_t s = 0; s < k.size(); ++s) {
            acc += static_cast<__int128>(k[s]) * z_[s];
            // keep the accumulator bounded for very large dimensions
            if ((s & 7) == 7) acc %= static_cast<__int128>(M_);
        }
        return detail::mod_floor(acc, M_);
    }

    /// Node j recentred to [-1/2, 1/2): ((j z/M mod 1) + 1/2 mod 1) - 1/2.
    /// Written into out[0..d).
    void node(std::uint64_t j, std::span<double> out) const
    {
        const double inv = 1.0 / static_cast<double>(M_);
        for (std::size_t s = 0; s < z_.size(); ++s) {
            const std::uint64_t r = detail::mul_mod(j % M_, static_cast<std::uint64_t>(z_[s]), M_);
            // r/M >= 1/2  <=>  2r >= M
            if (2 * static_cast<unsigned __int128>(r) >= M_)
                out[s] = -static_cast<double>(M_ - r) * inv;
            else
                out[s] = static_cast<double>(r) * inv;
        }
    }

    friend bool operator==(const Rank1Lattice&, const Rank1Lattice&) = default;

private:
    std::vector<std::int64_t> z_;
    std::uint64_t M_ = 1;
};

/// All M nodes, row-major (M x d), j ascending.
inline std::vector<double> lattice_nodes(const Rank1Lattice& L)
{
    const std::size_t d = L.dim();
    std::vector<double> out(static_cast<std::size_t>(L.size()) * d);
    for (std::uint64_t j = 0; j < L.size(); ++j) L.node(j, std::span<double>(out.data() + j * d, d));
    return out;
}

struct TransformedLattice {
    Rank1Lattice base;
    ProductTransform map;

    TransformedLattice(Rank1Lattice b, ProductTransform m) : base(std::move(b)), map(std::move(m))
    {
        if (base.dim() != map.dim()) throw DimensionMismatch("lattice and transformation dimensions differ");
    }
};

/// psi applied coordinatewise to the recentred nodes, row-major (M x d).
inline std::vector<double> transformed_nodes(const TransformedLattice& T)
{
    auto nodes = lattice_nodes(T.base);
    const std::size_t d = T.base.dim();
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = T.map[i % d].forward(nodes[i]);
    return nodes;
}

/// k . z mod M for every k in I, in set order.
inline std::vector<std::uint64_t> lattice_residues(const FrequencySet& I, const Rank1Lattice& L)
{
    if (I.dim() != L.dim()) throw DimensionMismatch("frequency set and lattice dimensions differ");
    std::vector<std::uint64_t> r;
    r.reserve(I.size());
    for (auto k : I) r.push_back(L.residue(k));
    return r;
}

namespace detail {

/// Distinctness test for values in [0, M). Uses a generation-stamped table
/// for moderate M and a hash set beyond that.
class ResidueMarker {
public:
    static constexpr std::uint64_t kDenseLimit = std::uint64_t(1) << 28;

    void reset(std::uint64_t M)
    {
        dense_ = M <= kDenseLimit;
        if (dense_) {
            if (stamps_.size() < M) {
                stamps_.assign(M, 0);
                stamp_ = 0;
            }
            if (++stamp_ == 0) {
                std::fill(stamps_.begin(), stamps_.end(), 0);
                stamp_ = 1;
            }
        } else {
            seen_.clear();
        }
    }

    /// Returns false if r was already inserted since the last reset.
    bool insert(std::uint64_t r)
    {
        if (dense_) {
            if (stamps_[r] == stamp_) return false;
            stamps_[r] = stamp_;
            return true;
        }
        return seen_.insert(r).second;
    }

private:
    bool dense_ = true;
    std::vector<std::uint32_t> stamps_;
    std::uint32_t stamp_ = 0;
    std::unordered_set<std::uint64_t> seen_;
};

} // namespace detail

/// True iff k -> k.z mod M is injective on I, which is equivalent to
/// t.z != 0 mod M for every nonzero t in the difference set D(I).
inline bool is_reconstructing(const Rank1Lattice& L, const FrequencySet& I)
{
    if (I.dim() != L.dim()) throw DimensionMismatch("frequency set and lattice dimensions differ");
    if (I.size() > L.size()) return false;
    detail::ResidueMarker marker;
    marker.reset(L.size());
    for (auto k : I)
        if (!marker.insert(L.residue(k))) return false;
    return true;
}

enum class SearchStrategy { Korobov, CBC };

enum class SearchMode {
    /// Every size M ascending from the floor; every candidate ascending.
    Exhaustive,
    /// Sizes on a geometric ladder; a fixed number of seeded pseudo-random
    /// candidates per size.
    Budgeted,
};

struct LatticeSearchOptions {
    SearchStrategy strategy = SearchStrategy::Korobov;
    SearchMode mode = SearchMode::Exhaustive;
    /// Lower bound on M (oversampling floor); |I| is always a lower bound.
    std::uint64_t min_size = 0;
    /// Search stops once M exceeds cap_factor * |I|^2.
    double cap_factor = 2.0;
    // Budgeted mode only.
    std::size_t candidates_per_size = 256;
    double size_growth = 1.05;
    std::uint64_t seed = 0x5eed1a77u;
};

namespace detail {

/// Frequencies stored in a fixed shuffled order: collisions show up after
/// ~sqrt(M) elements instead of late in lexicographic order.
struct SearchWorkspace {
    std::size_t dim = 0;
    std::vector<std::int64_t> flat; // shuffled copy of I
    ResidueMarker marker;

    SearchWorkspace(const FrequencySet& I, std::uint64_t seed) : dim(I.dim())
    {
        std::vector<std::size_t> order(I.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        SplitMix64 rng(seed);
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        flat.reserve(I.flat().size());
        for (std::size_t i : order) {
            auto k = I[i];
            flat.insert(flat.end(), k.begin(), k.end());
        }
    }

    std::size_t count() const { return dim == 0 ? 0 : flat.size() / dim; }
};

/// Injectivity of k -> sum_{s < upto} k_s z_s mod M on the first `upto`
/// coordinates of the stored frequencies (duplicates in the projection are
/// allowed only when the projections coincide).
inline bool injective_prefix(SearchWorkspace& ws, const std::vector<std::uint64_t>& z, std::uint64_t M,
                             std::size_t upto, const std::vector<std::int64_t>& projection_flat)
{
    const auto& src = upto == ws.dim ? ws.flat : projection_flat;
    const std::size_t n = src.size() / upto;
    ws.marker.reset(M);
    const bool small = M < (std::uint64_t(1) << 31);
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t* k = src.data() + i * upto;
        std::uint64_t r;
        if (small) {
            std::int64_t acc = 0;
            const auto m = static_cast<std::int64_t>(M);
            for (std::size_t s = 0; s < upto; ++s) {
                std::int64_t ks = k[s] % m;
                acc = (acc + ks * static_cast<std::int64_t>(z[s])) % m;
            }
            r = static_cast<std::uint64_t>(acc < 0 ? acc + m : acc);
        } else {
            __int128 acc = 0;
            for (std::size_t s = 0; s < upto; ++s) acc += static_cast<__int128>(k[s]) * static_cast<__int128>(z[s]);
            r = mod_floor(acc, M);
        }
        if (!ws.marker.insert(r)) return false;
    }
    return true;
}

/// Distinct projections of the stored frequencies onto the first s
/// coordinates, keeping the shuffled order of first appearance.
inline std::vector<std::int64_t> unique_projection(const SearchWorkspace& ws, std::size_t s)
{
    std::vector<std::int64_t> out;
    if (s == ws.dim) return out;
    std::vector<std::size_t> idx(ws.count());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto row = [&](std::size_t i) { return ws.flat.data() + i * ws.dim; };
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(row(a), row(a) + s, row(b), row(b) + s) || (std::equal(row(a), row(a) + s, row(b)) && a < b);
    });
    std::vector<std::size_t> firsts;
    for (std::size_t i = 0; i < idx.size(); ++i)
        if (i == 0 || !std::equal(row(idx[i]), row(idx[i]) + s, row(idx[i - 1]))) firsts.push_back(idx[i]);
    std::sort(firsts.begin(), firsts.end());
    out.reserve(firsts.size() * s);
    for (std::size_t i : firsts) out.insert(out.end(), row(i), row(i) + s);
    return out;
}

/// Candidate values tried for a free parameter with range [lo, M).
class CandidateSequence {
public:
    CandidateSequence(std::uint64_t lo, std::uint64_t M, const LatticeSearchOptions& opt)
        : lo_(lo), M_(M), rng_(opt.seed ^ (M * 0x9e3779b97f4a7c15ull))
    {
        const std::uint64_t range = M > lo ? M - lo : 0;
        exhaustive_ = opt.mode == SearchMode::Exhaustive || range <= opt.candidates_per_size;
        remaining_ = exhaustive_ ? range : opt.candidates_per_size;
    }

    bool next(std::uint64_t& out)
    {
        if (remaining_ == 0) return false;
        --remaining_;
        if (exhaustive_) {
            out = lo_ + next_++;
        } else {
            out = lo_ + rng_.below(M_ - lo_);
        }
        return true;
    }

private:
    std::uint64_t lo_, M_;
    SplitMix64 rng_;
    bool exhaustive_ = true;
    std::uint64_t remaining_ = 0;
    std::uint64_t next_ = 0;
};

} // namespace detail

/// Korobov vector (1, a, a^2, ..., a^{d-1}) mod M.
inline std::vector<std::int64_t> korobov_vector(std::size_t dim, std::uint64_t a, std::uint64_t M)
{
    std::vector<std::int64_t> z(dim);
    std::uint64_t p = 1 % M;
    for (std::size_t s = 0; s < dim; ++s) {
        z[s] = static_cast<std::int64_t>(p);
        p = detail::mul_mod(p, a % M, M);
    }
    return z;
}

/// First reconstructing lattice for I in a deterministic search order.
///
/// Sizes M run upward from max(|I|, min_size). Korobov tries a = 1..M-1 for
/// z = (1, a, ..., a^{d-1}); CBC fixes z_1 = 1 and picks each further z_s as
/// the smallest value keeping the projection onto the first s coordinates
/// injective, moving to the next M if some coordinate has no valid value.
/// Budgeted mode replaces "every M" by a geometric ladder and "every
/// candidate" by a fixed seeded sample (exhaustive when the range is small).
inline Rank1Lattice find_reconstructing_lattice(const FrequencySet& I, const LatticeSearchOptions& opt = {})
{
    if (I.empty()) throw DegenerateInput("cannot search a lattice for an empty frequency set");
    const std::size_t d = I.dim();
    const std::uint64_t n = I.size();
    const double cap_d = std::max(opt.cap_factor * static_cast<double>(n) * static_cast<double>(n),
                                  static_cast<double>(std::max<std::uint64_t>(n, opt.min_size)));
    const std::uint64_t cap = cap_d >= 1.8e19 ? std::uint64_t(-1) : static_cast<std::uint64_t>(cap_d);

    detail::SearchWorkspace ws(I, opt.seed);
    std::vector<std::vector<std::int64_t>> projections(d + 1);
    if (opt.strategy == SearchStrategy::CBC)
        for (std::size_t s = 1; s < d; ++s) projections[s] = detail::unique_projection(ws, s);

    auto next_size = [&](std::uint64_t M) {
        if (opt.mode == SearchMode::Exhaustive || opt.size_growth <= 1.0) return M + 1;
        const double grown = std::ceil(static_cast<double>(M) * opt.size_growth);
        return std::max<std::uint64_t>(M + 1, static_cast<std::uint64_t>(grown));
    };

    std::vector<std::uint64_t> z(d, 0);
    for (std::uint64_t M = std::max<std::uint64_t>(n, opt.min_size); M <= cap; M = next_size(M)) {
        if (d == 1) {
            z[0] = 1 % M;
            if (detail::injective_prefix(ws, z, M, 1, projections[1])) return Rank1Lattice({std::int64_t(z[0])}, M);
            continue;
        }
        if (opt.strategy == SearchStrategy::Korobov) {
            if (M == 1) {
                // only z = 0 exists
                std::fill(z.begin(), z.end(), 0);
                if (detail::injective_prefix(ws, z, M, d, projections[d])) return Rank1Lattice(std::vector<std::int64_t>(d, 0), M);
                continue;
            }
            detail::CandidateSequence cand(1, M, opt);
            std::uint64_t a;
            while (cand.next(a)) {
                auto kz = korobov_vector(d, a, M);
                for (std::size_t s = 0; s < d; ++s) z[s] = static_cast<std::uint64_t>(kz[s]);
                if (detail::injective_prefix(ws, z, M, d, projections[d])) return Rank1Lattice(std::move(kz), M);
            }
        } else {
            std::fill(z.begin(), z.end(), 0);
            z[0] = 1 % M;
            if (!detail::injective_prefix(ws, z, M, 1, projections[1])) continue;
            bool ok = true;
            for (std::size_t s = 2; s <= d && ok; ++s) {
                detail::CandidateSequence cand(0, M, opt);
                std::uint64_t c;
                bool found = false;
                while (cand.next(c)) {
                    z[s - 1] = c;
                    if (detail::injective_prefix(ws, z, M, s, projections[s])) {
                        found = true;
                        break;
                    }
                }
                ok = found;
            }
            if (ok) return Rank1Lattice(std::vector<std::int64_t>(z.begin(), z.end()), M);
        }
    }
    throw SearchExhausted("no reconstructing lattice with M <= " + std::to_string(cap) + " for a set of " +
                          std::to_string(n) + " frequencies");
}

inline Rank1Lattice find_reconstructing_lattice(const FrequencySet& I, SearchStrategy strategy)
{
    LatticeSearchOptions opt;
    opt.strategy = strategy;
    return find_reconstructing_lattice(I, opt);
}

// --- text forms ------------------------------------------------------------

/// "M z_1 ... z_d"
inline std::string to_string(const Rank1Lattice& L)
{
    std::string s = std::to_string(L.size());
    for (auto v : L.generator()) s += ' ' + std::to_string(v);
    return s;
}

inline Rank1Lattice parse_lattice_line(std::string_view line)
{
    std::istringstream is{std::string(line)};
    unsigned long long M = 0;
    if (!(is >> M) || M == 0) throw ParseError("lattice: expected 'M z_1 ... z_d'");
    std::vector<std::int64_t> z;
    long long v;
    while (is >> v) z.push_back(v);
    if (!is.eof() || z.empty()) throw ParseError("lattice: malformed generating vector");
    return Rank1Lattice(std::move(z), M);
}

/// Command line form "M:z1,z2,...".
inline Rank1Lattice parse_lattice_arg(std::string_view arg)
{
    const auto colon = arg.find(':');
    if (colon == std::string_view::npos) throw ParseError("lattice: expected 'M:z1,z2,...'");
    std::string line(arg.substr(0, colon));
    line += ' ';
    for (char c : arg.substr(colon + 1)) line += (c == ',' ? ' ' : c);
    return parse_lattice_line(line);
}

} // namespace perilat
