#pragma once

// Frequency index sets: hyperbolic crosses and difference sets.

#include "perilat/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace perilat {

using MultiIndex = std::vector<std::int64_t>;

/// Default upper bound on the number of elements any enumeration may produce.
inline constexpr std::size_t kDefaultCardinalityCap = 100'000'000;

/// prod_j max(1, |k_j|), saturating at the largest uint64.
inline std::uint64_t hc_weight(std::span<const std::int64_t> k) noexcept
{
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t w = 1;
    for (std::int64_t v : k) {
        const std::uint64_t a = v < 0 ? std::uint64_t(0) - std::uint64_t(v) : std::uint64_t(v);
        if (a <= 1) continue;
        if (w > kMax / a) return kMax;
        w *= a;
    }
    return w;
}

/// Finite set of frequencies in Z^d, stored row-major and kept in ascending
/// lexicographic order without duplicates.
class FrequencySet {
public:
    class const_iterator {
    public:
        using value_type = std::span<const std::int64_t>;
        using difference_type = std::ptrdiff_t;

        const_iterator() = default;
        const_iterator(const std::int64_t* p, std::size_t dim) : p_(p), dim_(dim) {}

        value_type operator*() const { return {p_, dim_}; }
        const_iterator& operator++()
        {
            p_ += dim_;
            return *this;
        }
        const_iterator operator++(int)
        {
            auto t = *this;
            ++*this;
            return t;
        }
        bool operator==(const const_iterator& o) const { return p_ == o.p_; }

    private:
        const std::int64_t* p_ = nullptr;
        std::size_t dim_ = 0;
    };

    FrequencySet() = default;
    explicit FrequencySet(std::size_t dim) : dim_(dim)
    {
        if (dim == 0) throw DimensionMismatch("frequency set dimension must be >= 1");
    }

    /// Builds a set from arbitrary (unsorted, possibly repeated) indices.
    static FrequencySet from_indices(std::size_t dim, std::vector<std::int64_t> flat)
    {
        FrequencySet s(dim);
        if (flat.size() % dim != 0)
            throw DimensionMismatch("flat index buffer length is not a multiple of the dimension");
        s.data_ = std::move(flat);
        s.normalize();
        return s;
    }

    static FrequencySet from_indices(std::size_t dim, const std::vector<MultiIndex>& ks)
    {
        std::vector<std::int64_t> flat;
        flat.reserve(ks.size() * dim);
        for (const auto& k : ks) {
            if (k.size() != dim) throw DimensionMismatch("index length differs from set dimension");
            flat.insert(flat.end(), k.begin(), k.end());
        }
        return from_indices(dim, std::move(flat));
    }

    /// Adopts a buffer that the caller guarantees is sorted and duplicate free.
    static FrequencySet from_sorted_unique(std::size_t dim, std::vector<std::int64_t> flat)
    {
        FrequencySet s(dim);
        s.data_ = std::move(flat);
        return s;
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
    bool empty() const noexcept { return data_.empty(); }

    std::span<const std::int64_t> operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
    std::span<const std::int64_t> flat() const noexcept { return data_; }

    const_iterator begin() const { return {data_.data(), dim_}; }
    const_iterator end() const { return {data_.data() + data_.size(), dim_}; }

    std::optional<std::size_t> index_of(std::span<const std::int64_t> k) const
    {
        if (k.size() != dim_) return std::nullopt;
        std::size_t lo = 0, hi = size();
        while (lo < hi) {
            const std::size_t mid = lo + (hi - lo) / 2;
            auto row = (*this)[mid];
            if (std::lexicographical_compare(row.begin(), row.end(), k.begin(), k.end()))
                lo = mid + 1;
            else
                hi = mid;
        }
        if (lo < size() && std::ranges::equal((*this)[lo], k)) return lo;
        return std::nullopt;
    }

    bool contains(std::span<const std::int64_t> k) const { return index_of(k).has_value(); }

    bool is_subset_of(const FrequencySet& other) const
    {
        if (other.dim_ != dim_) return false;
        for (auto k : *this)
            if (!other.contains(k)) return false;
        return true;
    }

    friend bool operator==(const FrequencySet&, const FrequencySet&) = default;

private:
    void normalize()
    {
        const std::size_t n = size();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        auto row = [this](std::size_t i) { return std::span<const std::int64_t>(data_.data() + i * dim_, dim_); };
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            auto ra = row(a), rb = row(b);
            return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
        });
        std::vector<std::int64_t> out;
        out.reserve(data_.size());
        for (std::size_t i = 0; i < n; ++i) {
            auto r = row(order[i]);
            if (i > 0 && std::ranges::equal(r, row(order[i - 1]))) continue;
            out.insert(out.end(), r.begin(), r.end());
        }
        data_ = std::move(out);
    }

    std::size_t dim_ = 0;
    std::vector<std::int64_t> data_;
};

namespace detail {

inline void hc_recurse(std::vector<std::int64_t>& out, std::vector<std::int64_t>& prefix, std::size_t dim,
                       std::uint64_t budget, std::size_t cap)
{
    const std::size_t pos = prefix.size();
    const auto b = static_cast<std::int64_t>(budget);
    for (std::int64_t k = -b; k <= b; ++k) {
        prefix.push_back(k);
        if (pos + 1 == dim) {
            if (out.size() / dim >= cap)
                throw ResourceError("hyperbolic cross exceeds the cardinality cap of " + std::to_string(cap));
            out.insert(out.end(), prefix.begin(), prefix.end());
        } else {
            const std::uint64_t a = static_cast<std::uint64_t>(k < 0 ? -k : k);
            hc_recurse(out, prefix, dim, a <= 1 ? budget : budget / a, cap);
        }
        prefix.pop_back();
    }
}

} // namespace detail

/// { k in Z^d : hc_weight(k) <= N } in lexicographic order.
///
/// Coordinates are fixed left to right; the remaining budget for coordinate
/// s+1 is floor(N / prod_{j<=s} max(1,|k_j|)), so only members are visited.
inline FrequencySet hyperbolic_cross(std::size_t dim, std::int64_t N, std::size_t cap = kDefaultCardinalityCap)
{
    if (dim == 0) throw DimensionMismatch("hyperbolic cross needs dimension >= 1");
    if (N < 1) throw DomainError("hyperbolic cross needs N >= 1");
    std::vector<std::int64_t> out;
    std::vector<std::int64_t> prefix;
    prefix.reserve(dim);
    detail::hc_recurse(out, prefix, dim, static_cast<std::uint64_t>(N), cap);
    return FrequencySet::from_sorted_unique(dim, std::move(out));
}

/// { k1 - k2 : k1, k2 in I }, sorted and deduplicated.
inline FrequencySet difference_set(const FrequencySet& I, std::size_t cap = kDefaultCardinalityCap)
{
    if (I.empty()) throw DegenerateInput("difference set of an empty frequency set");
    const std::size_t n = I.size();
    const std::size_t d = I.dim();
    if (n > cap / n) throw ResourceError("difference set pair count exceeds the cardinality cap");
    std::vector<std::int64_t> flat;
    flat.reserve(n * n * d);
    for (auto a : I)
        for (auto b : I)
            for (std::size_t s = 0; s < d; ++s) flat.push_back(a[s] - b[s]);
    return FrequencySet::from_indices(d, std::move(flat));
}

// Text format: "d N" header (N = 0 for sets that are not crosses), then one
// index per line.

inline void write_frequency_set(std::ostream& os, const FrequencySet& I, std::int64_t N = 0)
{
    os << I.dim() << ' ' << N << '\n';
    std::string buf;
    buf.reserve(1 << 16);
    char tmp[32];
    for (auto k : I) {
        for (std::size_t s = 0; s < k.size(); ++s) {
            if (s) buf.push_back(' ');
            auto [p, ec] = std::to_chars(tmp, tmp + sizeof tmp, k[s]);
            buf.append(tmp, p);
        }
        buf.push_back('\n');
        if (buf.size() > (1 << 16) - 256) {
            os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

struct SerializedFrequencySet {
    FrequencySet set;
    std::int64_t N = 0;
};

inline SerializedFrequencySet read_frequency_set(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) throw ParseError("frequency set: missing header line");
    std::istringstream hs(line);
    long long d = 0, N = 0;
    if (!(hs >> d >> N) || d < 1) throw ParseError("frequency set: malformed header '" + line + "'");
    std::vector<std::int64_t> flat;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        long long v = 0;
        std::size_t count = 0;
        while (ls >> v) {
            flat.push_back(v);
            ++count;
        }
        if (count != static_cast<std::size_t>(d) || !ls.eof())
            throw ParseError("frequency set: line " + std::to_string(lineno) + " does not hold " +
                             std::to_string(d) + " integers");
    }
    return {FrequencySet::from_indices(static_cast<std::size_t>(d), std::move(flat)), N};
}

} // namespace perilat
