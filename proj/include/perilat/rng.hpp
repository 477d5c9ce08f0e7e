#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace perilat {

/// SplitMix64 (Steele, Lea, Flood 2014). Bit-reproducible on every platform,
/// which std:: distributions are not.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type(0); }

    result_type operator()() noexcept
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, n) by rejection; n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept
    {
        const std::uint64_t limit = max() - max() % n;
        std::uint64_t v;
        do {
            v = (*this)();
        } while (v >= limit);
        return v % n;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform point in the closed unit disk of the complex plane.
    std::complex<double> unit_disk() noexcept
    {
        const double r = std::sqrt(uniform());
        const double phi = 2.0 * std::numbers::pi * uniform();
        return std::polar(r, phi);
    }

private:
    std::uint64_t state_;
};

} // namespace perilat
