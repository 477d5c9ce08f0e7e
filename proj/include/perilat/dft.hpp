#pragma once

// Arbitrary-length discrete Fourier transform.
//
//   forward:  G_l = sum_j g_j e^{-2 pi i l j / M}          (unnormalized)
//   inverse:  g_j = (1/M) sum_l G_l e^{+2 pi i l j / M}
//
// Lengths whose prime factors are all small go through a recursive
// mixed-radix Cooley-Tukey pass (radix 4 and 2 specialised, other small
// primes through a generic butterfly). Any other length is handled by
// Bluestein's chirp-z algorithm on top of a power-of-two transform.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace perilat {

using cplx = std::complex<double>;

namespace detail {

/// e^{-2 pi i num / den}, with the angle reduced exactly before rounding.
inline cplx unit_root(std::uint64_t num, std::uint64_t den)
{
    num %= den;
    // Fold onto the shorter arc so the argument of sin/cos stays small.
    const double sign = 2 * static_cast<unsigned __int128>(num) > den ? 1.0 : -1.0;
    const std::uint64_t r = sign > 0 ? den - num : num;
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(den);
    return {std::cos(theta), sign * std::sin(theta)};
}

} // namespace detail

class FftPlan {
public:
    /// Largest prime handled by the generic butterfly; bigger prime factors
    /// switch the whole transform to Bluestein.
    static constexpr std::size_t kMaxDirectRadix = 61;

    FftPlan() : FftPlan(1) {}

    explicit FftPlan(std::size_t n) : n_(n)
    {
        if (n == 0) throw std::invalid_argument("transform length must be positive");
        std::size_t rest = n;
        std::vector<std::size_t> radices;
        while (rest % 4 == 0) {
            radices.push_back(4);
            rest /= 4;
        }
        while (rest % 2 == 0) {
            radices.push_back(2);
            rest /= 2;
        }
        for (std::size_t p = 3; p * p <= rest; p += 2)
            while (rest % p == 0) {
                radices.push_back(p);
                rest /= p;
            }
        if (rest > 1) radices.push_back(rest);

        std::size_t largest = 1;
        for (auto p : radices) largest = std::max(largest, p);

        if (largest <= kMaxDirectRadix) {
            std::size_t m = n;
            for (auto p : radices) {
                m /= p;
                factors_.push_back({p, m});
            }
            twiddles_.resize(n);
            for (std::size_t i = 0; i < n; ++i) twiddles_[i] = detail::unit_root(i, n);
        } else {
            setup_bluestein();
        }
    }

    std::size_t size() const noexcept { return n_; }
    bool uses_bluestein() const noexcept { return static_cast<bool>(inner_); }

    void forward(std::span<const cplx> in, std::span<cplx> out) const { run(in, out, false); }
    void backward(std::span<const cplx> in, std::span<cplx> out) const { run(in, out, true); }

private:
    struct Stage {
        std::size_t radix;
        std::size_t span; // remaining length after this stage
    };

    void run(std::span<const cplx> in, std::span<cplx> out, bool inverse) const
    {
        if (in.size() != n_ || out.size() != n_) throw std::invalid_argument("transform buffer length mismatch");
        if (n_ == 1) {
            out[0] = in[0];
            return;
        }
        if (inner_) {
            bluestein(in, out, inverse);
            return;
        }
        if (in.data() == out.data()) {
            std::vector<cplx> copy(in.begin(), in.end());
            work(out.data(), copy.data(), 1, 0, inverse);
        } else {
            work(out.data(), in.data(), 1, 0, inverse);
        }
    }

    cplx tw(std::size_t i, bool inverse) const { return inverse ? std::conj(twiddles_[i]) : twiddles_[i]; }

    void work(cplx* out, const cplx* in, std::size_t stride, std::size_t stage, bool inverse) const
    {
        const std::size_t p = factors_[stage].radix;
        const std::size_t m = factors_[stage].span;
        if (m == 1) {
            for (std::size_t q = 0; q < p; ++q) out[q] = in[q * stride];
        } else {
            for (std::size_t q = 0; q < p; ++q) work(out + q * m, in + q * stride, stride * p, stage + 1, inverse);
        }
        switch (p) {
        case 2:
            butterfly2(out, stride, m, inverse);
            break;
        case 4:
            butterfly4(out, stride, m, inverse);
            break;
        default:
            butterfly_generic(out, stride, m, p, inverse);
            break;
        }
    }

    void butterfly2(cplx* out, std::size_t stride, std::size_t m, bool inverse) const
    {
        for (std::size_t u = 0; u < m; ++u) {
            const cplx t = out[u + m] * tw(u * stride, inverse);
            out[u + m] = out[u] - t;
            out[u] += t;
        }
    }

    void butterfly4(cplx* out, std::size_t stride, std::size_t m, bool inverse) const
    {
        for (std::size_t u = 0; u < m; ++u) {
            const cplx a0 = out[u];
            const cplx a1 = out[u + m] * tw(u * stride, inverse);
            const cplx a2 = out[u + 2 * m] * tw(2 * u * stride, inverse);
            const cplx a3 = out[u + 3 * m] * tw(3 * u * stride, inverse);
            const cplx s02 = a0 + a2, d02 = a0 - a2;
            const cplx s13 = a1 + a3, d13 = a1 - a3;
            // multiply d13 by -i (forward) or +i (inverse)
            const cplx rot = inverse ? cplx(-d13.imag(), d13.real()) : cplx(d13.imag(), -d13.real());
            out[u] = s02 + s13;
            out[u + m] = d02 + rot;
            out[u + 2 * m] = s02 - s13;
            out[u + 3 * m] = d02 - rot;
        }
    }

    void butterfly_generic(cplx* out, std::size_t stride, std::size_t m, std::size_t p, bool inverse) const
    {
        cplx scratch[kMaxDirectRadix];
        for (std::size_t u = 0; u < m; ++u) {
            for (std::size_t q = 0; q < p; ++q) scratch[q] = out[u + q * m];
            for (std::size_t q1 = 0; q1 < p; ++q1) {
                const std::size_t k = u + q1 * m;
                cplx acc = scratch[0];
                std::size_t idx = 0;
                for (std::size_t q = 1; q < p; ++q) {
                    idx += stride * k;
                    idx %= n_;
                    acc += scratch[q] * tw(idx, inverse);
                }
                out[k] = acc;
            }
        }
    }

    // --- Bluestein ----------------------------------------------------------

    void setup_bluestein()
    {
        std::size_t m = 1;
        while (m < 2 * n_ - 1) m <<= 1;
        inner_ = std::make_shared<FftPlan>(m);
        chirp_.resize(n_);
        const std::uint64_t two_n = 2 * static_cast<std::uint64_t>(n_);
        for (std::size_t j = 0; j < n_; ++j) {
            // e^{-i pi j^2 / n} with j^2 reduced mod 2n
            const auto jj = static_cast<std::uint64_t>((static_cast<unsigned __int128>(j) * j) % two_n);
            chirp_[j] = detail::unit_root(jj, two_n);
        }
        std::vector<cplx> b(m, cplx{});
        b[0] = std::conj(chirp_[0]);
        for (std::size_t j = 1; j < n_; ++j) b[j] = b[m - j] = std::conj(chirp_[j]);
        kernel_.resize(m);
        inner_->forward(b, kernel_);
    }

    void bluestein(std::span<const cplx> in, std::span<cplx> out, bool inverse) const
    {
        const std::size_t m = inner_->size();
        std::vector<cplx> a(m, cplx{});
        // backward(x) = conj(forward(conj(x)))
        for (std::size_t j = 0; j < n_; ++j) a[j] = (inverse ? std::conj(in[j]) : in[j]) * chirp_[j];
        std::vector<cplx> A(m);
        inner_->forward(a, A);
        for (std::size_t i = 0; i < m; ++i) A[i] *= kernel_[i];
        inner_->backward(A, a);
        const double scale = 1.0 / static_cast<double>(m);
        for (std::size_t k = 0; k < n_; ++k) {
            const cplx v = a[k] * chirp_[k] * scale;
            out[k] = inverse ? std::conj(v) : v;
        }
    }

    std::size_t n_;
    std::vector<Stage> factors_;
    std::vector<cplx> twiddles_;
    std::shared_ptr<const FftPlan> inner_;
    std::vector<cplx> chirp_;
    std::vector<cplx> kernel_;
};

/// Unnormalized forward DFT, e^{-2 pi i l j / M}.
inline std::vector<cplx> dft_forward(std::span<const cplx> v)
{
    if (v.empty()) throw std::invalid_argument("DFT of an empty vector");
    std::vector<cplx> out(v.size());
    FftPlan(v.size()).forward(v, out);
    return out;
}

/// Inverse DFT carrying the 1/M factor, e^{+2 pi i l j / M}.
inline std::vector<cplx> dft_inverse(std::span<const cplx> v)
{
    if (v.empty()) throw std::invalid_argument("DFT of an empty vector");
    std::vector<cplx> out(v.size());
    FftPlan(v.size()).backward(v, out);
    const double s = 1.0 / static_cast<double>(v.size());
    for (auto& x : out) x *= s;
    return out;
}

} // namespace perilat
