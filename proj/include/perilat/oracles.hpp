#pragma once

// Slow reference implementations. Each one follows the defining formula
// literally and shares no code path with the fast routines it is compared
// against.

#include "perilat/dft.hpp"
#include "perilat/freqset.hpp"
#include "perilat/lattice.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <set>
#include <span>
#include <vector>

namespace perilat::oracle {

/// O(M^2) DFT with long double phases. sign = -1 forward, +1 backward.
inline std::vector<cplx> naive_dft(std::span<const cplx> in, int sign)
{
    const std::size_t M = in.size();
    std::vector<cplx> out(M);
    for (std::size_t l = 0; l < M; ++l) {
        std::complex<long double> acc = 0;
        for (std::size_t j = 0; j < M; ++j) {
            const auto r = static_cast<long double>((static_cast<unsigned __int128>(l) * j) % M);
            const long double theta = sign * 2.0L * std::numbers::pi_v<long double> * r / static_cast<long double>(M);
            acc += std::complex<long double>(in[j].real(), in[j].imag()) *
                   std::complex<long double>(std::cos(theta), std::sin(theta));
        }
        out[l] = cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
    }
    return out;
}

/// Hyperbolic cross by scanning every point of the box [-N, N]^d.
inline std::vector<MultiIndex> box_scan_cross(std::size_t d, std::int64_t N)
{
    std::vector<MultiIndex> out;
    MultiIndex k(d, -N);
    while (true) {
        std::int64_t prod = 1;
        for (auto v : k) prod *= std::max<std::int64_t>(1, v < 0 ? -v : v);
        if (prod <= N) out.push_back(k);
        std::size_t s = d;
        while (s > 0) {
            --s;
            if (k[s] < N) {
                ++k[s];
                break;
            }
            k[s] = -N;
            if (s == 0) return out;
        }
        if (d == 0) return out;
    }
}

/// All pairwise differences through an ordered set.
inline std::set<MultiIndex> pairwise_differences(const std::vector<MultiIndex>& I)
{
    std::set<MultiIndex> out;
    for (const auto& a : I)
        for (const auto& b : I) {
            MultiIndex t(a.size());
            for (std::size_t s = 0; s < a.size(); ++s) t[s] = a[s] - b[s];
            out.insert(t);
        }
    return out;
}

/// t.z mod M != 0 for every nonzero t in D(I), with D(I) materialized.
inline bool difference_set_condition(const std::vector<std::int64_t>& z, std::uint64_t M,
                                     const std::vector<MultiIndex>& I)
{
    for (const auto& t : pairwise_differences(I)) {
        bool zero = true;
        for (auto v : t) zero = zero && v == 0;
        if (zero) continue;
        __int128 acc = 0;
        for (std::size_t s = 0; s < t.size(); ++s) acc += static_cast<__int128>(t[s]) * z[s];
        __int128 r = acc % static_cast<__int128>(M);
        if (r == 0) return false;
    }
    return true;
}

/// Node j of the lattice with plain floating arithmetic, recentred.
inline std::vector<double> node(const std::vector<std::int64_t>& z, std::uint64_t M, std::uint64_t j)
{
    std::vector<double> x(z.size());
    for (std::size_t s = 0; s < z.size(); ++s) {
        const long double v = std::fmod(static_cast<long double>(j) * z[s] / M, 1.0L);
        long double c = v < 0 ? v + 1 : v;
        if (c >= 0.5L) c -= 1.0L;
        x[s] = static_cast<double>(c);
    }
    return x;
}

/// sum_k c_k e^{2 pi i k.x_j} for every node, by direct summation.
inline std::vector<cplx> direct_lattice_sum(const std::vector<MultiIndex>& I, const std::vector<cplx>& c,
                                            const std::vector<std::int64_t>& z, std::uint64_t M)
{
    std::vector<cplx> out(M);
    for (std::uint64_t j = 0; j < M; ++j) {
        std::complex<long double> acc = 0;
        for (std::size_t i = 0; i < I.size(); ++i) {
            __int128 kz = 0;
            for (std::size_t s = 0; s < z.size(); ++s) kz += static_cast<__int128>(I[i][s]) * z[s];
            __int128 r = (kz * static_cast<__int128>(j)) % static_cast<__int128>(M);
            if (r < 0) r += M;
            const long double theta = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(r) / M;
            acc += std::complex<long double>(c[i].real(), c[i].imag()) *
                   std::complex<long double>(std::cos(theta), std::sin(theta));
        }
        out[j] = cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
    }
    return out;
}

/// Dense Fourier matrix A (M x |I|), A_{j,i} = e^{2 pi i k_i . x_j}, row-major.
inline std::vector<cplx> fourier_matrix(const std::vector<MultiIndex>& I, const std::vector<std::int64_t>& z,
                                        std::uint64_t M)
{
    std::vector<cplx> A(M * I.size());
    for (std::uint64_t j = 0; j < M; ++j) {
        const auto x = node(z, M, j);
        for (std::size_t i = 0; i < I.size(); ++i) {
            long double phase = 0;
            for (std::size_t s = 0; s < x.size(); ++s) phase += static_cast<long double>(I[i][s]) * x[s];
            const long double theta = 2.0L * std::numbers::pi_v<long double> * phase;
            A[j * I.size() + i] = cplx(static_cast<double>(std::cos(theta)), static_cast<double>(std::sin(theta)));
        }
    }
    return A;
}

/// A^* A (|I| x |I|), row-major.
inline std::vector<cplx> gram(const std::vector<cplx>& A, std::size_t rows, std::size_t cols)
{
    std::vector<cplx> G(cols * cols);
    for (std::size_t a = 0; a < cols; ++a)
        for (std::size_t b = 0; b < cols; ++b) {
            cplx acc{};
            for (std::size_t j = 0; j < rows; ++j) acc += std::conj(A[j * cols + a]) * A[j * cols + b];
            G[a * cols + b] = acc;
        }
    return G;
}

} // namespace perilat::oracle
