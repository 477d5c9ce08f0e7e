#pragma once

// Fast evaluation and reconstruction of (transformed) trigonometric
// polynomials along rank-1 lattices, both through one 1-D FFT of length M.

#include "perilat/dft.hpp"
#include "perilat/errors.hpp"
#include "perilat/freqset.hpp"
#include "perilat/lattice.hpp"
#include "perilat/transform.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <numbers>
#include <span>
#include <vector>

namespace perilat {

/// Amplitudes aligned with the (lexicographic) order of `support`.
struct CoefficientVector {
    FrequencySet support;
    std::vector<cplx> values;

    CoefficientVector() = default;
    CoefficientVector(FrequencySet s, std::vector<cplx> v) : support(std::move(s)), values(std::move(v))
    {
        if (values.size() != support.size())
            throw DimensionMismatch("coefficient count does not match the frequency set size");
    }
    explicit CoefficientVector(FrequencySet s) : support(std::move(s)), values(support.size()) {}

    std::size_t size() const noexcept { return values.size(); }
    std::size_t dim() const noexcept { return support.dim(); }

    /// Amplitude of frequency k, zero if k is not in the support.
    cplx at(std::span<const std::int64_t> k) const
    {
        auto i = support.index_of(k);
        return i ? values[*i] : cplx{};
    }
};

/// Values along the M lattice nodes, j ascending.
struct SampleVector {
    std::vector<cplx> values;

    std::size_t size() const noexcept { return values.size(); }
};

/// Evaluates sum_k c_k e^{2 pi i k.x_j} at every node x_j of L: aggregate
/// ghat_{k.z mod M} += c_k, then one unnormalized backward FFT.
inline SampleVector evaluate_at_lattice(const CoefficientVector& c, const Rank1Lattice& L)
{
    if (c.dim() != L.dim()) throw DimensionMismatch("coefficient support and lattice dimensions differ");
    const std::size_t M = L.size();
    std::vector<cplx> ghat(M, cplx{});
    std::size_t i = 0;
    for (auto k : c.support) ghat[L.residue(k)] += c.values[i++];
    SampleVector s;
    s.values.resize(M);
    FftPlan(M).backward(ghat, s.values);
    return s;
}

/// c_k = ghat_{k.z mod M} / M with ghat the forward FFT of the samples.
/// Exact for polynomials supported on I when L reconstructs I; for general
/// samples these are the lattice-approximated coefficients (aliased sums).
inline CoefficientVector reconstruct_from_lattice(const SampleVector& s, const FrequencySet& I, const Rank1Lattice& L,
                                                  bool check_reconstructing = true)
{
    if (I.dim() != L.dim()) throw DimensionMismatch("frequency set and lattice dimensions differ");
    if (s.size() != L.size())
        throw DimensionMismatch("sample count " + std::to_string(s.size()) + " does not match lattice size " +
                                std::to_string(L.size()));
    if (check_reconstructing && !is_reconstructing(L, I))
        throw NotReconstructing("lattice " + to_string(L) + " does not reconstruct the frequency set");
    const std::size_t M = L.size();
    std::vector<cplx> ghat(M);
    FftPlan(M).forward(s.values, ghat);
    const double inv = 1.0 / static_cast<double>(M);
    CoefficientVector c(I);
    std::size_t i = 0;
    for (auto k : I) c.values[i++] = ghat[L.residue(k)] * inv;
    return c;
}

/// A function that can also be evaluated directly on the torus side, i.e.
/// f(x) = h(psi(x)) sqrt(omega(psi(x)) psi'(x)) is available without going
/// through psi and its inverse.
template <class F>
concept TorusEvaluable = requires(const F& f, std::span<const double> x) {
    { f.periodized(x) } -> std::convertible_to<cplx>;
};

/// s_j = f(x_j) over the recentred nodes of L.
template <class F>
SampleVector sample_transformed_function(const F& h, const WeightSpec& w, const ProductTransform& P,
                                         const Rank1Lattice& L)
{
    if (P.dim() != L.dim()) throw DimensionMismatch("transformation and lattice dimensions differ");
    const std::size_t d = L.dim();
    SampleVector s;
    s.values.resize(L.size());
    std::vector<double> x(d);
    for (std::uint64_t j = 0; j < L.size(); ++j) {
        L.node(j, x);
        if constexpr (TorusEvaluable<F>)
            s.values[j] = h.periodized(std::span<const double>(x));
        else
            s.values[j] = periodized_sample(h, w, P, std::span<const double>(x));
    }
    return s;
}

/// sqrt(rho(y) / omega(y)) * sum_k c_k e^{2 pi i k . psi^{-1}(y)} for each
/// point y (row-major, count x d). Direct summation, O(|I| * count).
inline std::vector<cplx> evaluate_partial_sum(const CoefficientVector& c, const WeightSpec& w,
                                              const ProductTransform& P, std::span<const double> points)
{
    const std::size_t d = c.dim();
    if (P.dim() != d) throw DimensionMismatch("transformation and coefficient dimensions differ");
    if (points.size() % d != 0) throw DimensionMismatch("point buffer length is not a multiple of the dimension");
    const std::size_t count = points.size() / d;
    std::vector<cplx> out(count);
    std::vector<double> x(d);
    for (std::size_t p = 0; p < count; ++p) {
        auto y = points.subspan(p * d, d);
        P.inverse(y, x);
        const double factor = std::sqrt(P.density(y) / w(y));
        cplx acc{};
        std::size_t i = 0;
        for (auto k : c.support) {
            double phase = 0.0;
            for (std::size_t s = 0; s < d; ++s) phase += static_cast<double>(k[s]) * x[s];
            // e^{2 pi i phase}; reduce the phase to keep the argument small
            phase -= std::round(phase);
            acc += c.values[i++] * cplx(std::cos(2.0 * std::numbers::pi * phase), std::sin(2.0 * std::numbers::pi * phase));
        }
        out[p] = factor * acc;
    }
    return out;
}

/// (1/M) sum_j g(x_j) over the recentred nodes; exact for trigonometric
/// polynomials supported on D(I) when L reconstructs I.
template <class G>
cplx lattice_quadrature(const G& g, const Rank1Lattice& L)
{
    std::vector<double> x(L.dim());
    cplx acc{};
    for (std::uint64_t j = 0; j < L.size(); ++j) {
        L.node(j, x);
        acc += cplx(g(std::span<const double>(x)));
    }
    return acc / static_cast<double>(L.size());
}

/// ||s - A A^* s / M||_inf / ||s||_inf for given lattice samples.
inline double rel_discrete_error(const SampleVector& s, const FrequencySet& I, const Rank1Lattice& L,
                                 bool check_reconstructing = true)
{
    double norm = 0.0;
    for (const auto& v : s.values) norm = std::max(norm, std::abs(v));
    if (norm == 0.0) throw DegenerateInput("relative error undefined: all samples are zero");
    const auto c = reconstruct_from_lattice(s, I, L, check_reconstructing);
    const auto approx = evaluate_at_lattice(c, L);
    double diff = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) diff = std::max(diff, std::abs(s.values[j] - approx.values[j]));
    return diff / norm;
}

/// Relative discrete l_inf approximation error of the periodization of h.
template <class F>
double rel_discrete_error(const F& h, const WeightSpec& w, const ProductTransform& P, const FrequencySet& I,
                          const Rank1Lattice& L, bool check_reconstructing = true)
{
    return rel_discrete_error(sample_transformed_function(h, w, P, L), I, L, check_reconstructing);
}

/// Transformed trigonometric polynomial h(y) = sum_k c_k phi_k(y) with the
/// weighted basis phi_k(y) = sqrt(rho(y)/omega(y)) e^{2 pi i k . psi^{-1}(y)}.
/// Its periodization is the plain polynomial sum_k c_k e^{2 pi i k.x}.
class TransformedPolynomial {
public:
    TransformedPolynomial(CoefficientVector c, WeightSpec w, ProductTransform P)
        : c_(std::move(c)), w_(std::move(w)), P_(std::move(P))
    {
        if (c_.dim() != P_.dim()) throw DimensionMismatch("transformation and coefficient dimensions differ");
    }

    const CoefficientVector& coefficients() const noexcept { return c_; }

    /// Cube-side value h(y).
    cplx operator()(std::span<const double> y) const { return evaluate_partial_sum(c_, w_, P_, y).front(); }

    /// Torus-side value f(x) = sum_k c_k e^{2 pi i k.x}.
    cplx periodized(std::span<const double> x) const
    {
        cplx acc{};
        std::size_t i = 0;
        for (auto k : c_.support) {
            double phase = 0.0;
            for (std::size_t s = 0; s < x.size(); ++s) phase += static_cast<double>(k[s]) * x[s];
            phase -= std::round(phase);
            acc += c_.values[i++] * cplx(std::cos(2.0 * std::numbers::pi * phase), std::sin(2.0 * std::numbers::pi * phase));
        }
        return acc;
    }

private:
    CoefficientVector c_;
    WeightSpec w_;
    ProductTransform P_;
};

// --- text forms ------------------------------------------------------------

namespace detail {

inline void put_complex(std::ostream& os, cplx v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g %.17g", v.real(), v.imag());
    os << buf;
}

} // namespace detail

/// Header "d N" (N = 0 when unknown), then one "k_1 ... k_d re im" per line.
inline void write_coefficients(std::ostream& os, const CoefficientVector& c, std::int64_t N = 0)
{
    os << c.dim() << ' ' << N << '\n';
    std::size_t i = 0;
    for (auto k : c.support) {
        for (auto v : k) os << v << ' ';
        detail::put_complex(os, c.values[i++]);
        os << '\n';
    }
}

inline CoefficientVector read_coefficients(std::istream& is, std::int64_t* N = nullptr)
{
    std::string line;
    std::size_t d = 0;
    long long n = 0;
    if (!std::getline(is, line) || std::sscanf(line.c_str(), "%zu %lld", &d, &n) != 2 || d == 0)
        throw ParseError("coefficients: expected header 'd N'");
    if (N) *N = n;
    std::vector<MultiIndex> ks;
    std::vector<cplx> vals;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        MultiIndex k(d);
        double re = 0, im = 0;
        for (auto& v : k) ls >> v;
        ls >> re >> im;
        std::string extra;
        if (!ls || (ls >> extra)) throw ParseError("coefficients: malformed line '" + line + "'");
        ks.push_back(std::move(k));
        vals.emplace_back(re, im);
    }
    auto support = FrequencySet::from_indices(d, ks);
    if (support.size() != ks.size()) throw ParseError("coefficients: duplicate frequency");
    CoefficientVector c(support);
    for (std::size_t i = 0; i < ks.size(); ++i) c.values[*support.index_of(ks[i])] = vals[i];
    return c;
}

/// Header "d M", then one "re im" per line, j ascending.
inline void write_samples(std::ostream& os, const SampleVector& s, std::size_t dim)
{
    os << dim << ' ' << s.size() << '\n';
    for (const auto& v : s.values) {
        detail::put_complex(os, v);
        os << '\n';
    }
}

inline SampleVector read_samples(std::istream& is, std::size_t* dim = nullptr)
{
    std::string line;
    std::size_t d = 0, M = 0;
    if (!std::getline(is, line) || std::sscanf(line.c_str(), "%zu %zu", &d, &M) != 2)
        throw ParseError("samples: expected header 'd M'");
    if (dim) *dim = d;
    SampleVector s;
    s.values.reserve(M);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        double re = 0, im = 0;
        int used = 0;
        if (std::sscanf(line.c_str(), "%lf %lf%n", &re, &im, &used) != 2 || static_cast<std::size_t>(used) != line.size())
            throw ParseError("samples: malformed line '" + line + "'");
        s.values.emplace_back(re, im);
    }
    if (s.size() != M) throw ParseError("samples: header announces " + std::to_string(M) + " values, found " + std::to_string(s.size()));
    return s;
}

} // namespace perilat
