#pragma once

// Torus-to-cube transformations psi : [-1/2,1/2] -> [-1/2,1/2], their
// derivatives, inverses and densities, and periodization of cube functions.
//
// Every family is odd, increasing and maps the boundary points onto
// themselves. The parameterized families (logarithmic, error function) are
// psi(x, eta) = g^{-1}(eta * g(x)) for a transformation g onto R, which gives
// psi^{-1}(y, eta) = psi(y, 1/eta) and rho(y, eta) = psi'(y, 1/eta).

#include "perilat/errors.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace perilat {

inline constexpr double kBoundaryTolerance = 1e-12;

// erf^{-1} on (-1, 1): rational starting guess, then Newton on std::erf.
inline double erf_inv(double t)
{
    if (std::isnan(t) || t < -1.0 || t > 1.0) throw DomainError("erf_inv argument outside [-1, 1]");
    if (t == 1.0) return std::numeric_limits<double>::infinity();
    if (t == -1.0) return -std::numeric_limits<double>::infinity();
    if (t == 0.0) return 0.0;
    const double a = std::fabs(t);

    // Giles' single precision approximation, good to ~1e-7 on the whole range.
    double w = -std::log((1.0 - a) * (1.0 + a));
    double y;
    if (w < 5.0) {
        w -= 2.5;
        double p = 2.81022636e-08;
        p = 3.43273939e-07 + p * w;
        p = -3.5233877e-06 + p * w;
        p = -4.39150654e-06 + p * w;
        p = 0.00021858087 + p * w;
        p = -0.00125372503 + p * w;
        p = -0.00417768164 + p * w;
        p = 0.246640727 + p * w;
        p = 1.50140941 + p * w;
        y = p * a;
    } else {
        w = std::sqrt(w) - 3.0;
        double p = -0.000200214257;
        p = 0.000100950558 + p * w;
        p = 0.00134934322 + p * w;
        p = -0.00367342844 + p * w;
        p = 0.00573950773 + p * w;
        p = -0.0076224613 + p * w;
        p = 0.00943887047 + p * w;
        p = 1.00167406 + p * w;
        p = 2.83297682 + p * w;
        y = p * a;
    }

    // Close to 1 the residual is evaluated through erfc to keep digits.
    const bool tail = a > 0.5;
    const double target_c = 1.0 - a;
    for (int it = 0; it < 50; ++it) {
        const double r = tail ? target_c - std::erfc(y) : std::erf(y) - a;
        const double dy = r / (2.0 / std::sqrt(std::numbers::pi) * std::exp(-y * y));
        // Halley correction: f''/f' = -2y for erf.
        const double corrected = dy / (1.0 + y * dy);
        y -= corrected;
        if (std::fabs(corrected) <= 1e-15 * std::fmax(1.0, std::fabs(y))) break;
    }
    return t < 0 ? -y : y;
}

enum class TransformKind { Logarithmic, ErrorFunction, Sine, Identity };

class TransformSpec {
public:
    TransformSpec() = default;

    TransformSpec(TransformKind kind, double eta) : kind_(kind), eta_(eta)
    {
        if (kind == TransformKind::Sine || kind == TransformKind::Identity) {
            eta_ = 1.0;
        } else if (!(eta > 0.0) || !std::isfinite(eta)) {
            throw DomainError("transformation parameter eta must be a positive finite number");
        }
    }

    static TransformSpec logarithmic(double eta) { return {TransformKind::Logarithmic, eta}; }
    static TransformSpec error_function(double eta) { return {TransformKind::ErrorFunction, eta}; }
    static TransformSpec sine() { return {TransformKind::Sine, 1.0}; }
    static TransformSpec identity() { return {TransformKind::Identity, 1.0}; }

    TransformKind kind() const noexcept { return kind_; }
    double eta() const noexcept { return eta_; }
    bool parameterized() const noexcept
    {
        return kind_ == TransformKind::Logarithmic || kind_ == TransformKind::ErrorFunction;
    }

    /// psi(x). Returns exactly +-1/2 at the boundary.
    double forward(double x) const
    {
        x = clamp_to_cube(x);
        if (x == 0.5 || x == -0.5) return x;
        switch (kind_) {
        case TransformKind::Logarithmic:
            return log_forward(x, eta_);
        case TransformKind::ErrorFunction:
            return erf_forward(x, eta_);
        case TransformKind::Sine:
            return 0.5 * std::sin(std::numbers::pi * x);
        case TransformKind::Identity:
            break;
        }
        return x;
    }

    /// psi^{-1}(y).
    double inverse(double y) const
    {
        y = clamp_to_cube(y);
        if (y == 0.5 || y == -0.5) return y;
        switch (kind_) {
        case TransformKind::Logarithmic:
            return log_forward(y, 1.0 / eta_);
        case TransformKind::ErrorFunction:
            return erf_forward(y, 1.0 / eta_);
        case TransformKind::Sine:
            return std::asin(2.0 * y) / std::numbers::pi;
        case TransformKind::Identity:
            break;
        }
        return y;
    }

    /// psi'(x); the analytic limit at x = +-1/2. Throws DomainError when that
    /// limit is infinite (eta < 1).
    double derivative(double x) const
    {
        x = clamp_to_cube(x);
        return derivative_with(x, eta_, [](const char* what) { throw DomainError(what); });
    }

    /// rho(y) = 1 / psi'(psi^{-1}(y)). Throws RangeError when the density
    /// diverges at the boundary.
    double density(double y) const
    {
        y = clamp_to_cube(y);
        switch (kind_) {
        case TransformKind::Logarithmic:
        case TransformKind::ErrorFunction:
            return derivative_with(y, 1.0 / eta_, [](const char* what) { throw RangeError(what); });
        case TransformKind::Sine:
            if (y == 0.5 || y == -0.5) throw RangeError("sine transformation density diverges at the boundary");
            return 2.0 / (std::numbers::pi * std::sqrt((1.0 - 2.0 * y) * (1.0 + 2.0 * y)));
        case TransformKind::Identity:
            break;
        }
        return 1.0;
    }

    /// Compact text form: "log:4", "erf:2.5", "sine", "id".
    std::string to_string() const
    {
        char buf[64];
        switch (kind_) {
        case TransformKind::Logarithmic:
            std::snprintf(buf, sizeof buf, "log:%.17g", eta_);
            return trim_number(buf);
        case TransformKind::ErrorFunction:
            std::snprintf(buf, sizeof buf, "erf:%.17g", eta_);
            return trim_number(buf);
        case TransformKind::Sine:
            return "sine";
        case TransformKind::Identity:
            break;
        }
        return "id";
    }

    friend bool operator==(const TransformSpec&, const TransformSpec&) = default;

private:
    static double clamp_to_cube(double x)
    {
        if (std::isnan(x) || x < -0.5 - kBoundaryTolerance || x > 0.5 + kBoundaryTolerance)
            throw DomainError("argument outside [-1/2, 1/2]");
        if (x < -0.5) return -0.5;
        if (x > 0.5) return 0.5;
        return x;
    }

    // 0.5 * ((1+2x)^eta - (1-2x)^eta) / ((1+2x)^eta + (1-2x)^eta)
    //   = 0.5 * tanh(eta * atanh(2x)).
    static double log_forward(double x, double eta) { return 0.5 * std::tanh(eta * std::atanh(2.0 * x)); }

    static double erf_forward(double x, double eta) { return 0.5 * std::erf(eta * erf_inv(2.0 * x)); }

    template <class OnInfinite>
    double derivative_with(double x, double eta, OnInfinite&& on_infinite) const
    {
        const bool boundary = (x == 0.5 || x == -0.5);
        switch (kind_) {
        case TransformKind::Logarithmic:
        case TransformKind::ErrorFunction:
            if (boundary) {
                if (eta > 1.0) return 0.0;
                if (eta == 1.0) return 1.0;
                on_infinite("derivative diverges at the boundary for eta < 1");
            }
            if (kind_ == TransformKind::Logarithmic) {
                // 4 eta (1-4x^2)^(eta-1) / ((1+2x)^eta + (1-2x)^eta)^2
                //   = eta / ((1-4x^2) cosh^2(eta atanh 2x)).
                const double t = std::fabs(eta * std::atanh(2.0 * x));
                const double e = std::exp(-2.0 * t);
                const double sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
                return eta * sech2 / ((1.0 - 2.0 * x) * (1.0 + 2.0 * x));
            } else {
                const double u = erf_inv(2.0 * x);
                return eta * std::exp((1.0 - eta * eta) * u * u);
            }
        case TransformKind::Sine:
            if (boundary) return 0.0;
            return 0.5 * std::numbers::pi * std::cos(std::numbers::pi * x);
        case TransformKind::Identity:
            break;
        }
        return 1.0;
    }

    static std::string trim_number(const char* s)
    {
        // %.17g may print representation noise; prefer the shortest form that
        // parses back to the same value.
        std::string full(s);
        const auto colon = full.find(':');
        const double v = std::strtod(full.c_str() + colon + 1, nullptr);
        for (int prec = 1; prec <= 17; ++prec) {
            char buf[48];
            std::snprintf(buf, sizeof buf, "%.*g", prec, v);
            if (std::strtod(buf, nullptr) == v) return full.substr(0, colon + 1) + buf;
        }
        return full;
    }

    TransformKind kind_ = TransformKind::Identity;
    double eta_ = 1.0;
};

/// Exclusive lower bound on eta for the logarithmic (and error function)
/// family so that the periodized function lies in H^m(T): use eta > 2m + 1.
constexpr double min_eta_for_smoothness(unsigned m) noexcept { return 2.0 * m + 1.0; }

/// Coordinatewise product transformation.
class ProductTransform {
public:
    ProductTransform() = default;
    explicit ProductTransform(std::vector<TransformSpec> components) : components_(std::move(components))
    {
        if (components_.empty()) throw DimensionMismatch("product transformation needs at least one component");
    }
    ProductTransform(std::size_t dim, const TransformSpec& t) : ProductTransform(std::vector<TransformSpec>(dim, t)) {}

    std::size_t dim() const noexcept { return components_.size(); }
    const TransformSpec& operator[](std::size_t k) const { return components_[k]; }
    const std::vector<TransformSpec>& components() const noexcept { return components_; }

    void forward(std::span<const double> x, std::span<double> y) const
    {
        check(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) y[k] = components_[k].forward(x[k]);
    }

    void inverse(std::span<const double> y, std::span<double> x) const
    {
        check(y.size());
        for (std::size_t k = 0; k < y.size(); ++k) x[k] = components_[k].inverse(y[k]);
    }

    /// prod_k psi_k'(x_k)
    double jacobian(std::span<const double> x) const
    {
        check(x.size());
        double j = 1.0;
        for (std::size_t k = 0; k < x.size(); ++k) j *= components_[k].derivative(x[k]);
        return j;
    }

    /// prod_k rho_k(y_k)
    double density(std::span<const double> y) const
    {
        check(y.size());
        double r = 1.0;
        for (std::size_t k = 0; k < y.size(); ++k) r *= components_[k].density(y[k]);
        return r;
    }

    std::string to_string() const
    {
        std::string s;
        for (std::size_t k = 0; k < components_.size(); ++k) {
            if (k) s += ',';
            s += components_[k].to_string();
        }
        return s;
    }

    friend bool operator==(const ProductTransform&, const ProductTransform&) = default;

private:
    void check(std::size_t n) const
    {
        if (n != components_.size())
            throw DimensionMismatch("point dimension " + std::to_string(n) + " does not match transformation dimension " +
                                    std::to_string(components_.size()));
    }

    std::vector<TransformSpec> components_;
};

/// Product weight omega(y) = prod_k omega_k(y_k). With no components
/// supplied it is the constant weight 1.
class WeightSpec {
public:
    using Component = std::function<double(double)>;

    WeightSpec() = default;
    static WeightSpec constant() { return {}; }
    static WeightSpec product(std::vector<Component> components)
    {
        WeightSpec w;
        w.components_ = std::move(components);
        return w;
    }

    bool is_constant() const noexcept { return components_.empty(); }

    double component(std::size_t k, double y) const
    {
        if (components_.empty()) return 1.0;
        return components_.at(k)(y);
    }

    double operator()(std::span<const double> y) const
    {
        double w = 1.0;
        if (components_.empty()) return w;
        if (y.size() != components_.size()) throw DimensionMismatch("weight dimension mismatch");
        for (std::size_t k = 0; k < y.size(); ++k) w *= components_[k](y[k]);
        return w;
    }

private:
    std::vector<Component> components_;
};

/// Functions on the cube [-1/2,1/2]^d.
using CubeFunction = std::function<std::complex<double>(std::span<const double>)>;

/// f(x) = h(psi(x)) * prod_k sqrt(omega_k(psi_k(x_k)) psi_k'(x_k)), evaluated
/// entirely in x-space so that nodes with psi' = 0 give exactly 0.
template <class F>
std::complex<double> periodized_sample(const F& h, const WeightSpec& w, const ProductTransform& P,
                                       std::span<const double> x)
{
    const std::size_t d = P.dim();
    if (x.size() != d) throw DimensionMismatch("sample point dimension does not match the transformation");
    double y_small[8];
    std::vector<double> y_large;
    std::span<double> y;
    if (d <= 8) {
        y = std::span<double>(y_small, d);
    } else {
        y_large.resize(d);
        y = y_large;
    }
    double scale = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
        y[k] = P[k].forward(x[k]);
        scale *= w.component(k, y[k]) * P[k].derivative(x[k]);
    }
    if (scale == 0.0) return {0.0, 0.0};
    return std::complex<double>(h(std::span<const double>(y.data(), d))) * std::sqrt(scale);
}

/// Numerical check that the derivatives of sqrt(psi') up to order m vanish at
/// the boundary: central differences at +-(1/2 - delta), delta in {1e-2, 1e-3,
/// 1e-4}, must shrink monotonically and end below the magnitude at 0.4.
/// A heuristic; min_eta_for_smoothness is the rule for the shipped families.
inline bool boundary_vanishing_check(const TransformSpec& t, unsigned m)
{
    auto g = [&](double x) { return std::sqrt(t.derivative(x)); };
    auto nth_derivative = [&](double x, unsigned n, double h) {
        // sum_i (-1)^i C(n,i) g(x + (n/2 - i) h) / h^n
        double sum = 0.0;
        double binom = 1.0;
        for (unsigned i = 0; i <= n; ++i) {
            const double xi = x + (0.5 * n - i) * h;
            sum += ((i % 2) ? -binom : binom) * g(xi);
            binom = binom * (n - i) / (i + 1);
        }
        return sum / std::pow(h, static_cast<double>(n));
    };

    try {
        constexpr double deltas[] = {1e-2, 1e-3, 1e-4};
        for (unsigned n = 0; n <= m; ++n) {
            for (double side : {1.0, -1.0}) {
                const double ref_h = 1e-3;
                const double reference = std::fabs(nth_derivative(side * 0.4, n, ref_h));
                double prev = std::numeric_limits<double>::infinity();
                for (double delta : deltas) {
                    const double x = side * (0.5 - delta);
                    const double h = n == 0 ? delta : delta / (n + 1);
                    const double v = std::fabs(nth_derivative(x, n, h));
                    if (!std::isfinite(v)) return false;
                    if (!(v < prev)) return false;
                    prev = v;
                }
                if (!(prev < reference)) return false;
            }
        }
    } catch (const Error&) {
        return false;
    }
    return true;
}

// --- text forms ------------------------------------------------------------

inline TransformSpec parse_transform(std::string_view s)
{
    auto trim = [](std::string_view v) {
        while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
        while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
        return v;
    };
    s = trim(s);
    if (s == "sine" || s == "sin") return TransformSpec::sine();
    if (s == "id" || s == "identity") return TransformSpec::identity();
    const auto colon = s.find(':');
    if (colon == std::string_view::npos) throw ParseError("unknown transformation '" + std::string(s) + "'");
    const auto name = s.substr(0, colon);
    const std::string value(trim(s.substr(colon + 1)));
    char* end = nullptr;
    const double eta = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size())
        throw ParseError("transformation parameter '" + value + "' is not a number");
    try {
        if (name == "log") return TransformSpec::logarithmic(eta);
        if (name == "erf") return TransformSpec::error_function(eta);
    } catch (const DomainError& e) {
        throw ParseError(std::string(s) + ": " + e.what());
    }
    throw ParseError("unknown transformation family '" + std::string(name) + "'");
}

/// Comma separated list, each item optionally replicated with "^k"
/// ("log:4^5"). When `dim` is given and the list has a single component it is
/// replicated to that dimension.
inline ProductTransform parse_product_transform(std::string_view s, std::optional<std::size_t> dim = std::nullopt)
{
    std::vector<TransformSpec> parts;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto comma = s.find(',', start);
        if (comma == std::string_view::npos) comma = s.size();
        auto item = s.substr(start, comma - start);
        std::size_t reps = 1;
        if (auto caret = item.find('^'); caret != std::string_view::npos) {
            const std::string count(item.substr(caret + 1));
            char* end = nullptr;
            const long v = std::strtol(count.c_str(), &end, 10);
            if (count.empty() || end != count.c_str() + count.size() || v < 1)
                throw ParseError("bad replication count in '" + std::string(item) + "'");
            reps = static_cast<std::size_t>(v);
            item = item.substr(0, caret);
        }
        const auto t = parse_transform(item);
        parts.insert(parts.end(), reps, t);
        start = comma + 1;
    }
    if (dim) {
        if (parts.size() == 1 && *dim > 1) parts.assign(*dim, parts.front());
        if (parts.size() != *dim)
            throw ParseError("transformation '" + std::string(s) + "' has " + std::to_string(parts.size()) +
                             " components, expected " + std::to_string(*dim));
    }
    return ProductTransform(std::move(parts));
}

} // namespace perilat
