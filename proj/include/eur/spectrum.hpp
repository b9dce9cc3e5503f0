#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eur/errors.hpp"

namespace eur {

/// Non-degenerate discrete energy spectrum with the ground level pinned at 0.
/// Energies are in inverse time units (hbar = 1).
class EnergySpectrum {
public:
    explicit EnergySpectrum(std::vector<double> levels) : levels_(std::move(levels)) {
        if (levels_.size() < 2)
            throw InvalidSpectrum("need at least two levels");
        if (levels_.front() != 0.0)
            throw InvalidSpectrum("lowest level must be exactly 0");
        for (std::size_t n = 1; n < levels_.size(); ++n) {
            if (!std::isfinite(levels_[n]) || !(levels_[n] > levels_[n - 1]))
                throw InvalidSpectrum("levels must be finite and strictly increasing");
        }
    }

    /// Number of levels minus one.
    [[nodiscard]] int d() const { return static_cast<int>(levels_.size()) - 1; }
    [[nodiscard]] int dimension() const { return static_cast<int>(levels_.size()); }
    [[nodiscard]] double level(int n) const { return levels_.at(static_cast<std::size_t>(n)); }
    [[nodiscard]] const std::vector<double>& levels() const { return levels_; }

    [[nodiscard]] EnergySpectrum scaled(double lambda) const {
        if (!(lambda > 0.0))
            throw InvalidSpectrum("scale factor must be positive");
        std::vector<double> out(levels_);
        for (double& e : out) e *= lambda;
        return EnergySpectrum(std::move(out));
    }

private:
    std::vector<double> levels_;
};

struct Fraction {
    std::int64_t numerator = 0;
    std::int64_t denominator = 1;
};

namespace detail {

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out))
        throw ApproximationFailure("integer overflow in rational structure");
    return out;
}

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t out = 0;
    if (__builtin_add_overflow(a, b, &out))
        throw ApproximationFailure("integer overflow in rational structure");
    return out;
}

inline std::int64_t checked_lcm(std::int64_t a, std::int64_t b) {
    return checked_mul(a / std::gcd(a, b), b);
}

}  // namespace detail

/// Walks the continued-fraction convergents of x > 0 and returns the first one
/// whose relative error is within `rel_tol`, or nullopt once the denominator
/// would exceed `max_denominator`.
inline std::optional<Fraction> rational_approximation(double x, std::int64_t max_denominator,
                                                      double rel_tol) {
    if (!(x > 0.0) || !std::isfinite(x)) return std::nullopt;
    const long double target = x;
    long double y = target;
    // (h, k) holds the latest convergent, (h_prev, k_prev) the one before;
    // seeded with h_{-1}/k_{-1} = 1/0 and h_{-2}/k_{-2} = 0/1.
    std::int64_t h_prev = 0, h = 1;
    std::int64_t k_prev = 1, k = 0;
    for (int iter = 0; iter < 128; ++iter) {
        const long double fl = std::floor(y);
        if (fl > static_cast<long double>(INT64_MAX) / 2) return std::nullopt;
        const auto a = static_cast<std::int64_t>(fl);
        std::int64_t h_next = 0, k_next = 0, tmp = 0;
        if (__builtin_mul_overflow(a, h, &tmp) || __builtin_add_overflow(tmp, h_prev, &h_next))
            return std::nullopt;
        if (__builtin_mul_overflow(a, k, &tmp) || __builtin_add_overflow(tmp, k_prev, &k_next))
            return std::nullopt;
        if (k_next > max_denominator) return std::nullopt;
        h_prev = h;
        k_prev = k;
        h = h_next;
        k = k_next;
        const long double approx = static_cast<long double>(h) / static_cast<long double>(k);
        if (std::fabs(approx - target) <= static_cast<long double>(rel_tol) * target)
            return Fraction{h, k};
        const long double frac = y - fl;
        if (frac <= 0.0L) return std::nullopt;
        y = 1.0L / frac;
    }
    return std::nullopt;
}

/// Integer structure of a (near-)commensurate spectrum: levels are
/// 2*pi*r_n/T_c up to `residual` relative error.
struct RationalStructure {
    std::vector<double> levels;           // input energies, levels[0] = 0
    std::vector<std::int64_t> r;          // r[0] = 0, strictly increasing
    std::vector<Fraction> ratios;         // eps_n/eps_1 = B_n/A_n, ratios[0] = 0/1
    double characteristic_time = 0.0;     // T_c
    double residual = 0.0;                // max relative level error
    std::int64_t max_denominator = 0;     // policy metadata
    double tolerance = 0.0;               // policy metadata

    [[nodiscard]] int d() const { return static_cast<int>(r.size()) - 1; }
    [[nodiscard]] int dimension() const { return static_cast<int>(r.size()); }
    [[nodiscard]] std::int64_t max_r() const { return r.back(); }
    [[nodiscard]] double reconstructed_level(int n) const {
        return 2.0 * std::numbers::pi * static_cast<double>(r.at(static_cast<std::size_t>(n))) /
               characteristic_time;
    }
};

inline constexpr std::int64_t kDefaultMaxDenominator = 1'000'000;
inline constexpr double kDefaultRationalTolerance = 1e-9;

inline RationalStructure reduce_to_integers(const EnergySpectrum& spectrum,
                                            std::int64_t max_denominator = kDefaultMaxDenominator,
                                            double tolerance = kDefaultRationalTolerance) {
    if (max_denominator < 1) throw OutOfRange("max_denominator must be >= 1");
    if (!(tolerance > 0.0)) throw OutOfRange("tolerance must be > 0");

    const auto& lv = spectrum.levels();
    const double e1 = lv[1];
    RationalStructure out;
    out.levels = lv;
    out.max_denominator = max_denominator;
    out.tolerance = tolerance;
    out.ratios.resize(lv.size());
    out.ratios[0] = Fraction{0, 1};
    out.ratios[1] = Fraction{1, 1};

    std::int64_t r1 = 1;
    for (std::size_t n = 2; n < lv.size(); ++n) {
        const double x = lv[n] / e1;
        auto f = rational_approximation(x, max_denominator, tolerance);
        if (!f)
            throw ApproximationFailure("ratio eps_" + std::to_string(n) + "/eps_1 = " +
                                       std::to_string(x) + " has no rational approximation with " +
                                       "denominator <= " + std::to_string(max_denominator));
        out.ratios[n] = *f;
        r1 = detail::checked_lcm(r1, f->denominator);
    }

    out.r.resize(lv.size());
    out.r[0] = 0;
    out.r[1] = r1;
    for (std::size_t n = 2; n < lv.size(); ++n) {
        const Fraction& f = out.ratios[n];
        out.r[n] = detail::checked_mul(r1 / f.denominator, f.numerator);
    }
    for (std::size_t n = 1; n < out.r.size(); ++n) {
        if (out.r[n] <= out.r[n - 1])
            throw ApproximationFailure("rational approximation merged distinct levels");
    }

    out.characteristic_time = 2.0 * std::numbers::pi * static_cast<double>(r1) / e1;
    double residual = 0.0;
    for (int n = 1; n <= out.d(); ++n) {
        const double rel = std::fabs(lv[static_cast<std::size_t>(n)] - out.reconstructed_level(n)) /
                           lv[static_cast<std::size_t>(n)];
        residual = std::max(residual, rel);
    }
    out.residual = residual;
    return out;
}

/// Smallest s with s + 1 > max r_n and s >= d.
inline std::int64_t min_valid_s(const RationalStructure& structure) {
    return std::max<std::int64_t>(structure.d(), structure.max_r());
}

/// True iff s >= d and no non-zero difference r_l - r_n is a multiple of s + 1.
inline bool validate_s(const RationalStructure& structure, std::int64_t s) {
    if (s < structure.d()) return false;
    const std::int64_t period = s + 1;
    const auto& r = structure.r;
    for (std::size_t a = 0; a < r.size(); ++a) {
        for (std::size_t b = a + 1; b < r.size(); ++b) {
            if ((r[b] - r[a]) % period == 0) return false;
        }
    }
    return true;
}

/// Named presets: "qubit", "equidistant:<d>", "three-level-3-2".
inline EnergySpectrum preset_spectrum(std::string_view name) {
    if (name == "qubit") return EnergySpectrum({0.0, 1.0});
    if (name == "three-level-3-2") return EnergySpectrum({0.0, 1.0, 1.5});
    constexpr std::string_view eq = "equidistant:";
    if (name.starts_with(eq)) {
        const std::string tail(name.substr(eq.size()));
        std::size_t used = 0;
        int d = 0;
        try {
            d = std::stoi(tail, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tail.size() || tail.empty() || d < 1)
            throw InvalidSpectrum("bad equidistant preset '" + std::string(name) + "'");
        std::vector<double> levels(static_cast<std::size_t>(d) + 1);
        std::iota(levels.begin(), levels.end(), 0.0);
        return EnergySpectrum(std::move(levels));
    }
    throw InvalidSpectrum("unknown preset '" + std::string(name) + "'");
}

}  // namespace eur
