#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "eur/errors.hpp"
#include "eur/povm.hpp"

namespace eur {

/// alpha = infinity is a distinguished order (min-entropy), not a large float.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Orders closer than this to 1 use the Shannon branch.
inline constexpr double kShannonWindow = 1e-8;

inline bool is_infinite(double alpha) { return std::isinf(alpha) && alpha > 0; }
inline bool is_shannon(double alpha) { return std::fabs(alpha - 1.0) < kShannonWindow; }

namespace detail {

inline void require_positive_order(double alpha) {
    if (!(alpha > 0.0)) throw OutOfRange("entropic order must be > 0");
}

inline double shannon(std::span<const double> p) {
    double h = 0.0;
    for (double x : p)
        if (x > 0.0) h -= x * std::log(x);
    return h;
}

inline double max_of(std::span<const double> p) {
    return *std::max_element(p.begin(), p.end());
}

/// ln sum_{p_i > 0} p_i^alpha, stable for large alpha.
inline double log_power_sum(std::span<const double> p, double alpha) {
    const double pmax = max_of(p);
    const double lmax = std::log(pmax);
    double acc = 0.0;
    for (double x : p)
        if (x > 0.0) acc += std::exp(alpha * (std::log(x) - lmax));
    return alpha * lmax + std::log(acc);
}

/// sum_{p_i > 0} p_i (p_i^{alpha-1} - 1); equals sum p^alpha - 1 for normalized p
/// without the cancellation near alpha = 1.
inline double power_sum_minus_one(std::span<const double> p, double alpha) {
    double acc = 0.0;
    for (double x : p)
        if (x > 0.0) acc += x * std::expm1((alpha - 1.0) * std::log(x));
    return acc;
}

}  // namespace detail

inline double renyi(std::span<const double> p, double alpha) {
    detail::require_positive_order(alpha);
    if (is_infinite(alpha)) return -std::log(detail::max_of(p));
    if (is_shannon(alpha)) return detail::shannon(p);
    if (std::fabs(alpha - 1.0) < 0.5)
        return std::log1p(detail::power_sum_minus_one(p, alpha)) / (1.0 - alpha);
    return detail::log_power_sum(p, alpha) / (1.0 - alpha);
}

inline double renyi(const ProbabilityVector& p, double alpha) { return renyi(p.values(), alpha); }

inline double shannon(std::span<const double> p) { return detail::shannon(p); }
inline double shannon(const ProbabilityVector& p) { return detail::shannon(p.values()); }

inline double tsallis(std::span<const double> p, double alpha) {
    detail::require_positive_order(alpha);
    if (is_infinite(alpha)) throw OutOfRange("Tsallis entropy needs a finite order");
    if (is_shannon(alpha)) return detail::shannon(p);
    if (std::fabs(alpha - 1.0) < 0.25)
        return detail::power_sum_minus_one(p, alpha) / (1.0 - alpha);
    double acc = 0.0;
    for (double x : p)
        if (x > 0.0) acc += std::pow(x, alpha);
    return (acc - 1.0) / (1.0 - alpha);
}

inline double tsallis(const ProbabilityVector& p, double alpha) {
    return tsallis(p.values(), alpha);
}

/// ln_alpha(x) = (x^{1-alpha} - 1) / (1 - alpha); ln x at alpha = 1.
inline double alpha_log(double x, double alpha) {
    if (!(x > 0.0)) throw NonPositiveArgument("alpha-logarithm needs x > 0");
    detail::require_positive_order(alpha);
    if (is_infinite(alpha)) return x >= 1.0 ? 0.0 : -kInfinity;
    if (is_shannon(alpha)) return std::log(x);
    return std::expm1((1.0 - alpha) * std::log(x)) / (1.0 - alpha);
}

/// (sum p_i^beta)^{1/beta}; max p_i at beta = infinity.
inline double pnorm(std::span<const double> p, double beta) {
    detail::require_positive_order(beta);
    if (is_infinite(beta)) return detail::max_of(p);
    return std::exp(detail::log_power_sum(p, beta) / beta);
}

inline double pnorm(const ProbabilityVector& p, double beta) { return pnorm(p.values(), beta); }

/// Detector-inefficiency model: every recorded outcome is scaled by eta and a
/// no-click outcome carries 1 - eta.
struct ExtendedDistribution {
    std::vector<double> detected;
    double no_click = 0.0;
    double eta = 1.0;

    /// Detected entries followed by the no-click entry.
    [[nodiscard]] std::vector<double> all() const {
        std::vector<double> out(detected);
        out.push_back(no_click);
        return out;
    }
};

inline ExtendedDistribution distort(std::span<const double> p, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw EtaOutOfRange("efficiency must lie in [0, 1]");
    ExtendedDistribution out;
    out.eta = eta;
    out.no_click = 1.0 - eta;
    out.detected.reserve(p.size());
    for (double x : p) out.detected.push_back(eta * x);
    return out;
}

inline ExtendedDistribution distort(const ProbabilityVector& p, double eta) {
    return distort(p.values(), eta);
}

/// h_alpha(eta) = -eta^alpha ln_alpha(eta) - (1-eta)^alpha ln_alpha(1-eta).
inline double binary_tsallis(double eta, double alpha) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw EtaOutOfRange("efficiency must lie in [0, 1]");
    detail::require_positive_order(alpha);
    if (is_infinite(alpha)) throw OutOfRange("binary Tsallis entropy needs a finite order");
    double h = 0.0;
    for (double x : {eta, 1.0 - eta}) {
        if (x > 0.0) h -= std::pow(x, alpha) * alpha_log(x, alpha);
    }
    return h;
}

}  // namespace eur
