#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eur/entropy.hpp"
#include "eur/errors.hpp"
#include "eur/povm.hpp"
#include "eur/states.hpp"

namespace eur {

enum class RelationId {
    // Maassen-Uffink type, state dependent and state independent
    RENGR,
    TSAGR,
    RENFR,
    TSAFR,
    SRENFR,
    VGADF,
    // detector inefficiency
    ETAUN,
    MUHETA,
    // mutually unbiased bases in the extended space
    MUB_H,
    MUB_R,
    MUB_MIN,
    MUB_MIN_PURE,
    // Landau-Pollak type
    LP_SUM,
    LP_MIN,
    // continuous time and binning
    CTREN,
    CRBIN,
    CTBIN,
    TWIPQ_P,
    TWIPQ_Q,
    TWIP_P,
    TWIP_W,
    DWIP_P,
    DWIP_Q,
    UBWB,
};

inline constexpr std::array<std::string_view, 24> kRelationNames = {
    "RENGR",   "TSAGR",  "RENFR",  "TSAFR",   "SRENFR",  "VGADF",
    "ETAUN",   "MUHETA", "MUB_H",  "MUB_R",   "MUB_MIN", "MUB_MIN_PURE",
    "LP_SUM",  "LP_MIN", "CTREN",  "CRBIN",   "CTBIN",   "TWIPQ_P",
    "TWIPQ_Q", "TWIP_P", "TWIP_W", "DWIP_P",  "DWIP_Q",  "UBWB",
};

inline std::string_view to_string(RelationId id) {
    return kRelationNames.at(static_cast<std::size_t>(id));
}

inline std::optional<RelationId> relation_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kRelationNames.size(); ++i)
        if (kRelationNames[i] == name) return static_cast<RelationId>(i);
    return std::nullopt;
}

/// How lhs and rhs compare when the relation holds.
enum class Orientation { LowerBound, UpperBound, Identity };

inline constexpr double kBoundTolerance = 1e-9;
inline constexpr double kZeroProbability = 1e-12;

struct BoundParameters {
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double beta = std::numeric_limits<double>::quiet_NaN();
    double mu = std::numeric_limits<double>::quiet_NaN();
    double eta = 1.0;  // min of the two efficiencies
    double eta_energy = 1.0;
    double eta_complement = 1.0;
    std::optional<std::int64_t> s;
    int d = 0;
    double purity = std::numeric_limits<double>::quiet_NaN();
};

/// One certified inequality. slack >= 0 always means "holds": it is
/// lhs - rhs for lower bounds, rhs - lhs for upper bounds and -|lhs - rhs|
/// for identities.
struct BoundReport {
    RelationId relation = RelationId::RENGR;
    Orientation orientation = Orientation::LowerBound;
    bool applicable = true;
    double lhs = std::numeric_limits<double>::quiet_NaN();
    double rhs = std::numeric_limits<double>::quiet_NaN();
    double slack = std::numeric_limits<double>::quiet_NaN();
    double tolerance = kBoundTolerance;
    bool holds = false;
    BoundParameters params;
    std::string note;
};

inline BoundReport make_report(RelationId id, Orientation orientation, double lhs, double rhs,
                               const BoundParameters& params, double tolerance = kBoundTolerance) {
    BoundReport r;
    r.relation = id;
    r.orientation = orientation;
    r.lhs = lhs;
    r.rhs = rhs;
    r.tolerance = tolerance;
    r.params = params;
    switch (orientation) {
        case Orientation::LowerBound: r.slack = lhs - rhs; break;
        case Orientation::UpperBound: r.slack = rhs - lhs; break;
        case Orientation::Identity: r.slack = -std::fabs(lhs - rhs); break;
    }
    r.holds = r.slack >= -tolerance;
    return r;
}

inline BoundReport not_applicable(RelationId id, const BoundParameters& params, std::string why) {
    BoundReport r;
    r.relation = id;
    r.applicable = false;
    r.holds = true;
    r.params = params;
    r.note = std::move(why);
    return r;
}

/// beta with 1/alpha + 1/beta = 2.
inline double conjugate_beta(double alpha) {
    if (!(alpha > 0.5)) throw OutOfRange("conjugate order needs alpha > 1/2");
    if (is_infinite(alpha)) return 0.5;
    return alpha / (2.0 * alpha - 1.0);
}

/// State-dependent overlap max |<e_n|t_m><t_m|rho|e_n>| / sqrt(p_n q_m) over
/// pairs with p_n, q_m > 1e-12.
inline double overlap_g(const ComplementMeasurement& measurement, const DensityMatrix& state) {
    const ProbabilityVector p = energy_probabilities(state);
    const ProbabilityVector q = complement_probabilities(measurement, state);
    const ComplexMatrix& k = measurement.kets();
    const ComplexMatrix rk = state.matrix() * k;  // column m is rho|theta_m>
    double best = -1.0;
    for (Eigen::Index m = 0; m < k.cols(); ++m) {
        const double qm = q[static_cast<std::size_t>(m)];
        if (!(qm > kZeroProbability)) continue;
        for (Eigen::Index n = 0; n < k.rows(); ++n) {
            const double pn = p[static_cast<std::size_t>(n)];
            if (!(pn > kZeroProbability)) continue;
            const double value = std::abs(k(n, m)) * std::abs(rk(n, m)) / std::sqrt(pn * qm);
            best = std::max(best, value);
        }
    }
    if (best < 0.0) throw NoAdmissiblePair("every (n, m) pair has a vanishing probability");
    return best;
}

/// max |<e_n|theta_m>|; equals (s+1)^{-1/2} for a valid construction.
inline double overlap_f(const ComplementMeasurement& measurement) {
    return measurement.kets().cwiseAbs().maxCoeff();
}

namespace detail {

struct Statistics {
    ProbabilityVector p;
    ProbabilityVector q;
    double purity = 0.0;
    std::int64_t s = 0;
    int d = 0;
};

inline Statistics statistics(const ComplementMeasurement& measurement, const DensityMatrix& state) {
    return Statistics{energy_probabilities(state), complement_probabilities(measurement, state),
                      eur::purity(state), measurement.s(), measurement.d()};
}

inline BoundParameters base_params(const Statistics& st) {
    BoundParameters bp;
    bp.s = st.s;
    bp.d = st.d;
    bp.purity = st.purity;
    return bp;
}

inline BoundParameters conjugate_params(const Statistics& st, double alpha) {
    BoundParameters bp = base_params(st);
    bp.alpha = alpha;
    if (alpha > 0.5) {
        bp.beta = conjugate_beta(alpha);
        bp.mu = std::max(bp.alpha, bp.beta);
    }
    return bp;
}

inline bool conjugate_admissible(double alpha) { return alpha > 0.5; }

/// Tsallis forms need both orders and mu finite.
inline bool tsallis_admissible(double alpha) { return alpha > 0.5 && !is_infinite(alpha); }

}  // namespace detail

/// Report pair for R_a(E) + R_b(T) >= -2 ln g and H_a(E) + H_b(T) >= ln_mu(g^-2).
inline std::pair<BoundReport, BoundReport> check_maassen_uffink(
    const ComplementMeasurement& measurement, const DensityMatrix& state, double alpha) {
    const auto st = detail::statistics(measurement, state);
    const BoundParameters bp = detail::conjugate_params(st, alpha);
    if (!detail::conjugate_admissible(alpha))
        return {not_applicable(RelationId::RENGR, bp, "needs alpha > 1/2"),
                not_applicable(RelationId::TSAGR, bp, "needs alpha > 1/2")};
    const double g = overlap_g(measurement, state);
    BoundReport renyi_report =
        make_report(RelationId::RENGR, Orientation::LowerBound,
                    renyi(st.p, bp.alpha) + renyi(st.q, bp.beta), -2.0 * std::log(g), bp);
    if (!detail::tsallis_admissible(alpha))
        return {renyi_report, not_applicable(RelationId::TSAGR, bp, "needs finite alpha")};
    BoundReport tsallis_report =
        make_report(RelationId::TSAGR, Orientation::LowerBound,
                    tsallis(st.p, bp.alpha) + tsallis(st.q, bp.beta),
                    alpha_log(1.0 / (g * g), bp.mu), bp);
    return {renyi_report, tsallis_report};
}

/// State-independent pair with right-hand sides ln(s+1) and ln_mu(s+1).
inline std::pair<BoundReport, BoundReport> check_state_independent(
    const ComplementMeasurement& measurement, const DensityMatrix& state, double alpha) {
    const auto st = detail::statistics(measurement, state);
    const BoundParameters bp = detail::conjugate_params(st, alpha);
    if (!detail::conjugate_admissible(alpha))
        return {not_applicable(RelationId::RENFR, bp, "needs alpha > 1/2"),
                not_applicable(RelationId::TSAFR, bp, "needs alpha > 1/2")};
    const double outcomes = static_cast<double>(st.s + 1);
    BoundReport renyi_report =
        make_report(RelationId::RENFR, Orientation::LowerBound,
                    renyi(st.p, bp.alpha) + renyi(st.q, bp.beta), std::log(outcomes), bp);
    if (!detail::tsallis_admissible(alpha))
        return {renyi_report, not_applicable(RelationId::TSAFR, bp, "needs finite alpha")};
    BoundReport tsallis_report =
        make_report(RelationId::TSAFR, Orientation::LowerBound,
                    tsallis(st.p, bp.alpha) + tsallis(st.q, bp.beta), alpha_log(outcomes, bp.mu),
                    bp);
    return {renyi_report, tsallis_report};
}

/// Gamma = ln((s+1)/(d+1)), the floor on every Renyi entropy of the complement.
inline double gamma_floor(const ComplementMeasurement& measurement) {
    return std::log(static_cast<double>(measurement.s() + 1) /
                    static_cast<double>(measurement.d() + 1));
}

/// R_a(E) + R_b(T) - Gamma >= ln(d+1).
inline BoundReport check_shifted(const ComplementMeasurement& measurement,
                                 const DensityMatrix& state, double alpha) {
    const auto st = detail::statistics(measurement, state);
    const BoundParameters bp = detail::conjugate_params(st, alpha);
    if (!detail::conjugate_admissible(alpha))
        return not_applicable(RelationId::SRENFR, bp, "needs alpha > 1/2");
    const double lhs = renyi(st.p, bp.alpha) + renyi(st.q, bp.beta) - gamma_floor(measurement);
    return make_report(RelationId::SRENFR, Orientation::LowerBound, lhs,
                       std::log(static_cast<double>(st.d + 1)), bp);
}

/// R_b(T) >= Gamma with b conjugate to alpha.
inline BoundReport check_gamma_floor(const ComplementMeasurement& measurement,
                                     const DensityMatrix& state, double alpha) {
    const auto st = detail::statistics(measurement, state);
    const BoundParameters bp = detail::conjugate_params(st, alpha);
    if (!detail::conjugate_admissible(alpha))
        return not_applicable(RelationId::VGADF, bp, "needs alpha > 1/2");
    return make_report(RelationId::VGADF, Orientation::LowerBound, renyi(st.q, bp.beta),
                       gamma_floor(measurement), bp);
}

namespace detail {

/// 2(s+1) / ((s+1) tr(rho^2) + 1)
inline double collision_argument(std::int64_t s, double purity) {
    const double n = static_cast<double>(s + 1);
    return 2.0 * n / (n * purity + 1.0);
}

/// sqrt(2)(s+1) / (sqrt(s(s+1) tr(rho^2) - s) + sqrt(2))
inline double max_probability_argument(std::int64_t s, double purity) {
    const double sd = static_cast<double>(s);
    const double inner = std::max(0.0, sd * (sd + 1.0) * purity - sd);
    return std::numbers::sqrt2 * (sd + 1.0) / (std::sqrt(inner) + std::numbers::sqrt2);
}

}  // namespace detail

/// Right-hand side of the Tsallis MUB relation, 2 ln_a(2(s+1)/((s+1)P + 1)).
inline double mub_tsallis_rhs(std::int64_t s, double purity, double alpha) {
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw AlphaOutOfApplicableRange("Tsallis MUB bound needs alpha in (0, 2]");
    return 2.0 * alpha_log(detail::collision_argument(s, purity), alpha);
}

/// Right-hand side of the Renyi MUB relation for alpha >= 2 (alpha = inf
/// gives the min-entropy bound).
inline double mub_renyi_rhs(std::int64_t s, double purity, double alpha) {
    if (!(alpha >= 2.0)) throw AlphaOutOfApplicableRange("Renyi MUB bound needs alpha >= 2");
    const double lm = std::log(detail::max_probability_argument(s, purity));
    if (is_infinite(alpha)) return 2.0 * lm;
    return 2.0 / (alpha - 1.0) * std::log(detail::collision_argument(s, purity)) +
           (2.0 * alpha - 4.0) / (alpha - 1.0) * lm;
}

inline double mub_min_rhs(std::int64_t s, double purity) { return mub_renyi_rhs(s, purity, kInfinity); }

/// Pure-state specialization 2 ln(sqrt(2)(s+1)/(s + sqrt(2))), valid for every state.
inline double mub_min_pure_rhs(std::int64_t s) {
    const double sd = static_cast<double>(s);
    return 2.0 * std::log(std::numbers::sqrt2 * (sd + 1.0) / (sd + std::numbers::sqrt2));
}

/// MUB_H for alpha in (0, 2], MUB_R for alpha >= 2, and the two min-entropy
/// bounds (reported only at alpha = inf, their native order).
inline std::vector<BoundReport> check_mub_bounds(const ComplementMeasurement& measurement,
                                                 const DensityMatrix& state, double alpha) {
    if (!(alpha > 0.0)) throw OutOfRange("entropic order must be > 0");
    const auto st = detail::statistics(measurement, state);
    BoundParameters bp = detail::base_params(st);
    bp.alpha = alpha;
    bp.beta = alpha;
    bp.mu = alpha;
    std::vector<BoundReport> out;
    if (alpha <= 2.0) {
        out.push_back(make_report(RelationId::MUB_H, Orientation::LowerBound,
                                  tsallis(st.p, alpha) + tsallis(st.q, alpha),
                                  mub_tsallis_rhs(st.s, st.purity, alpha), bp));
    } else {
        out.push_back(not_applicable(RelationId::MUB_H, bp, "needs alpha in (0, 2]"));
    }
    if (alpha >= 2.0) {
        out.push_back(make_report(RelationId::MUB_R, Orientation::LowerBound,
                                  renyi(st.p, alpha) + renyi(st.q, alpha),
                                  mub_renyi_rhs(st.s, st.purity, alpha), bp));
    } else {
        out.push_back(not_applicable(RelationId::MUB_R, bp, "needs alpha >= 2"));
    }
    if (is_infinite(alpha)) {
        const double lhs = renyi(st.p, kInfinity) + renyi(st.q, kInfinity);
        out.push_back(make_report(RelationId::MUB_MIN, Orientation::LowerBound, lhs,
                                  mub_min_rhs(st.s, st.purity), bp));
        out.push_back(make_report(RelationId::MUB_MIN_PURE, Orientation::LowerBound, lhs,
                                  mub_min_pure_rhs(st.s), bp));
    } else {
        out.push_back(not_applicable(RelationId::MUB_MIN, bp, "min-entropy relation"));
        out.push_back(not_applicable(RelationId::MUB_MIN_PURE, bp, "min-entropy relation"));
    }
    return out;
}

/// Upsilon = min{(s+1)^{-1/2}, (d+1)/(s+1)}.
inline double upsilon(int d, std::int64_t s) {
    const double n = static_cast<double>(s + 1);
    return std::min(1.0 / std::sqrt(n), static_cast<double>(d + 1) / n);
}

/// max p_n + max q_m <= 1 + Upsilon and R_inf(E) + R_inf(T) >= 2 ln(2/(1+Upsilon)).
inline std::pair<BoundReport, BoundReport> landau_pollak(const ComplementMeasurement& measurement,
                                                          const DensityMatrix& state) {
    const auto st = detail::statistics(measurement, state);
    BoundParameters bp = detail::base_params(st);
    bp.alpha = kInfinity;
    bp.beta = kInfinity;
    bp.mu = kInfinity;
    const double ups = upsilon(st.d, st.s);
    const double pmax = st.p.max();
    const double qmax = st.q.max();
    return {make_report(RelationId::LP_SUM, Orientation::UpperBound, pmax + qmax, 1.0 + ups, bp),
            make_report(RelationId::LP_MIN, Orientation::LowerBound,
                        -std::log(pmax) - std::log(qmax), 2.0 * std::log(2.0 / (1.0 + ups)), bp)};
}

/// Detector-inefficiency relations with eta = min{eta_E, eta_T}. ETAUN is the
/// Shannon form (alpha = 1 only) with the state-dependent right-hand side
/// -2 eta ln g + 2 h_1(eta); MUHETA is the Tsallis MUB form for alpha in (0, 2].
inline std::vector<BoundReport> check_inefficiency(const ComplementMeasurement& measurement,
                                                   const DensityMatrix& state, double eta_energy,
                                                   double eta_complement, double alpha) {
    for (double e : {eta_energy, eta_complement})
        if (!(e >= 0.5 && e <= 1.0)) throw EtaOutOfRange("efficiencies must lie in [1/2, 1]");
    if (!(alpha > 0.0)) throw OutOfRange("entropic order must be > 0");
    const auto st = detail::statistics(measurement, state);
    BoundParameters bp = detail::base_params(st);
    bp.alpha = alpha;
    bp.beta = alpha;
    bp.mu = alpha;
    bp.eta_energy = eta_energy;
    bp.eta_complement = eta_complement;
    bp.eta = std::min(eta_energy, eta_complement);
    const double eta = bp.eta;
    const auto pe = distort(st.p, eta_energy).all();
    const auto qe = distort(st.q, eta_complement).all();

    std::vector<BoundReport> out;
    if (is_shannon(alpha)) {
        const double g = overlap_g(measurement, state);
        out.push_back(make_report(RelationId::ETAUN, Orientation::LowerBound,
                                  shannon(pe) + shannon(qe),
                                  -2.0 * eta * std::log(g) + 2.0 * binary_tsallis(eta, 1.0), bp));
    } else {
        out.push_back(not_applicable(RelationId::ETAUN, bp, "Shannon relation, needs alpha = 1"));
    }
    if (alpha <= 2.0) {
        const double rhs = 2.0 * std::pow(eta, alpha) *
                               alpha_log(detail::collision_argument(st.s, st.purity), alpha) +
                           2.0 * binary_tsallis(eta, alpha);
        out.push_back(make_report(RelationId::MUHETA, Orientation::LowerBound,
                                  tsallis(pe, alpha) + tsallis(qe, alpha), rhs, bp));
    } else {
        out.push_back(not_applicable(RelationId::MUHETA, bp, "needs alpha in (0, 2]"));
    }
    return out;
}

/// Every discrete relation at one order and one efficiency pair, in a fixed
/// order. The order-independent Landau-Pollak pair is included only when
/// `include_order_free` is set.
inline std::vector<BoundReport> check_all_discrete(const ComplementMeasurement& measurement,
                                                   const DensityMatrix& state, double alpha,
                                                   double eta_energy, double eta_complement,
                                                   bool include_order_free) {
    std::vector<BoundReport> out;
    auto [rengr, tsagr] = check_maassen_uffink(measurement, state, alpha);
    out.push_back(std::move(rengr));
    out.push_back(std::move(tsagr));
    auto [renfr, tsafr] = check_state_independent(measurement, state, alpha);
    out.push_back(std::move(renfr));
    out.push_back(std::move(tsafr));
    out.push_back(check_shifted(measurement, state, alpha));
    out.push_back(check_gamma_floor(measurement, state, alpha));
    for (auto& r : check_inefficiency(measurement, state, eta_energy, eta_complement, alpha))
        out.push_back(std::move(r));
    for (auto& r : check_mub_bounds(measurement, state, alpha)) out.push_back(std::move(r));
    if (include_order_free) {
        auto [sum, min] = landau_pollak(measurement, state);
        out.push_back(std::move(sum));
        out.push_back(std::move(min));
    }
    return out;
}

}  // namespace eur
