#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "eur/bounds.hpp"
#include "eur/entropy.hpp"
#include "eur/errors.hpp"
#include "eur/povm.hpp"
#include "eur/spectrum.hpp"
#include "eur/states.hpp"

namespace eur {

/// w(tau) = <tau'|rho|tau'> / T_c with |tau'> = sqrt(d+1) |tau>, on one period
/// [tau0, tau0 + T_c].
class TimeDensity {
public:
    TimeDensity(RationalStructure structure, DensityMatrix state, double tau0 = 0.0)
        : structure_(std::move(structure)), state_(std::move(state)), tau0_(tau0) {
        if (state_.dimension() != structure_.dimension())
            throw DimensionMismatch("state and spectrum dimensions differ");
    }

    [[nodiscard]] double operator()(double tau) const {
        const int n = structure_.dimension();
        ComplexVector v(n);
        for (int k = 0; k < n; ++k)
            v(k) = std::polar(1.0, -structure_.levels[static_cast<std::size_t>(k)] * tau);
        const double value = v.dot(state_.matrix() * v).real();
        return std::max(0.0, value) / structure_.characteristic_time;
    }

    [[nodiscard]] double start() const { return tau0_; }
    [[nodiscard]] double period() const { return structure_.characteristic_time; }
    [[nodiscard]] double end() const { return tau0_ + period(); }
    [[nodiscard]] const RationalStructure& structure() const { return structure_; }
    [[nodiscard]] const DensityMatrix& state() const { return state_; }

private:
    RationalStructure structure_;
    DensityMatrix state_;
    double tau0_ = 0.0;
};

inline double density(const RationalStructure& structure, const DensityMatrix& state, double tau) {
    return TimeDensity(structure, state)(tau);
}

/// Ordered marks t_0 = tau0 < t_1 < ... < t_J = tau0 + T_c.
class BinPartition {
public:
    explicit BinPartition(std::vector<double> marks) : marks_(std::move(marks)) {
        if (marks_.size() < 2) throw InvalidPartition("need at least two marks");
        for (std::size_t j = 1; j < marks_.size(); ++j)
            if (!(marks_[j] > marks_[j - 1])) throw InvalidPartition("marks must increase strictly");
    }

    static BinPartition uniform(double tau0, double period, std::size_t bins) {
        if (bins < 1) throw InvalidPartition("need at least one bin");
        std::vector<double> marks(bins + 1);
        for (std::size_t j = 0; j <= bins; ++j)
            marks[j] = tau0 + period * static_cast<double>(j) / static_cast<double>(bins);
        marks.back() = tau0 + period;
        return BinPartition(std::move(marks));
    }

    /// Random interior marks, uniformly drawn, deterministic per seed.
    static BinPartition random(double tau0, double period, std::size_t bins, std::uint64_t seed) {
        if (bins < 1) throw InvalidPartition("need at least one bin");
        std::mt19937_64 gen(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<double> cuts;
        while (cuts.size() + 1 < bins) {
            const double c = u(gen);
            if (c <= 1e-6 || c >= 1.0 - 1e-6) continue;
            if (std::any_of(cuts.begin(), cuts.end(),
                            [c](double x) { return std::fabs(x - c) < 1e-6; }))
                continue;
            cuts.push_back(c);
        }
        std::sort(cuts.begin(), cuts.end());
        std::vector<double> marks;
        marks.reserve(bins + 1);
        marks.push_back(tau0);
        for (double c : cuts) marks.push_back(tau0 + c * period);
        marks.push_back(tau0 + period);
        return BinPartition(std::move(marks));
    }

    [[nodiscard]] const std::vector<double>& marks() const { return marks_; }
    [[nodiscard]] std::size_t bins() const { return marks_.size() - 1; }
    [[nodiscard]] double width(std::size_t j) const { return marks_[j + 1] - marks_[j]; }
    [[nodiscard]] double max_width() const {
        double w = 0.0;
        for (std::size_t j = 0; j < bins(); ++j) w = std::max(w, width(j));
        return w;
    }
    [[nodiscard]] bool covers(const TimeDensity& density) const {
        const double scale = std::max(1.0, std::fabs(density.end()));
        return std::fabs(marks_.front() - density.start()) <= 1e-12 * scale &&
               std::fabs(marks_.back() - density.end()) <= 1e-12 * scale;
    }

private:
    std::vector<double> marks_;
};

struct QuadratureOptions {
    std::int64_t initial_intervals = 4096;
    double relative_tolerance = 1e-8;
    double absolute_floor = 1e-15;
    std::int64_t max_intervals = std::int64_t{1} << 22;
};

struct QuadratureResult {
    double value = 0.0;
    double delta = 0.0;  // |S_2N - S_N| of the last doubling
    std::int64_t intervals = 0;
};

/// Default interval count for one period: 4096, raised with the number of
/// oscillations once max r_n exceeds 256.
inline std::int64_t default_intervals(const RationalStructure& structure) {
    const std::int64_t r_max = structure.max_r();
    if (r_max <= 256) return 4096;
    return static_cast<std::int64_t>(std::bit_ceil(static_cast<std::uint64_t>(16 * r_max)));
}

/// Samples of w on a uniform grid over [a, b], refined by halving the step.
class DensitySamples {
public:
    template <class F>
    DensitySamples(const F& f, double a, double b, std::int64_t intervals) : a_(a), b_(b) {
        intervals = std::max<std::int64_t>(2, intervals + (intervals % 2));
        values_.resize(static_cast<std::size_t>(intervals) + 1);
        for (std::int64_t i = 0; i <= intervals; ++i) values_[static_cast<std::size_t>(i)] = f(node(i, intervals));
    }

    template <class F>
    void refine(const F& f) {
        const std::int64_t n = intervals();
        std::vector<double> next(static_cast<std::size_t>(2 * n) + 1);
        for (std::int64_t i = 0; i <= n; ++i)
            next[static_cast<std::size_t>(2 * i)] = values_[static_cast<std::size_t>(i)];
        for (std::int64_t i = 0; i < n; ++i)
            next[static_cast<std::size_t>(2 * i + 1)] = f(node(2 * i + 1, 2 * n));
        values_ = std::move(next);
    }

    /// Composite Simpson of g(w(x)).
    template <class G>
    [[nodiscard]] double simpson(const G& g) const {
        const std::int64_t n = intervals();
        const double h = (b_ - a_) / static_cast<double>(n);
        double odd = 0.0, even = 0.0;
        for (std::int64_t i = 1; i < n; ++i) {
            const double v = g(values_[static_cast<std::size_t>(i)]);
            if (i % 2 == 1) odd += v; else even += v;
        }
        return h / 3.0 * (g(values_.front()) + 4.0 * odd + 2.0 * even + g(values_.back()));
    }

    [[nodiscard]] std::int64_t intervals() const { return static_cast<std::int64_t>(values_.size()) - 1; }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }

private:
    [[nodiscard]] double node(std::int64_t i, std::int64_t n) const {
        if (i == n) return b_;
        return a_ + (b_ - a_) * static_cast<double>(i) / static_cast<double>(n);
    }

    double a_, b_;
    std::vector<double> values_;
};

/// Integral of g(f(x)) over [a, b] by Simpson with interval doubling until the
/// relative change drops below the tolerance; the value returned is the
/// Richardson-extrapolated S_2N + (S_2N - S_N)/15.
template <class F, class G>
QuadratureResult integrate(const F& f, double a, double b, const G& g,
                           const QuadratureOptions& opts = {}) {
    DensitySamples samples(f, a, b, opts.initial_intervals);
    double coarse = samples.simpson(g);
    while (true) {
        if (2 * samples.intervals() > opts.max_intervals)
            throw QuadratureUnconverged("no convergence with " + std::to_string(samples.intervals()) +
                                        " intervals");
        samples.refine(f);
        const double fine = samples.simpson(g);
        const double delta = std::fabs(fine - coarse);
        if (delta <= opts.relative_tolerance * std::fabs(fine) + opts.absolute_floor)
            return QuadratureResult{fine + (fine - coarse) / 15.0, delta, samples.intervals()};
        coarse = fine;
    }
}

/// A quadrature-derived quantity together with its pass/fail allowance
/// (10 times the propagated last Richardson delta).
struct QuadratureValue {
    double value = 0.0;
    double tolerance = 0.0;
    std::int64_t intervals = 0;
};

inline QuadratureOptions options_for(const TimeDensity& w, std::int64_t intervals) {
    QuadratureOptions opts;
    opts.initial_intervals = intervals > 0 ? intervals : default_intervals(w.structure());
    return opts;
}

/// Integral of w^power over one period.
inline QuadratureResult power_integral(const TimeDensity& w, double power, std::int64_t intervals = 0) {
    return integrate(w, w.start(), w.end(),
                     [power](double x) { return x > 0.0 ? std::pow(x, power) : 0.0; },
                     options_for(w, intervals));
}

/// Differential Renyi entropy of w; the Shannon form at alpha = 1.
inline QuadratureValue differential_renyi(const TimeDensity& w, double alpha,
                                          std::int64_t intervals = 0) {
    if (!(alpha > 0.0) || is_infinite(alpha))
        throw OutOfRange("differential entropy needs a finite order > 0");
    if (is_shannon(alpha)) {
        const auto res = integrate(w, w.start(), w.end(),
                                   [](double x) { return x > 0.0 ? -x * std::log(x) : 0.0; },
                                   options_for(w, intervals));
        return {res.value, 10.0 * res.delta, res.intervals};
    }
    const auto res = power_integral(w, alpha, intervals);
    const double value = std::log(res.value) / (1.0 - alpha);
    const double shifted = std::log(res.value + res.delta) / (1.0 - alpha);
    return {value, 10.0 * std::fabs(shifted - value), res.intervals};
}

/// ||w||_beta over one period.
inline QuadratureValue density_norm(const TimeDensity& w, double beta, std::int64_t intervals = 0) {
    const auto res = power_integral(w, beta, intervals);
    const double value = std::pow(res.value, 1.0 / beta);
    const double shifted = std::pow(res.value + res.delta, 1.0 / beta);
    return {value, 10.0 * std::fabs(shifted - value), res.intervals};
}

/// ||U||_beta of the phase density U(theta) = w(tau) T_c / (2 pi), integrated
/// independently over theta in [theta0, theta0 + 2 pi].
inline QuadratureValue phase_density_norm(const TimeDensity& w, double beta,
                                          std::int64_t intervals = 0) {
    const double T = w.period();
    const double theta0 = 2.0 * std::numbers::pi * w.start() / T;
    const auto u = [&w, T](double theta) {
        return w(theta * T / (2.0 * std::numbers::pi)) * T / (2.0 * std::numbers::pi);
    };
    const auto res = integrate(u, theta0, theta0 + 2.0 * std::numbers::pi,
                               [beta](double x) { return x > 0.0 ? std::pow(x, beta) : 0.0; },
                               options_for(w, intervals));
    const double value = std::pow(res.value, 1.0 / beta);
    const double shifted = std::pow(res.value + res.delta, 1.0 / beta);
    return {value, 10.0 * std::fabs(shifted - value), res.intervals};
}

struct BinnedProbabilities {
    ProbabilityVector probabilities;
    std::vector<double> deltas;  // last Richardson delta per bin
    [[nodiscard]] double total_delta() const {
        double t = 0.0;
        for (double x : deltas) t += x;
        return t;
    }
};

/// q_j = integral of w over bin j, each bin integrated with the same Simpson
/// doubling restricted to that sub-interval.
inline BinnedProbabilities bin_probabilities(const TimeDensity& w, const BinPartition& partition) {
    if (!partition.covers(w)) throw InvalidPartition("partition must cover exactly one period");
    const auto base = static_cast<double>(default_intervals(w.structure()));
    std::vector<double> q(partition.bins());
    std::vector<double> deltas(partition.bins());
    for (std::size_t j = 0; j < partition.bins(); ++j) {
        QuadratureOptions opts;
        const auto share = static_cast<std::int64_t>(std::ceil(base * partition.width(j) / w.period()));
        opts.initial_intervals = std::max<std::int64_t>(16, share + (share % 2));
        const auto res = integrate(w, partition.marks()[j], partition.marks()[j + 1],
                                   [](double x) { return x; }, opts);
        q[j] = res.value;
        deltas[j] = res.delta;
    }
    double total_delta = 0.0;
    for (double x : deltas) total_delta += x;
    return BinnedProbabilities{ProbabilityVector(std::move(q), kProbabilitySumTolerance + 10.0 * total_delta),
                               std::move(deltas)};
}

namespace detail {

inline bool strict_conjugate_range(double alpha) {
    if (!(alpha > 1.0) || is_infinite(alpha)) return false;
    const double beta = conjugate_beta(alpha);
    return beta > 0.5 && beta < 1.0;
}

/// Entropy change when every bin probability moves up by its quadrature delta.
template <class H>
double binned_sensitivity(const BinnedProbabilities& binned, const H& entropy) {
    const auto& q = binned.probabilities;
    std::vector<double> shifted(q.begin(), q.end());
    for (std::size_t j = 0; j < shifted.size(); ++j) shifted[j] += binned.deltas[j];
    std::vector<double> base(q.begin(), q.end());
    return std::fabs(entropy(shifted) - entropy(base));
}

inline BoundParameters continuum_params(const TimeDensity& w, double alpha) {
    BoundParameters bp;
    bp.d = w.structure().d();
    bp.purity = eur::purity(w.state());
    bp.alpha = alpha;
    if (alpha > 0.5) {
        bp.beta = conjugate_beta(alpha);
        bp.mu = std::max(bp.alpha, bp.beta);
    }
    return bp;
}

}  // namespace detail

/// R_a(E) + R_b(w) >= ln T_c for conjugate orders, quadrature allowance
/// folded into the pass threshold.
inline BoundReport check_continuous_relation(const TimeDensity& w, double alpha,
                                             std::int64_t intervals = 0) {
    const BoundParameters bp = detail::continuum_params(w, alpha);
    if (!(alpha > 0.5)) return not_applicable(RelationId::CTREN, bp, "needs alpha > 1/2");
    const ProbabilityVector p = energy_probabilities(w.state());
    const QuadratureValue rw = differential_renyi(w, bp.beta, intervals);
    return make_report(RelationId::CTREN, Orientation::LowerBound, renyi(p, bp.alpha) + rw.value,
                       std::log(w.period()), bp, kBoundTolerance + rw.tolerance);
}

inline BoundReport check_continuous_relation(const RationalStructure& structure,
                                             const DensityMatrix& state, double alpha,
                                             std::int64_t intervals = 0) {
    return check_continuous_relation(TimeDensity(structure, state), alpha, intervals);
}

/// R_a(E) + R_b(q) >= ln(T_c / dtau) and H_a(E) + H_b(q) >= ln_mu(T_c / dtau).
inline std::pair<BoundReport, BoundReport> check_binned_relations(const TimeDensity& w,
                                                                  const BinPartition& partition,
                                                                  double alpha) {
    const BoundParameters bp = detail::continuum_params(w, alpha);
    if (!(alpha > 0.5))
        return {not_applicable(RelationId::CRBIN, bp, "needs alpha > 1/2"),
                not_applicable(RelationId::CTBIN, bp, "needs alpha > 1/2")};
    const ProbabilityVector p = energy_probabilities(w.state());
    const BinnedProbabilities binned = bin_probabilities(w, partition);
    const auto& q = binned.probabilities;
    const double ratio = w.period() / partition.max_width();
    const double beta = bp.beta;

    const double renyi_tol =
        detail::binned_sensitivity(binned, [beta](const std::vector<double>& v) { return renyi(v, beta); });
    BoundReport renyi_report =
        make_report(RelationId::CRBIN, Orientation::LowerBound, renyi(p, alpha) + renyi(q, beta),
                    std::log(ratio), bp, kBoundTolerance + 10.0 * renyi_tol);
    if (is_infinite(alpha))
        return {renyi_report, not_applicable(RelationId::CTBIN, bp, "needs finite alpha")};
    const double tsallis_tol = detail::binned_sensitivity(
        binned, [beta](const std::vector<double>& v) { return tsallis(v, beta); });
    BoundReport tsallis_report =
        make_report(RelationId::CTBIN, Orientation::LowerBound, tsallis(p, alpha) + tsallis(q, beta),
                    alpha_log(ratio, bp.mu), bp, kBoundTolerance + 10.0 * tsallis_tol);
    return {renyi_report, tsallis_report};
}

/// The discrete, continuous and binned norm inequalities in both directions,
/// plus the theta/tau rescaling identity for ||.||_beta. Needs 1/2 < beta < 1 < alpha.
inline std::vector<BoundReport> check_norm_inequalities(const TimeDensity& w,
                                                        const BinPartition& partition,
                                                        double alpha, std::int64_t s,
                                                        std::int64_t intervals = 0) {
    BoundParameters bp = detail::continuum_params(w, alpha);
    bp.s = s;
    const RelationId ids[] = {RelationId::TWIPQ_P, RelationId::TWIPQ_Q, RelationId::TWIP_P,
                              RelationId::TWIP_W,  RelationId::DWIP_P,  RelationId::DWIP_Q,
                              RelationId::UBWB};
    std::vector<BoundReport> out;
    if (!(alpha > 0.5) || !detail::strict_conjugate_range(alpha)) {
        for (RelationId id : ids) out.push_back(not_applicable(id, bp, "needs 1/2 < beta < 1 < alpha"));
        return out;
    }
    const double beta = bp.beta;
    const double exponent = (1.0 - beta) / beta;
    const double T = w.period();

    const ProbabilityVector p = energy_probabilities(w.state());
    const ComplementMeasurement measurement(w.structure(), w.start(), s);
    const ProbabilityVector q = complement_probabilities(measurement, w.state());
    const double grid_factor = std::pow(1.0 / static_cast<double>(s + 1), exponent);
    out.push_back(make_report(RelationId::TWIPQ_P, Orientation::UpperBound, pnorm(p, alpha),
                              grid_factor * pnorm(q, beta), bp));
    out.push_back(make_report(RelationId::TWIPQ_Q, Orientation::UpperBound, pnorm(q, alpha),
                              grid_factor * pnorm(p, beta), bp));

    const QuadratureValue w_beta = density_norm(w, beta, intervals);
    const QuadratureValue w_alpha = density_norm(w, alpha, intervals);
    const double time_factor = std::pow(1.0 / T, exponent);
    out.push_back(make_report(RelationId::TWIP_P, Orientation::UpperBound, pnorm(p, alpha),
                              time_factor * w_beta.value, bp,
                              kBoundTolerance + time_factor * w_beta.tolerance));
    out.push_back(make_report(RelationId::TWIP_W, Orientation::UpperBound, w_alpha.value,
                              time_factor * pnorm(p, beta), bp, kBoundTolerance + w_alpha.tolerance));

    const BinnedProbabilities binned = bin_probabilities(w, partition);
    const double bin_factor = std::pow(partition.max_width() / T, exponent);
    const double qb = pnorm(binned.probabilities, beta);
    const double qa = pnorm(binned.probabilities, alpha);
    const double qb_tol = 10.0 * detail::binned_sensitivity(
                                     binned, [beta](const std::vector<double>& v) { return pnorm(v, beta); });
    const double qa_tol = 10.0 * detail::binned_sensitivity(
                                     binned, [alpha](const std::vector<double>& v) { return pnorm(v, alpha); });
    out.push_back(make_report(RelationId::DWIP_P, Orientation::UpperBound, pnorm(p, alpha),
                              bin_factor * qb, bp, kBoundTolerance + bin_factor * qb_tol));
    out.push_back(make_report(RelationId::DWIP_Q, Orientation::UpperBound, qa,
                              bin_factor * pnorm(p, beta), bp, kBoundTolerance + qa_tol));

    const QuadratureValue u_beta = phase_density_norm(w, beta, intervals);
    const double rescale = std::pow(2.0 * std::numbers::pi / T, exponent);
    out.push_back(make_report(RelationId::UBWB, Orientation::Identity, u_beta.value,
                              rescale * w_beta.value, bp,
                              kBoundTolerance + u_beta.tolerance + rescale * w_beta.tolerance));
    return out;
}

/// Samples (tau, w(tau)) at `points` equally spaced times covering one period
/// including both endpoints.
inline std::vector<std::pair<double, double>> sample_density(const TimeDensity& w, std::size_t points) {
    if (points < 2) throw OutOfRange("need at least two sample points");
    std::vector<std::pair<double, double>> out(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double tau = i + 1 == points
                               ? w.end()
                               : w.start() + w.period() * static_cast<double>(i) /
                                                 static_cast<double>(points - 1);
        out[i] = {tau, w(tau)};
    }
    return out;
}

}  // namespace eur
