#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "eur/errors.hpp"
#include "eur/spectrum.hpp"
#include "eur/states.hpp"

namespace eur {

inline constexpr double kNegativeProbabilityClamp = 1e-12;
inline constexpr double kProbabilitySumTolerance = 1e-10;

/// Outcome distribution. Rounding negatives down to -1e-12 are clamped to 0;
/// anything more negative, or a sum off by more than the tolerance, throws.
class ProbabilityVector {
public:
    ProbabilityVector() = default;

    explicit ProbabilityVector(std::vector<double> p,
                               double sum_tolerance = kProbabilitySumTolerance)
        : p_(std::move(p)) {
        if (p_.empty()) throw InvalidDistribution("empty distribution");
        for (double& x : p_) {
            if (!std::isfinite(x)) throw InvalidDistribution("non-finite probability");
            if (x < 0.0) {
                if (x < -kNegativeProbabilityClamp)
                    throw InvalidDistribution("negative probability " + std::to_string(x));
                x = 0.0;
            }
        }
        const double total = std::accumulate(p_.begin(), p_.end(), 0.0);
        if (std::fabs(total - 1.0) > sum_tolerance)
            throw InvalidDistribution("probabilities sum to " + std::to_string(total));
    }

    [[nodiscard]] std::size_t size() const { return p_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return p_[i]; }
    [[nodiscard]] std::span<const double> values() const { return p_; }
    [[nodiscard]] double max() const { return *std::max_element(p_.begin(), p_.end()); }
    [[nodiscard]] auto begin() const { return p_.begin(); }
    [[nodiscard]] auto end() const { return p_.end(); }

private:
    std::vector<double> p_;
};

/// Time-shifted state (d+1)^{-1/2} sum_n exp(-i eps_n tau) |eps_n>.
inline ComplexVector tau_ket(const RationalStructure& structure, double tau) {
    const int n = structure.dimension();
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    ComplexVector v(n);
    for (int k = 0; k < n; ++k)
        v(k) = std::polar(norm, -structure.levels[static_cast<std::size_t>(k)] * tau);
    return v;
}

/// Rank-one POVM {|theta_m><theta_m|}, m = 0..s, on the uniform grid
/// tau_m = tau0 + m T_c / (s+1).
class ComplementMeasurement {
public:
    ComplementMeasurement(RationalStructure structure, double tau0, std::int64_t s)
        : structure_(std::move(structure)), tau0_(tau0), s_(s) {
        if (!validate_s(structure_, s_))
            throw InvalidS("s = " + std::to_string(s_) +
                           " makes some level difference a multiple of s+1 (or s < d)");
        const int dim = structure_.dimension();
        const auto outcomes = static_cast<Eigen::Index>(s_ + 1);
        const double step = structure_.characteristic_time / static_cast<double>(s_ + 1);
        const double scale = std::sqrt(static_cast<double>(dim) / static_cast<double>(s_ + 1));
        tau_grid_.resize(static_cast<std::size_t>(outcomes));
        kets_.resize(dim, outcomes);
        for (Eigen::Index m = 0; m < outcomes; ++m) {
            const double tau = tau0_ + static_cast<double>(m) * step;
            tau_grid_[static_cast<std::size_t>(m)] = tau;
            kets_.col(m) = scale * tau_ket(structure_, tau);
        }
        const ComplexMatrix sum = kets_ * kets_.adjoint();
        const ComplexMatrix diff = sum - ComplexMatrix::Identity(dim, dim);
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (diff + diff.adjoint()),
                                                        Eigen::EigenvaluesOnly);
        identity_defect_ = es.eigenvalues().cwiseAbs().maxCoeff();
    }

    [[nodiscard]] const RationalStructure& structure() const { return structure_; }
    [[nodiscard]] double tau0() const { return tau0_; }
    [[nodiscard]] std::int64_t s() const { return s_; }
    [[nodiscard]] int d() const { return structure_.d(); }
    [[nodiscard]] std::int64_t outcomes() const { return s_ + 1; }
    [[nodiscard]] const std::vector<double>& tau_grid() const { return tau_grid_; }
    /// Columns are the kets |theta_m> in the energy basis.
    [[nodiscard]] const ComplexMatrix& kets() const { return kets_; }
    [[nodiscard]] ComplexVector ket(std::int64_t m) const {
        return kets_.col(static_cast<Eigen::Index>(m));
    }
    [[nodiscard]] double identity_defect() const { return identity_defect_; }

private:
    RationalStructure structure_;
    double tau0_ = 0.0;
    std::int64_t s_ = 0;
    std::vector<double> tau_grid_;
    ComplexMatrix kets_;
    double identity_defect_ = 0.0;
};

inline ComplementMeasurement build_povm(const RationalStructure& structure, double tau0,
                                        std::int64_t s) {
    return ComplementMeasurement(structure, tau0, s);
}

/// Spectral norm of sum_m |theta_m><theta_m| - I.
inline double identity_defect(const ComplementMeasurement& measurement) {
    return measurement.identity_defect();
}

inline ProbabilityVector energy_probabilities(const DensityMatrix& state) {
    std::vector<double> p(static_cast<std::size_t>(state.dimension()));
    for (int n = 0; n < state.dimension(); ++n) p[static_cast<std::size_t>(n)] = state(n, n).real();
    return ProbabilityVector(std::move(p));
}

/// q_m = <theta_m|rho|theta_m>. The sum tolerance widens by the POVM's
/// identity defect so near-rational spectra remain usable.
inline ProbabilityVector complement_probabilities(const ComplementMeasurement& measurement,
                                                  const DensityMatrix& state) {
    if (state.dimension() != measurement.structure().dimension())
        throw DimensionMismatch("state dimension " + std::to_string(state.dimension()) +
                                " vs measurement dimension " +
                                std::to_string(measurement.structure().dimension()));
    const ComplexMatrix& k = measurement.kets();
    const ComplexMatrix rk = state.matrix() * k;
    std::vector<double> q(static_cast<std::size_t>(k.cols()));
    for (Eigen::Index m = 0; m < k.cols(); ++m)
        q[static_cast<std::size_t>(m)] = k.col(m).dot(rk.col(m)).real();  // dot conjugates lhs
    return ProbabilityVector(std::move(q),
                             kProbabilitySumTolerance + measurement.identity_defect());
}

}  // namespace eur
