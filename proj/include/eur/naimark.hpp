#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "eur/errors.hpp"
#include "eur/povm.hpp"
#include "eur/spectrum.hpp"
#include "eur/states.hpp"

namespace eur {

/// Projective realization of the complement measurement in dimension s+1.
/// The extended energy basis is the canonical basis; energy level n sits at
/// slot r_n and the remaining slots are auxiliary directions.
class ExtendedSystem {
public:
    ExtendedSystem(RationalStructure structure, double tau0, std::int64_t s)
        : structure_(std::move(structure)), tau0_(tau0), s_(s) {
        if (!validate_s(structure_, s_))
            throw InvalidS("s = " + std::to_string(s_) + " fails the validity rule");
        if (s_ < structure_.max_r())
            throw InvalidS("the extension needs s + 1 > max r_n");
        const auto dim = static_cast<Eigen::Index>(s_ + 1);
        index_map_.assign(structure_.r.begin(), structure_.r.end());
        theta_.resize(static_cast<std::size_t>(dim));
        const double step = structure_.characteristic_time / static_cast<double>(dim);
        for (Eigen::Index m = 0; m < dim; ++m) {
            const double tau = tau0_ + static_cast<double>(m) * step;
            theta_[static_cast<std::size_t>(m)] = 2.0 * std::numbers::pi * tau /
                                                  structure_.characteristic_time;
        }
        const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
        phase_states_.resize(dim, dim);
        for (Eigen::Index m = 0; m < dim; ++m)
            for (Eigen::Index l = 0; l < dim; ++l)
                phase_states_(l, m) =
                    std::polar(norm, -static_cast<double>(l) * theta_[static_cast<std::size_t>(m)]);
    }

    [[nodiscard]] std::int64_t s() const { return s_; }
    [[nodiscard]] Eigen::Index dimension() const { return static_cast<Eigen::Index>(s_ + 1); }
    [[nodiscard]] double tau0() const { return tau0_; }
    [[nodiscard]] double theta0() const { return theta_.front(); }
    [[nodiscard]] const RationalStructure& structure() const { return structure_; }
    /// Slot l = r_n of each original level n.
    [[nodiscard]] const std::vector<std::int64_t>& index_map() const { return index_map_; }
    [[nodiscard]] const std::vector<double>& theta_grid() const { return theta_; }
    [[nodiscard]] ComplexMatrix energy_basis() const {
        return ComplexMatrix::Identity(dimension(), dimension());
    }
    /// Columns are the phase states.
    [[nodiscard]] const ComplexMatrix& phase_states() const { return phase_states_; }

private:
    RationalStructure structure_;
    double tau0_ = 0.0;
    std::int64_t s_ = 0;
    std::vector<std::int64_t> index_map_;
    std::vector<double> theta_;
    ComplexMatrix phase_states_;
};

inline ExtendedSystem extend(const RationalStructure& structure, double tau0, std::int64_t s) {
    return ExtendedSystem(structure, tau0, s);
}

/// Zero-padded copy of rho placed on the slots r_n.
inline ComplexMatrix embed_state(const DensityMatrix& state, const ExtendedSystem& system) {
    if (state.dimension() != system.structure().dimension())
        throw DimensionMismatch("state dimension does not match the spectrum");
    const auto& map = system.index_map();
    ComplexMatrix out = ComplexMatrix::Zero(system.dimension(), system.dimension());
    for (int a = 0; a < state.dimension(); ++a)
        for (int b = 0; b < state.dimension(); ++b)
            out(static_cast<Eigen::Index>(map[static_cast<std::size_t>(a)]),
                static_cast<Eigen::Index>(map[static_cast<std::size_t>(b)])) = state(a, b);
    return out;
}

inline std::vector<double> extended_energy_probabilities(const ComplexMatrix& embedded) {
    std::vector<double> out(static_cast<std::size_t>(embedded.rows()));
    for (Eigen::Index l = 0; l < embedded.rows(); ++l)
        out[static_cast<std::size_t>(l)] = embedded(l, l).real();
    return out;
}

inline std::vector<double> extended_phase_probabilities(const ExtendedSystem& system,
                                                        const ComplexMatrix& embedded) {
    const ComplexMatrix& v = system.phase_states();
    const ComplexMatrix rv = embedded * v;
    std::vector<double> out(static_cast<std::size_t>(v.cols()));
    for (Eigen::Index m = 0; m < v.cols(); ++m)
        out[static_cast<std::size_t>(m)] = v.col(m).dot(rv.col(m)).real();
    return out;
}

/// max_m |<phase_m|rho_ext|phase_m> - <theta_m|rho|theta_m>|.
inline double consistency_check(const ExtendedSystem& system, const DensityMatrix& state) {
    const ComplementMeasurement measurement(system.structure(), system.tau0(), system.s());
    const ProbabilityVector q = complement_probabilities(measurement, state);
    const auto q_ext = extended_phase_probabilities(system, embed_state(state, system));
    double worst = 0.0;
    for (std::size_t m = 0; m < q_ext.size(); ++m)
        worst = std::max(worst, std::fabs(q_ext[m] - q[m]));
    return worst;
}

/// sum_l l |e_l><e_l| and sum_m theta_m |phase_m><phase_m|.
inline std::pair<ComplexMatrix, ComplexMatrix> conjugate_operators(const ExtendedSystem& system) {
    const Eigen::Index dim = system.dimension();
    ComplexMatrix number = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index l = 0; l < dim; ++l) number(l, l) = static_cast<double>(l);
    Eigen::VectorXcd theta(dim);
    for (Eigen::Index m = 0; m < dim; ++m) theta(m) = system.theta_grid()[static_cast<std::size_t>(m)];
    const ComplexMatrix& v = system.phase_states();
    ComplexMatrix phase = v * theta.asDiagonal() * v.adjoint();
    return {number, phase};
}

}  // namespace eur
