#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "eur/errors.hpp"
#include "eur/spectrum.hpp"

namespace eur {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kStateTolerance = 1e-12;

/// Density operator in the energy eigenbasis. Construction symmetrizes the
/// input and then checks Hermiticity, unit trace and positivity.
class DensityMatrix {
public:
    explicit DensityMatrix(const ComplexMatrix& m) {
        if (m.rows() != m.cols() || m.rows() < 1)
            throw InvalidState("density matrix must be square and non-empty");
        const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
        if (asym > 2.0 * kStateTolerance)
            throw InvalidState("matrix is not Hermitian (max |rho - rho^dag| = " +
                               std::to_string(asym) + ")");
        rho_ = 0.5 * (m + m.adjoint());
        const double tr = rho_.trace().real();
        if (std::fabs(tr - 1.0) > kStateTolerance)
            throw InvalidState("trace is " + std::to_string(tr));
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho_, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -kStateTolerance)
            throw InvalidState("matrix has a negative eigenvalue " +
                               std::to_string(es.eigenvalues().minCoeff()));
    }

    [[nodiscard]] int dimension() const { return static_cast<int>(rho_.rows()); }
    [[nodiscard]] const ComplexMatrix& matrix() const { return rho_; }
    [[nodiscard]] Complex operator()(int i, int j) const { return rho_(i, j); }

private:
    ComplexMatrix rho_;
};

/// |psi><psi| for psi = coefficients / |coefficients|.
inline DensityMatrix pure_state(const ComplexVector& coefficients) {
    const double norm = coefficients.norm();
    if (coefficients.size() == 0 || !(norm > 0.0))
        throw ZeroVector("state vector has zero norm");
    const ComplexVector psi = coefficients / norm;
    return DensityMatrix(psi * psi.adjoint());
}

/// rho = (I + r . sigma) / 2 on the qubit energy basis {|eps_0>, |eps_1>}.
inline DensityMatrix bloch_qubit(double rx, double ry, double rz) {
    const double r2 = rx * rx + ry * ry + rz * rz;
    if (!(r2 <= 1.0 + kStateTolerance))
        throw OutsideBall("Bloch vector length^2 = " + std::to_string(r2));
    ComplexMatrix m(2, 2);
    m(0, 0) = 0.5 * (1.0 + rz);
    m(1, 1) = 0.5 * (1.0 - rz);
    m(0, 1) = 0.5 * Complex(rx, -ry);
    m(1, 0) = 0.5 * Complex(rx, ry);
    return DensityMatrix(m);
}

inline DensityMatrix maximally_mixed(int dimension) {
    return DensityMatrix(ComplexMatrix::Identity(dimension, dimension) /
                         static_cast<double>(dimension));
}

inline double purity(const DensityMatrix& state) {
    // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return state.matrix().squaredNorm();
}

/// Free evolution exp(-iHt) rho exp(iHt) with H = diag(levels).
inline DensityMatrix evolve(const DensityMatrix& state, const RationalStructure& structure,
                            double t) {
    if (state.dimension() != structure.dimension())
        throw DimensionMismatch("state and spectrum dimensions differ");
    const int n = state.dimension();
    ComplexVector phase(n);
    for (int k = 0; k < n; ++k)
        phase(k) = std::polar(1.0, -structure.levels[static_cast<std::size_t>(k)] * t);
    ComplexMatrix out = phase.asDiagonal() * state.matrix() * phase.conjugate().asDiagonal();
    return DensityMatrix(out);
}

/// rho = G G^dag / tr(G G^dag) for a dimension x rank matrix G of iid complex
/// Gaussians, deterministic per seed.
inline DensityMatrix random_state(int dimension, int rank, std::uint64_t seed) {
    if (dimension < 1 || rank < 1 || rank > dimension)
        throw OutOfRange("random_state requires 1 <= rank <= dimension");
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix g(dimension, rank);
    for (int j = 0; j < rank; ++j)
        for (int i = 0; i < dimension; ++i) {
            const double re = normal(gen);
            const double im = normal(gen);
            g(i, j) = Complex(re, im);
        }
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

}  // namespace eur
