#pragma once

#include <Eigen/Dense>
#include <complex>

#include "qkr/hilbert.hpp"

namespace qkr {

// Eigen-decomposition of a unitary matrix U. Eigenvalues are written as
// lambda_n = exp(-i theta_n) with theta_n in (-pi, pi]; the quasienergies
// are E_n = hbar theta_n. Entries are sorted by ascending theta and the
// eigenvector columns are orthonormal (Schur vectors, with degenerate
// clusters re-diagonalized).
struct SpectralDecomposition {
    Eigen::VectorXd thetas;
    Eigen::MatrixXcd vectors;  // columns, same basis as U
    double hbar = 0.0;
    double residual = 0.0;  // max_n |U v_n - lambda_n v_n|

    int size() const { return static_cast<int>(thetas.size()); }
    Eigen::VectorXd quasienergies() const { return hbar * thetas; }
    std::complex<double> eigenvalue(int n) const {
        return {std::cos(thetas[n]), -std::sin(thetas[n])};
    }
};

// hbar <= 0 means "infer from the dimension" via hbar = 1/(2 pi N), the
// torus convention. Throws if U is not unitary to 1e-8.
SpectralDecomposition decompose(const Eigen::MatrixXcd& U, double hbar = 0.0);

// Overlap intensities |<v_n|psi>|^2 of a state with the eigenbasis. The
// state is brought to the position basis (the basis the dense operators are
// expressed in) before projecting.
Eigen::VectorXd intensities(const WaveState& state, const SpectralDecomposition& dec);

// Spectral form of the return amplitude,
//   A(t) = sum_n |c_n|^2 exp(-i theta_n t),
// equal to <psi|U^t|psi> when the decomposition is exact.
std::complex<double> autocorrelation_spectral(const WaveState& state,
                                              const SpectralDecomposition& dec, int t);

// |A(t)| computed from precomputed intensities. Shares the summation code
// with autocorrelation_spectral, so the two agree bit for bit.
double phase_alignment(const Eigen::VectorXd& intens, const SpectralDecomposition& dec, int t);

}  // namespace qkr
