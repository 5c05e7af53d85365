#include "qkr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace qkr {

namespace {

constexpr double kUnitaryTol = 1e-8;
constexpr double kClusterGap = 1e-10;

double theta_of(const std::complex<double>& lambda) {
    double theta = -std::arg(lambda);  // in [-pi, pi)
    if (theta <= -kPi) theta = kPi;    // principal branch (-pi, pi]
    return theta;
}

// Phase sum shared by autocorrelation_spectral and phase_alignment; the two
// acceptance-facing quantities must agree exactly, so there is one loop.
std::complex<double> spectral_sum(const Eigen::VectorXd& intens, const Eigen::VectorXd& thetas,
                                  int t) {
    std::complex<double> a(0.0, 0.0);
    for (int n = 0; n < thetas.size(); ++n) {
        const double phi = -thetas[n] * t;
        a += intens[n] * std::complex<double>(std::cos(phi), std::sin(phi));
    }
    return a;
}

}  // namespace

SpectralDecomposition decompose(const Eigen::MatrixXcd& U, double hbar) {
    const int N = static_cast<int>(U.rows());
    if (N < 1 || U.cols() != N) throw std::invalid_argument("decompose: matrix must be square");
    const double unitary_defect =
        (U.adjoint() * U - Eigen::MatrixXcd::Identity(N, N)).cwiseAbs().maxCoeff();
    if (unitary_defect > kUnitaryTol)
        throw std::invalid_argument("decompose: input is not unitary (defect " +
                                    std::to_string(unitary_defect) + ")");
    if (hbar <= 0.0) hbar = 1.0 / (kTwoPi * N);

    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(U);
    if (schur.info() != Eigen::Success) throw std::runtime_error("decompose: Schur iteration failed");
    // A unitary matrix is normal, so the Schur form is diagonal and the
    // Schur vectors are already an orthonormal eigenbasis.
    Eigen::MatrixXcd Q = schur.matrixU();
    Eigen::VectorXcd lambdas = schur.matrixT().diagonal();

    Eigen::VectorXd thetas(N);
    for (int n = 0; n < N; ++n) thetas[n] = theta_of(lambdas[n]);

    std::vector<int> order(N);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return thetas[a] < thetas[b]; });

    SpectralDecomposition dec;
    dec.hbar = hbar;
    dec.thetas.resize(N);
    dec.vectors.resize(N, N);
    for (int n = 0; n < N; ++n) {
        dec.thetas[n] = thetas[order[n]];
        dec.vectors.col(n) = Q.col(order[n]);
    }

    // Numerically degenerate clusters: rounding can leave the Schur form
    // slightly non-diagonal inside them, so re-diagonalize each cluster in
    // its own subspace and restore orthonormality with a QR step.
    int start = 0;
    while (start < N) {
        int end = start + 1;
        while (end < N && dec.thetas[end] - dec.thetas[end - 1] < kClusterGap) ++end;
        const int size = end - start;
        if (size > 1) {
            const auto block = dec.vectors.middleCols(start, size);
            const Eigen::MatrixXcd B = block.adjoint() * U * block;
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(B);
            if (ces.info() == Eigen::Success) {
                const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(ces.eigenvectors());
                const Eigen::MatrixXcd W =
                    qr.householderQ() * Eigen::MatrixXcd::Identity(size, size);
                dec.vectors.middleCols(start, size) = block * W;
            }
        }
        start = end;
    }

    double residual = 0.0;
    for (int n = 0; n < N; ++n) {
        const std::complex<double> lambda(std::cos(dec.thetas[n]), -std::sin(dec.thetas[n]));
        residual = std::max(residual, (U * dec.vectors.col(n) - lambda * dec.vectors.col(n)).norm());
    }
    dec.residual = residual;
    return dec;
}

Eigen::VectorXd intensities(const WaveState& state, const SpectralDecomposition& dec) {
    if (state.spec.N != dec.size())
        throw std::invalid_argument("intensities: state and decomposition dimensions differ");
    const WaveState pos = state.basis == Basis::Position ? state : to_position(state);
    const Eigen::VectorXcd coeffs = dec.vectors.adjoint() * pos.amplitudes;
    return coeffs.cwiseAbs2();
}

std::complex<double> autocorrelation_spectral(const WaveState& state,
                                              const SpectralDecomposition& dec, int t) {
    return spectral_sum(intensities(state, dec), dec.thetas, t);
}

double phase_alignment(const Eigen::VectorXd& intens, const SpectralDecomposition& dec, int t) {
    if (intens.size() != dec.thetas.size())
        throw std::invalid_argument("phase_alignment: intensity count mismatch");
    return std::abs(spectral_sum(intens, dec.thetas, t));
}

}  // namespace qkr
