#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <utility>

namespace qkr {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// Finite Hilbert space of a particle on the unit torus: N sites in position,
// N momenta, periodic in both directions with unit periods. Squeezing the
// N x N phase-space cells onto area h fixes the effective Planck constant:
//
//   hbar = 1 / (2 pi N)
//
// Grid conventions:
//   position   q_j = j / N,            j = 0 .. N-1
//   momentum   p_n = n / N,            n = -floor(N/2) .. ceil(N/2)-1
//
// Momentum amplitudes are stored in DFT bin order, i.e. bin b holds the
// signed index n = b for b < ceil(N/2) and n = b - N otherwise.
struct HilbertSpec {
    int N;

    explicit HilbertSpec(int n);

    double hbar() const { return 1.0 / (kTwoPi * N); }
    double position(int j) const { return static_cast<double>(j) / N; }
    int momentum_index(int bin) const { return bin < (N + 1) / 2 ? bin : bin - N; }
    double momentum(int bin) const { return static_cast<double>(momentum_index(bin)) / N; }

    bool operator==(const HilbertSpec& other) const { return N == other.N; }
    bool operator!=(const HilbertSpec& other) const { return N != other.N; }
};

enum class Basis { Position, Momentum };

// A pure state on the torus: N complex amplitudes tagged with the basis they
// are expressed in. Construction helpers below return unit-norm states; the
// dynamical maps preserve the norm instead of re-imposing it, so they stay
// linear on unnormalized input.
struct WaveState {
    HilbertSpec spec;
    Basis basis;
    Eigen::VectorXcd amplitudes;

    WaveState(const HilbertSpec& s, Basis b)
        : spec(s), basis(b), amplitudes(Eigen::VectorXcd::Zero(s.N)) {}
    WaveState(const HilbertSpec& s, Basis b, Eigen::VectorXcd amps);

    double norm() const { return amplitudes.norm(); }
    void normalize();

    // |psi_i|^2 in the state's own basis.
    Eigen::VectorXd density() const { return amplitudes.cwiseAbs2(); }
};

// Default wave-packet width sqrt(hbar / (4 pi)); symmetric uncertainty in
// grid units between position and momentum.
double default_sigma(const HilbertSpec& spec);

// Periodized Gaussian centred at (q0, p0), width sigma in position. Centres
// are taken mod 1. Pass sigma <= 0 to use default_sigma. Widths below half a
// grid cell are rejected: the sampled profile would alias.
WaveState make_gaussian(const HilbertSpec& spec, double q0, double p0, double sigma = 0.0);

// Equal-weight superposition of two Gaussians at qA and qB sharing the same
// momentum centre. The humps must be distinguishable: circle distance
// between qA and qB greater than 4 sigma.
WaveState make_cat(const HilbertSpec& spec, double qA, double qB, double p0, double sigma = 0.0);

// Haar-like random state: i.i.d. complex Gaussian amplitudes, normalized.
// Same seed, same N => bit-identical state.
WaveState make_random(const HilbertSpec& spec, std::uint64_t seed);

// Gram-Schmidt step: component of `state` orthogonal to `reference`,
// renormalized. Rejects (near-)parallel inputs.
WaveState orthogonalize(const WaveState& state, const WaveState& reference);

// Basis changes via the unitary DFT. to_momentum expects a position-basis
// state and vice versa; each is the other's inverse.
WaveState to_momentum(const WaveState& state);
WaveState to_position(const WaveState& state);

// <a|b>, transforming b into a's basis if they differ.
std::complex<double> overlap(const WaveState& a, const WaveState& b);

// |<a|b>|^2.
double fidelity(const WaveState& a, const WaveState& b);

// Spatial reflection j -> (N - j) mod N. Same index rule in both bases.
WaveState parity_reflect(const WaveState& state);

// Weight of the even / odd reflection eigencomponents; sums to 1 for a
// normalized state.
std::pair<double, double> parity_weights(const WaveState& state);

// Circular mean of the position density, in [0, 1).
double mean_position(const WaveState& state);

// Circular mean of the momentum density, folded to [-1/2, 1/2).
double mean_momentum(const WaveState& state);

// Inverse participation ratio 1 / sum_i |psi_i|^4 in the state's own basis.
double participation_ratio(const WaveState& state);

}  // namespace qkr
