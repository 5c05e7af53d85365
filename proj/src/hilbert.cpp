#include "qkr/hilbert.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qkr/fft.hpp"
#include "qkr/rng.hpp"

namespace qkr {

namespace {

double wrap_unit(double x) {
    double w = x - std::floor(x);
    // floor can leave w == 1.0 when x is a tiny negative number.
    return w >= 1.0 ? w - 1.0 : w;
}

// Distance between two points on the unit circle, in [0, 1/2].
double circle_distance(double a, double b) {
    const double d = std::fabs(wrap_unit(a) - wrap_unit(b));
    return std::min(d, 1.0 - d);
}

}  // namespace

HilbertSpec::HilbertSpec(int n) : N(n) {
    if (n < 2) throw std::invalid_argument("HilbertSpec: N must be >= 2, got " + std::to_string(n));
}

WaveState::WaveState(const HilbertSpec& s, Basis b, Eigen::VectorXcd amps)
    : spec(s), basis(b), amplitudes(std::move(amps)) {
    if (amplitudes.size() != spec.N)
        throw std::invalid_argument("WaveState: amplitude count does not match dimension");
}

void WaveState::normalize() {
    const double n = norm();
    if (n == 0.0) throw std::invalid_argument("WaveState: cannot normalize the zero vector");
    amplitudes /= n;
}

double default_sigma(const HilbertSpec& spec) {
    return std::sqrt(spec.hbar() / (2.0 * kTwoPi));
}

WaveState make_gaussian(const HilbertSpec& spec, double q0, double p0, double sigma) {
    if (sigma <= 0.0) sigma = default_sigma(spec);
    if (sigma < 0.5 / spec.N)
        throw std::invalid_argument(
            "make_gaussian: sigma=" + std::to_string(sigma) + " is below the grid resolution 0.5/N=" +
            std::to_string(0.5 / spec.N) + "; the sampled packet would alias");
    q0 = wrap_unit(q0);
    p0 = wrap_unit(p0);

    WaveState out(spec, Basis::Position);
    const double inv4s2 = 1.0 / (4.0 * sigma * sigma);
    for (int j = 0; j < spec.N; ++j) {
        const double q = spec.position(j);
        // Periodize over neighbouring images; +-2 covers every sigma the
        // width precondition admits to double precision.
        double envelope = 0.0;
        for (int m = -2; m <= 2; ++m) {
            const double d = q - q0 + m;
            envelope += std::exp(-d * d * inv4s2);
        }
        const double phase = kTwoPi * p0 * spec.N * (q - q0);
        out.amplitudes[j] = envelope * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    out.normalize();
    return out;
}

WaveState make_cat(const HilbertSpec& spec, double qA, double qB, double p0, double sigma) {
    if (sigma <= 0.0) sigma = default_sigma(spec);
    const double sep = circle_distance(qA, qB);
    if (sep <= 4.0 * sigma)
        throw std::invalid_argument(
            "make_cat: component separation " + std::to_string(sep) + " must exceed 4*sigma=" +
            std::to_string(4.0 * sigma) + " for distinguishable humps");
    WaveState a = make_gaussian(spec, qA, p0, sigma);
    const WaveState b = make_gaussian(spec, qB, p0, sigma);
    a.amplitudes += b.amplitudes;
    a.normalize();
    return a;
}

WaveState make_random(const HilbertSpec& spec, std::uint64_t seed) {
    Rng rng(seed);
    WaveState out(spec, Basis::Position);
    for (int j = 0; j < spec.N; ++j) out.amplitudes[j] = rng.complex_normal();
    out.normalize();
    return out;
}

WaveState orthogonalize(const WaveState& state, const WaveState& reference) {
    if (state.spec != reference.spec)
        throw std::invalid_argument("orthogonalize: dimension mismatch");
    const WaveState ref =
        reference.basis == state.basis
            ? reference
            : (state.basis == Basis::Position ? to_position(reference) : to_momentum(reference));
    const std::complex<double> c = ref.amplitudes.dot(state.amplitudes);
    if (std::norm(c) >= 1.0 - 1e-9)
        throw std::invalid_argument("orthogonalize: inputs are parallel to working precision");
    WaveState out = state;
    out.amplitudes -= c * ref.amplitudes;
    out.normalize();
    return out;
}

WaveState to_momentum(const WaveState& state) {
    if (state.basis != Basis::Position)
        throw std::invalid_argument("to_momentum: state is already in the momentum basis");
    WaveState out = state;
    dft_forward(out.amplitudes);
    out.basis = Basis::Momentum;
    return out;
}

WaveState to_position(const WaveState& state) {
    if (state.basis != Basis::Momentum)
        throw std::invalid_argument("to_position: state is already in the position basis");
    WaveState out = state;
    dft_backward(out.amplitudes);
    out.basis = Basis::Position;
    return out;
}

std::complex<double> overlap(const WaveState& a, const WaveState& b) {
    if (a.spec != b.spec) throw std::invalid_argument("overlap: dimension mismatch");
    if (a.basis == b.basis) return a.amplitudes.dot(b.amplitudes);
    const WaveState bb = a.basis == Basis::Position ? to_position(b) : to_momentum(b);
    return a.amplitudes.dot(bb.amplitudes);
}

double fidelity(const WaveState& a, const WaveState& b) { return std::norm(overlap(a, b)); }

WaveState parity_reflect(const WaveState& state) {
    WaveState out(state.spec, state.basis);
    const int N = state.spec.N;
    out.amplitudes[0] = state.amplitudes[0];
    for (int j = 1; j < N; ++j) out.amplitudes[j] = state.amplitudes[N - j];
    return out;
}

std::pair<double, double> parity_weights(const WaveState& state) {
    const WaveState refl = parity_reflect(state);
    Eigen::VectorXcd even = 0.5 * (state.amplitudes + refl.amplitudes);
    Eigen::VectorXcd odd = 0.5 * (state.amplitudes - refl.amplitudes);
    return {even.squaredNorm(), odd.squaredNorm()};
}

double mean_position(const WaveState& state) {
    const WaveState pos = state.basis == Basis::Position ? state : to_position(state);
    const Eigen::VectorXd rho = pos.density();
    std::complex<double> m(0.0, 0.0);
    for (int j = 0; j < pos.spec.N; ++j) {
        const double angle = kTwoPi * pos.spec.position(j);
        m += rho[j] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    return wrap_unit(std::arg(m) / kTwoPi);
}

double mean_momentum(const WaveState& state) {
    const WaveState mom = state.basis == Basis::Momentum ? state : to_momentum(state);
    const Eigen::VectorXd rho = mom.density();
    std::complex<double> m(0.0, 0.0);
    for (int b = 0; b < mom.spec.N; ++b) {
        const double angle = kTwoPi * mom.spec.momentum(b);
        m += rho[b] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    double p = std::arg(m) / kTwoPi;  // in (-1/2, 1/2]
    if (p >= 0.5) p -= 1.0;
    return p;
}

double participation_ratio(const WaveState& state) {
    const double s4 = state.amplitudes.cwiseAbs2().squaredNorm();
    if (s4 == 0.0) throw std::invalid_argument("participation_ratio: zero state");
    return 1.0 / s4;
}

}  // namespace qkr
