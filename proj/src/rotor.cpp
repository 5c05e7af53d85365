#include "qkr/rotor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qkr/fft.hpp"
#include "qkr/rng.hpp"

namespace qkr {

RotorParams::RotorParams(double k, const HilbertSpec& s) : K(k), spec(s) {
    if (!(k >= 0.0)) throw std::invalid_argument("RotorParams: kick strength K must be >= 0");
}

double DisorderVector::rms() const {
    if (eps.size() == 0) return 0.0;
    return std::sqrt(eps.squaredNorm() / static_cast<double>(eps.size()));
}

int ControlKicks::parameter_count() const {
    int n = main.harmonics();
    if (mid1) n += mid1->harmonics();
    if (mid2) n += mid2->harmonics();
    return n;
}

double ControlKicks::squared_norm() const {
    double s = main.squared_norm();
    if (mid1) s += mid1->squared_norm();
    if (mid2) s += mid2->squared_norm();
    return s;
}

double ControlKicks::rms() const {
    const int n = parameter_count();
    return n == 0 ? 0.0 : std::sqrt(squared_norm() / n);
}

namespace {

// Grid samples of sum_k eps_k cos(2 pi k q_j) through a length-N spectrum:
// harmonic k lands in DFT bin k mod N (k = N is the constant term), and the
// real part of the backward transform is the cosine sum.
Eigen::VectorXd grid_sample(const Eigen::Ref<const Eigen::VectorXd>& eps, int N,
                                Eigen::VectorXcd& scratch) {
    const int m = static_cast<int>(eps.size());
    if (m < 1 || m > N)
        throw std::invalid_argument("disorder: harmonic count must be in 1..N, got " +
                                    std::to_string(m));
    scratch.setZero(N);
    for (int k = 1; k <= m; ++k) scratch[k % N] += eps[k - 1];
    dft_backward(scratch);
    return std::sqrt(static_cast<double>(N)) * scratch.real();
}

}  // namespace

PotentialProfile disorder_potential(const DisorderVector& disorder, const HilbertSpec& spec) {
    Eigen::VectorXcd scratch;
    PotentialProfile out;
    out.values = grid_sample(disorder.eps, spec.N, scratch);
    out.rms = std::sqrt(out.values.squaredNorm() / spec.N);
    return out;
}

DisorderVector sample_disorder(const HilbertSpec& spec, int m, double scale, Rng& rng) {
    if (m < 1 || m > spec.N)
        throw std::invalid_argument("sample_disorder: harmonic count must be in 1.." +
                                    std::to_string(spec.N) + ", got " + std::to_string(m));
    if (scale < 0.0) throw std::invalid_argument("sample_disorder: scale must be >= 0");
    Eigen::VectorXd e(m);
    for (int k = 0; k < m; ++k) e[k] = rng.uniform(-scale, scale);
    return DisorderVector(std::move(e));
}

FloquetEngine::FloquetEngine(const RotorParams& params) : params_(params) {
    const int N = params_.spec.N;
    dft_warmup(N);

    kick_phase_.resize(N);
    const double kick_amp = params_.K * N / kTwoPi;
    for (int j = 0; j < N; ++j) {
        const double phi = kick_amp * std::cos(kTwoPi * params_.spec.position(j));
        kick_phase_[j] = std::complex<double>(std::cos(phi), std::sin(phi));
    }

    kin_full_.resize(N);
    kin_third_.resize(N);
    kin_two_thirds_.resize(N);
    for (int b = 0; b < N; ++b) {
        const double n2 = static_cast<double>(params_.spec.momentum_index(b)) *
                          static_cast<double>(params_.spec.momentum_index(b));
        const double full = -kPi * n2 / N;
        kin_full_[b] = std::complex<double>(std::cos(full), std::sin(full));
        const double third = full / 3.0;
        kin_third_[b] = std::complex<double>(std::cos(third), std::sin(third));
        const double two = 2.0 * full / 3.0;
        kin_two_thirds_[b] = std::complex<double>(std::cos(two), std::sin(two));
    }

    main_phase_ = kick_phase_;
}

Eigen::ArrayXcd FloquetEngine::phase_from_disorder(const Eigen::Ref<const Eigen::VectorXd>& eps,
                                                   bool include_kick) const {
    const int N = params_.spec.N;
    const Eigen::VectorXd v = grid_sample(eps, N, spectrum_scratch_);
    // Potential phase V/hbar = 2 pi N V on the grid.
    const Eigen::ArrayXd phi = kTwoPi * N * v.array();
    Eigen::ArrayXcd table(N);
    table.real() = phi.cos();
    table.imag() = phi.sin();
    if (include_kick) table *= kick_phase_;
    return table;
}

void FloquetEngine::set_disorder(const Eigen::Ref<const Eigen::VectorXd>& main,
                                 const Eigen::Ref<const Eigen::VectorXd>* mid1,
                                 const Eigen::Ref<const Eigen::VectorXd>* mid2) {
    main_phase_ = phase_from_disorder(main, true);
    if (mid1)
        mid1_phase_ = phase_from_disorder(*mid1, false);
    else
        mid1_phase_.reset();
    if (mid2)
        mid2_phase_ = phase_from_disorder(*mid2, false);
    else
        mid2_phase_.reset();
}

void FloquetEngine::set_kicks(const ControlKicks& kicks) {
    const Eigen::Ref<const Eigen::VectorXd> main(kicks.main.eps);
    if (kicks.mid1 && kicks.mid2) {
        const Eigen::Ref<const Eigen::VectorXd> m1(kicks.mid1->eps), m2(kicks.mid2->eps);
        set_disorder(main, &m1, &m2);
    } else if (kicks.mid1) {
        const Eigen::Ref<const Eigen::VectorXd> m1(kicks.mid1->eps);
        set_disorder(main, &m1, nullptr);
    } else if (kicks.mid2) {
        const Eigen::Ref<const Eigen::VectorXd> m2(kicks.mid2->eps);
        set_disorder(main, nullptr, &m2);
    } else {
        set_disorder(main, nullptr, nullptr);
    }
}

void FloquetEngine::step(Eigen::VectorXcd& psi) const {
    if (psi.size() != params_.spec.N)
        throw std::invalid_argument("FloquetEngine::step: state dimension mismatch");
    psi.array() *= main_phase_;
    if (!mid1_phase_ && !mid2_phase_) {
        dft_forward(psi);
        psi.array() *= kin_full_;
        dft_backward(psi);
        return;
    }
    if (mid1_phase_) {
        dft_forward(psi);
        psi.array() *= kin_third_;
        dft_backward(psi);
        psi.array() *= *mid1_phase_;
        if (mid2_phase_) {
            dft_forward(psi);
            psi.array() *= kin_third_;
            dft_backward(psi);
            psi.array() *= *mid2_phase_;
            dft_forward(psi);
            psi.array() *= kin_third_;
            dft_backward(psi);
        } else {
            dft_forward(psi);
            psi.array() *= kin_two_thirds_;
            dft_backward(psi);
        }
        return;
    }
    // mid2 only: first two thirds of the rotation come before it.
    dft_forward(psi);
    psi.array() *= kin_two_thirds_;
    dft_backward(psi);
    psi.array() *= *mid2_phase_;
    dft_forward(psi);
    psi.array() *= kin_third_;
    dft_backward(psi);
}

void FloquetEngine::propagate_in_place(Eigen::VectorXcd& psi, int periods) const {
    if (periods < 0) throw std::invalid_argument("propagate: period count must be >= 0");
    for (int t = 0; t < periods; ++t) step(psi);
}

WaveState FloquetEngine::apply(const WaveState& state) const { return propagate(state, 1); }

WaveState FloquetEngine::propagate(const WaveState& state, int periods) const {
    if (state.spec != params_.spec)
        throw std::invalid_argument("FloquetEngine: state dimension mismatch");
    if (state.basis == Basis::Momentum) {
        WaveState pos = to_position(state);
        propagate_in_place(pos.amplitudes, periods);
        return to_momentum(pos);
    }
    WaveState out = state;
    propagate_in_place(out.amplitudes, periods);
    return out;
}

WaveState apply_floquet(const WaveState& state, const RotorParams& params) {
    FloquetEngine engine(params);
    return engine.apply(state);
}

WaveState apply_perturbed_floquet(const WaveState& state, const RotorParams& params,
                                  const ControlKicks& kicks) {
    FloquetEngine engine(params);
    engine.set_kicks(kicks);
    return engine.apply(state);
}

WaveState propagate(const WaveState& state, const RotorParams& params, const ControlKicks& kicks,
                    int periods) {
    FloquetEngine engine(params);
    engine.set_kicks(kicks);
    return engine.propagate(state, periods);
}

Eigen::MatrixXcd dense_floquet_matrix(const RotorParams& params, const ControlKicks& kicks,
                                      int dense_limit) {
    const int N = params.spec.N;
    if (N > dense_limit)
        throw std::invalid_argument("dense_floquet_matrix: N=" + std::to_string(N) +
                                    " exceeds the dense-size limit " + std::to_string(dense_limit));
    FloquetEngine engine(params);
    engine.set_kicks(kicks);
    Eigen::MatrixXcd U(N, N);
    Eigen::VectorXcd col(N);
    for (int j = 0; j < N; ++j) {
        col.setZero();
        col[j] = 1.0;
        engine.step(col);
        U.col(j) = col;
    }
    return U;
}

}  // namespace qkr
