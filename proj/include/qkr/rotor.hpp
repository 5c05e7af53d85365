#pragma once

#include <Eigen/Dense>
#include <optional>

#include "qkr/hilbert.hpp"

namespace qkr {

// Kicked rotor on the unit torus. One driving period consists of the
// instantaneous kick exp(+i K cos(2 pi q) / (4 pi^2 hbar)) followed by free
// rotation exp(-i p^2 / (2 hbar)); with hbar = 1/(2 pi N) both phases are
// pure grid quantities:
//
//   kick     exp(+i (K N / 2 pi) cos(2 pi q_j))
//   kinetic  exp(-i pi n^2 / N)
struct RotorParams {
    double K;
    HilbertSpec spec;

    RotorParams(double k, const HilbertSpec& s);
};

// Harmonic amplitudes of a disorder potential
//   V(q) = sum_{k=1..N} eps_k cos(2 pi k q).
// On the N-site grid the resolvable harmonics stop at k = N; the size of
// eps is therefore capped by the dimension it is used with.
struct DisorderVector {
    Eigen::VectorXd eps;

    DisorderVector() = default;
    explicit DisorderVector(Eigen::VectorXd e) : eps(std::move(e)) {}
    static DisorderVector zeros(int n) { return DisorderVector(Eigen::VectorXd::Zero(n)); }

    int harmonics() const { return static_cast<int>(eps.size()); }
    double rms() const;
    double squared_norm() const { return eps.squaredNorm(); }
};

// V(q_j) sampled on the grid, plus its root mean square over the grid.
struct PotentialProfile {
    Eigen::VectorXd values;
    double rms = 0.0;
};

PotentialProfile disorder_potential(const DisorderVector& disorder, const HilbertSpec& spec);

// Draws m harmonic amplitudes uniformly from [-scale, scale]. The count is
// limited by what the grid can resolve.
class Rng;
DisorderVector sample_disorder(const HilbertSpec& spec, int m, double scale, Rng& rng);

// Control parameters for one driving period: a disorder kick merged into the
// main kick, and up to two extra kicks applied at 1/3 and 2/3 of the free
// rotation. Absent slots cost nothing; their kinetic segments are merged.
struct ControlKicks {
    DisorderVector main;
    std::optional<DisorderVector> mid1;
    std::optional<DisorderVector> mid2;

    static ControlKicks zeros(int n_harmonics) {
        ControlKicks k;
        k.main = DisorderVector::zeros(n_harmonics);
        return k;
    }

    int parameter_count() const;
    double squared_norm() const;
    double rms() const;  // rms over all active slots' entries
};

// Split-operator propagator with cached phase tables. set_kicks rebuilds
// only the disorder-dependent tables; stepping costs two FFTs per kinetic
// segment and elementwise phase multiplications.
class FloquetEngine {
public:
    explicit FloquetEngine(const RotorParams& params);

    const RotorParams& params() const { return params_; }

    void set_kicks(const ControlKicks& kicks);

    // Fast path for optimizer inner loops: same as set_kicks but reading
    // amplitude views directly, no intermediate copies.
    void set_disorder(const Eigen::Ref<const Eigen::VectorXd>& main,
                      const Eigen::Ref<const Eigen::VectorXd>* mid1,
                      const Eigen::Ref<const Eigen::VectorXd>* mid2);

    // One driving period on position-basis amplitudes, in place.
    void step(Eigen::VectorXcd& psi) const;

    void propagate_in_place(Eigen::VectorXcd& psi, int periods) const;

    // Basis-preserving wrappers.
    WaveState apply(const WaveState& state) const;
    WaveState propagate(const WaveState& state, int periods) const;

private:
    Eigen::ArrayXcd phase_from_disorder(const Eigen::Ref<const Eigen::VectorXd>& eps,
                                        bool include_kick) const;

    RotorParams params_;
    Eigen::ArrayXcd kick_phase_;      // unperturbed kick
    Eigen::ArrayXcd main_phase_;      // kick * disorder(main)
    Eigen::ArrayXcd kin_full_;        // full free rotation
    Eigen::ArrayXcd kin_third_;       // 1/3 of the free rotation
    Eigen::ArrayXcd kin_two_thirds_;  // 2/3 of the free rotation
    std::optional<Eigen::ArrayXcd> mid1_phase_;
    std::optional<Eigen::ArrayXcd> mid2_phase_;
    mutable Eigen::VectorXcd spectrum_scratch_;
};

// One-shot conveniences built on FloquetEngine.
WaveState apply_floquet(const WaveState& state, const RotorParams& params);
WaveState apply_perturbed_floquet(const WaveState& state, const RotorParams& params,
                                  const ControlKicks& kicks);
WaveState propagate(const WaveState& state, const RotorParams& params, const ControlKicks& kicks,
                    int periods);

// Dense matrix of the one-period operator in the position basis, built
// column by column. Guarded by dense_limit: quadratic memory.
Eigen::MatrixXcd dense_floquet_matrix(const RotorParams& params, const ControlKicks& kicks,
                                      int dense_limit = 1024);

}  // namespace qkr
