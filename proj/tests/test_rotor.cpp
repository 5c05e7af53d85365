#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "qkr/hilbert.hpp"
#include "qkr/rng.hpp"
#include "qkr/rotor.hpp"

using qkr::ControlKicks;
using qkr::DisorderVector;
using qkr::FloquetEngine;
using qkr::HilbertSpec;
using qkr::RotorParams;
using std::complex;

namespace {

DisorderVector random_disorder(int n, std::uint64_t seed, double scale) {
    qkr::Rng rng(seed);
    Eigen::VectorXd e(n);
    for (int i = 0; i < n; ++i) e[i] = scale * rng.uniform(-1.0, 1.0);
    return DisorderVector(std::move(e));
}

// Assembles one Floquet matrix from first principles: explicit transform
// matrices and diagonal phase factors, no engine code involved.
Eigen::MatrixXcd reference_floquet(const RotorParams& params, const ControlKicks& kicks) {
    const int N = params.spec.N;
    Eigen::MatrixXcd F(N, N);
    for (int k = 0; k < N; ++k)
        for (int j = 0; j < N; ++j)
            F(k, j) = std::polar(1.0 / std::sqrt(static_cast<double>(N)),
                                 -qkr::kTwoPi * j * k / N);
    const Eigen::MatrixXcd Finv = F.adjoint();

    auto kinetic = [&](double fraction) {
        Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(N, N);
        for (int b = 0; b < N; ++b) {
            const double n = params.spec.momentum_index(b);
            D(b, b) = std::polar(1.0, -qkr::kPi * n * n * fraction / N);
        }
        return Eigen::MatrixXcd(Finv * D * F);
    };
    auto position_phase = [&](const DisorderVector& eps, bool with_kick) {
        Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(N, N);
        for (int j = 0; j < N; ++j) {
            const double q = params.spec.position(j);
            double v = 0.0;
            for (int k = 1; k <= eps.harmonics(); ++k)
                v += eps.eps[k - 1] * std::cos(qkr::kTwoPi * k * q);
            double phase = qkr::kTwoPi * N * v;
            if (with_kick) phase += (params.K * N / qkr::kTwoPi) * std::cos(qkr::kTwoPi * q);
            D(j, j) = std::polar(1.0, phase);
        }
        return D;
    };

    Eigen::MatrixXcd U = position_phase(kicks.main, true);
    if (!kicks.mid1 && !kicks.mid2) return kinetic(1.0) * U;
    if (kicks.mid1 && kicks.mid2)
        return kinetic(1.0 / 3) * position_phase(*kicks.mid2, false) * kinetic(1.0 / 3) *
               position_phase(*kicks.mid1, false) * kinetic(1.0 / 3) * U;
    if (kicks.mid1)
        return kinetic(2.0 / 3) * position_phase(*kicks.mid1, false) * kinetic(1.0 / 3) * U;
    return kinetic(1.0 / 3) * position_phase(*kicks.mid2, false) * kinetic(2.0 / 3) * U;
}

}  // namespace

TEST_CASE("split-operator period matches a first-principles matrix") {
    const HilbertSpec spec(24);
    const RotorParams params(6.0, spec);

    ControlKicks kicks = ControlKicks::zeros(spec.N);
    SUBCASE("main slot only") { kicks.main = random_disorder(24, 31, 2e-3); }
    SUBCASE("main and first mid") {
        kicks.main = random_disorder(24, 32, 2e-3);
        kicks.mid1 = random_disorder(24, 33, 2e-3);
    }
    SUBCASE("main and second mid") {
        kicks.main = random_disorder(24, 34, 2e-3);
        kicks.mid2 = random_disorder(24, 35, 2e-3);
    }
    SUBCASE("all three slots") {
        kicks.main = random_disorder(24, 36, 2e-3);
        kicks.mid1 = random_disorder(24, 37, 2e-3);
        kicks.mid2 = random_disorder(24, 38, 2e-3);
    }

    const Eigen::MatrixXcd expect = reference_floquet(params, kicks);
    const Eigen::MatrixXcd got = qkr::dense_floquet_matrix(params, kicks);
    CHECK((got - expect).norm() < 1e-12);

    // And the engine agrees column by column.
    FloquetEngine engine(params);
    engine.set_kicks(kicks);
    Eigen::VectorXcd col = Eigen::VectorXcd::Zero(spec.N);
    col[7] = 1.0;
    engine.step(col);
    CHECK((col - expect.col(7)).norm() < 1e-12);
}

TEST_CASE("empty mid slots change nothing") {
    const HilbertSpec spec(32);
    const RotorParams params(8.0, spec);
    ControlKicks plain = ControlKicks::zeros(32);
    plain.main = random_disorder(32, 40, 1e-3);
    ControlKicks padded = plain;
    padded.mid1 = DisorderVector::zeros(32);
    padded.mid2 = DisorderVector::zeros(32);

    FloquetEngine a(params), b(params);
    a.set_kicks(plain);
    b.set_kicks(padded);
    Eigen::VectorXcd va = qkr::make_random(spec, 9).amplitudes;
    Eigen::VectorXcd vb = va;
    for (int t = 0; t < 10; ++t) {
        a.step(va);
        b.step(vb);
    }
    CHECK((va - vb).norm() < 1e-12);
}

TEST_CASE("propagation is unitary and linear") {
    const HilbertSpec spec(64);
    const RotorParams params(8.0, spec);
    ControlKicks kicks = ControlKicks::zeros(64);
    kicks.main = random_disorder(64, 50, 5e-3);
    kicks.mid1 = random_disorder(64, 51, 5e-3);
    kicks.mid2 = random_disorder(64, 52, 5e-3);
    FloquetEngine engine(params);
    engine.set_kicks(kicks);

    Eigen::VectorXcd psi = qkr::make_random(spec, 60).amplitudes;
    Eigen::VectorXcd phi = qkr::make_random(spec, 61).amplitudes;
    Eigen::VectorXcd combo = complex<double>(0.3, -0.4) * psi + complex<double>(1.1, 0.2) * phi;

    const double norm0 = psi.norm();
    Eigen::VectorXcd psi_t = psi, phi_t = phi, combo_t = combo;
    engine.propagate_in_place(psi_t, 100);
    CHECK(psi_t.norm() == doctest::Approx(norm0).epsilon(1e-12));

    engine.propagate_in_place(phi_t, 100);
    engine.propagate_in_place(combo_t, 100);
    CHECK((combo_t - (complex<double>(0.3, -0.4) * psi_t + complex<double>(1.1, 0.2) * phi_t))
              .norm() < 1e-10);
}

TEST_CASE("free evolution applies the exact kinetic phases") {
    const HilbertSpec spec(16);
    const RotorParams params(0.0, spec);
    FloquetEngine engine(params);  // no kicks set: K=0 and zero disorder

    // A momentum eigenstate only picks up the kinetic phase per period.
    for (int bin : {0, 3, 8, 13}) {
        qkr::WaveState psi(spec, qkr::Basis::Momentum);
        psi.amplitudes.setZero();
        psi.amplitudes[bin] = 1.0;
        qkr::WaveState pos = qkr::to_position(psi);
        engine.step(pos.amplitudes);
        const double n = spec.momentum_index(bin);
        const complex<double> expected_phase = std::polar(1.0, -qkr::kPi * n * n / spec.N);
        const qkr::WaveState back = qkr::to_momentum(pos);
        CHECK(std::abs(back.amplitudes[bin] - expected_phase) < 1e-13);
    }
}

TEST_CASE("sampled disorder potential equals the cosine sum") {
    const HilbertSpec spec(48);
    for (int m : {1, 5, 47, 48}) {
        const DisorderVector d = random_disorder(m, 70 + m, 0.1);
        const qkr::PotentialProfile profile = qkr::disorder_potential(d, spec);
        double sq = 0.0;
        for (int j = 0; j < spec.N; ++j) {
            const double q = spec.position(j);
            double v = 0.0;
            for (int k = 1; k <= m; ++k) v += d.eps[k - 1] * std::cos(qkr::kTwoPi * k * q);
            CHECK(profile.values[j] == doctest::Approx(v).epsilon(1e-10));
            sq += v * v;
        }
        CHECK(profile.rms == doctest::Approx(std::sqrt(sq / spec.N)).epsilon(1e-10));
    }
}

TEST_CASE("disorder sampling validates the harmonic count") {
    const HilbertSpec spec(32);
    qkr::Rng rng(1);
    CHECK_THROWS_AS(qkr::sample_disorder(spec, 0, 0.1, rng), std::invalid_argument);
    CHECK_THROWS_AS(qkr::sample_disorder(spec, 33, 0.1, rng), std::invalid_argument);
    const DisorderVector d = qkr::sample_disorder(spec, 32, 0.1, rng);
    CHECK(d.harmonics() == 32);
    CHECK(d.rms() == doctest::Approx(std::sqrt(d.squared_norm() / 32)).epsilon(1e-12));
}

TEST_CASE("kick amplitudes validate their shape") {
    const HilbertSpec spec(32);
    const RotorParams params(8.0, spec);
    FloquetEngine engine(params);
    // Fewer harmonics than the grid holds is fine; more is not resolvable.
    CHECK_NOTHROW(engine.set_kicks(ControlKicks::zeros(16)));
    CHECK_THROWS_AS(engine.set_kicks(ControlKicks::zeros(33)), std::invalid_argument);
    CHECK_THROWS_AS(RotorParams(-1.0, spec), std::invalid_argument);
}
