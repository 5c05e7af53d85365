#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qkr/hilbert.hpp"
#include "qkr/rmt.hpp"

namespace {

// Integral representation J1(x) = (1/pi) int_0^pi cos(theta - x sin theta)
// dtheta, evaluated with Simpson's rule on a fine grid. Slow but independent
// of the series/asymptotic split used by the library.
double j1_quadrature(double x) {
    const int n = 20000;  // even
    const double h = qkr::kPi / n;
    auto f = [&](double th) { return std::cos(th - x * std::sin(th)); };
    double acc = f(0.0) + f(qkr::kPi);
    for (int i = 1; i < n; ++i) acc += f(i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / (3.0 * qkr::kPi);
}

}  // namespace

TEST_CASE("bessel J1 matches quadrature on both branches") {
    for (double x : {0.0, 0.1, 1.0, 3.8317, 7.0, 11.9, 12.1, 20.0, 45.0}) {
        const double expect = j1_quadrature(x);
        const double got = qkr::bessel_j1(x);
        CHECK(std::fabs(got - expect) < 2e-8);
        CHECK(qkr::bessel_j1(-x) == doctest::Approx(-got).epsilon(1e-15));
    }
}

TEST_CASE("ensemble matrices have the right symmetry and variances") {
    const int N = 80, count = 60;
    const qkr::GaussianEnsemble goe = qkr::sample_gaussian(N, 1, count, 17);
    REQUIRE(goe.matrices.size() == count);
    for (const auto& H : goe.matrices) {
        CHECK((H - H.transpose()).norm() == 0.0);  // exactly symmetric
        CHECK(H.imag().norm() == 0.0);
    }
    double diag2 = 0.0, off2 = 0.0;
    for (const auto& H : goe.matrices) {
        for (int i = 0; i < N; ++i) diag2 += std::norm(H(i, i));
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j) off2 += std::norm(H(i, j));
    }
    diag2 /= count * N;
    off2 /= count * N * (N - 1) / 2.0;
    CHECK(diag2 == doctest::Approx(2.0 / N).epsilon(0.15));
    CHECK(off2 == doctest::Approx(1.0 / N).epsilon(0.05));

    const qkr::GaussianEnsemble gue = qkr::sample_gaussian(N, 2, 40, 18);
    double gued = 0.0, guer = 0.0, guei = 0.0;
    for (const auto& H : gue.matrices) {
        CHECK((H - H.adjoint()).norm() == 0.0);  // exactly hermitian
        for (int i = 0; i < N; ++i) gued += std::norm(H(i, i));
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j) {
                guer += H(i, j).real() * H(i, j).real();
                guei += H(i, j).imag() * H(i, j).imag();
            }
    }
    gued /= 40.0 * N;
    guer /= 40.0 * N * (N - 1) / 2.0;
    guei /= 40.0 * N * (N - 1) / 2.0;
    CHECK(gued == doctest::Approx(1.0 / N).epsilon(0.15));
    CHECK(guer == doctest::Approx(0.5 / N).epsilon(0.08));
    CHECK(guei == doctest::Approx(0.5 / N).epsilon(0.08));

    CHECK_THROWS_AS(qkr::sample_gaussian(N, 3, 1, 1), std::invalid_argument);
}

TEST_CASE("semicircle law endpoints and midpoint") {
    CHECK(qkr::semicircle_cdf(-2.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(qkr::semicircle_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(qkr::semicircle_cdf(2.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(qkr::semicircle_cdf(-3.0) == 0.0);
    CHECK(qkr::semicircle_cdf(3.0) == 1.0);

    // CDF is the integral of the density.
    double acc = 0.0;
    const int n = 20000;
    const double h = 4.0 / n;
    for (int i = 0; i < n; ++i) acc += qkr::semicircle_density(-2.0 + (i + 0.5) * h) * h;
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(qkr::semicircle_density(0.0) == doctest::Approx(1.0 / qkr::kPi).epsilon(1e-14));
}

TEST_CASE("eigenvalue histogram hugs the semicircle") {
    const qkr::SpectrumSet s = qkr::spectra(qkr::sample_gaussian(120, 1, 30, 23));
    CHECK(s.total_levels() == 120 * 30);
    const double sup = qkr::empirical_density_check(s);
    CHECK(sup < 0.05);
    for (const auto& spec : s.spectra)
        CHECK(std::is_sorted(spec.data(), spec.data() + spec.size()));
}

TEST_CASE("time scales combine exactly") {
    CHECK(qkr::heisenberg_time(256, 0.01) == doctest::Approx(2.0 * 0.01 * 256).epsilon(1e-15));
    CHECK(qkr::scrambling_ratio(256) == doctest::Approx(1.9 / 512.0).epsilon(1e-15));
    const double hbar = 1.0 / (qkr::kTwoPi * 256);
    CHECK(qkr::scrambling_ratio(256) * qkr::heisenberg_time(256, hbar) ==
          doctest::Approx(1.9 * hbar).epsilon(1e-15));
    CHECK(qkr::kicked_rotor_ratio(256, std::log(4.0)) ==
          doctest::Approx(std::log(256.0) / (std::log(4.0) * 256)).epsilon(1e-14));
}

TEST_CASE("spectral autocorrelation follows the oscillatory prediction") {
    const double hbar = 1.0 / (qkr::kTwoPi * 128);
    const qkr::SpectrumSet s = qkr::spectra(qkr::sample_gaussian(128, 1, 40, 29));
    std::vector<double> t_grid;
    for (int k = 0; k <= 30; ++k) t_grid.push_back(5.0 * hbar * k / 30.0);
    const qkr::AutocorrelationSeries series = qkr::ensemble_autocorrelation(s, t_grid, hbar);
    REQUIRE(series.t.size() == t_grid.size());
    CHECK(series.empirical[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(series.predicted[0] == 1.0);
    for (size_t i = 1; i < series.t.size(); ++i)
        CHECK(std::fabs(series.empirical[i] - series.predicted[i]) < 0.08);
}

TEST_CASE("level repulsion shows up as missing small spacings") {
    const qkr::SpectrumSet goe = qkr::spectra(qkr::sample_gaussian(128, 1, 30, 31));
    const qkr::SpacingReport r = qkr::spacing_repulsion_check(goe, 1);
    CHECK(r.count >= 1000);
    CHECK(r.small_fraction < r.poisson_small_fraction / 2.0);
    CHECK(r.poisson_small_fraction == doctest::Approx(1.0 - std::exp(-0.1)).epsilon(1e-12));
    CHECK(r.repulsion_exponent > 0.5);

    const qkr::SpectrumSet tiny = qkr::spectra(qkr::sample_gaussian(16, 1, 2, 31));
    CHECK_THROWS_AS(qkr::spacing_repulsion_check(tiny, 1), std::invalid_argument);
}
