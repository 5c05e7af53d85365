#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace qkr {

// Gaussian random-matrix ensemble sample, normalized so the eigenvalue
// density approaches the radius-2 semicircle as N grows:
//   beta = 1 (orthogonal): real symmetric, Var(H_ii) = 2/N, Var(H_ij) = 1/N
//   beta = 2 (unitary): complex Hermitian, Var(H_ii) = 1/N, E|H_ij|^2 = 1/N
// Matrices are stored as complex Hermitian; beta = 1 members carry an
// exactly zero imaginary part.
struct GaussianEnsemble {
    int beta = 1;
    int N = 0;
    std::vector<Eigen::MatrixXcd> matrices;
};

GaussianEnsemble sample_gaussian(int N, int beta, int count, std::uint64_t seed);

// Sorted eigenvalues of every ensemble member.
struct SpectrumSet {
    int N = 0;
    std::vector<Eigen::VectorXd> spectra;
    long total_levels() const { return static_cast<long>(spectra.size()) * N; }
};

SpectrumSet spectra(const GaussianEnsemble& ensemble);

// Semicircle level density rho(E) = sqrt(4 - E^2) / (2 pi) and its
// cumulative integral (0 below -2, 1 above +2).
double semicircle_density(double E);
double semicircle_cdf(double E);

// Sup distance between the pooled eigenvalue histogram (bin width 0.1 on
// [-2.2, 2.2]) and the bin-averaged semicircle density.
double empirical_density_check(const SpectrumSet& s);

// Bessel function of the first kind, order one. Power series up to |x| = 12,
// large-argument asymptotics beyond.
double bessel_j1(double x);

double heisenberg_time(int N, double hbar);      // 2 hbar N
double scrambling_ratio(int N);                  // 1.9 / (2 N): J1-zero decay over Heisenberg
double kicked_rotor_ratio(int N, double lambda); // ln(N) / (lambda N): logtime over Heisenberg

// Ensemble-averaged return amplitude Re <alpha|alpha(t)> against the
// semicircle prediction hbar J1(2t/hbar) / t.
struct AutocorrelationSeries {
    std::vector<double> t;
    std::vector<double> empirical;
    std::vector<double> predicted;
};

AutocorrelationSeries ensemble_autocorrelation(const SpectrumSet& s,
                                               const std::vector<double>& t_grid, double hbar);

// Level-repulsion diagnostics on unfolded spacings (bulk levels |E| <= 1.9,
// unfolded via the analytic semicircle CDF, pooled across members).
struct SpacingReport {
    double small_fraction = 0.0;          // fraction of spacings below 0.1 of the mean
    double poisson_small_fraction = 0.0;  // 1 - exp(-0.1), the uncorrelated baseline
    double repulsion_exponent = 0.0;      // log-log slope of the small-s histogram
    long count = 0;                       // pooled spacings used
};

SpacingReport spacing_repulsion_check(const SpectrumSet& s, int beta);

}  // namespace qkr
