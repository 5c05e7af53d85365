#include "qkr/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qkr/hilbert.hpp"
#include "qkr/rng.hpp"

namespace qkr {

GaussianEnsemble sample_gaussian(int N, int beta, int count, std::uint64_t seed) {
    if (N < 2) throw std::invalid_argument("sample_gaussian: N must be >= 2");
    if (count < 1) throw std::invalid_argument("sample_gaussian: count must be >= 1");
    if (beta != 1 && beta != 2)
        throw std::invalid_argument("sample_gaussian: beta must be 1 (GOE) or 2 (GUE)");

    GaussianEnsemble ensemble;
    ensemble.beta = beta;
    ensemble.N = N;
    ensemble.matrices.reserve(count);
    const double diag_sd = beta == 1 ? std::sqrt(2.0 / N) : std::sqrt(1.0 / N);
    const double off_sd = beta == 1 ? std::sqrt(1.0 / N) : std::sqrt(0.5 / N);

    for (int m = 0; m < count; ++m) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(m)));
        Eigen::MatrixXcd H(N, N);
        for (int i = 0; i < N; ++i) {
            H(i, i) = diag_sd * rng.normal();
            for (int j = i + 1; j < N; ++j) {
                if (beta == 1) {
                    const double v = off_sd * rng.normal();
                    H(i, j) = v;
                    H(j, i) = v;
                } else {
                    const std::complex<double> v(off_sd * rng.normal(), off_sd * rng.normal());
                    H(i, j) = v;
                    H(j, i) = std::conj(v);
                }
            }
        }
        ensemble.matrices.push_back(std::move(H));
    }
    return ensemble;
}

SpectrumSet spectra(const GaussianEnsemble& ensemble) {
    if (ensemble.matrices.empty()) throw std::invalid_argument("spectra: empty ensemble");
    SpectrumSet out;
    out.N = ensemble.N;
    out.spectra.reserve(ensemble.matrices.size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver;
    for (const auto& H : ensemble.matrices) {
        solver.compute(H, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("spectra: eigenvalue iteration failed");
        out.spectra.push_back(solver.eigenvalues());  // ascending by construction
    }
    return out;
}

double semicircle_density(double E) {
    if (E <= -2.0 || E >= 2.0) return 0.0;
    return std::sqrt(4.0 - E * E) / kTwoPi;
}

double semicircle_cdf(double E) {
    if (E <= -2.0) return 0.0;
    if (E >= 2.0) return 1.0;
    return 0.5 + (E * std::sqrt(4.0 - E * E) + 4.0 * std::asin(0.5 * E)) / (2.0 * kTwoPi);
}

double empirical_density_check(const SpectrumSet& s) {
    if (s.spectra.empty()) throw std::invalid_argument("empirical_density_check: empty spectra");
    constexpr double kLo = -2.2, kHi = 2.2, kWidth = 0.1;
    const int n_bins = static_cast<int>(std::round((kHi - kLo) / kWidth));
    std::vector<long> counts(n_bins, 0);
    long total = 0;
    for (const auto& spec : s.spectra) {
        total += spec.size();
        for (int i = 0; i < spec.size(); ++i) {
            const double E = spec[i];
            if (E < kLo || E >= kHi) continue;  // far outliers are left out of the bins
            ++counts[static_cast<int>((E - kLo) / kWidth)];
        }
    }
    double sup = 0.0;
    for (int b = 0; b < n_bins; ++b) {
        const double lo = kLo + b * kWidth;
        const double hi = lo + kWidth;
        const double analytic = (semicircle_cdf(hi) - semicircle_cdf(lo)) / kWidth;
        const double empirical = static_cast<double>(counts[b]) / (total * kWidth);
        sup = std::max(sup, std::fabs(empirical - analytic));
    }
    return sup;
}

double bessel_j1(double x) {
    const double ax = std::fabs(x);
    if (ax <= 12.0) {
        // Power series J1(x) = (x/2) sum_m (-x^2/4)^m / (m! (m+1)!)
        const double q = -0.25 * x * x;
        double term = 0.5 * x;
        double sum = term;
        for (int m = 1; m <= 40; ++m) {
            term *= q / (static_cast<double>(m) * (m + 1));
            sum += term;
            if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
        }
        return sum;
    }
    // Large-argument asymptotics (Hankel expansion, three correction terms
    // in each series; good to a few 1e-9 down to the branch point).
    const double z = 1.0 / ax;
    const double z2 = z * z;
    const double P =
        1.0 + z2 * (0.1171875 + z2 * (-0.144195556640625 + z2 * 0.6765925884246826));
    const double Q =
        z * (0.375 + z2 * (-0.1025390625 + z2 * (0.2775764465332031 + z2 * -1.993531733751297)));
    const double chi = ax - 2.356194490192344929;  // 3 pi / 4
    const double value = std::sqrt(2.0 / (kPi * ax)) * (P * std::cos(chi) - Q * std::sin(chi));
    return x < 0.0 ? -value : value;
}

double heisenberg_time(int N, double hbar) {
    if (N < 1 || hbar <= 0.0) throw std::invalid_argument("heisenberg_time: bad inputs");
    return 2.0 * hbar * N;
}

double scrambling_ratio(int N) {
    if (N < 1) throw std::invalid_argument("scrambling_ratio: N must be >= 1");
    return 1.9 / (2.0 * N);
}

double kicked_rotor_ratio(int N, double lambda) {
    if (N < 2 || lambda <= 0.0) throw std::invalid_argument("kicked_rotor_ratio: bad inputs");
    return std::log(static_cast<double>(N)) / (lambda * N);
}

AutocorrelationSeries ensemble_autocorrelation(const SpectrumSet& s,
                                               const std::vector<double>& t_grid, double hbar) {
    if (s.spectra.empty())
        throw std::invalid_argument("ensemble_autocorrelation: empty spectra");
    if (hbar <= 0.0) throw std::invalid_argument("ensemble_autocorrelation: hbar must be > 0");
    AutocorrelationSeries series;
    series.t = t_grid;
    series.empirical.reserve(t_grid.size());
    series.predicted.reserve(t_grid.size());
    const double inv_members = 1.0 / static_cast<double>(s.spectra.size());
    for (const double t : t_grid) {
        double acc = 0.0;
        for (const auto& spec : s.spectra) {
            double re = 0.0;
            for (int i = 0; i < spec.size(); ++i) re += std::cos(spec[i] * t / hbar);
            acc += re / static_cast<double>(spec.size());
        }
        series.empirical.push_back(acc * inv_members);
        series.predicted.push_back(t == 0.0 ? 1.0 : hbar * bessel_j1(2.0 * t / hbar) / t);
    }
    return series;
}

SpacingReport spacing_repulsion_check(const SpectrumSet& s, int beta) {
    if (beta != 1 && beta != 2)
        throw std::invalid_argument("spacing_repulsion_check: beta must be 1 or 2");
    // Unfold with the analytic CDF and keep bulk levels; the density model
    // fails in the tails, where unfolding would fabricate tiny spacings.
    constexpr double kBulkEdge = 1.9;
    std::vector<double> spacings;
    for (const auto& spec : s.spectra) {
        double prev = 0.0;
        bool have_prev = false;
        for (int i = 0; i < spec.size(); ++i) {
            const double E = spec[i];
            if (std::fabs(E) > kBulkEdge) {
                have_prev = false;
                continue;
            }
            const double u = s.N * semicircle_cdf(E);
            if (have_prev) spacings.push_back(u - prev);
            prev = u;
            have_prev = true;
        }
    }
    if (spacings.size() < 1000)
        throw std::invalid_argument("spacing_repulsion_check: need >= 1000 pooled spacings, have " +
                                    std::to_string(spacings.size()));

    double mean = 0.0;
    for (double v : spacings) mean += v;
    mean /= static_cast<double>(spacings.size());

    SpacingReport report;
    report.count = static_cast<long>(spacings.size());
    report.poisson_small_fraction = 1.0 - std::exp(-0.1);
    long below = 0;
    for (double v : spacings)
        if (v < 0.1 * mean) ++below;
    report.small_fraction = static_cast<double>(below) / static_cast<double>(spacings.size());

    // Repulsion exponent: slope of log(density) vs log(s) over the rising
    // part of the spacing histogram.
    constexpr int kBins = 10;
    constexpr double kSmallMax = 0.5;
    std::vector<long> hist(kBins, 0);
    for (double v : spacings) {
        const double sn = v / mean;
        if (sn <= 0.0 || sn >= kSmallMax) continue;
        ++hist[static_cast<int>(sn / (kSmallMax / kBins))];
    }
    std::vector<double> lx, ly;
    for (int b = 0; b < kBins; ++b) {
        if (hist[b] == 0) continue;
        const double mid = (b + 0.5) * (kSmallMax / kBins);
        lx.push_back(std::log(mid));
        ly.push_back(std::log(static_cast<double>(hist[b])));
    }
    if (lx.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t i = 0; i < lx.size(); ++i) {
            sx += lx[i];
            sy += ly[i];
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
        }
        const double n = static_cast<double>(lx.size());
        report.repulsion_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return report;
}

}  // namespace qkr
