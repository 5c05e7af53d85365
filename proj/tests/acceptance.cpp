// Acceptance gate for the full pipeline. Each numbered criterion prints one
// PASS/FAIL line with the measured values next to its threshold; the exit
// code is the number of failures. Workloads run at CI scale (N <= 256) with
// pinned seeds, so every number printed here is reproducible bit for bit.
//
// Expect roughly half an hour of runtime on one core; the control
// optimizations dominate.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "qkr/classical.hpp"
#include "qkr/control.hpp"
#include "qkr/hilbert.hpp"
#include "qkr/rmt.hpp"
#include "qkr/rng.hpp"
#include "qkr/rotor.hpp"
#include "qkr/spectral.hpp"
#include "qkr/timescales.hpp"

using namespace qkr;

namespace {

int g_failures = 0;

void report(int number, bool ok, const std::string& detail) {
    std::printf("criterion %2d %s  %s\n", number, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(const char* pattern, ...) {
    va_list args;
    va_start(args, pattern);
    char buffer[512];
    std::vsnprintf(buffer, sizeof buffer, pattern, args);
    va_end(args);
    return buffer;
}

// Shared artifacts: criterion 9 reuses the revival optimum of criterion 1.
struct RevivalOutcome {
    bool ok = false;
    double fidelity = 0.0;
    ControlKicks kicks;
};

RevivalOutcome criterion_1_revival() {
    constexpr double kMinFidelity = 0.99;
    const HilbertSpec spec(64);
    const RotorParams params(8.0, spec);
    const WaveState packet = make_gaussian(spec, 0.5, 0.0);
    ControlProblem problem{params, packet, packet, 10, 25.0, ActiveSlots::main_only()};
    OptimizerConfig cfg;
    cfg.max_iterations = 200;
    cfg.restarts = 2;
    cfg.seed = 20250901;

    RevivalOutcome out;
    const ControlReport rep = revival_control(problem, cfg);
    const OptimizationResult& best = rep.best();
    out.fidelity = best.fidelity;
    out.kicks = best.kicks;
    out.ok = best.fidelity >= kMinFidelity;
    report(1, out.ok,
           fmt("revival N=64 K=8 t*=10 main slot: F=%.6f (need >= %.2f), potential rms %.4f",
               best.fidelity, kMinFidelity, best.potential_rms));
    return out;
}

void criterion_2_cat_and_random() {
    constexpr double kMinFidelity = 0.995;
    const HilbertSpec spec(64);
    const RotorParams params(8.0, spec);

    OptimizerConfig cfg;
    cfg.init_scale = spec.hbar();

    const WaveState packet = make_gaussian(spec, 0.5, 0.0);
    const WaveState cat = make_cat(spec, 0.25, 0.75, 0.0);
    ControlProblem to_cat{params, packet, cat, 5, 25.0, ActiveSlots::all()};
    cfg.max_iterations = 400;
    cfg.restarts = 2;
    cfg.seed = 20250902;
    const double f_cat = optimize_control(to_cat, cfg).best().fidelity;

    const WaveState initial = make_random(spec, mix_seed(4101, 1));
    const WaveState target = random_orthogonal_target(initial, mix_seed(4101, 2));
    ControlProblem to_random{params, initial, target, 5, 25.0, ActiveSlots::all()};
    cfg.max_iterations = 500;
    cfg.restarts = 8;
    cfg.seed = 20250903;
    const double f_rand = optimize_control(to_random, cfg).best().fidelity;

    const bool ok = f_cat >= kMinFidelity && f_rand >= kMinFidelity;
    report(2, ok,
           fmt("pair transfer N=64 t*=5 all slots: cat F=%.6f, random F=%.6f (need >= %.3f)",
               f_cat, f_rand, kMinFidelity));
}

void criterion_3_echo_bound() {
    const HilbertSpec spec(128);
    const RotorParams params(8.0, spec);
    const double bound = 3.0 / spec.N;

    bool ok = true;
    std::string detail = "echo after control, N=128:";
    for (int t_star : {5, 10, 20}) {
        const std::uint64_t pair_seed = mix_seed(20250911, static_cast<std::uint64_t>(t_star));
        const WaveState initial = make_random(spec, mix_seed(pair_seed, 1));
        const WaveState target = random_orthogonal_target(initial, mix_seed(pair_seed, 2));
        ControlProblem problem{params, initial, target, t_star, 25.0, ActiveSlots::all()};
        OptimizerConfig cfg;
        // The echo at t* carries a residual-state floor of order (1-F) on top
        // of the 1/N scrambled baseline, and that floor is largest at the
        // shortest horizon, so t*=5 gets the deepest optimization: basin
        // quality keeps improving through the first handful of restarts at
        // this size. The longer horizons sit near the baseline already and
        // keep lighter budgets.
        cfg.max_iterations = t_star <= 5 ? 400 : (t_star >= 20 ? 200 : 300);
        cfg.restarts = t_star <= 5 ? 6 : 1;
        cfg.seed = mix_seed(pair_seed, 3);
        cfg.init_scale = spec.hbar();
        const ControlReport rep = optimize_control(problem, cfg);
        const OptimizationResult& best = rep.best();
        const EchoSeries echo = loschmidt_echo(initial, params, best.kicks, t_star);
        const double c_at_t = echo.values.back();
        const bool within = best.fidelity >= 0.9 && c_at_t <= bound;
        ok = ok && within;
        detail += fmt(" t*=%d C=%.5f", t_star, c_at_t);
    }
    detail += fmt(" (need <= 3/N = %.5f)", bound);
    report(3, ok, detail);
}

void criterion_4_saturation() {
    constexpr double kMinMean = 0.99;
    constexpr double kMaxStd = 0.01;
    constexpr int kPairs = 8;
    const HilbertSpec spec(128);
    const RotorParams params(8.0, spec);
    const int t_star = 5;

    std::vector<double> fids;
    for (int pi = 0; pi < kPairs; ++pi) {
        const std::uint64_t pair_seed =
            mix_seed(20250904, (static_cast<std::uint64_t>(t_star) << 24) + pi);
        const WaveState initial = make_random(spec, mix_seed(pair_seed, 1));
        const WaveState target = random_orthogonal_target(initial, mix_seed(pair_seed, 2));
        ControlProblem problem{params, initial, target, t_star, 25.0, ActiveSlots::all()};
        OptimizerConfig cfg;
        cfg.max_iterations = 400;
        // Single starts land in basins ~0.989 deep; the best of a few lands
        // ~0.991. Four is where the prefix mean stops paying for the runtime.
        cfg.restarts = 4;
        cfg.seed = mix_seed(pair_seed, 3);
        cfg.init_scale = spec.hbar();
        fids.push_back(optimize_control(problem, cfg).best().fidelity);
    }
    double mean = 0.0;
    for (double f : fids) mean += f;
    mean /= fids.size();
    double var = 0.0;
    for (double f : fids) var += (f - mean) * (f - mean);
    const double stdev = std::sqrt(var / (fids.size() - 1));

    const bool ok = mean >= kMinMean && stdev < kMaxStd;
    report(4, ok,
           fmt("saturation N=128 t*=5 over %d random pairs: mean F=%.6f (need >= %.2f), "
               "std %.2e (need < %.2f)",
               kPairs, mean, kMinMean, stdev, kMaxStd));
}

void criterion_5_amplitude_scaling() {
    constexpr double kSlopeTarget = 1.0;
    constexpr double kSlopeTol = 0.3;

    auto run = [](double K) {
        SweepConfig cfg;
        cfg.sizes = {32, 64, 128};
        cfg.K = K;
        cfg.t_star = 5;
        cfg.pairs = 2;
        cfg.optimizer.max_iterations = 200;
        cfg.optimizer.restarts = 1;
        cfg.optimizer.seed = 20250905;
        return run_scaling_sweep(cfg);
    };
    const ScalingSweep chaotic = run(8.0);
    const ScalingSweep integrable = run(0.0);

    const bool ok = chaotic.slope_valid && integrable.slope_valid &&
                    std::abs(chaotic.slope - kSlopeTarget) <= kSlopeTol &&
                    std::abs(integrable.slope - kSlopeTarget) <= kSlopeTol;
    report(5, ok,
           fmt("eps_rms vs hbar over N={32,64,128}, t*=5: slope %.3f (K=8), %.3f (K=0); "
               "need %.1f +- %.1f",
               chaotic.slope, integrable.slope, kSlopeTarget, kSlopeTol));
}

void criterion_6_integrability_breaking() {
    const HilbertSpec spec(64);
    const RotorParams params(0.0, spec);
    const WaveState initial = make_random(spec, mix_seed(20250906, 1));
    const WaveState target = random_orthogonal_target(initial, mix_seed(20250906, 2));
    ControlProblem problem{params, initial, target, 5, 25.0, ActiveSlots::all()};
    OptimizerConfig cfg;
    cfg.max_iterations = 300;
    cfg.restarts = 1;
    cfg.seed = 20250906;
    cfg.init_scale = spec.hbar();
    const ControlReport rep = optimize_control(problem, cfg);
    const OptimizationResult& best = rep.best();

    // The classical map sees the disorder carried by the physical kick.
    const DisorderVector& disorder = best.kicks.main;
    const double chaos =
        chaos_fraction(poincare_section(0.0, &disorder, 24, 4000, 20250906), 32);
    const double lambda = lyapunov_exponent(0.0, &disorder, 20000, 16, 20250906);
    const double chaos_free =
        chaos_fraction(poincare_section(0.0, nullptr, 24, 4000, 20250906), 32);
    const double lambda_free = lyapunov_exponent(0.0, nullptr, 20000, 16, 20250906);

    const bool ok = best.fidelity >= 0.9 && chaos >= 0.8 && lambda > 0.1 &&
                    chaos_free <= 0.1 && std::abs(lambda_free) < 1e-3;
    report(6, ok,
           fmt("K=0 control disorder (F=%.4f): chaos fraction %.3f (need >= 0.8), lambda %.3f "
               "(need > 0.1); free map: %.3f (need <= 0.1), |lambda| %.1e (need < 1e-3)",
               best.fidelity, chaos, lambda, chaos_free, std::abs(lambda_free)));
}

void criterion_7_lyapunov() {
    constexpr double kRelTol = 0.10;
    const double l8 = lyapunov_exponent(8.0, nullptr, 20000, 16, 20250907);
    const double l20 = lyapunov_exponent(20.0, nullptr, 20000, 16, 20250907);
    const double want8 = std::log(4.0);
    const double want20 = std::log(10.0);
    const bool ok = std::abs(l8 - want8) <= kRelTol * want8 &&
                    std::abs(l20 - want20) <= kRelTol * want20;
    report(7, ok,
           fmt("Lyapunov exponents: K=8 %.4f vs ln4=%.4f, K=20 %.4f vs ln10=%.4f (10%% band)",
               l8, want8, l20, want20));
}

void criterion_8_spectral_equivalence() {
    constexpr double kSpectralTol = 1e-8;
    constexpr double kDenseTol = 1e-10;

    // Spectral sum against step-by-step propagation, N=64.
    double worst_spectral = 0.0;
    {
        const HilbertSpec spec(64);
        const RotorParams params(8.0, spec);
        Rng rng(20250908);
        ControlKicks kicks;
        kicks.main = sample_disorder(spec, spec.N, 1e-3, rng);
        kicks.mid1 = sample_disorder(spec, spec.N, 1e-3, rng);
        kicks.mid2 = sample_disorder(spec, spec.N, 1e-3, rng);

        const SpectralDecomposition dec = decompose(dense_floquet_matrix(params, kicks));
        const WaveState psi = make_random(spec, 777);
        FloquetEngine engine(params);
        engine.set_kicks(kicks);
        WaveState phi = psi;
        for (int t = 1; t <= 100; ++t) {
            phi = engine.apply(phi);
            const std::complex<double> direct = overlap(psi, phi);
            const std::complex<double> viaspec = autocorrelation_spectral(psi, dec, t);
            worst_spectral = std::max(worst_spectral, std::abs(direct - viaspec));
        }
    }

    // Dense matrix powers against the split-operator engine, N=32.
    double worst_dense = 0.0;
    {
        const HilbertSpec spec(32);
        const RotorParams params(8.0, spec);
        Rng rng(20250918);
        ControlKicks kicks;
        kicks.main = sample_disorder(spec, spec.N, 1e-3, rng);
        kicks.mid1 = sample_disorder(spec, spec.N, 1e-3, rng);
        kicks.mid2 = sample_disorder(spec, spec.N, 1e-3, rng);

        const Eigen::MatrixXcd U = dense_floquet_matrix(params, kicks);
        FloquetEngine engine(params);
        engine.set_kicks(kicks);
        const WaveState psi = make_random(spec, 778);
        Eigen::VectorXcd dense_amps = psi.amplitudes;
        WaveState split = psi;
        for (int t = 1; t <= 100; ++t) {
            dense_amps = (U * dense_amps).eval();
            split = engine.apply(split);
            worst_dense = std::max(
                worst_dense, (dense_amps - split.amplitudes).cwiseAbs().maxCoeff());
        }
    }

    const bool ok = worst_spectral <= kSpectralTol && worst_dense <= kDenseTol;
    report(8, ok,
           fmt("spectral sum vs propagation (N=64, t<=100): %.2e (need <= 1e-8); dense vs "
               "split (N=32): %.2e (need <= 1e-10)",
               worst_spectral, worst_dense));
}

void criterion_9_phase_alignment(const RevivalOutcome& revival) {
    constexpr double kSlack = 1e-6;
    const HilbertSpec spec(64);
    const RotorParams params(8.0, spec);
    const WaveState packet = make_gaussian(spec, 0.5, 0.0);

    const SpectralDecomposition dec =
        decompose(dense_floquet_matrix(params, revival.kicks));
    const Eigen::VectorXd intens = intensities(packet, dec);
    const double aligned = phase_alignment(intens, dec, 10);
    const double via_spectral = std::abs(autocorrelation_spectral(packet, dec, 10));

    const bool ok = aligned >= revival.fidelity - kSlack && aligned == via_spectral;
    report(9, ok,
           fmt("phase alignment at t*=10: %.6f vs revival F=%.6f (allow -1e-6); spectral "
               "return amplitude %.6f (must match bit for bit: %s)",
               aligned, revival.fidelity, via_spectral, aligned == via_spectral ? "yes" : "no"));
}

void criterion_10_rmt_suite() {
    constexpr double kDensitySup = 0.03;
    constexpr double kAutocorrTol = 0.05;
    constexpr double kSmallSpacingMax = 0.02;
    const int N = 256;
    const double hbar = 1.0 / (2.0 * M_PI * N);

    const SpectrumSet s = spectra(sample_gaussian(N, 1, 50, 20250909));
    const double sup = empirical_density_check(s);

    std::vector<double> t_grid;
    for (int i = 1; i <= 48; ++i) t_grid.push_back(5.0 * hbar * i / 48.0);
    const AutocorrelationSeries ac = ensemble_autocorrelation(s, t_grid, hbar);
    double ac_dev = 0.0;
    for (size_t i = 0; i < ac.t.size(); ++i)
        ac_dev = std::max(ac_dev, std::abs(ac.empirical[i] - ac.predicted[i]));

    const double product = scrambling_ratio(N) * heisenberg_time(N, hbar);
    const bool product_exact = product == 1.9 * hbar;

    const SpacingReport spacing = spacing_repulsion_check(s, 1);

    const bool ok = sup <= kDensitySup && ac_dev <= kAutocorrTol && product_exact &&
                    spacing.small_fraction < kSmallSpacingMax;
    report(10, ok,
           fmt("GOE N=256 x50: density sup %.4f (need <= 0.03); autocorr dev %.4f (need <= "
               "0.05); ratio*heisenberg == 1.9hbar: %s; small-spacing fraction %.4f (need < "
               "0.02, Poisson %.3f)",
               sup, ac_dev, product_exact ? "exact" : "NOT exact", spacing.small_fraction,
               spacing.poisson_small_fraction));
}

void criterion_11_formula_identities() {
    constexpr double kTol = 1e-12;
    Rng rng(20250910);
    int bad = 0;
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        TimescaleInputs in;
        in.n_eff = rng.uniform(10.0, 1e6);
        in.h_ks = rng.uniform(0.1, 3.0);
        in.k_diff = rng.uniform(0.05, 10.0);
        in.hbar = rng.uniform(1e-4, 1.0);
        in.t_star = logtime(in.n_eff, in.h_ks);
        const double via_t = epsilon_star(in, EpsilonVariant::Semiclassical);
        const double closed = epsilon_star(in, EpsilonVariant::Saturation);
        const double d1 = std::abs(via_t - closed) / std::max(1.0, std::abs(closed));

        const double lambda_bar = rng.uniform(0.1, 3.0);
        const double v1 = rng.uniform(0.5, 4.0);
        const double h = rng.uniform(0.01, 1.0);
        const int D = 1 + static_cast<int>(rng.uniform(0.0, 5.0));
        const double volume_form =
            logtime_volume(D * lambda_bar, std::pow(v1, D), 1.0, h, D);
        const double per_dof = logtime_per_dof(lambda_bar, v1, h);
        const double d2 = std::abs(volume_form - per_dof) / std::max(1.0, std::abs(per_dof));

        worst = std::max(worst, std::max(d1, d2));
        if (d1 > kTol || d2 > kTol) ++bad;
    }
    report(11, bad == 0,
           fmt("timescale identities over 200 random draws: worst deviation %.2e (need <= "
               "1e-12), %d violations",
               worst, bad));
}

}  // namespace

int main(int argc, char** argv) {
    // Optional arguments select criteria by number (for focused reruns);
    // no arguments runs all eleven.
    std::vector<bool> wanted(12, argc <= 1);
    for (int i = 1; i < argc; ++i) {
        const int n = std::atoi(argv[i]);
        if (n < 1 || n > 11) {
            std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
            return 64;
        }
        wanted[static_cast<size_t>(n)] = true;
    }
    // Criterion 9 replays criterion 1's optimum, so selecting 9 pulls in 1;
    // the count and the final tally then cover both printed lines.
    if (wanted[9]) wanted[1] = true;
    int selected = 0;
    for (int n = 1; n <= 11; ++n) selected += wanted[static_cast<size_t>(n)] ? 1 : 0;

    std::printf("acceptance gate: %d criteria, pinned seeds, CI scales\n", selected);
    RevivalOutcome revival;
    if (wanted[1]) revival = criterion_1_revival();
    if (wanted[2]) criterion_2_cat_and_random();
    if (wanted[3]) criterion_3_echo_bound();
    if (wanted[4]) criterion_4_saturation();
    if (wanted[5]) criterion_5_amplitude_scaling();
    if (wanted[6]) criterion_6_integrability_breaking();
    if (wanted[7]) criterion_7_lyapunov();
    if (wanted[8]) criterion_8_spectral_equivalence();
    if (wanted[9]) {
        if (revival.ok) {
            criterion_9_phase_alignment(revival);
        } else {
            report(9, false, "phase alignment skipped: criterion 1 produced no usable optimum");
        }
    }
    if (wanted[10]) criterion_10_rmt_suite();
    if (wanted[11]) criterion_11_formula_identities();

    std::printf("acceptance: %d/%d criteria passed\n", selected - g_failures, selected);
    return g_failures;
}
