#include "qkr/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "qkr/classical.hpp"
#include "qkr/control.hpp"
#include "qkr/io.hpp"
#include "qkr/rmt.hpp"
#include "qkr/rng.hpp"
#include "qkr/spectral.hpp"
#include "qkr/threading.hpp"
#include "qkr/timescales.hpp"
#include "qkr/version.hpp"

namespace qkr {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Strict parameter reader: every key must be asked for, leftovers are
// reported as configuration errors so typos do not silently fall back to
// defaults.
class Params {
public:
    explicit Params(const json& p) : p_(p) {
        if (!p_.is_object()) throw std::invalid_argument("config: 'parameters' must be an object");
    }

    double num(const std::string& key, double dflt) const {
        seen_.insert(key);
        if (!p_.contains(key)) return dflt;
        if (!p_.at(key).is_number())
            throw std::invalid_argument("config: parameter '" + key + "' must be a number");
        return p_.at(key).get<double>();
    }

    int integer(const std::string& key, int dflt) const {
        seen_.insert(key);
        if (!p_.contains(key)) return dflt;
        if (!p_.at(key).is_number_integer())
            throw std::invalid_argument("config: parameter '" + key + "' must be an integer");
        return p_.at(key).get<int>();
    }

    std::uint64_t seed(const std::string& key, std::uint64_t dflt) const {
        seen_.insert(key);
        if (!p_.contains(key)) return dflt;
        if (!p_.at(key).is_number_unsigned() && !p_.at(key).is_number_integer())
            throw std::invalid_argument("config: parameter '" + key + "' must be an integer seed");
        return p_.at(key).get<std::uint64_t>();
    }

    bool flag(const std::string& key, bool dflt) const {
        seen_.insert(key);
        if (!p_.contains(key)) return dflt;
        if (!p_.at(key).is_boolean())
            throw std::invalid_argument("config: parameter '" + key + "' must be a boolean");
        return p_.at(key).get<bool>();
    }

    std::string str(const std::string& key, const std::string& dflt) const {
        seen_.insert(key);
        if (!p_.contains(key)) return dflt;
        if (!p_.at(key).is_string())
            throw std::invalid_argument("config: parameter '" + key + "' must be a string");
        return p_.at(key).get<std::string>();
    }

    std::vector<int> int_list(const std::string& key, std::vector<int> dflt) const {
        seen_.insert(key);
        if (!p_.contains(key)) return dflt;
        if (!p_.at(key).is_array())
            throw std::invalid_argument("config: parameter '" + key + "' must be an array");
        std::vector<int> out;
        for (const auto& v : p_.at(key)) {
            if (!v.is_number_integer())
                throw std::invalid_argument("config: '" + key + "' entries must be integers");
            out.push_back(v.get<int>());
        }
        return out;
    }

    void done() const {
        for (const auto& item : p_.items())
            if (!seen_.count(item.key()))
                throw std::invalid_argument("config: unknown parameter '" + item.key() + "'");
    }

private:
    const json& p_;
    mutable std::set<std::string> seen_;
};

// ---------- state descriptors ----------

WaveState state_from_descriptor(const json& d, const HilbertSpec& spec,
                                const WaveState* partner) {
    const std::string kind = d.at("kind").get<std::string>();
    if (kind == "gaussian")
        return make_gaussian(spec, d.at("q0").get<double>(), d.at("p0").get<double>(),
                             d.value("sigma", 0.0));
    if (kind == "cat")
        return make_cat(spec, d.at("qa").get<double>(), d.at("qb").get<double>(),
                        d.at("p0").get<double>(), d.value("sigma", 0.0));
    if (kind == "random") return make_random(spec, d.at("seed").get<std::uint64_t>());
    if (kind == "random_orthogonal") {
        if (!partner)
            throw std::invalid_argument("state descriptor: random_orthogonal needs a partner state");
        return random_orthogonal_target(*partner, d.at("seed").get<std::uint64_t>(),
                                        d.value("matched", true));
    }
    throw std::invalid_argument("state descriptor: unknown kind '" + kind + "'");
}

json slots_to_json(const ActiveSlots& slots) {
    json out = json::array();
    if (slots.main) out.push_back("main");
    if (slots.mid1) out.push_back("mid1");
    if (slots.mid2) out.push_back("mid2");
    return out;
}

ActiveSlots slots_from_json(const json& j) {
    ActiveSlots slots{false, false, false};
    for (const auto& v : j) {
        const std::string name = v.get<std::string>();
        if (name == "main")
            slots.main = true;
        else if (name == "mid1")
            slots.mid1 = true;
        else if (name == "mid2")
            slots.mid2 = true;
        else
            throw std::invalid_argument("record: unknown slot '" + name + "'");
    }
    return slots;
}

json problem_to_json(const ControlProblem& problem, const json& initial_desc,
                     const json& target_desc) {
    return json{{"N", problem.params.spec.N},
                {"K", problem.params.K},
                {"t_star", problem.t_star},
                {"mu", problem.mu},
                {"slots", slots_to_json(problem.slots)},
                {"initial", initial_desc},
                {"target", target_desc}};
}

ControlProblem problem_from_json(const json& pj) {
    const HilbertSpec spec(pj.at("N").get<int>());
    const RotorParams params(pj.at("K").get<double>(), spec);
    WaveState initial = state_from_descriptor(pj.at("initial"), spec, nullptr);
    WaveState target = state_from_descriptor(pj.at("target"), spec, &initial);
    ControlProblem problem{params, std::move(initial), std::move(target),
                           pj.at("t_star").get<int>(), pj.at("mu").get<double>(),
                           slots_from_json(pj.at("slots"))};
    return problem;
}

json trace_to_json(const std::vector<TracePoint>& trace) {
    json out = json::array();
    for (const auto& tp : trace) out.push_back(json::array({tp.cycle, tp.cost}));
    return out;
}

json result_to_json(const OptimizationResult& res, int N, bool include_kicks,
                    bool include_trace) {
    json out{{"fidelity", res.fidelity},
             {"cost", res.cost},
             {"eps_rms", res.eps_rms},
             {"potential_rms", res.potential_rms},
             {"evaluations", res.evaluations},
             {"cycles", res.cycles},
             {"converged", res.converged},
             {"restart_index", res.restart_index},
             {"restart_seed", res.restart_seed}};
    if (!res.note.empty()) out["note"] = res.note;
    if (include_kicks) out["kicks"] = kicks_to_json(res.kicks, N);
    if (include_trace) out["trace"] = trace_to_json(res.trace);
    return out;
}

json report_to_json(const ControlReport& report, int N) {
    json out;
    out["best"] = result_to_json(report.best(), N, true, true);
    json restarts = json::array();
    for (const auto& r : report.restarts) restarts.push_back(result_to_json(r, N, false, false));
    out["restarts"] = restarts;
    out["failures"] = report.failures;
    out["fidelity_mean"] = report.fidelity_mean;
    out["fidelity_std"] = report.fidelity_std;
    return out;
}

OptimizerConfig optimizer_from_params(const Params& p, std::uint64_t default_seed,
                                      int default_restarts, int default_iterations) {
    OptimizerConfig cfg;
    cfg.max_iterations = p.integer("max_iterations", default_iterations);
    cfg.f_tol = p.num("f_tol", 1e-8);
    cfg.x_tol = p.num("x_tol", 1e-8);
    cfg.restarts = p.integer("restarts", default_restarts);
    cfg.seed = p.seed("seed", default_seed);
    cfg.init_scale = p.num("init_scale", 0.0);
    return cfg;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void write_density_series(const std::string& path, const HilbertSpec& spec,
                          const FloquetEngine& controlled, const FloquetEngine& free_engine,
                          const WaveState& initial, int t_max) {
    CsvWriter csv(path, {"t", "q", "density_controlled", "density_free"});
    Eigen::VectorXcd psi_c =
        (initial.basis == Basis::Position ? initial : to_position(initial)).amplitudes;
    Eigen::VectorXcd psi_f = psi_c;
    for (int t = 0; t <= t_max; ++t) {
        for (int j = 0; j < spec.N; ++j)
            csv.row({static_cast<double>(t), spec.position(j), std::norm(psi_c[j]),
                     std::norm(psi_f[j])});
        if (t < t_max) {
            controlled.step(psi_c);
            free_engine.step(psi_f);
        }
    }
}

void write_potential_csv(const std::string& path, const HilbertSpec& spec,
                         const ControlKicks& kicks) {
    CsvWriter csv(path, {"q", "v_main", "v_mid1", "v_mid2"});
    const PotentialProfile main = disorder_potential(kicks.main, spec);
    PotentialProfile mid1, mid2;
    if (kicks.mid1) mid1 = disorder_potential(*kicks.mid1, spec);
    if (kicks.mid2) mid2 = disorder_potential(*kicks.mid2, spec);
    for (int j = 0; j < spec.N; ++j)
        csv.row({spec.position(j), main.values[j], kicks.mid1 ? mid1.values[j] : 0.0,
                 kicks.mid2 ? mid2.values[j] : 0.0});
}

void write_echo_csv(const std::string& path, const EchoSeries& series) {
    CsvWriter csv(path, {"t", "echo"});
    for (size_t i = 0; i < series.times.size(); ++i)
        csv.row({static_cast<double>(series.times[i]), series.values[i]});
}

// ---------- scenarios ----------

void run_revival(const Params& p, const RunOptions& opts, json& record) {
    const int N = p.integer("N", opts.figure_scale ? 256 : 64);
    const double K = p.num("K", 8.0);
    const int t_star = p.integer("t_star", 10);
    const double q0 = p.num("q0", 0.5);
    const double p0 = p.num("p0", 0.0);
    const double sigma = p.num("sigma", 0.0);
    const double mu = p.num("mu", 25.0);
    const OptimizerConfig optimizer =
        optimizer_from_params(p, 20250901, 2, opts.figure_scale ? 300 : 200);
    p.done();

    const HilbertSpec spec(N);
    const RotorParams params(K, spec);
    const WaveState alpha = make_gaussian(spec, q0, p0, sigma);
    const json desc{{"kind", "gaussian"}, {"q0", q0}, {"p0", p0}, {"sigma", sigma}};

    ControlProblem problem{params, alpha, alpha, t_star, mu, ActiveSlots::main_only()};
    const ControlReport report = revival_control(problem, optimizer);
    const OptimizationResult& best = report.best();

    record["problem"] = problem_to_json(problem, desc, desc);
    record["result"] = report_to_json(report, N);

    // Spectral view of the optimized operator: intensities and the phase
    // alignment that produces the revival.
    const Eigen::MatrixXcd U = dense_floquet_matrix(params, best.kicks);
    const SpectralDecomposition dec = decompose(U, spec.hbar());
    const Eigen::VectorXd intens = intensities(alpha, dec);
    const double alignment = phase_alignment(intens, dec, t_star);
    const std::complex<double> autocorr = autocorrelation_spectral(alpha, dec, t_star);

    const EchoSeries echo = loschmidt_echo(alpha, params, best.kicks, std::max(2 * t_star, 20));

    record["checks"] = json{{"phase_alignment_at_t_star", alignment},
                            {"autocorrelation_abs", std::abs(autocorr)},
                            {"echo_at_t_star", echo.values[static_cast<size_t>(t_star)]},
                            {"spectral_residual", dec.residual}};

    FloquetEngine controlled(params);
    controlled.set_kicks(best.kicks);
    const FloquetEngine free_engine(params);
    write_density_series(join_path(opts.out_dir, "density.csv"), spec, controlled, free_engine,
                         alpha, t_star);
    write_potential_csv(join_path(opts.out_dir, "potential.csv"), spec, best.kicks);
    write_echo_csv(join_path(opts.out_dir, "echo.csv"), echo);
    {
        CsvWriter csv(join_path(opts.out_dir, "intensities.csv"),
                      {"theta", "quasienergy", "intensity"});
        for (int n = 0; n < N; ++n)
            csv.row({dec.thetas[n], dec.hbar * dec.thetas[n], intens[n]});
    }
    record["artifacts"] = json{{"density", "density.csv"},
                               {"potential", "potential.csv"},
                               {"echo", "echo.csv"},
                               {"intensities", "intensities.csv"}};
}

void run_pair_transfer(const Params& p, const RunOptions& opts, json& record, bool cat_target) {
    const int N = p.integer("N", opts.figure_scale ? 256 : 64);
    const double K = p.num("K", 8.0);
    const int t_star = p.integer("t_star", 5);
    const double mu = p.num("mu", 25.0);
    OptimizerConfig optimizer =
        optimizer_from_params(p, cat_target ? 20250902 : 20250903, 2,
                              opts.figure_scale ? 300 : 200);

    const HilbertSpec spec(N);
    const RotorParams params(K, spec);
    // Pair transfers live in the weak-disorder regime; an unset init starts
    // the search at the hbar scale instead of the generic 0.01*max(K,1).
    if (optimizer.init_scale <= 0.0) optimizer.init_scale = spec.hbar();

    WaveState initial(spec, Basis::Position);
    WaveState target(spec, Basis::Position);
    json initial_desc, target_desc;
    if (cat_target) {
        const double q0 = p.num("q0", 0.5);
        const double p0 = p.num("p0", 0.0);
        const double qa = p.num("qa", 0.25);
        const double qb = p.num("qb", 0.75);
        const double sigma = p.num("sigma", 0.0);
        p.done();
        initial = make_gaussian(spec, q0, p0, sigma);
        target = make_cat(spec, qa, qb, p0, sigma);
        initial_desc = json{{"kind", "gaussian"}, {"q0", q0}, {"p0", p0}, {"sigma", sigma}};
        target_desc =
            json{{"kind", "cat"}, {"qa", qa}, {"qb", qb}, {"p0", p0}, {"sigma", sigma}};
    } else {
        const std::uint64_t state_seed = p.seed("state_seed", 4101);
        const bool matched = p.flag("match_parity", true);
        p.done();
        initial = make_random(spec, mix_seed(state_seed, 1));
        target = random_orthogonal_target(initial, mix_seed(state_seed, 2), matched);
        initial_desc = json{{"kind", "random"}, {"seed", mix_seed(state_seed, 1)}};
        target_desc = json{{"kind", "random_orthogonal"},
                           {"seed", mix_seed(state_seed, 2)},
                           {"matched", matched}};
    }

    ControlProblem problem{params, initial, target, t_star, mu, ActiveSlots::all()};
    const ControlReport report = optimize_control(problem, optimizer);
    const OptimizationResult& best = report.best();

    record["problem"] = problem_to_json(problem, initial_desc, target_desc);
    record["result"] = report_to_json(report, N);

    const EchoSeries echo = loschmidt_echo(initial, params, best.kicks, std::max(2 * t_star, 20));
    record["checks"] = json{{"echo_at_t_star", echo.values[static_cast<size_t>(t_star)]},
                            {"echo_bound_3_over_N", 3.0 / N}};

    FloquetEngine controlled(params);
    controlled.set_kicks(best.kicks);
    const FloquetEngine free_engine(params);
    write_density_series(join_path(opts.out_dir, "density.csv"), spec, controlled, free_engine,
                         initial, t_star);
    write_potential_csv(join_path(opts.out_dir, "potential.csv"), spec, best.kicks);
    write_echo_csv(join_path(opts.out_dir, "echo.csv"), echo);
    {
        const WaveState reached = controlled.propagate(initial, t_star);
        CsvWriter csv(join_path(opts.out_dir, "final_density.csv"),
                      {"q", "density_reached", "density_target"});
        for (int j = 0; j < N; ++j)
            csv.row({spec.position(j), std::norm(reached.amplitudes[j]),
                     std::norm((target.basis == Basis::Position ? target : to_position(target))
                                   .amplitudes[j])});
    }
    record["artifacts"] = json{{"density", "density.csv"},
                               {"potential", "potential.csv"},
                               {"echo", "echo.csv"},
                               {"final_density", "final_density.csv"}};
}

void run_fidelity_vs_time(const Params& p, const RunOptions& opts, json& record) {
    const int N = p.integer("N", 128);
    const double K = p.num("K", 8.0);
    const double mu = p.num("mu", 25.0);
    const int pairs = p.integer("pairs", 8);
    std::vector<int> t_list = p.int_list(
        "t_star_list", opts.figure_scale ? std::vector<int>{1, 2, 3, 4, 5, 7, 10, 15, 20}
                                         : std::vector<int>{5});
    const std::vector<int> echo_list = p.int_list("echo_t_stars", {5, 10, 20});
    const bool matched = p.flag("match_parity", true);
    OptimizerConfig base = optimizer_from_params(p, 20250904, 1, 200);
    p.done();

    if (pairs < 1) throw std::invalid_argument("fidelity_vs_time: pairs must be >= 1");
    const HilbertSpec spec(N);
    const RotorParams params(K, spec);
    if (base.init_scale <= 0.0) base.init_scale = spec.hbar();

    struct PairOutcome {
        json block;
        double fidelity = 0.0;
        bool ok = false;
    };

    auto run_pair = [&](int t_star, std::uint64_t pair_seed, bool keep_kicks,
                        ControlKicks* kicks_out, WaveState* initial_out) {
        PairOutcome out;
        const WaveState initial = make_random(spec, mix_seed(pair_seed, 1));
        const WaveState target =
            random_orthogonal_target(initial, mix_seed(pair_seed, 2), matched);
        ControlProblem problem{params, initial, target, t_star, mu, ActiveSlots::all()};
        OptimizerConfig cfg = base;
        cfg.seed = mix_seed(pair_seed, 3);
        try {
            const ControlReport report = optimize_control(problem, cfg);
            const OptimizationResult& best = report.best();
            out.block = json{{"pair_seed", pair_seed},
                             {"initial", json{{"kind", "random"}, {"seed", mix_seed(pair_seed, 1)}}},
                             {"target", json{{"kind", "random_orthogonal"},
                                             {"seed", mix_seed(pair_seed, 2)},
                                             {"matched", matched}}},
                             {"fidelity", best.fidelity},
                             {"cost", best.cost},
                             {"eps_rms", best.eps_rms},
                             {"potential_rms", best.potential_rms},
                             {"converged", best.converged}};
            if (keep_kicks) out.block["kicks"] = kicks_to_json(best.kicks, N);
            if (kicks_out) *kicks_out = best.kicks;
            if (initial_out) *initial_out = initial;
            out.fidelity = best.fidelity;
            out.ok = true;
        } catch (const std::exception& e) {
            out.block = json{{"pair_seed", pair_seed}, {"error", e.what()}};
        }
        return out;
    };

    // Saturation curve: all (t_star, pair) tasks are independent.
    json t_points = json::array();
    std::vector<std::vector<PairOutcome>> outcomes(t_list.size(),
                                                   std::vector<PairOutcome>(pairs));
    const int total_tasks = static_cast<int>(t_list.size()) * pairs;
    parallel_for_indexed(total_tasks, opts.threads, [&](int task) {
        const int ti = task / pairs;
        const int pi = task % pairs;
        const std::uint64_t pair_seed =
            mix_seed(base.seed, (static_cast<std::uint64_t>(t_list[ti]) << 24) + pi);
        outcomes[ti][pi] = run_pair(t_list[ti], pair_seed, true, nullptr, nullptr);
    });

    for (size_t ti = 0; ti < t_list.size(); ++ti) {
        json point;
        point["t_star"] = t_list[ti];
        json pair_blocks = json::array();
        std::vector<double> fids;
        for (int pi = 0; pi < pairs; ++pi) {
            pair_blocks.push_back(outcomes[ti][pi].block);
            if (outcomes[ti][pi].ok) fids.push_back(outcomes[ti][pi].fidelity);
        }
        point["pairs"] = pair_blocks;
        point["pairs_ok"] = fids.size();
        point["failures"] = pairs - static_cast<int>(fids.size());
        if (!fids.empty()) {
            double mean = 0.0;
            for (double f : fids) mean += f;
            mean /= static_cast<double>(fids.size());
            double var = 0.0;
            for (double f : fids) var += (f - mean) * (f - mean);
            const double stddev =
                fids.size() > 1 ? std::sqrt(var / static_cast<double>(fids.size() - 1)) : 0.0;
            point["fidelity_mean"] = mean;
            point["fidelity_std"] = stddev;
            point["fidelity_min"] = *std::min_element(fids.begin(), fids.end());
            point["fidelity_max"] = *std::max_element(fids.begin(), fids.end());
        }
        t_points.push_back(point);
    }

    // Echo decay for dedicated control runs at selected control times.
    json echo_runs = json::array();
    {
        CsvWriter echo_csv(join_path(opts.out_dir, "echo.csv"), {"t_star", "t", "echo"});
        for (size_t ei = 0; ei < echo_list.size(); ++ei) {
            const int t_star = echo_list[ei];
            const std::uint64_t pair_seed =
                mix_seed(base.seed, 0xec0ULL + (static_cast<std::uint64_t>(t_star) << 24));
            ControlKicks kicks;
            WaveState initial(spec, Basis::Position);
            PairOutcome out = run_pair(t_star, pair_seed, true, &kicks, &initial);
            json run{{"t_star", t_star}, {"pair", out.block}};
            if (out.ok) {
                const EchoSeries echo =
                    loschmidt_echo(initial, params, kicks, std::max(2 * t_star, 25));
                for (size_t i = 0; i < echo.times.size(); ++i)
                    echo_csv.row({static_cast<double>(t_star),
                                  static_cast<double>(echo.times[i]), echo.values[i]});
                run["echo_at_t_star"] = echo.values[static_cast<size_t>(t_star)];
                run["bound_3_over_N"] = 3.0 / N;
                run["within_bound"] = echo.values[static_cast<size_t>(t_star)] <= 3.0 / N;
            }
            echo_runs.push_back(run);
        }
    }

    record["problem"] = json{{"N", N}, {"K", K}, {"mu", mu}, {"pairs", pairs},
                             {"match_parity", matched}};
    record["result"] = json{{"t_star_points", t_points}, {"echo_runs", echo_runs}};

    CsvWriter csv(join_path(opts.out_dir, "fidelity_vs_tstar.csv"),
                  {"t_star", "fidelity_mean", "fidelity_std", "fidelity_min", "fidelity_max",
                   "pairs_ok"});
    for (const auto& point : t_points) {
        if (!point.contains("fidelity_mean")) continue;
        csv.row({static_cast<double>(point.at("t_star").get<int>()),
                 point.at("fidelity_mean").get<double>(), point.at("fidelity_std").get<double>(),
                 point.at("fidelity_min").get<double>(), point.at("fidelity_max").get<double>(),
                 static_cast<double>(point.at("pairs_ok").get<int>())});
    }
    record["artifacts"] = json{{"fidelity_vs_tstar", "fidelity_vs_tstar.csv"},
                               {"echo", "echo.csv"}};
}

void run_scaling(const Params& p, const RunOptions& opts, json& record) {
    SweepConfig cfg;
    cfg.sizes = p.int_list("sizes", opts.figure_scale ? std::vector<int>{32, 64, 128, 256}
                                                      : std::vector<int>{32, 64, 128});
    cfg.K = p.num("K", 8.0);
    cfg.t_star = p.integer("t_star", 5);
    cfg.pairs = p.integer("pairs", 2);
    cfg.mu = p.num("mu", 25.0);
    cfg.match_parity_weights = p.flag("match_parity", true);
    cfg.fidelity_floor = p.num("fidelity_floor", 0.9);
    cfg.optimizer = optimizer_from_params(p, 20250905, 1, 200);
    p.done();

    const ScalingSweep sweep = run_scaling_sweep(cfg);

    record["problem"] = json{{"K", cfg.K},       {"t_star", cfg.t_star},
                             {"pairs", cfg.pairs}, {"mu", cfg.mu},
                             {"sizes", cfg.sizes}, {"fidelity_floor", cfg.fidelity_floor},
                             {"match_parity", cfg.match_parity_weights}};

    json points = json::array();
    for (const auto& pt : sweep.points) {
        points.push_back(json{{"N", pt.N},
                              {"hbar", pt.hbar},
                              {"mean_eps_rms", pt.mean_eps_rms},
                              {"mean_potential_rms", pt.mean_potential_rms},
                              {"mean_fidelity", pt.mean_fidelity},
                              {"eps_rms", pt.eps_rms},
                              {"fidelities", pt.fidelities},
                              {"failures", pt.failures}});
    }
    record["result"] = json{{"points", points},
                            {"slope", sweep.slope},
                            {"intercept", sweep.intercept},
                            {"slope_valid", sweep.slope_valid}};

    CsvWriter csv(join_path(opts.out_dir, "scaling.csv"),
                  {"N", "hbar", "mean_eps_rms", "mean_potential_rms", "mean_fidelity", "pairs_ok",
                   "failures"});
    for (const auto& pt : sweep.points)
        csv.row({static_cast<double>(pt.N), pt.hbar, pt.mean_eps_rms, pt.mean_potential_rms,
                 pt.mean_fidelity, static_cast<double>(pt.eps_rms.size()),
                 static_cast<double>(pt.failures)});
    record["artifacts"] = json{{"scaling", "scaling.csv"}};
}

void run_classical_sos(const Params& p, const RunOptions& opts, json& record) {
    const double K = p.num("K", 0.0);
    const int N = p.integer("N", 64);
    const int t_star = p.integer("t_star", 5);
    const double mu = p.num("mu", 25.0);
    const std::string kicks_file = p.str("kicks_file", "");
    const int section_seeds = p.integer("section_seeds", 24);
    const int section_iterations = p.integer("section_iterations", opts.figure_scale ? 4000 : 1500);
    const int lyapunov_iterations = p.integer("lyapunov_iterations", 20000);
    const int lyapunov_seeds = p.integer("lyapunov_seeds", 16);
    const int grid = p.integer("grid", 32);
    const std::uint64_t map_seed = p.seed("map_seed", 99);
    const OptimizerConfig optimizer = optimizer_from_params(p, 20250906, 1, 200);

    const HilbertSpec spec(N);
    DisorderVector disorder;
    if (!kicks_file.empty()) {
        p.done();
        disorder = load_kicks(kicks_file).main;
        record["problem"] = json{{"K", K}, {"N", N}, {"kicks_file", kicks_file}};
    } else {
        const std::uint64_t state_seed = p.seed("state_seed", 4104);
        const bool matched = p.flag("match_parity", true);
        p.done();
        // Obtain the disorder from an actual control run at this K.
        const RotorParams params(K, spec);
        const WaveState initial = make_random(spec, mix_seed(state_seed, 1));
        const WaveState target =
            random_orthogonal_target(initial, mix_seed(state_seed, 2), matched);
        ControlProblem problem{params, initial, target, t_star, mu, ActiveSlots::all()};
        const ControlReport report = optimize_control(problem, optimizer);
        disorder = report.best().kicks.main;
        record["problem"] =
            problem_to_json(problem,
                            json{{"kind", "random"}, {"seed", mix_seed(state_seed, 1)}},
                            json{{"kind", "random_orthogonal"},
                                 {"seed", mix_seed(state_seed, 2)},
                                 {"matched", matched}});
        record["control"] = report_to_json(report, N);
    }

    const SectionData free_section =
        poincare_section(K, nullptr, section_seeds, section_iterations, map_seed);
    const SectionData kicked_section =
        poincare_section(K, &disorder, section_seeds, section_iterations, map_seed);

    const double frac_free = chaos_fraction(free_section, grid);
    const double frac_kicked = chaos_fraction(kicked_section, grid);
    const double lyap_free = lyapunov_exponent(K, nullptr, lyapunov_iterations, lyapunov_seeds,
                                               mix_seed(map_seed, 1));
    const double lyap_kicked = lyapunov_exponent(K, &disorder, lyapunov_iterations, lyapunov_seeds,
                                                 mix_seed(map_seed, 1));

    record["checks"] = json{{"chaos_fraction_free", frac_free},
                            {"chaos_fraction_disordered", frac_kicked},
                            {"lyapunov_free", lyap_free},
                            {"lyapunov_disordered", lyap_kicked},
                            {"grid", grid},
                            {"section_seeds", section_seeds},
                            {"section_iterations", section_iterations},
                            {"lyapunov_iterations", lyapunov_iterations},
                            {"lyapunov_seeds", lyapunov_seeds},
                            {"map_seed", map_seed},
                            {"disorder_rms", disorder.rms()}};
    record["disorder"] = kicks_to_json(ControlKicks{disorder, std::nullopt, std::nullopt}, N);

    auto write_section = [&](const std::string& name, const SectionData& sec) {
        CsvWriter csv(join_path(opts.out_dir, name), {"trajectory", "q", "p"});
        for (size_t tr = 0; tr < sec.trajectories.size(); ++tr)
            for (const PhasePoint& z : sec.trajectories[tr].points)
                csv.row({static_cast<double>(tr), z.q, z.p});
    };
    write_section("section_free.csv", free_section);
    write_section("section_disordered.csv", kicked_section);
    {
        const PotentialProfile profile = disorder_potential(disorder, spec);
        CsvWriter csv(join_path(opts.out_dir, "disorder_potential.csv"), {"q", "v"});
        for (int j = 0; j < spec.N; ++j) csv.row({spec.position(j), profile.values[j]});
    }
    record["artifacts"] = json{{"section_free", "section_free.csv"},
                               {"section_disordered", "section_disordered.csv"},
                               {"disorder_potential", "disorder_potential.csv"}};
}

void run_rmt_suite(const Params& p, const RunOptions& opts, json& record) {
    const int N = p.integer("N", 256);
    const int count = p.integer("count", 50);
    const std::uint64_t seed = p.seed("seed", 20250907);
    const int t_points = p.integer("t_points", 48);
    p.done();

    const double hbar = 1.0 / (kTwoPi * N);

    const GaussianEnsemble goe = sample_gaussian(N, 1, count, seed);
    const SpectrumSet goe_spectra = spectra(goe);
    const GaussianEnsemble gue = sample_gaussian(N, 2, count, mix_seed(seed, 2));
    const SpectrumSet gue_spectra = spectra(gue);

    const double sup_distance = empirical_density_check(goe_spectra);

    std::vector<double> t_grid;
    t_grid.push_back(0.0);
    for (int k = 1; k <= t_points; ++k)
        t_grid.push_back(5.0 * hbar * static_cast<double>(k) / t_points);
    const AutocorrelationSeries autocorr = ensemble_autocorrelation(goe_spectra, t_grid, hbar);
    double max_err = 0.0;
    for (size_t i = 1; i < autocorr.t.size(); ++i)  // check on (0, 5 hbar]
        max_err = std::max(max_err, std::fabs(autocorr.empirical[i] - autocorr.predicted[i]));

    const SpacingReport goe_spacing = spacing_repulsion_check(goe_spectra, 1);
    const SpacingReport gue_spacing = spacing_repulsion_check(gue_spectra, 2);

    const double tau_h = heisenberg_time(N, hbar);
    const double ratio = scrambling_ratio(N);

    auto spacing_json = [](const SpacingReport& r) {
        return json{{"small_fraction", r.small_fraction},
                    {"poisson_small_fraction", r.poisson_small_fraction},
                    {"repulsion_exponent", r.repulsion_exponent},
                    {"count", r.count}};
    };
    record["problem"] = json{{"N", N}, {"count", count}, {"seed", seed}, {"hbar", hbar}};
    record["checks"] = json{{"density_sup_distance", sup_distance},
                            {"autocorrelation_max_error", max_err},
                            {"heisenberg_time", tau_h},
                            {"scrambling_ratio", ratio},
                            {"ratio_times_heisenberg", ratio * tau_h},
                            {"expected_ratio_product", 1.9 * hbar},
                            {"kicked_rotor_ratio_example", kicked_rotor_ratio(N, std::log(4.0))},
                            {"spacing_goe", spacing_json(goe_spacing)},
                            {"spacing_gue", spacing_json(gue_spacing)}};

    {
        CsvWriter csv(join_path(opts.out_dir, "density.csv"),
                      {"E", "empirical", "semicircle"});
        // Re-derive the pooled histogram for the export.
        constexpr double kLo = -2.2, kWidth = 0.1;
        constexpr int kBins = 44;
        std::vector<long> counts(kBins, 0);
        long total = 0;
        for (const auto& s : goe_spectra.spectra) {
            total += s.size();
            for (int i = 0; i < s.size(); ++i) {
                const double E = s[i];
                if (E < kLo || E >= kLo + kBins * kWidth) continue;
                ++counts[static_cast<int>((E - kLo) / kWidth)];
            }
        }
        for (int b = 0; b < kBins; ++b) {
            const double lo = kLo + b * kWidth;
            csv.row({lo + 0.5 * kWidth, static_cast<double>(counts[b]) / (total * kWidth),
                     (semicircle_cdf(lo + kWidth) - semicircle_cdf(lo)) / kWidth});
        }
    }
    {
        CsvWriter csv(join_path(opts.out_dir, "autocorrelation.csv"),
                      {"t_over_hbar", "empirical", "predicted"});
        for (size_t i = 0; i < autocorr.t.size(); ++i)
            csv.row({autocorr.t[i] / hbar, autocorr.empirical[i], autocorr.predicted[i]});
    }
    record["artifacts"] =
        json{{"density", "density.csv"}, {"autocorrelation", "autocorrelation.csv"}};
}

void run_spectral_check(const Params& p, const RunOptions& opts, json& record) {
    const int N = p.integer("N", 64);
    const int dense_N = p.integer("dense_N", 32);
    const double K = p.num("K", 8.0);
    const double disorder_scale = p.num("disorder_scale", 1e-3);
    const int t_max = p.integer("t_max", 100);
    const std::uint64_t seed = p.seed("seed", 20250908);
    p.done();

    const HilbertSpec spec(N);
    const RotorParams params(K, spec);

    // Random weak kicks in all three slots; the identities under test hold
    // for any disorder, optimized or not.
    Rng rng(seed);
    auto random_disorder = [&](int n) {
        Eigen::VectorXd e(n);
        for (int i = 0; i < n; ++i) e[i] = disorder_scale * rng.uniform(-1.0, 1.0);
        return DisorderVector(std::move(e));
    };
    ControlKicks kicks;
    kicks.main = random_disorder(N);
    kicks.mid1 = random_disorder(N);
    kicks.mid2 = random_disorder(N);

    const WaveState psi = make_random(spec, mix_seed(seed, 7));
    const Eigen::MatrixXcd U = dense_floquet_matrix(params, kicks);
    const SpectralDecomposition dec = decompose(U, spec.hbar());
    const Eigen::VectorXd intens = intensities(psi, dec);

    FloquetEngine engine(params);
    engine.set_kicks(kicks);
    Eigen::VectorXcd evolving = psi.amplitudes;
    double max_autocorr_err = 0.0;
    for (int t = 0; t <= t_max; ++t) {
        const std::complex<double> direct = psi.amplitudes.dot(evolving);
        const std::complex<double> viaspectrum = autocorrelation_spectral(psi, dec, t);
        max_autocorr_err = std::max(max_autocorr_err, std::abs(direct - viaspectrum));
        if (t < t_max) engine.step(evolving);
    }

    // Dense against split-operator application on a smaller space.
    const HilbertSpec dspec(dense_N);
    const RotorParams dparams(K, dspec);
    Rng drng(mix_seed(seed, 11));
    auto dense_disorder = [&](int n) {
        Eigen::VectorXd e(n);
        for (int i = 0; i < n; ++i) e[i] = disorder_scale * drng.uniform(-1.0, 1.0);
        return DisorderVector(std::move(e));
    };
    ControlKicks dkicks;
    dkicks.main = dense_disorder(dense_N);
    dkicks.mid1 = dense_disorder(dense_N);
    dkicks.mid2 = dense_disorder(dense_N);
    const Eigen::MatrixXcd dU = dense_floquet_matrix(dparams, dkicks);
    FloquetEngine dengine(dparams);
    dengine.set_kicks(dkicks);
    WaveState dpsi = make_random(dspec, mix_seed(seed, 13));
    Eigen::VectorXcd split_state = dpsi.amplitudes;
    Eigen::VectorXcd dense_state = dpsi.amplitudes;
    double max_dense_err = 0.0;
    for (int t = 0; t < 50; ++t) {
        dengine.step(split_state);
        dense_state = dU * dense_state;
        max_dense_err = std::max(max_dense_err, (split_state - dense_state).norm());
    }

    record["problem"] = json{{"N", N}, {"dense_N", dense_N}, {"K", K},
                             {"disorder_scale", disorder_scale}, {"t_max", t_max}, {"seed", seed}};
    record["checks"] = json{{"autocorrelation_max_error", max_autocorr_err},
                            {"dense_split_max_error", max_dense_err},
                            {"spectral_residual", dec.residual},
                            {"theta_min", dec.thetas.minCoeff()},
                            {"theta_max", dec.thetas.maxCoeff()}};

    CsvWriter csv(join_path(opts.out_dir, "quasienergies.csv"),
                  {"index", "theta", "quasienergy", "intensity"});
    for (int n = 0; n < N; ++n)
        csv.row({static_cast<double>(n), dec.thetas[n], dec.hbar * dec.thetas[n], intens[n]});
    record["artifacts"] = json{{"quasienergies", "quasienergies.csv"}};
}

}  // namespace

nlohmann::json load_config_file(const std::string& path) {
    const json config = read_json_file(path);
    if (!config.is_object() || !config.contains("scenario") || !config.at("scenario").is_string())
        throw std::invalid_argument("config: top level must be an object with a 'scenario' string");
    return config;
}

nlohmann::json run_experiment(const nlohmann::json& config, const RunOptions& options) {
    if (!config.is_object() || !config.contains("scenario") || !config.at("scenario").is_string())
        throw std::invalid_argument("config: top level must be an object with a 'scenario' string");
    for (const auto& item : config.items())
        if (item.key() != "scenario" && item.key() != "parameters")
            throw std::invalid_argument("config: unknown top-level key '" + item.key() + "'");
    const std::string scenario = config.at("scenario").get<std::string>();
    const json params_json = config.value("parameters", json::object());
    const Params params(params_json);

    if (options.threads < 1)
        throw std::invalid_argument("run_experiment: thread count must be >= 1");
    fs::create_directories(options.out_dir);

    json record{{"format", "qkr-run"},
                {"record_version", kRecordVersion},
                {"code_version", kVersion},
                {"scenario", scenario},
                {"figure_scale", options.figure_scale},
                {"config", config}};

    if (scenario == "revival")
        run_revival(params, options, record);
    else if (scenario == "cat")
        run_pair_transfer(params, options, record, true);
    else if (scenario == "random_pair")
        run_pair_transfer(params, options, record, false);
    else if (scenario == "fidelity_vs_time")
        run_fidelity_vs_time(params, options, record);
    else if (scenario == "scaling")
        run_scaling(params, options, record);
    else if (scenario == "classical_sos")
        run_classical_sos(params, options, record);
    else if (scenario == "rmt_suite")
        run_rmt_suite(params, options, record);
    else if (scenario == "spectral_check")
        run_spectral_check(params, options, record);
    else
        throw std::invalid_argument("run_experiment: unknown scenario '" + scenario + "'");

    write_json_file(join_path(options.out_dir, "record.json"), record);
    return record;
}

// ---------- verification ----------

namespace {

class Checker {
public:
    explicit Checker(VerifyOutcome& out) : out_(out) {}

    void close(const std::string& what, double got, double want, double tol) {
        const double diff = std::fabs(got - want);
        note(diff <= tol, what + ": recomputed " + format_double(got) + ", recorded " +
                              format_double(want) + " (|diff| " + format_double(diff) + ", tol " +
                              format_double(tol) + ")");
    }

    void holds(const std::string& what, bool ok) { note(ok, what); }

private:
    void note(bool ok, const std::string& line) {
        out_.lines.push_back((ok ? "ok: " : "FAIL: ") + line);
        if (!ok) out_.pass = false;
    }

    VerifyOutcome& out_;
};

// Re-evaluates one stored control solution: fidelity, cost identity, rms
// values. The optimization itself is not repeated.
void verify_control_block(Checker& chk, const json& problem_json, const json& best) {
    const ControlProblem problem = problem_from_json(problem_json);
    const ControlKicks kicks = kicks_from_json(best.at("kicks"));

    const double stored_fid = best.at("fidelity").get<double>();
    const double stored_cost = best.at("cost").get<double>();

    FloquetEngine engine(problem.params);
    engine.set_kicks(kicks);
    const WaveState reached = engine.propagate(problem.initial, problem.t_star);
    const double fid = fidelity(problem.target, reached);
    chk.close("fidelity", fid, stored_fid, 1e-8);

    const double cost = 1.0 - fid + problem.mu * kicks.squared_norm();
    chk.close("cost identity", cost, stored_cost, 1e-8);

    const int dim = kicks.parameter_count();
    chk.close("eps_rms", std::sqrt(kicks.squared_norm() / dim), best.at("eps_rms").get<double>(),
              1e-10);
}

void verify_scaling(Checker& chk, const json& record) {
    const json& result = record.at("result");
    std::vector<double> hbars, amps;
    for (const auto& pt : result.at("points")) {
        const int n_ok = static_cast<int>(pt.at("eps_rms").size());
        if (n_ok == 0) continue;
        double mean = 0.0;
        for (const auto& v : pt.at("eps_rms")) mean += v.get<double>();
        mean /= n_ok;
        chk.close("point N=" + std::to_string(pt.at("N").get<int>()) + " mean_eps_rms", mean,
                  pt.at("mean_eps_rms").get<double>(), 1e-12);
        hbars.push_back(pt.at("hbar").get<double>());
        amps.push_back(mean);
    }
    if (result.at("slope_valid").get<bool>()) {
        double intercept = 0.0;
        const double slope = fit_loglog_slope(hbars, amps, &intercept);
        chk.close("log-log slope", slope, result.at("slope").get<double>(), 1e-12);
    }
}

void verify_fidelity_vs_time(Checker& chk, const json& record) {
    const json& problem = record.at("problem");
    const HilbertSpec spec(problem.at("N").get<int>());
    const RotorParams params(problem.at("K").get<double>(), spec);
    const double mu = problem.at("mu").get<double>();

    for (const auto& point : record.at("result").at("t_star_points")) {
        const int t_star = point.at("t_star").get<int>();
        std::vector<double> fids;
        for (const auto& pair : point.at("pairs")) {
            if (pair.contains("error")) continue;
            const WaveState initial = state_from_descriptor(pair.at("initial"), spec, nullptr);
            const WaveState target = state_from_descriptor(pair.at("target"), spec, &initial);
            const ControlKicks kicks = kicks_from_json(pair.at("kicks"));
            FloquetEngine engine(params);
            engine.set_kicks(kicks);
            const double fid = fidelity(target, engine.propagate(initial, t_star));
            chk.close("t*=" + std::to_string(t_star) + " pair fidelity", fid,
                      pair.at("fidelity").get<double>(), 1e-8);
            const double cost = 1.0 - fid + mu * kicks.squared_norm();
            chk.close("t*=" + std::to_string(t_star) + " pair cost", cost,
                      pair.at("cost").get<double>(), 1e-8);
            fids.push_back(pair.at("fidelity").get<double>());
        }
        if (!fids.empty() && point.contains("fidelity_mean")) {
            double mean = 0.0;
            for (double f : fids) mean += f;
            mean /= static_cast<double>(fids.size());
            chk.close("t*=" + std::to_string(t_star) + " fidelity mean", mean,
                      point.at("fidelity_mean").get<double>(), 1e-12);
        }
    }

    for (const auto& run : record.at("result").at("echo_runs")) {
        if (!run.contains("echo_at_t_star")) continue;
        const json& pair = run.at("pair");
        const int t_star = run.at("t_star").get<int>();
        const WaveState initial = state_from_descriptor(pair.at("initial"), spec, nullptr);
        const ControlKicks kicks = kicks_from_json(pair.at("kicks"));
        const EchoSeries echo = loschmidt_echo(initial, params, kicks, t_star);
        chk.close("echo at t*=" + std::to_string(t_star),
                  echo.values[static_cast<size_t>(t_star)],
                  run.at("echo_at_t_star").get<double>(), 1e-8);
    }
}

void verify_classical(Checker& chk, const json& record) {
    const json& checks = record.at("checks");
    const DisorderVector disorder = kicks_from_json(record.at("disorder")).main;
    const double K = record.at("problem").at("K").get<double>();
    const std::uint64_t map_seed = checks.at("map_seed").get<std::uint64_t>();
    const int grid = checks.at("grid").get<int>();

    const SectionData kicked =
        poincare_section(K, &disorder, checks.at("section_seeds").get<int>(),
                         checks.at("section_iterations").get<int>(), map_seed);
    chk.close("chaos fraction (disordered)", chaos_fraction(kicked, grid),
              checks.at("chaos_fraction_disordered").get<double>(), 1e-12);

    const double lyap = lyapunov_exponent(K, &disorder, checks.at("lyapunov_iterations").get<int>(),
                                          checks.at("lyapunov_seeds").get<int>(),
                                          mix_seed(map_seed, 1));
    chk.close("lyapunov (disordered)", lyap, checks.at("lyapunov_disordered").get<double>(), 1e-9);
}

void verify_rmt(Checker& chk, const json& record) {
    const json& problem = record.at("problem");
    const int N = problem.at("N").get<int>();
    const int count = problem.at("count").get<int>();
    const std::uint64_t seed = problem.at("seed").get<std::uint64_t>();
    const double hbar = problem.at("hbar").get<double>();
    const json& checks = record.at("checks");

    const SpectrumSet goe = spectra(sample_gaussian(N, 1, count, seed));
    chk.close("density sup distance", empirical_density_check(goe),
              checks.at("density_sup_distance").get<double>(), 1e-12);
    chk.close("ratio * heisenberg", scrambling_ratio(N) * heisenberg_time(N, hbar),
              checks.at("expected_ratio_product").get<double>(), 0.0);

    const SpacingReport spacing = spacing_repulsion_check(goe, 1);
    chk.close("GOE small-spacing fraction", spacing.small_fraction,
              checks.at("spacing_goe").at("small_fraction").get<double>(), 1e-12);
}

void verify_simple_control(Checker& chk, const json& record) {
    verify_control_block(chk, record.at("problem"), record.at("result").at("best"));
    if (record.at("scenario").get<std::string>() == "revival") {
        // Re-derive the phase-alignment number from the stored kicks.
        const ControlProblem problem = problem_from_json(record.at("problem"));
        const ControlKicks kicks = kicks_from_json(record.at("result").at("best").at("kicks"));
        const Eigen::MatrixXcd U = dense_floquet_matrix(problem.params, kicks);
        const SpectralDecomposition dec = decompose(U, problem.params.spec.hbar());
        const double alignment =
            phase_alignment(intensities(problem.initial, dec), dec, problem.t_star);
        chk.close("phase alignment", alignment,
                  record.at("checks").at("phase_alignment_at_t_star").get<double>(), 1e-8);
    }
    if (record.contains("checks") && record.at("checks").contains("echo_at_t_star")) {
        const ControlProblem problem = problem_from_json(record.at("problem"));
        const ControlKicks kicks = kicks_from_json(record.at("result").at("best").at("kicks"));
        const EchoSeries echo =
            loschmidt_echo(problem.initial, problem.params, kicks, problem.t_star);
        chk.close("echo at t*", echo.values[static_cast<size_t>(problem.t_star)],
                  record.at("checks").at("echo_at_t_star").get<double>(), 1e-8);
    }
}

}  // namespace

VerifyOutcome verify_record(const std::string& record_path) {
    VerifyOutcome outcome;
    Checker chk(outcome);
    json record;
    try {
        record = read_json_file(record_path);
        if (record.value("format", "") != "qkr-run")
            throw std::invalid_argument("not a run record (missing format tag)");
        if (record.value("record_version", -1) != kRecordVersion)
            throw std::invalid_argument("unsupported record version");

        const std::string scenario = record.at("scenario").get<std::string>();
        chk.holds("record format and version recognized (scenario " + scenario + ")", true);
        if (record.value("code_version", "") != kVersion)
            chk.holds("record was written by code version " + record.value("code_version", "?") +
                          ", verifying with " + kVersion,
                      true);

        if (scenario == "revival" || scenario == "cat" || scenario == "random_pair")
            verify_simple_control(chk, record);
        else if (scenario == "fidelity_vs_time")
            verify_fidelity_vs_time(chk, record);
        else if (scenario == "scaling")
            verify_scaling(chk, record);
        else if (scenario == "classical_sos")
            verify_classical(chk, record);
        else if (scenario == "rmt_suite")
            verify_rmt(chk, record);
        else if (scenario == "spectral_check")
            chk.holds("spectral_check records are self-describing; nothing to recompute", true);
        else
            throw std::invalid_argument("unknown scenario '" + scenario + "'");
    } catch (const std::exception& e) {
        outcome.pass = false;
        outcome.lines.push_back(std::string("FAIL: ") + e.what());
    }
    return outcome;
}

}  // namespace qkr
