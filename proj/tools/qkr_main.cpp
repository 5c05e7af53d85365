#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "qkr/experiments.hpp"
#include "qkr/hilbert.hpp"
#include "qkr/io.hpp"
#include "qkr/version.hpp"

namespace {

// Exit codes: 0 success, 1 runtime failure, 2 bad configuration or arguments,
// 3 verification mismatch.
constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kConfigError = 2;
constexpr int kVerifyMismatch = 3;

int do_run(const std::string& config_path, const qkr::RunOptions& options) {
    const nlohmann::json config = qkr::load_config_file(config_path);
    const nlohmann::json record = qkr::run_experiment(config, options);
    std::printf("scenario %s -> %s/record.json\n",
                record.at("scenario").get<std::string>().c_str(), options.out_dir.c_str());
    if (record.contains("result") && record.at("result").contains("best")) {
        const auto& best = record.at("result").at("best");
        std::printf("fidelity %.12g  eps_rms %.6g  potential_rms %.6g\n",
                    best.at("fidelity").get<double>(), best.at("eps_rms").get<double>(),
                    best.at("potential_rms").get<double>());
    }
    return kOk;
}

int do_verify(const std::string& record_path) {
    const qkr::VerifyOutcome outcome = qkr::verify_record(record_path);
    for (const auto& line : outcome.lines) std::printf("%s\n", line.c_str());
    std::printf("verify: %s\n", outcome.pass ? "PASS" : "FAIL");
    return outcome.pass ? kOk : kVerifyMismatch;
}

int do_state_make(const std::string& kind, int N, double q0, double p0, double sigma, double qa,
                  double qb, std::uint64_t seed, const std::string& out_path) {
    const qkr::HilbertSpec spec(N);
    qkr::WaveState state(spec, qkr::Basis::Position);
    if (kind == "gaussian")
        state = qkr::make_gaussian(spec, q0, p0, sigma);
    else if (kind == "cat")
        state = qkr::make_cat(spec, qa, qb, p0, sigma);
    else if (kind == "random")
        state = qkr::make_random(spec, seed);
    else
        throw std::invalid_argument("state make: unknown kind '" + kind + "'");
    qkr::save_state(state, out_path);
    std::printf("wrote %s (N=%d, %s basis)\n", out_path.c_str(), N,
                state.basis == qkr::Basis::Position ? "position" : "momentum");
    return kOk;
}

int do_state_info(const std::string& path) {
    const qkr::WaveState state = qkr::load_state(path);
    std::printf("N %d\nbasis %s\nnorm %.17g\nmean_position %.17g\nmean_momentum %.17g\n"
                "participation_ratio %.17g\n",
                state.spec.N, state.basis == qkr::Basis::Position ? "position" : "momentum",
                state.norm(), qkr::mean_position(state), qkr::mean_momentum(state),
                qkr::participation_ratio(state));
    return kOk;
}

int do_state_convert(const std::string& in_path, const std::string& out_path,
                     const std::string& basis) {
    qkr::WaveState state = qkr::load_state(in_path);
    if (basis == "position" && state.basis == qkr::Basis::Momentum)
        state = qkr::to_position(state);
    else if (basis == "momentum" && state.basis == qkr::Basis::Position)
        state = qkr::to_momentum(state);
    else if (basis != "keep" && basis != "position" && basis != "momentum")
        throw std::invalid_argument("state convert: basis must be keep, position, or momentum");
    qkr::save_state(state, out_path);
    std::printf("wrote %s\n", out_path.c_str());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kicked-rotor control laboratory"};
    app.set_version_flag("--version", std::string(qkr::kVersion));
    app.require_subcommand(1);

    std::string config_path;
    qkr::RunOptions options;
    auto* run_cmd = app.add_subcommand("run", "Run an experiment from a JSON config");
    run_cmd->add_option("config", config_path, "Path to the config file")->required();
    run_cmd->add_option("--out", options.out_dir, "Output directory (default: .)");
    run_cmd->add_option("--threads", options.threads, "Worker threads for independent tasks");
    run_cmd->add_flag("--figure-scale", options.figure_scale,
                      "Use publication-scale problem sizes");

    std::string record_path;
    auto* verify_cmd = app.add_subcommand("verify", "Re-check the numbers in a run record");
    verify_cmd->add_option("record", record_path, "Path to record.json")->required();

    auto* state_cmd = app.add_subcommand("state", "Create and inspect wavefunction files");
    state_cmd->require_subcommand(1);

    std::string kind = "gaussian", out_path = "state.json";
    int N = 64;
    double q0 = 0.5, p0 = 0.0, sigma = 0.0, qa = 0.25, qb = 0.75;
    std::uint64_t seed = 1;
    auto* make_cmd = state_cmd->add_subcommand("make", "Write a reference state to a file");
    make_cmd->add_option("--kind", kind, "gaussian, cat, or random");
    make_cmd->add_option("--N", N, "Hilbert space dimension")->required();
    make_cmd->add_option("--q0", q0, "Packet center (gaussian)");
    make_cmd->add_option("--p0", p0, "Momentum center");
    make_cmd->add_option("--sigma", sigma, "Packet width; 0 picks the default");
    make_cmd->add_option("--qa", qa, "First hump (cat)");
    make_cmd->add_option("--qb", qb, "Second hump (cat)");
    make_cmd->add_option("--seed", seed, "Seed (random)");
    make_cmd->add_option("--out", out_path, "Output path (.json or .bin)");

    std::string info_path;
    auto* info_cmd = state_cmd->add_subcommand("info", "Print summary values for a state file");
    info_cmd->add_option("file", info_path, "State file")->required();

    std::string conv_in, conv_out, conv_basis = "keep";
    auto* conv_cmd = state_cmd->add_subcommand("convert", "Rewrite a state file");
    conv_cmd->add_option("input", conv_in, "Input state file")->required();
    conv_cmd->add_option("output", conv_out, "Output state file")->required();
    conv_cmd->add_option("--basis", conv_basis, "keep, position, or momentum");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return do_run(config_path, options);
        if (verify_cmd->parsed()) return do_verify(record_path);
        if (make_cmd->parsed())
            return do_state_make(kind, N, q0, p0, sigma, qa, qb, seed, out_path);
        if (info_cmd->parsed()) return do_state_info(info_path);
        if (conv_cmd->parsed()) return do_state_convert(conv_in, conv_out, conv_basis);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kRuntimeError;
    }
    return kConfigError;
}
