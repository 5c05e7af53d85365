#pragma once

#include <json.hpp>
#include <string>
#include <vector>

namespace qkr {

struct RunOptions {
    std::string out_dir = ".";
    int threads = 1;
    bool figure_scale = false;  // switches scenario defaults to publication sizes
};

// Executes the scenario named in the config and writes its artifacts
// (record.json plus CSV exports) into out_dir. Unknown scenarios and unknown
// or ill-typed parameters are rejected. Returns the run record.
//
// Scenarios: revival, cat, random_pair, fidelity_vs_time, scaling,
// classical_sos, rmt_suite, spectral_check.
nlohmann::json run_experiment(const nlohmann::json& config, const RunOptions& options);

// Reads {"scenario": ..., "parameters": {...}} from disk.
nlohmann::json load_config_file(const std::string& path);

struct VerifyOutcome {
    bool pass = true;
    std::vector<std::string> lines;
};

// Recomputes the checkable quantities of a run record from its stored
// descriptors and kick amplitudes. Optimizations are not repeated: stored
// solutions are re-evaluated, statistics and identities re-derived.
VerifyOutcome verify_record(const std::string& record_path);

}  // namespace qkr
