#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkr/powell.hpp"
#include "qkr/rotor.hpp"

namespace qkr {

// Which kick slots the optimizer may use. The main slot rides on the
// ordinary kick; the mid slots sit at 1/3 and 2/3 of the free rotation.
struct ActiveSlots {
    bool main = true;
    bool mid1 = false;
    bool mid2 = false;

    int count() const { return (main ? 1 : 0) + (mid1 ? 1 : 0) + (mid2 ? 1 : 0); }
    static ActiveSlots main_only() { return {true, false, false}; }
    static ActiveSlots all() { return {true, true, true}; }
};

// State-to-state steering task: drive `initial` into `target` in t_star
// periods of the perturbed rotor, keeping the disorder amplitudes small.
// The cost is
//   S = 1 - |<target| U^t* |initial>|^2 + mu * sum(eps^2).
struct ControlProblem {
    RotorParams params;
    WaveState initial;
    WaveState target;
    int t_star = 5;
    double mu = 25.0;
    ActiveSlots slots = ActiveSlots::all();
};

struct OptimizerConfig {
    int max_iterations = 200;  // Powell cycles per restart
    double f_tol = 1e-8;
    double x_tol = 1e-8;
    int restarts = 1;
    std::uint64_t seed = 1;
    double init_scale = 0.0;  // <= 0 selects 0.01 * max(K, 1)
};

struct OptimizationResult {
    ControlKicks kicks;
    double fidelity = 0.0;
    double cost = 0.0;
    double eps_rms = 0.0;        // rms of the optimized amplitude vector
    double potential_rms = 0.0;  // rms of the sampled potentials, all active slots pooled
    long evaluations = 0;
    int cycles = 0;
    bool converged = false;
    int restart_index = 0;
    std::uint64_t restart_seed = 0;
    std::string note;
    std::vector<TracePoint> trace;
};

struct ControlReport {
    std::vector<OptimizationResult> restarts;  // successful restarts, in launch order
    std::vector<std::string> failures;         // diagnostics from restarts that threw
    int best_index = -1;                       // lowest cost among the successes
    double fidelity_mean = 0.0;
    double fidelity_std = 0.0;

    const OptimizationResult& best() const {
        if (best_index < 0) throw std::logic_error("ControlReport: no successful restart");
        return restarts[static_cast<size_t>(best_index)];
    }
};

void validate_problem(const ControlProblem& problem);

// Stateless single evaluation of the control cost.
double control_cost(const ControlProblem& problem, const ControlKicks& kicks);

// Reusable evaluator for optimizer loops: owns the propagation engine and
// maps flat parameter vectors onto the active slots (layout: main, mid1,
// mid2; each block has N entries).
class CostEvaluator {
public:
    explicit CostEvaluator(const ControlProblem& problem);

    int dimension() const { return dimension_; }
    double operator()(const Eigen::VectorXd& x);
    double fidelity_of(const Eigen::VectorXd& x);
    ControlKicks unpack(const Eigen::VectorXd& x) const;
    double potential_rms_of(const Eigen::VectorXd& x) const;

private:
    void load(const Eigen::VectorXd& x);

    ControlProblem problem_;
    FloquetEngine engine_;
    Eigen::VectorXcd initial_pos_;
    Eigen::VectorXcd target_pos_;
    Eigen::VectorXcd scratch_;
    Eigen::VectorXd zeros_;
    int dimension_ = 0;
};

// Multi-restart Powell minimization of the control cost. Restart r draws its
// start point from a stream seeded by (config.seed, r), so reruns and
// reordered execution reproduce identical results. A restart that throws is
// recorded as a failure; the report carries every restart that finished.
// Throws only if no restart succeeds.
ControlReport optimize_control(const ControlProblem& problem, const OptimizerConfig& config);

// Revival task: target equals initial (checked), main slot only.
ControlReport revival_control(const ControlProblem& problem, const OptimizerConfig& config);

// Random target orthogonal to `initial`. With match_parity_weights the
// target is built sector by sector so its even/odd reflection weights equal
// those of `initial`; the reflection symmetry commutes with the whole kick
// family, so weight-mismatched pairs have a fidelity ceiling below one and
// are unreachable no matter the disorder.
WaveState random_orthogonal_target(const WaveState& initial, std::uint64_t seed,
                                   bool match_parity_weights = true);

struct SweepConfig {
    std::vector<int> sizes;  // strictly ascending dimensions
    double K = 8.0;
    int t_star = 5;
    int pairs = 2;  // random state pairs per dimension
    double mu = 25.0;
    OptimizerConfig optimizer;
    bool match_parity_weights = true;
    double fidelity_floor = 0.9;  // below this a pair counts as failed
};

struct ScalingPoint {
    int N = 0;
    double hbar = 0.0;
    double mean_eps_rms = 0.0;
    double mean_potential_rms = 0.0;
    double mean_fidelity = 0.0;
    std::vector<double> eps_rms;      // per successful pair
    std::vector<double> fidelities;   // per successful pair
    int failures = 0;
};

struct ScalingSweep {
    std::vector<ScalingPoint> points;
    double slope = 0.0;  // d ln(eps_rms) / d ln(hbar)
    double intercept = 0.0;
    bool slope_valid = false;
};

// Optimizes random pairs across dimensions and fits the log-log slope of
// the mean amplitude against hbar. Failed pairs are recorded and skipped.
// When config.optimizer.init_scale is unset, each dimension starts its
// search at hbar(N) so the fit probes minimal amplitudes rather than how
// far the optimizer descended from a fat start point.
ScalingSweep run_scaling_sweep(const SweepConfig& config);

// Least-squares slope of ln(y) against ln(x); requires two or more points.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y,
                        double* intercept = nullptr);

}  // namespace qkr
