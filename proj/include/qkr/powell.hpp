#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace qkr {

// One cost sample per optimizer cycle, for convergence reporting.
struct TracePoint {
    int cycle;
    double cost;
};

struct PowellOptions {
    int max_cycles = 200;
    double f_tol = 1e-8;        // per-cycle fractional decrease below this => done
    double x_tol = 1e-8;        // max parameter move in a cycle below this => done
    double bracket_step = 0.1;  // first trial step of each line search
    double line_tol = 1e-10;    // absolute tolerance of the line minimizer
};

struct PowellResult {
    Eigen::VectorXd x;
    double f = 0.0;
    int cycles = 0;
    long evaluations = 0;
    bool converged = false;
    std::string note;  // non-empty when the run stopped for a reason worth reporting
    std::vector<TracePoint> trace;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

// Powell's conjugate-direction minimizer. Derivative free: each cycle runs a
// line minimization (golden-section bracketing, then Brent) along every
// direction in the set, then considers replacing one direction with the net
// displacement of the cycle. Line moves are accepted only on strict
// improvement, so a flat objective returns the start point.
PowellResult powell_minimize(const Objective& f, const Eigen::VectorXd& x0,
                             const PowellOptions& options = {});

}  // namespace qkr
