#include "qkr/classical.hpp"

#include <cmath>
#include <stdexcept>

#include "qkr/rng.hpp"

namespace qkr {

namespace {

double wrap_unit(double x) {
    double w = x - std::floor(x);
    return w >= 1.0 ? w - 1.0 : w;
}

// Total impulse of one kick: K term plus disorder force.
double kick_impulse(double q, double K, const DisorderVector* disorder) {
    double f = -(K / kTwoPi) * std::sin(kTwoPi * q);
    if (disorder) f -= disorder_force(*disorder, q);
    return f;
}

// d(impulse)/dq, needed by the tangent map.
double kick_impulse_derivative(double q, double K, const DisorderVector* disorder) {
    double g = -K * std::cos(kTwoPi * q);
    if (disorder) g -= disorder_force_derivative(*disorder, q);
    return g;
}

}  // namespace

double disorder_force(const DisorderVector& disorder, double q) {
    double f = 0.0;
    for (int k = 1; k <= disorder.harmonics(); ++k)
        f -= kTwoPi * k * disorder.eps[k - 1] * std::sin(kTwoPi * k * q);
    return f;
}

double disorder_force_derivative(const DisorderVector& disorder, double q) {
    double g = 0.0;
    for (int k = 1; k <= disorder.harmonics(); ++k) {
        const double w = kTwoPi * k;
        g -= w * w * disorder.eps[k - 1] * std::cos(kTwoPi * k * q);
    }
    return g;
}

PhasePoint standard_map_step(const PhasePoint& z, double K, const DisorderVector* disorder) {
    if (!(K >= 0.0)) throw std::invalid_argument("standard_map_step: K must be >= 0");
    PhasePoint out;
    out.p = wrap_unit(z.p + kick_impulse(z.q, K, disorder));
    out.q = wrap_unit(z.q + out.p);
    return out;
}

SectionData poincare_section(double K, const DisorderVector* disorder, int n_seeds, int n_iter,
                             std::uint64_t seed) {
    if (n_seeds < 1 || n_iter < 1)
        throw std::invalid_argument("poincare_section: seed and iteration counts must be >= 1");
    Rng rng(seed);
    SectionData data;
    data.K = K;
    if (disorder && disorder->harmonics() > 0)
        data.perturbation = disorder_potential(*disorder, HilbertSpec(disorder->harmonics()));
    data.trajectories.reserve(n_seeds);
    for (int s = 0; s < n_seeds; ++s) {
        Trajectory traj;
        traj.points.reserve(n_iter);
        PhasePoint z{rng.uniform(), rng.uniform()};
        traj.points.push_back(z);
        for (int i = 1; i < n_iter; ++i) {
            z = standard_map_step(z, K, disorder);
            traj.points.push_back(z);
        }
        data.trajectories.push_back(std::move(traj));
    }
    return data;
}

double chaos_fraction(const SectionData& section, int n_cells) {
    if (n_cells < 2) throw std::invalid_argument("chaos_fraction: grid must be at least 2x2");
    if (section.trajectories.empty())
        throw std::invalid_argument("chaos_fraction: empty section");
    double best = 0.0;
    std::vector<char> visited(static_cast<size_t>(n_cells) * n_cells);
    for (const Trajectory& traj : section.trajectories) {
        std::fill(visited.begin(), visited.end(), 0);
        int count = 0;
        for (const PhasePoint& z : traj.points) {
            int iq = static_cast<int>(z.q * n_cells);
            int ip = static_cast<int>(z.p * n_cells);
            if (iq >= n_cells) iq = n_cells - 1;  // q == 1.0 cannot occur, but stay safe
            if (ip >= n_cells) ip = n_cells - 1;
            char& cell = visited[static_cast<size_t>(iq) * n_cells + ip];
            if (!cell) {
                cell = 1;
                ++count;
            }
        }
        best = std::max(best, static_cast<double>(count) / (static_cast<double>(n_cells) * n_cells));
    }
    return best;
}

double lyapunov_exponent(double K, const DisorderVector* disorder, int n_iter, int n_seeds,
                         std::uint64_t seed) {
    if (n_seeds < 1 || n_iter < 10)
        throw std::invalid_argument("lyapunov_exponent: need >= 1 seed and >= 10 iterations");
    Rng rng(seed);
    double lambda_sum = 0.0;
    for (int s = 0; s < n_seeds; ++s) {
        PhasePoint z{rng.uniform(), rng.uniform()};
        // Tangent vector, renormalized every 10 steps to avoid overflow.
        double v_q = 1.0, v_p = 0.0;
        double log_growth = 0.0;
        for (int n = 1; n <= n_iter; ++n) {
            const double g = kick_impulse_derivative(z.q, K, disorder);
            const double nv_q = (1.0 + g) * v_q + v_p;
            const double nv_p = g * v_q + v_p;
            v_q = nv_q;
            v_p = nv_p;
            z = standard_map_step(z, K, disorder);
            if (n % 10 == 0) {
                const double r = std::hypot(v_q, v_p);
                log_growth += std::log(r);
                v_q /= r;
                v_p /= r;
            }
        }
        const double r = std::hypot(v_q, v_p);
        if (r > 0.0) log_growth += std::log(r);
        lambda_sum += log_growth / n_iter;
    }
    return lambda_sum / n_seeds;
}

}  // namespace qkr
