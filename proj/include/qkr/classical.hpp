#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qkr/rotor.hpp"

namespace qkr {

struct PhasePoint {
    double q = 0.0;
    double p = 0.0;
};

// dV/dq and d^2V/dq^2 of the harmonic disorder potential at position q.
double disorder_force(const DisorderVector& disorder, double q);
double disorder_force_derivative(const DisorderVector& disorder, double q);

// One kick-and-drift step of the classical standard map, with the disorder
// force subtracted alongside the kick impulse:
//
//   p' = p - (K / 2 pi) sin(2 pi q) - F(q),   q' = q + p',
//
// both coordinates wrapped to [0, 1). Pass disorder = nullptr for the plain
// map.
PhasePoint standard_map_step(const PhasePoint& z, double K,
                             const DisorderVector* disorder = nullptr);

struct Trajectory {
    std::vector<PhasePoint> points;
};

struct SectionData {
    double K = 0.0;
    std::vector<Trajectory> trajectories;
    std::optional<PotentialProfile> perturbation;
};

// Stroboscopic surface of section: n_seeds random initial conditions, each
// iterated to n_iter recorded points (the initial condition included).
SectionData poincare_section(double K, const DisorderVector* disorder, int n_seeds, int n_iter,
                             std::uint64_t seed);

// Largest fraction of an n_cells x n_cells partition of the torus visited by
// any single trajectory. Near 1 for a chaotic sea, small for regular motion.
double chaos_fraction(const SectionData& section, int n_cells);

// Mean largest Lyapunov exponent: tangent-map products along trajectories
// from random initial conditions, renormalized every 10 steps.
double lyapunov_exponent(double K, const DisorderVector* disorder, int n_iter, int n_seeds,
                         std::uint64_t seed);

}  // namespace qkr
