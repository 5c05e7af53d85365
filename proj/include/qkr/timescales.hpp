#pragma once

#include <optional>
#include <vector>

#include "qkr/rotor.hpp"

namespace qkr {

// Inputs for the analytic timescale and threshold estimates. Only the fields
// an evaluator reads need to be populated; each evaluator checks that what it
// uses is strictly positive.
struct TimescaleInputs {
    double n_eff = 0.0;    // effective Hilbert-space dimension
    double hbar = 0.0;
    double h_ks = 0.0;     // Kolmogorov-Sinai entropy
    double v_rms = 0.0;    // rms coupling matrix element of the perturbation
    double rho_g = 0.0;    // symmetry-resolved density of states
    double epsilon = 0.0;  // perturbation strength
    double t_star = 0.0;   // control time
    double k_diff = 0.0;   // classical diffusion constant K(E)
};

// Effective dimension seen by a state of Thouless energy width:
// N = dE_Th * rho_g, or equivalently phase-space volume over Planck cells.
double effective_dimension(double delta_e_th, double rho_g);
double effective_dimension_volume(double v_th, double g, double h, int D);

// Time for the golden-rule echo decay to reach 1/N at strength epsilon:
// t = hbar ln(N) / (2 pi v_rms^2 rho_g eps^2).
double min_control_time(const TimescaleInputs& in);

// Spreading time of a localized state, ln(N) / h_KS.
double logtime(double n_eff, double h_ks);

// Minimum perturbation strength to decay the echo by a fixed control time.
enum class EpsilonVariant {
    GoldenRule,     // sqrt(hbar ln N / (2 pi v_rms^2 rho_g t*))
    Semiclassical,  // hbar sqrt(ln N / (2 K(E) t*))
    Saturation,     // hbar sqrt(h_KS / (2 K(E))), i.e. the semiclassical form at t* = logtime
};
double epsilon_star(const TimescaleInputs& in, EpsilonVariant variant);

// Many-degree-of-freedom logtime forms: total phase-space volume over Planck
// cells, and the per-degree-of-freedom reduction.
double logtime_volume(double h_ks, double v_th, double g, double h, int D);
double logtime_per_dof(double lambda_bar, double v1, double h);

// Entropy estimate ln(K/2) of the strongly kicked rotor.
double rotor_ks_entropy(double K);

struct EchoSeries {
    std::vector<int> times;
    std::vector<double> values;
};

// Overlap decay |<psi_free(t)|psi_kicked(t)>|^2 of one initial state evolved
// with and without the control kicks, for t = 0..t_max.
EchoSeries loschmidt_echo(const WaveState& initial, const RotorParams& params,
                          const ControlKicks& kicks, int t_max);

// First time at which the series is at or below the threshold.
std::optional<int> decay_time(const EchoSeries& series, double threshold);

}  // namespace qkr
