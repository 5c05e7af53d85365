#include "qkr/timescales.hpp"

#include <cmath>
#include <stdexcept>

namespace qkr {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0))
        throw std::invalid_argument(std::string("timescales: ") + name + " must be > 0");
}

}  // namespace

double effective_dimension(double delta_e_th, double rho_g) {
    require_positive(delta_e_th, "delta_e_th");
    require_positive(rho_g, "rho_g");
    return delta_e_th * rho_g;
}

double effective_dimension_volume(double v_th, double g, double h, int D) {
    require_positive(v_th, "v_th");
    require_positive(g, "g");
    require_positive(h, "h");
    if (D < 1) throw std::invalid_argument("timescales: D must be >= 1");
    return v_th / (g * std::pow(h, D));
}

double min_control_time(const TimescaleInputs& in) {
    require_positive(in.n_eff, "n_eff");
    require_positive(in.hbar, "hbar");
    require_positive(in.v_rms, "v_rms");
    require_positive(in.rho_g, "rho_g");
    require_positive(in.epsilon, "epsilon");
    return in.hbar * std::log(in.n_eff) /
           (kTwoPi * in.v_rms * in.v_rms * in.rho_g * in.epsilon * in.epsilon);
}

double logtime(double n_eff, double h_ks) {
    require_positive(n_eff, "n_eff");
    require_positive(h_ks, "h_ks");
    return std::log(n_eff) / h_ks;
}

double epsilon_star(const TimescaleInputs& in, EpsilonVariant variant) {
    switch (variant) {
        case EpsilonVariant::GoldenRule:
            require_positive(in.hbar, "hbar");
            require_positive(in.n_eff, "n_eff");
            require_positive(in.v_rms, "v_rms");
            require_positive(in.rho_g, "rho_g");
            require_positive(in.t_star, "t_star");
            return std::sqrt(in.hbar * std::log(in.n_eff) /
                             (kTwoPi * in.v_rms * in.v_rms * in.rho_g * in.t_star));
        case EpsilonVariant::Semiclassical:
            require_positive(in.hbar, "hbar");
            require_positive(in.n_eff, "n_eff");
            require_positive(in.k_diff, "k_diff");
            require_positive(in.t_star, "t_star");
            return in.hbar * std::sqrt(std::log(in.n_eff) / (2.0 * in.k_diff * in.t_star));
        case EpsilonVariant::Saturation:
            require_positive(in.hbar, "hbar");
            require_positive(in.h_ks, "h_ks");
            require_positive(in.k_diff, "k_diff");
            return in.hbar * std::sqrt(in.h_ks / (2.0 * in.k_diff));
    }
    throw std::invalid_argument("epsilon_star: unknown variant");
}

double logtime_volume(double h_ks, double v_th, double g, double h, int D) {
    require_positive(h_ks, "h_ks");
    require_positive(v_th, "v_th");
    require_positive(g, "g");
    require_positive(h, "h");
    if (D < 1) throw std::invalid_argument("timescales: D must be >= 1");
    return std::log(v_th / (g * std::pow(h, D))) / h_ks;
}

double logtime_per_dof(double lambda_bar, double v1, double h) {
    require_positive(lambda_bar, "lambda_bar");
    require_positive(v1, "v1");
    require_positive(h, "h");
    return std::log(v1 / h) / lambda_bar;
}

double rotor_ks_entropy(double K) {
    // The stretching estimate log(K/2) only means anything in the chaotic
    // regime; at K <= 2 it would come out nonpositive.
    if (K <= 2.0)
        throw std::invalid_argument("rotor_ks_entropy: defined for K > 2, got " +
                                    std::to_string(K));
    return std::log(K / 2.0);
}

EchoSeries loschmidt_echo(const WaveState& initial, const RotorParams& params,
                          const ControlKicks& kicks, int t_max) {
    if (t_max < 0) throw std::invalid_argument("loschmidt_echo: t_max must be >= 0");
    if (initial.spec != params.spec)
        throw std::invalid_argument("loschmidt_echo: state dimension mismatch");

    FloquetEngine free_engine(params);
    FloquetEngine kicked_engine(params);
    kicked_engine.set_kicks(kicks);

    const WaveState init_pos = initial.basis == Basis::Position ? initial : to_position(initial);
    Eigen::VectorXcd psi_free = init_pos.amplitudes;
    Eigen::VectorXcd psi_kicked = init_pos.amplitudes;

    EchoSeries series;
    series.times.reserve(t_max + 1);
    series.values.reserve(t_max + 1);
    series.times.push_back(0);
    series.values.push_back(std::norm(psi_free.dot(psi_kicked)));
    for (int t = 1; t <= t_max; ++t) {
        free_engine.step(psi_free);
        kicked_engine.step(psi_kicked);
        series.times.push_back(t);
        series.values.push_back(std::norm(psi_free.dot(psi_kicked)));
    }
    return series;
}

std::optional<int> decay_time(const EchoSeries& series, double threshold) {
    for (size_t i = 0; i < series.values.size(); ++i)
        if (series.values[i] <= threshold) return series.times[i];
    return std::nullopt;
}

}  // namespace qkr
