#include "eyewit/preparation.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "eyewit/error.hpp"

namespace eyewit {

namespace {

constexpr double kMinClickProbability = 1e-12;
constexpr double kReflectedTailTol = 1e-10;

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

// Unnormalized transmitted-mode state conditioned on a click of the
// reflected-mode detector. Beamsplitter convention:
// |1> -> sqrt(t)|1>_t|0>_r - sqrt(1-t)|0>_t|1>_r.
Eigen::Matrix2cd conditioned_state(const PreparationParams &p) {
    const int cut = p.reflected_cutoff;
    const auto b0 = displaced_fock_column(0, p.beta, cut);
    const auto b1 = displaced_fock_column(1, p.beta, cut);

    double norm0 = 0.0;
    double norm1 = 0.0;
    for (int n = 0; n <= cut; ++n) {
        norm0 += std::norm(b0[static_cast<std::size_t>(n)]);
        norm1 += std::norm(b1[static_cast<std::size_t>(n)]);
    }
    require(1.0 - norm0 <= kReflectedTailTol && 1.0 - norm1 <= kReflectedTailTol,
            ErrorCode::cutoff_insufficient,
            "reflected-mode cutoff " + std::to_string(cut) + " leaves too much displaced mass");

    const double st = std::sqrt(p.t);
    const double sr = std::sqrt(1.0 - p.t);
    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
    for (int n = 0; n <= cut; ++n) {
        const double click = 1.0 - std::pow(1.0 - p.eta_d, n);
        if (click == 0.0) continue;
        const auto i = static_cast<std::size_t>(n);
        // photon branch, transmitted |0> and |1> components
        const Complex v0 = -sr * b1[i];
        const Complex v1 = st * b0[i];
        rho(0, 0) += p.eta_c * click * std::norm(v0);
        rho(1, 1) += p.eta_c * click * std::norm(v1);
        rho(0, 1) += p.eta_c * click * v0 * std::conj(v1);
        // vacuum branch
        rho(0, 0) += (1.0 - p.eta_c) * click * std::norm(b0[i]);
    }
    rho(1, 0) = std::conj(rho(0, 1));
    return rho;
}

}  // namespace

void PreparationParams::validate() const {
    require(in_unit(eta_c), ErrorCode::validation_error, "eta_c must lie in [0, 1]");
    require(in_unit(t), ErrorCode::validation_error, "beamsplitter transmission t must lie in [0, 1]");
    require(in_unit(eta_d), ErrorCode::validation_error, "eta_d must lie in [0, 1]");
    require(reflected_cutoff >= 4, ErrorCode::validation_error, "reflected_cutoff must be >= 4");
    require(reflected_cutoff <= 4096, ErrorCode::validation_error, "reflected_cutoff must be <= 4096");
    require(std::isfinite(beta.real()) && std::isfinite(beta.imag()) && std::abs(beta) <= kMaxDisplacement,
            ErrorCode::validation_error, "beta must be finite with |beta| <= 50");
}

PreparedState conditional_state(const PreparationParams &params) {
    params.validate();
    const Eigen::Matrix2cd raw = conditioned_state(params);
    const double p_click = raw.trace().real();
    require(p_click >= kMinClickProbability, ErrorCode::zero_click_probability,
            "click probability on the reflected mode vanishes; conditioning undefined");

    Eigen::MatrixXcd normed = raw / p_click;
    DensityMatrix rho(normed);
    const Complex coherence = normed(0, 1);
    const double overlap = 0.5 * (normed(0, 0).real() + normed(1, 1).real()) + std::abs(coherence);
    double phase = coherence == Complex{0.0, 0.0} ? 0.0 : -std::arg(coherence);
    if (phase <= -std::numbers::pi) phase += 2.0 * std::numbers::pi;

    PreparedState out{std::move(rho), p_click, overlap, std::sqrt(overlap), phase, 0.0};
    if (params.eta_c == 1.0) {
        out.fidelity_plus_ideal_source = out.fidelity_plus;
    } else {
        PreparationParams ideal = params;
        ideal.eta_c = 1.0;
        const Eigen::Matrix2cd r1 = conditioned_state(ideal);
        const double p1 = r1.trace().real();
        if (p1 >= kMinClickProbability) {
            out.fidelity_plus_ideal_source = std::sqrt(0.5 + std::abs(r1(0, 1)) / p1);
        }
    }
    return out;
}

RateBudget rate_budget(double rep_rate, double duty_cycle, double p_pair, double eta_herald,
                       double p_click_given_herald) {
    require(rep_rate >= 0.0 && std::isfinite(rep_rate), ErrorCode::invalid_argument, "rep_rate must be >= 0");
    require(in_unit(duty_cycle), ErrorCode::invalid_argument, "duty_cycle must lie in [0, 1]");
    require(in_unit(p_pair), ErrorCode::invalid_argument, "p_pair must lie in [0, 1]");
    require(in_unit(eta_herald), ErrorCode::invalid_argument, "eta_herald must lie in [0, 1]");
    require(in_unit(p_click_given_herald), ErrorCode::invalid_argument,
            "p_click_given_herald must lie in [0, 1]");
    RateBudget out;
    out.herald_rate = rep_rate * duty_cycle * p_pair * eta_herald;
    out.trigger_rate = out.herald_rate * p_click_given_herald;
    return out;
}

double snr_budget(double noise_over_signal, double extinction_ratio) {
    require(noise_over_signal > 0.0 && extinction_ratio > 0.0, ErrorCode::invalid_argument,
            "noise ratio and extinction ratio must be positive");
    return extinction_ratio / noise_over_signal;
}

}  // namespace eyewit
