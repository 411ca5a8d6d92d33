#pragma once

// Heralded preparation of an approximate (|0> + e^{i phi}|1>)/sqrt(2) state:
// a heralded photon hits an unbalanced beamsplitter, the reflected mode is
// displaced and measured with a non-photon-number-resolving detector, and a
// click heralds the transmitted mode.

#include "eyewit/fock.hpp"

namespace eyewit {

struct PreparationParams {
    /// Coupling efficiency of the heralded photon.
    double eta_c = 0.8;
    /// Transmission of the unbalanced beamsplitter.
    double t = 0.98;
    /// Displacement applied to the reflected mode before the click detector.
    ComplexAmplitude beta{0.08, 0.0};
    /// Efficiency of the click detector on the reflected mode.
    double eta_d = 0.5;
    int reflected_cutoff = 8;

    void validate() const;
};

struct PreparedState {
    /// Conditional state of the transmitted mode (before any displacement).
    DensityMatrix rho;
    double p_click_given_herald = 0.0;
    /// max_phi <psi_phi| rho |psi_phi> with psi_phi = (|0> + e^{i phi}|1>)/sqrt(2).
    double overlap_plus = 0.0;
    /// Uhlmann fidelity in the square-root convention, sqrt(overlap_plus).
    double fidelity_plus = 0.0;
    /// Phase phi achieving overlap_plus, in (-pi, pi].
    double phase = 0.0;
    /// fidelity_plus recomputed for a perfectly coupled source (eta_c = 1).
    double fidelity_plus_ideal_source = 0.0;
};

PreparedState conditional_state(const PreparationParams &params);

struct RateBudget {
    double herald_rate = 0.0;
    double trigger_rate = 0.0;
};

/// Heralding and trigger rates in Hz.
RateBudget rate_budget(double rep_rate, double duty_cycle, double p_pair, double eta_herald,
                       double p_click_given_herald);

/// Signal-to-noise ratio left after a pulse picker with the given extinction.
double snr_budget(double noise_over_signal, double extinction_ratio);

}  // namespace eyewit
