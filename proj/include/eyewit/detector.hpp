#pragma once

#include <span>
#include <vector>

namespace eyewit {

/// Threshold click detector behind loss: clicks when at least `theta`
/// photons survive an efficiency `eta`, with an optional Poissonian
/// background of mean `dark_mean` photons added before the comparison.
struct DetectorModel {
    int theta = 7;
    double eta = 0.08;
    double dark_mean = 0.0;

    void validate() const;

    /// Human-eye calibration from the frequency-of-seeing experiments.
    static DetectorModel hecht_eye() { return {7, 0.08, 0.0}; }
    static DetectorModel low_threshold_eye() { return {3, 0.08, 0.0}; }
    static DetectorModel high_efficiency_eye() { return {7, 0.10, 0.0}; }
    /// Non-photon-number-resolving detector.
    static DetectorModel non_pnr(double eta) { return {1, eta, 0.0}; }

    friend bool operator==(const DetectorModel &, const DetectorModel &) = default;
};

/// Click probability for an n-photon Fock state.
double click_prob_fock(long long n, const DetectorModel &det);

/// Click probabilities for n = 0..max_n.
std::vector<double> click_table(const DetectorModel &det, int max_n);

/// Click probability for a coherent state of mean photon number mu.
double click_prob_coherent(double mu, const DetectorModel &det);

std::vector<double> frequency_of_seeing_curve(std::span<const double> mu_grid, const DetectorModel &det);

}  // namespace eyewit
