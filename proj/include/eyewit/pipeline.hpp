#pragma once

// The full chain from the heralded source to one run's click statistics:
// conditional preparation, displacement aligned with the prepared coherence,
// a beamsplitter and two identical eyes.

#include <string>

#include "eyewit/detector.hpp"
#include "eyewit/fock.hpp"
#include "eyewit/preparation.hpp"
#include "eyewit/statistics.hpp"
#include "eyewit/witness.hpp"

namespace eyewit {

struct ChainConfig {
    DetectorModel eye = DetectorModel::hecht_eye();
    PreparationParams prep{};
    /// Displacement in the frame of the prepared state: a real positive value
    /// is applied with the phase that maximizes the coherence it acts on.
    ComplexAmplitude alpha{10.99, 0.0};
    double bs_reflectance = 0.5;
    double tail_tol = kDefaultTailTolerance;
    /// When false, alpha is applied as given in the lab frame.
    bool align_phase = true;
};

struct ChainResult {
    PreparedState prepared;
    /// Displacement actually applied to the prepared state.
    ComplexAmplitude alpha_applied;
    NumberDistribution distribution;
    ClickStats stats;
    /// Symmetrized cell with ps = (ps1 + ps2) / 2.
    CellProbabilities cell;
    /// |ps1 - ps2| / ps.
    double asymmetry = 0.0;
    bool asymmetry_warning = false;
};

inline constexpr double kAsymmetryWarning = 0.01;

ChainResult evaluate_chain(const ChainConfig &config);

/// The two-eye cell for click statistics of two detectors.
CellProbabilities symmetrized_cell(const ClickStats &stats, double *asymmetry = nullptr);

}  // namespace eyewit
