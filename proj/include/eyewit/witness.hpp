#pragma once

// Non-classicality witnesses built from click statistics behind a
// beamsplitter: singles/coincidences, g2(0), the asymmetric difference
// witness and sub-Poissonian diagnostics.

#include <span>
#include <vector>

#include "eyewit/detector.hpp"
#include "eyewit/fock.hpp"

namespace eyewit {

struct ClickStats {
    double ps1 = 0.0;
    double ps2 = 0.0;
    double pc = 0.0;

    void validate() const;
};

struct EnsembleComponent {
    ComplexAmplitude alpha;
    double weight = 0.0;
};

/// Finite mixture of coherent states with non-negative weights summing to 1.
class ClassicalEnsemble {
  public:
    explicit ClassicalEnsemble(std::vector<EnsembleComponent> components);
    static ClassicalEnsemble coherent(ComplexAmplitude alpha) { return ClassicalEnsemble({{alpha, 1.0}}); }

    const std::vector<EnsembleComponent> &components() const { return components_; }

  private:
    std::vector<EnsembleComponent> components_;
};

/// Singles of each detector and their coincidence for a state with number
/// statistics p split with reflectance r; det1 sits on the reflected output.
ClickStats singles_and_coincidences(const NumberDistribution &p, const DetectorModel &det1,
                                    const DetectorModel &det2, double r);

/// pc / (ps1 ps2).
double g2(const ClickStats &stats);

/// pc - ps1 ps2; non-negative for every classical state when both detectors
/// have click probabilities increasing with the photon number.
double witness_difference(const ClickStats &stats);

ClickStats classical_ensemble_stats(const ClassicalEnsemble &ens, const DetectorModel &det1,
                                    const DetectorModel &det2, double r);

/// Photon-number variance of D(alpha)(|0>+|1>)/sqrt(2) relative to a coherent
/// state of equal mean.
double variance_ratio(ComplexAmplitude alpha);

/// (<N^2> - <N>) / <N>^2.
double number_moment_ratio(const NumberDistribution &p);

/// Number statistics of D(alpha)(|0>+|1>)/sqrt(2).
NumberDistribution superposition_number_distribution(ComplexAmplitude alpha,
                                                     double tail_tol = kDefaultTailTolerance);

struct ScanPoint {
    double alpha = 0.0;
    double ps = 0.0;
    double pc = 0.0;
    double g2 = 0.0;
};

/// g2 of D(alpha)(|0>+|1>)/sqrt(2) for real alpha behind a splitter with two
/// detectors; ps is the mean of the two singles.
std::vector<ScanPoint> superposition_g2_scan(std::span<const double> alphas, const DetectorModel &det1,
                                             const DetectorModel &det2, double r);

/// Bisection for g2(alpha) = 1 on [lo, hi] (real alpha) to resolution `tol`.
double find_g2_crossing(double lo, double hi, const DetectorModel &det1, const DetectorModel &det2, double r,
                        double tol = 1e-3);

}  // namespace eyewit
