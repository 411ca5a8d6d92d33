#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "eyewit/error.hpp"
#include "eyewit/witness.hpp"
#include "property_suites.hpp"

using namespace eyewit;

TEST(WitnessProperties, ClassicalDifferenceNonNegative) {
    EXPECT_GE(props::min_classical_difference(1000, 11), -1e-12);
}

TEST(WitnessProperties, CoherentG2IsOne) { EXPECT_LT(props::max_coherent_g2_error(100, 12), 1e-9); }

TEST(WitnessProperties, JointPhaseRotationInvariance) { EXPECT_LT(props::max_phase_error(100, 13), 1e-12); }

TEST(Witness, ClassicalStatsAgreeWithNumberRoute) {
    const Complex alpha{6.0, -2.0};
    const DetectorModel d1{3, 0.2, 0.0}, d2{5, 0.4, 0.1};
    const auto viaq = singles_and_coincidences(number_distribution(DensityMatrix::fock(0), alpha, 1e-14), d1, d2, 0.3);
    const auto viac = classical_ensemble_stats(ClassicalEnsemble::coherent(alpha), d1, d2, 0.3);
    EXPECT_NEAR(viaq.ps1, viac.ps1, 1e-12);
    EXPECT_NEAR(viaq.ps2, viac.ps2, 1e-12);
    EXPECT_NEAR(viaq.pc, viac.pc, 1e-12);
}

TEST(Witness, SinglePhotonNonPnrHasNoCoincidences) {
    const auto det = DetectorModel::non_pnr(1.0);
    const auto s = singles_and_coincidences(NumberDistribution::fock(1), det, det, 0.5);
    EXPECT_NEAR(s.ps1, 0.5, 1e-15);
    EXPECT_EQ(s.pc, 0.0);
    EXPECT_LT(witness_difference(s), 0.0);
}

TEST(Witness, EyeSuperpositionIsSubClassicalBelowCrossing) {
    const auto eye = DetectorModel::hecht_eye();
    const std::vector<double> alphas{2.0, 8.0, 10.99, 12.5};
    for (const auto &p : superposition_g2_scan(alphas, eye, eye, 0.5)) EXPECT_LT(p.g2, 1.0) << p.alpha;
    const double cross = find_g2_crossing(12.0, 15.0, eye, eye, 0.5);
    EXPECT_NEAR(cross, 13.3, 0.2);
    const auto above = superposition_g2_scan(std::vector<double>{14.5}, eye, eye, 0.5);
    EXPECT_GT(above[0].g2, 1.0);
}

TEST(Witness, VarianceRatioMatchesNumberDistribution) {
    for (double a : {0.0, 0.4, 1.7, 5.0}) {
        const auto p = superposition_number_distribution(a, 1e-14);
        const double mean = p.mean();
        const double var = p.factorial_moment2() + mean - mean * mean;
        EXPECT_NEAR(variance_ratio(a), var / mean, 1e-9) << a;
    }
    EXPECT_NEAR(variance_ratio(0.0), 0.5, 1e-15);
}

TEST(Witness, NumberMomentRatio) {
    EXPECT_NEAR(number_moment_ratio(NumberDistribution::poisson(7.0, 1e-15)), 1.0, 1e-10);
    EXPECT_EQ(number_moment_ratio(NumberDistribution::fock(1)), 0.0);
    EXPECT_THROW(number_moment_ratio(NumberDistribution::fock(0)), Error);
}

TEST(Witness, Validation) {
    EXPECT_THROW(ClassicalEnsemble({{1.0, 0.5}}), Error);
    EXPECT_THROW(ClassicalEnsemble({{1.0, -0.5}, {2.0, 1.5}}), Error);
    EXPECT_THROW(ClickStats({0.2, 0.3, 0.25}).validate(), Error);
    EXPECT_THROW(g2(ClickStats{0.0, 0.3, 0.0}), Error);
    const auto eye = DetectorModel::hecht_eye();
    EXPECT_THROW(find_g2_crossing(1.0, 5.0, eye, eye, 0.5), Error);
}
