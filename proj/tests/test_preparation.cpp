#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <tuple>
#include <vector>

#include "eyewit/error.hpp"
#include "eyewit/preparation.hpp"
#include "oracles.hpp"

using namespace eyewit;

namespace {

// Conditional transmitted state built from the two-mode state vector: the
// photon is split, the reflected mode displaced with the matrix-exponential
// oracle, and the click POVM applied by its binomial definition.
struct Reference {
    Eigen::Matrix2cd rho;
    double p_click;
};

Reference reference_state(const PreparationParams &p) {
    const int cut = 14;
    const auto d0 = oracle::displacement_column(0, p.beta, cut);
    const auto d1 = oracle::displacement_column(1, p.beta, cut);
    Eigen::Matrix2cd raw = Eigen::Matrix2cd::Zero();
    for (int n = 0; n <= cut; ++n) {
        double miss = 1.0;
        for (int k = 0; k < n; ++k) miss *= 1.0 - p.eta_d;
        const double click = 1.0 - miss;
        // Single photon: psi = sqrt(t)|1,0> - sqrt(1-t)|0,1>, reflected mode then displaced.
        const Complex a0 = -std::sqrt(1.0 - p.t) * d1[n];
        const Complex a1 = std::sqrt(p.t) * d0[n];
        Eigen::Matrix2cd photon;
        photon << std::norm(a0), a0 * std::conj(a1), a1 * std::conj(a0), std::norm(a1);
        Eigen::Matrix2cd vac = Eigen::Matrix2cd::Zero();
        vac(0, 0) = std::norm(d0[n]);
        raw += click * (p.eta_c * photon + (1.0 - p.eta_c) * vac);
    }
    const double pc = raw.trace().real();
    return {raw / pc, pc};
}

}  // namespace

TEST(Preparation, MatchesTwoModeReference) {
    for (const auto &[t, beta, eta_c] : {std::tuple{0.98, 0.08, 0.8}, std::tuple{0.9, 0.3, 1.0},
                                         std::tuple{0.7, -0.5, 0.5}}) {
        PreparationParams p;
        p.t = t;
        p.beta = beta;
        p.eta_c = eta_c;
        p.reflected_cutoff = 16;
        const auto got = conditional_state(p);
        const auto ref = reference_state(p);
        EXPECT_NEAR(got.p_click_given_herald, ref.p_click, 1e-12 * ref.p_click + 1e-15);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) EXPECT_LT(std::abs(got.rho(i, j) - ref.rho(i, j)), 1e-10);
        }
        const double overlap = 0.5 + std::abs(ref.rho(0, 1));
        EXPECT_NEAR(got.overlap_plus, overlap, 1e-10);
        EXPECT_NEAR(got.fidelity_plus, std::sqrt(overlap), 1e-10);
    }
}

TEST(Preparation, PhaseMaximizesOverlap) {
    PreparationParams p;
    p.beta = Complex{0.05, 0.06};
    const auto s = conditional_state(p);
    const auto overlap_at = [&](double phi) {
        const Complex e = std::polar(1.0, phi);
        // <psi|rho|psi> with psi = (|0> + e^{i phi}|1>)/sqrt(2)
        return 0.5 * (s.rho(0, 0) + s.rho(1, 1) + e * s.rho(0, 1) + std::conj(e) * s.rho(1, 0)).real();
    };
    EXPECT_NEAR(overlap_at(s.phase), s.overlap_plus, 1e-12);
    for (int i = 0; i < 64; ++i) EXPECT_LE(overlap_at(i * 0.1), s.overlap_plus + 1e-12);
}

TEST(Preparation, PaperOperatingPoint) {
    const auto s = conditional_state(PreparationParams{});
    EXPECT_NEAR(s.p_click_given_herald, 0.010, 0.002);
    EXPECT_NEAR(s.fidelity_plus, 0.95, 0.01);
    EXPECT_GT(s.fidelity_plus_ideal_source, s.fidelity_plus);
}

TEST(Preparation, NoReflectionGivesSinglePhoton) {
    PreparationParams p;
    p.t = 1.0;
    p.eta_c = 1.0;
    p.beta = 0.5;
    p.reflected_cutoff = 16;
    const auto s = conditional_state(p);
    EXPECT_NEAR(s.p_click_given_herald, 1.0 - std::exp(-p.eta_d * 0.25), 1e-12);
    EXPECT_NEAR(s.rho(1, 1).real(), 1.0, 1e-12);
    EXPECT_NEAR(s.overlap_plus, 0.5, 1e-12);
}

TEST(Preparation, ZeroClickProbabilityIsAnError) {
    PreparationParams p;
    p.t = 1.0;
    p.beta = 0.0;
    try {
        conditional_state(p);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::zero_click_probability);
    }
}

TEST(Preparation, ValidationNamesField) {
    PreparationParams p;
    p.eta_c = 1.2;
    try {
        p.validate();
        FAIL();
    } catch (const Error &e) {
        EXPECT_NE(std::string(e.what()).find("eta_c"), std::string::npos);
    }
}

TEST(RateBudget, ExactArithmetic) {
    const auto r = rate_budget(80e6, 0.02, 0.8e-3, 0.08, 0.01);
    EXPECT_DOUBLE_EQ(r.herald_rate, 102.4);
    EXPECT_DOUBLE_EQ(r.trigger_rate, 1.024);
    EXPECT_DOUBLE_EQ(snr_budget(100.0, 2000.0), 20.0);
    EXPECT_THROW(rate_budget(80e6, 1.2, 0.8e-3, 0.08, 0.01), Error);
}
