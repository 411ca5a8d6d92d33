#include "eyewit/witness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "eyewit/error.hpp"

namespace eyewit {

namespace {

constexpr double kStatsTol = 1e-12;

void check_reflectance(double r) {
    require(r >= 0.0 && r <= 1.0, ErrorCode::invalid_argument, "reflectance outside [0, 1]");
}

}  // namespace

void ClickStats::validate() const {
    const auto unit = [](double x) { return x >= -kStatsTol && x <= 1.0 + kStatsTol; };
    require(unit(ps1) && unit(ps2) && unit(pc), ErrorCode::invalid_argument, "click probability outside [0, 1]");
    require(pc <= std::min(ps1, ps2) + kStatsTol, ErrorCode::invalid_argument,
            "coincidence probability exceeds a single probability");
    require(ps1 + ps2 - pc <= 1.0 + kStatsTol, ErrorCode::invalid_argument,
            "singles and coincidences are inconsistent (ps1 + ps2 - pc > 1)");
}

ClassicalEnsemble::ClassicalEnsemble(std::vector<EnsembleComponent> components)
    : components_(std::move(components)) {
    require(!components_.empty(), ErrorCode::invalid_argument, "empty classical ensemble");
    double total = 0.0;
    for (const auto &c : components_) {
        require(c.weight >= 0.0, ErrorCode::invalid_argument, "negative ensemble weight");
        require(std::isfinite(c.alpha.real()) && std::isfinite(c.alpha.imag()), ErrorCode::invalid_argument,
                "non-finite ensemble amplitude");
        total += c.weight;
    }
    require(std::abs(total - 1.0) <= 1e-12, ErrorCode::invalid_argument, "ensemble weights do not sum to 1");
}

ClickStats singles_and_coincidences(const NumberDistribution &p, const DetectorModel &det1,
                                    const DetectorModel &det2, double r) {
    check_reflectance(r);
    const JointNumberDistribution joint = split_joint(p, r);
    const int max_n = joint.max_n();
    const auto f1 = click_table(det1, max_n);
    const auto f2 = click_table(det2, max_n);
    ClickStats out;
    const Eigen::MatrixXd &j = joint.matrix();
    for (int k = 0; k <= max_n; ++k) {
        const double fk = f1[static_cast<std::size_t>(k)];
        for (int m = 0; m + k <= max_n; ++m) {
            const double w = j(k, m);
            if (w == 0.0) continue;
            const double fm = f2[static_cast<std::size_t>(m)];
            out.ps1 += w * fk;
            out.ps2 += w * fm;
            out.pc += w * fk * fm;
        }
    }
    return out;
}

double g2(const ClickStats &stats) {
    const double denom = stats.ps1 * stats.ps2;
    require(denom > 0.0, ErrorCode::undefined_ratio, "g2 undefined when a single probability vanishes");
    return stats.pc / denom;
}

double witness_difference(const ClickStats &stats) { return stats.pc - stats.ps1 * stats.ps2; }

ClickStats classical_ensemble_stats(const ClassicalEnsemble &ens, const DetectorModel &det1,
                                    const DetectorModel &det2, double r) {
    check_reflectance(r);
    ClickStats out;
    for (const auto &c : ens.components()) {
        const double intensity = std::norm(c.alpha);
        const double s1 = click_prob_coherent(r * intensity, det1);
        const double s2 = click_prob_coherent((1.0 - r) * intensity, det2);
        out.ps1 += c.weight * s1;
        out.ps2 += c.weight * s2;
        out.pc += c.weight * s1 * s2;
    }
    return out;
}

double variance_ratio(ComplexAmplitude alpha) {
    const double a2 = std::norm(alpha);
    const double re = alpha.real();
    const double denom = 2.0 + 4.0 * a2 + 4.0 * re;
    require(denom > 0.0, ErrorCode::singular_denominator, "variance ratio denominator is not positive");
    return (1.0 + 8.0 * a2 - 4.0 * re * re) / denom;
}

double number_moment_ratio(const NumberDistribution &p) {
    const double mean = p.mean();
    require(mean > 0.0, ErrorCode::undefined_ratio, "number moment ratio undefined for zero mean");
    return p.factorial_moment2() / (mean * mean);
}

NumberDistribution superposition_number_distribution(ComplexAmplitude alpha, double tail_tol) {
    const std::array<Complex, 2> plus{Complex{1.0, 0.0}, Complex{1.0, 0.0}};
    return number_distribution(DensityMatrix::pure(plus), alpha, tail_tol);
}

std::vector<ScanPoint> superposition_g2_scan(std::span<const double> alphas, const DetectorModel &det1,
                                             const DetectorModel &det2, double r) {
    std::vector<ScanPoint> out;
    out.reserve(alphas.size());
    for (double a : alphas) {
        const auto stats = singles_and_coincidences(superposition_number_distribution(a), det1, det2, r);
        const double denom = stats.ps1 * stats.ps2;
        out.push_back({a, 0.5 * (stats.ps1 + stats.ps2), stats.pc,
                       denom > 0.0 ? stats.pc / denom : std::numeric_limits<double>::quiet_NaN()});
    }
    return out;
}

double find_g2_crossing(double lo, double hi, const DetectorModel &det1, const DetectorModel &det2, double r,
                        double tol) {
    require(lo < hi && tol > 0.0, ErrorCode::invalid_argument, "invalid crossing bracket");
    const auto excess = [&](double a) {
        return g2(singles_and_coincidences(superposition_number_distribution(a), det1, det2, r)) - 1.0;
    };
    double flo = excess(lo);
    const double fhi = excess(hi);
    require(flo * fhi < 0.0, ErrorCode::infeasible, "g2 - 1 does not change sign on the bracket");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = excess(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace eyewit
