#include "eyewit/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "eyewit/error.hpp"

namespace eyewit {

CellProbabilities symmetrized_cell(const ClickStats &stats, double *asymmetry) {
    stats.validate();
    const double ps = 0.5 * (stats.ps1 + stats.ps2);
    if (asymmetry != nullptr) *asymmetry = ps > 0.0 ? std::abs(stats.ps1 - stats.ps2) / ps : 0.0;
    CellProbabilities cell{ps, std::min(stats.pc, ps)};
    return cell;
}

ChainResult evaluate_chain(const ChainConfig &config) {
    config.eye.validate();
    require(config.bs_reflectance >= 0.0 && config.bs_reflectance <= 1.0, ErrorCode::validation_error,
            "bs_reflectance must lie in [0, 1]");
    require(std::isfinite(config.alpha.real()) && std::isfinite(config.alpha.imag()) &&
                std::abs(config.alpha) <= kMaxDisplacement,
            ErrorCode::validation_error, "alpha must be finite with |alpha| <= 50");

    ChainResult out{conditional_state(config.prep), config.alpha, {}, {}, {}, 0.0, false};
    if (config.align_phase) out.alpha_applied = config.alpha * std::polar(1.0, out.prepared.phase);
    out.distribution = number_distribution(out.prepared.rho, out.alpha_applied, config.tail_tol);
    out.stats = singles_and_coincidences(out.distribution, config.eye, config.eye, config.bs_reflectance);
    out.cell = symmetrized_cell(out.stats, &out.asymmetry);
    out.asymmetry_warning = out.asymmetry > kAsymmetryWarning;
    return out;
}

}  // namespace eyewit
