#include "eyewit/detector.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "eyewit/error.hpp"
#include "eyewit/numeric.hpp"

namespace eyewit {

void DetectorModel::validate() const {
    require(theta >= 1, ErrorCode::validation_error, "detector threshold theta must be >= 1");
    require(eta >= 0.0 && eta <= 1.0, ErrorCode::validation_error, "detector efficiency eta must lie in [0, 1]");
    require(dark_mean >= 0.0 && std::isfinite(dark_mean), ErrorCode::validation_error,
            "detector dark_mean must be finite and >= 0");
}

namespace {

// P(Binomial(n, eta) >= k)
double binomial_upper(long long n, double eta, int k) {
    if (k <= 0) return 1.0;
    if (n < k || eta <= 0.0) return 0.0;
    if (eta >= 1.0) return 1.0;
    return boost::math::ibeta(static_cast<double>(k), static_cast<double>(n - k + 1), eta);
}

}  // namespace

double click_prob_fock(long long n, const DetectorModel &det) {
    det.validate();
    require(n >= 0, ErrorCode::invalid_argument, "negative photon number");
    if (det.dark_mean == 0.0) return binomial_upper(n, det.eta, det.theta);

    // 1 - sum_{j < theta} P(B = j) P(Poisson(nu) <= theta - 1 - j)
    double miss = 0.0;
    for (int j = 0; j < det.theta && j <= n; ++j) {
        const double pb = std::exp(numeric::binomial_log_pmf(j, n, det.eta));
        const double pd = boost::math::gamma_q(static_cast<double>(det.theta - j), det.dark_mean);
        miss += pb * pd;
    }
    return std::clamp(1.0 - miss, 0.0, 1.0);
}

std::vector<double> click_table(const DetectorModel &det, int max_n) {
    std::vector<double> out(static_cast<std::size_t>(std::max(max_n, 0)) + 1);
    for (int n = 0; n <= max_n; ++n) out[static_cast<std::size_t>(n)] = click_prob_fock(n, det);
    return out;
}

double click_prob_coherent(double mu, const DetectorModel &det) {
    det.validate();
    require(mu >= 0.0 && std::isfinite(mu), ErrorCode::invalid_argument, "mean photon number must be >= 0");
    const double lambda = det.eta * mu + det.dark_mean;
    if (lambda == 0.0) return 0.0;
    // P(Poisson(lambda) >= theta) is the regularized lower incomplete gamma.
    return boost::math::gamma_p(static_cast<double>(det.theta), lambda);
}

std::vector<double> frequency_of_seeing_curve(std::span<const double> mu_grid, const DetectorModel &det) {
    std::vector<double> out;
    out.reserve(mu_grid.size());
    for (double mu : mu_grid) out.push_back(click_prob_coherent(mu, det));
    return out;
}

}  // namespace eyewit
