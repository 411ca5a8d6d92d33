#include "eyewit/numeric.hpp"

#include <cmath>

namespace eyewit::numeric {

std::vector<double> binomial_pmf_row(int n, double p) {
    std::vector<double> row(static_cast<std::size_t>(n) + 1, 0.0);
    if (p <= 0.0) {
        row.front() = 1.0;
        return row;
    }
    if (p >= 1.0) {
        row.back() = 1.0;
        return row;
    }
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    const double lfn = log_factorial(n);
    for (int k = 0; k <= n; ++k) {
        row[static_cast<std::size_t>(k)] =
            std::exp(lfn - log_factorial(k) - log_factorial(n - k) + k * lp + (n - k) * lq);
    }
    return row;
}

}  // namespace eyewit::numeric
