#pragma once

// Small log-domain helpers shared by the probability code.

#include <cmath>
#include <limits>
#include <vector>

namespace eyewit::numeric {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_factorial(long long n) { return std::lgamma(static_cast<double>(n) + 1.0); }

inline double log_choose(long long n, long long k) {
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

/// k * log(p) with the convention 0 * log(0) = 0.
inline double xlogy(double k, double p) {
    if (k == 0.0) return 0.0;
    if (p <= 0.0) return kNegInf;
    return k * std::log(p);
}

/// Binomial(n, p) probability mass for k = 0..n.
std::vector<double> binomial_pmf_row(int n, double p);

/// Binomial(n, p) log-pmf at k.
inline double binomial_log_pmf(long long k, long long n, double p) {
    return log_choose(n, k) + xlogy(static_cast<double>(k), p) +
           xlogy(static_cast<double>(n - k), 1.0 - p);
}

/// Log of the sum of exponentials of two log values.
inline double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

}  // namespace eyewit::numeric
