#include "eyewit/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/gamma.hpp>

#include "eyewit/error.hpp"
#include "eyewit/numeric.hpp"

namespace eyewit {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-9;
constexpr double kPsdTol = 1e-10;
constexpr double kClampTol = 1e-12;

// Generalized Laguerre polynomial L_m^{(a)}(x) by the upward three-term
// recurrence in the degree.
double laguerre(int m, double a, double x) {
    double prev = 1.0;
    if (m == 0) return prev;
    double cur = 1.0 + a - x;
    for (int k = 1; k < m; ++k) {
        const double next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

// <n|D(alpha)|m> for n >= m and alpha != 0.
Complex amplitude_lower(int n, int m, ComplexAmplitude alpha) {
    const double r = std::abs(alpha);
    const double x = r * r;
    const double lag = laguerre(m, static_cast<double>(n - m), x);
    if (lag == 0.0) return {0.0, 0.0};
    const double log_mag = 0.5 * (numeric::log_factorial(m) - numeric::log_factorial(n)) +
                           (n - m) * std::log(r) - 0.5 * x + std::log(std::abs(lag));
    const double phase = (n - m) * std::arg(alpha);
    const double mag = std::copysign(std::exp(log_mag), lag);
    return {mag * std::cos(phase), mag * std::sin(phase)};
}

void check_alpha(ComplexAmplitude alpha) {
    require(std::isfinite(alpha.real()) && std::isfinite(alpha.imag()), ErrorCode::invalid_argument,
            "displacement amplitude must be finite");
    require(std::abs(alpha) <= kMaxDisplacement, ErrorCode::invalid_argument,
            "|alpha| exceeds " + std::to_string(kMaxDisplacement));
}

}  // namespace

DensityMatrix::DensityMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
    require(m_.rows() == m_.cols() && m_.rows() >= 1, ErrorCode::invalid_argument,
            "density matrix must be square and non-empty");
    require(m_.allFinite(), ErrorCode::invalid_argument, "density matrix has non-finite entries");
    const double herm = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    require(herm <= kHermitianTol, ErrorCode::invalid_argument,
            "density matrix is not Hermitian (deviation " + std::to_string(herm) + ")");
    const double tr = m_.trace().real();
    require(std::abs(tr - 1.0) <= kTraceTol, ErrorCode::invalid_argument,
            "density matrix trace " + std::to_string(tr) + " is not 1");
    Eigen::MatrixXcd sym = 0.5 * (m_ + m_.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym, Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() >= -kPsdTol, ErrorCode::invalid_argument,
            "density matrix is not positive semidefinite");
}

DensityMatrix DensityMatrix::normalized(Eigen::MatrixXcd m) {
    const double tr = m.trace().real();
    require(tr > 0.0 && std::isfinite(tr), ErrorCode::invalid_argument,
            "cannot normalize a matrix with non-positive trace");
    m /= tr;
    return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::pure(std::span<const Complex> psi) {
    require(!psi.empty(), ErrorCode::invalid_argument, "empty state vector");
    Eigen::VectorXcd v(static_cast<Eigen::Index>(psi.size()));
    for (std::size_t i = 0; i < psi.size(); ++i) v(static_cast<Eigen::Index>(i)) = psi[i];
    const double norm2 = v.squaredNorm();
    require(norm2 > 0.0, ErrorCode::invalid_argument, "zero state vector");
    v /= std::sqrt(norm2);
    Eigen::MatrixXcd m = v * v.adjoint();
    return DensityMatrix(0.5 * (m + m.adjoint()));
}

DensityMatrix DensityMatrix::diagonal(std::span<const double> populations) {
    require(!populations.empty(), ErrorCode::invalid_argument, "empty population vector");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(populations.size()),
                                                static_cast<Eigen::Index>(populations.size()));
    for (std::size_t i = 0; i < populations.size(); ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        m(idx, idx) = populations[i];
    }
    return normalized(std::move(m));
}

DensityMatrix DensityMatrix::fock(int n) {
    require(n >= 0 && n <= kMaxSourceIndex, ErrorCode::invalid_index, "Fock index out of range");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    m(n, n) = 1.0;
    return DensityMatrix(std::move(m));
}

NumberDistribution::NumberDistribution(std::vector<double> probs, double tail_mass)
    : probs_(std::move(probs)), tail_mass_(tail_mass) {
    require(!probs_.empty(), ErrorCode::invalid_argument, "empty number distribution");
    require(tail_mass_ >= 0.0 && tail_mass_ <= 1.0, ErrorCode::invalid_argument,
            "tail mass outside [0, 1]");
    for (double p : probs_) {
        require(p >= 0.0 && p <= 1.0, ErrorCode::invalid_argument,
                "number distribution entry outside [0, 1]");
    }
    const double mass = total() + tail_mass_;
    require(std::abs(mass - 1.0) <= 1e-8, ErrorCode::invalid_argument,
            "number distribution mass " + std::to_string(mass) + " is not 1");
}

NumberDistribution NumberDistribution::poisson(double mean, double tail_tol) {
    require(mean >= 0.0 && std::isfinite(mean), ErrorCode::invalid_argument,
            "Poisson mean must be finite and non-negative");
    require(tail_tol > 0.0, ErrorCode::invalid_argument, "tail tolerance must be positive");
    if (mean == 0.0) return fock(0);
    int max_n = static_cast<int>(std::ceil(mean + 12.0 * std::sqrt(mean))) + 8;
    // P(X > max_n) = P(max_n + 1, mean), the regularized lower incomplete gamma.
    double tail = boost::math::gamma_p(max_n + 1.0, mean);
    while (tail > tail_tol) {
        max_n *= 2;
        tail = boost::math::gamma_p(max_n + 1.0, mean);
    }
    std::vector<double> probs(static_cast<std::size_t>(max_n) + 1);
    const double lm = std::log(mean);
    for (int n = 0; n <= max_n; ++n) {
        probs[static_cast<std::size_t>(n)] = std::exp(n * lm - mean - numeric::log_factorial(n));
    }
    const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
    return NumberDistribution(std::move(probs), std::clamp(1.0 - sum, 0.0, tail));
}

NumberDistribution NumberDistribution::fock(int n) {
    require(n >= 0, ErrorCode::invalid_argument, "negative photon number");
    std::vector<double> probs(static_cast<std::size_t>(n) + 1, 0.0);
    probs.back() = 1.0;
    return NumberDistribution(std::move(probs), 0.0);
}

double NumberDistribution::total() const { return std::accumulate(probs_.begin(), probs_.end(), 0.0); }

double NumberDistribution::mean() const {
    double m = 0.0;
    for (std::size_t n = 0; n < probs_.size(); ++n) m += static_cast<double>(n) * probs_[n];
    return m;
}

double NumberDistribution::factorial_moment2() const {
    double m = 0.0;
    for (std::size_t n = 2; n < probs_.size(); ++n) {
        const auto nd = static_cast<double>(n);
        m += nd * (nd - 1.0) * probs_[n];
    }
    return m;
}

std::vector<double> JointNumberDistribution::reflected_marginal() const {
    std::vector<double> out(static_cast<std::size_t>(probs_.rows()));
    for (Eigen::Index k = 0; k < probs_.rows(); ++k) out[static_cast<std::size_t>(k)] = probs_.row(k).sum();
    return out;
}

std::vector<double> JointNumberDistribution::transmitted_marginal() const {
    std::vector<double> out(static_cast<std::size_t>(probs_.cols()));
    for (Eigen::Index m = 0; m < probs_.cols(); ++m) out[static_cast<std::size_t>(m)] = probs_.col(m).sum();
    return out;
}

Complex displaced_fock_amplitude(int n, int m, ComplexAmplitude alpha) {
    require(n >= 0, ErrorCode::invalid_argument, "negative photon index");
    require(n <= kMaxPhotonIndex, ErrorCode::cutoff_overflow,
            "photon index " + std::to_string(n) + " beyond the supported range");
    require(m >= 0 && m <= kMaxSourceIndex, ErrorCode::invalid_index,
            "source Fock index " + std::to_string(m) + " not supported");
    check_alpha(alpha);
    if (alpha == Complex{0.0, 0.0}) return n == m ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
    if (n >= m) return amplitude_lower(n, m, alpha);
    // D(alpha)^dagger = D(-alpha)
    return std::conj(amplitude_lower(m, n, -alpha));
}

std::vector<Complex> displaced_fock_column(int m, ComplexAmplitude alpha, int max_n) {
    require(max_n >= 0, ErrorCode::invalid_argument, "negative cutoff");
    std::vector<Complex> col(static_cast<std::size_t>(max_n) + 1);
    for (int n = 0; n <= max_n; ++n) col[static_cast<std::size_t>(n)] = displaced_fock_amplitude(n, m, alpha);
    return col;
}

NumberDistribution number_distribution(const DensityMatrix &rho, ComplexAmplitude alpha, double tail_tol,
                                       int max_cutoff) {
    require(tail_tol > 0.0 && tail_tol <= 1e-4, ErrorCode::invalid_argument,
            "tail tolerance must lie in (0, 1e-4]");
    check_alpha(alpha);
    const int dim = rho.dim();
    require(dim - 1 <= kMaxSourceIndex, ErrorCode::invalid_index, "density matrix dimension too large");

    const double reach = std::abs(alpha) + std::sqrt(static_cast<double>(dim - 1));
    const double mean_guess = reach * reach;
    int max_n = static_cast<int>(std::ceil(mean_guess + 12.0 * std::sqrt(mean_guess))) + dim + 8;

    const Eigen::MatrixXcd &r = rho.matrix();
    while (true) {
        if (max_n > max_cutoff) {
            fail(ErrorCode::truncation_failure,
                 "no Fock cutoff below " + std::to_string(max_cutoff) + " reaches tail tolerance");
        }
        std::vector<std::vector<Complex>> cols;
        cols.reserve(static_cast<std::size_t>(dim));
        for (int j = 0; j < dim; ++j) cols.push_back(displaced_fock_column(j, alpha, max_n));

        std::vector<double> probs(static_cast<std::size_t>(max_n) + 1);
        Eigen::VectorXcd v(dim);
        for (int n = 0; n <= max_n; ++n) {
            for (int j = 0; j < dim; ++j) v(j) = cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(n)];
            // sum_jk rho_jk v_j conj(v_k)
            const double p = (v.transpose() * r * v.conjugate()).value().real();
            if (p < -kClampTol) {
                fail(ErrorCode::negative_probability,
                     "p(" + std::to_string(n) + ") = " + std::to_string(p) + " below clamp tolerance");
            }
            probs[static_cast<std::size_t>(n)] = std::clamp(p, 0.0, 1.0);
        }
        // Mass beyond max_n: the last terms must decay at least geometrically
        // (ratio <= 1/2) so that p(max_n) r / (1 - r) bounds the rest.
        const double last = probs.back();
        const double before = probs[probs.size() - 2];
        const double ratio = before > 0.0 ? last / before : (last > 0.0 ? 1.0 : 0.0);
        const double tail = ratio > 0.0 ? last * ratio / (1.0 - ratio) : 0.0;
        if (ratio <= 0.5 && tail <= tail_tol) {
            const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
            if (sum + tail > 1.0) {
                for (double &p : probs) p /= sum + tail;
            }
            return NumberDistribution(std::move(probs), tail);
        }
        max_n *= 2;
    }
}

JointNumberDistribution split_joint(const NumberDistribution &p, double r) {
    require(r >= 0.0 && r <= 1.0, ErrorCode::invalid_argument, "reflectance outside [0, 1]");
    const int max_n = p.max_n();
    Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(max_n + 1, max_n + 1);
    for (int n = 0; n <= max_n; ++n) {
        const double pn = p[n];
        if (pn == 0.0) continue;
        const auto row = numeric::binomial_pmf_row(n, r);
        for (int k = 0; k <= n; ++k) joint(k, n - k) = pn * row[static_cast<std::size_t>(k)];
    }
    return JointNumberDistribution(std::move(joint));
}

NumberDistribution apply_loss(const NumberDistribution &p, double eta) {
    require(eta >= 0.0 && eta <= 1.0, ErrorCode::invalid_argument, "transmission outside [0, 1]");
    const int max_n = p.max_n();
    std::vector<double> out(static_cast<std::size_t>(max_n) + 1, 0.0);
    for (int n = 0; n <= max_n; ++n) {
        const double pn = p[n];
        if (pn == 0.0) continue;
        const auto row = numeric::binomial_pmf_row(n, eta);
        for (int k = 0; k <= n; ++k) out[static_cast<std::size_t>(k)] += pn * row[static_cast<std::size_t>(k)];
    }
    for (double &x : out) x = std::min(x, 1.0);
    return NumberDistribution(std::move(out), p.tail_mass());
}

}  // namespace eyewit
