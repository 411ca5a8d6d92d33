#pragma once

// Truncated Fock-space primitives: displaced number-state amplitudes,
// photon-number statistics of displaced density matrices, loss and
// beamsplitter partition of number statistics.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace eyewit {

using Complex = std::complex<double>;

/// Displacement amplitude alpha of D(alpha).
using ComplexAmplitude = std::complex<double>;

inline constexpr double kMaxDisplacement = 50.0;
inline constexpr int kMaxPhotonIndex = 1 << 20;
inline constexpr int kMaxSourceIndex = 64;
inline constexpr double kDefaultTailTolerance = 1e-10;

/// Density matrix of a single mode in the Fock basis {|0>, ..., |dim-1>}.
///
/// Construction validates hermiticity (1e-12), unit trace (1e-9) and
/// positivity (smallest eigenvalue >= -1e-10).
class DensityMatrix {
  public:
    explicit DensityMatrix(Eigen::MatrixXcd m);

    /// Divides by the trace before validating.
    static DensityMatrix normalized(Eigen::MatrixXcd m);
    /// |psi><psi| for a (not necessarily normalized) state vector.
    static DensityMatrix pure(std::span<const Complex> psi);
    static DensityMatrix diagonal(std::span<const double> populations);
    static DensityMatrix fock(int n);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXcd &matrix() const { return m_; }
    Complex operator()(int row, int col) const { return m_(row, col); }

  private:
    Eigen::MatrixXcd m_;
};

/// Photon-number distribution p(n), n = 0..max_n, plus the probability
/// mass known to lie beyond max_n.
class NumberDistribution {
  public:
    NumberDistribution() = default;
    NumberDistribution(std::vector<double> probs, double tail_mass);

    static NumberDistribution poisson(double mean, double tail_tol = kDefaultTailTolerance);
    static NumberDistribution fock(int n);

    const std::vector<double> &probs() const { return probs_; }
    double tail_mass() const { return tail_mass_; }
    int max_n() const { return static_cast<int>(probs_.size()) - 1; }
    double operator[](int n) const { return probs_[static_cast<std::size_t>(n)]; }

    double total() const;
    double mean() const;
    /// <N(N-1)> = <N^2> - <N>.
    double factorial_moment2() const;

  private:
    std::vector<double> probs_{1.0};
    double tail_mass_ = 0.0;
};

/// Joint photon-number distribution P(k, m) over the reflected (k) and
/// transmitted (m) outputs of a beamsplitter.
class JointNumberDistribution {
  public:
    explicit JointNumberDistribution(Eigen::MatrixXd probs) : probs_(std::move(probs)) {}

    double operator()(int k, int m) const { return probs_(k, m); }
    int max_n() const { return static_cast<int>(probs_.rows()) - 1; }
    const Eigen::MatrixXd &matrix() const { return probs_; }
    double total() const { return probs_.sum(); }
    /// Number distribution of the reflected output.
    std::vector<double> reflected_marginal() const;
    std::vector<double> transmitted_marginal() const;

  private:
    Eigen::MatrixXd probs_;
};

/// <n| D(alpha) |m>, evaluated in log-magnitude form through the associated
/// Laguerre closed form so that n in the hundreds stays finite.
Complex displaced_fock_amplitude(int n, int m, ComplexAmplitude alpha);

/// Amplitudes <n| D(alpha) |m> for n = 0..max_n.
std::vector<Complex> displaced_fock_column(int m, ComplexAmplitude alpha, int max_n);

/// Photon-number distribution of D(alpha) rho D(alpha)^dagger. The cutoff is
/// chosen so that the discarded mass does not exceed tail_tol.
NumberDistribution number_distribution(const DensityMatrix &rho, ComplexAmplitude alpha,
                                       double tail_tol = kDefaultTailTolerance,
                                       int max_cutoff = 1 << 16);

/// Binomial partition of each photon-number component over the two outputs of
/// a beamsplitter with reflectance r.
JointNumberDistribution split_joint(const NumberDistribution &p, double r);

/// Pure-loss channel with transmission eta.
NumberDistribution apply_loss(const NumberDistribution &p, double eta);

}  // namespace eyewit
