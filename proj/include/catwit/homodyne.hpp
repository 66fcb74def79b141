#pragma once

#include <cstdint>
#include <random>

#include "catwit/fock.hpp"

namespace catwit {

enum class Channel { discrete, continuous };

// One homodyne record: x_theta = (a e^{-i theta} + a^dag e^{i theta})/sqrt(2).
struct QuadratureSample {
    double value = 0;
    double phase = 0;
    Channel channel = Channel::continuous;
};

enum class StatsMethod { exact, em_two_homodyne, em_zsup };

struct PhotonStatistics {
    std::vector<double> populations;
    long n_samples = 0;
    StatsMethod method = StatsMethod::exact;

    double mean_photons() const;
    void validate(double tol = 1e-6) const;
};

// Marginal density of x_theta for a single-mode state.
double quadrature_pdf(const Operator& rho_single_mode, double theta, double x);

// Hermite-function quadrature wavefunctions h_n(x) (harmonic oscillator
// eigenfunctions with <x^2>_vac = 1/2), all n <= n_max at once.
Eigen::VectorXd quadrature_wavefunctions(int n_max, double x);

// Inverse-CDF sampler for a fixed single-mode state and phase. Grid spans
// +/- (sqrt(2 N) + 5) and is refined until no CDF step exceeds 1e-4.
class QuadratureSampler {
  public:
    QuadratureSampler(const Operator& rho_single_mode, double theta,
                      int min_nodes = 2048);
    double sample(std::mt19937_64& rng) const;
    double pdf_at(double x) const;

  private:
    Eigen::VectorXd grid_;
    Eigen::VectorXd cdf_;
    Eigen::VectorXd pdf_;
};

// Correlated two-mode sampler for a qubit (x) Fock state measured at a
// common phase on both channels. Samples the discrete-mode quadrature from
// its marginal and the continuous one from the conditional slice.
class JointQuadratureSampler {
  public:
    JointQuadratureSampler(const Operator& rho, double theta, int nodes = 2048);
    // Returns (x_discrete, x_continuous).
    std::pair<double, double> sample(std::mt19937_64& rng) const;

  private:
    int nd_, nc_;
    Eigen::VectorXd grid_d_, grid_c_;
    Eigen::VectorXd marginal_cdf_;                // over discrete-axis cells
    Eigen::MatrixXd row_cdf_;                     // conditional CDFs per row
};

std::vector<QuadratureSample> sample_quadrature(const Operator& rho, int mode,
                                                double theta, long count,
                                                std::uint64_t seed);

// Conjugate-homodyne record Z = X^2 + P^2, drawn from its exact mixture law
// P_Z(z) = e^{-z} sum_n p_n z^n / n! (component n is Gamma(n+1, 1)).
std::vector<double> sample_conjugate_z(const Operator& rho_cont, long count,
                                       std::uint64_t seed);
double pz_density(const std::vector<double>& populations, double z);

// EM for the Gamma mixture above. Throws DegenerateEstimate when the data
// cannot be explained at this cutoff (top-level mass above 5%) or the sample
// is degenerate.
struct EmOptions {
    int max_iter = 5000;
    double tol = 1e-8;
};
PhotonStatistics estimate_photon_stats_em(const std::vector<double>& z_samples,
                                          int n_max, EmOptions opts = {});

enum class ZsupPairing { max_p, rank };

// Upper-bounding Z surrogate from two unpaired single-homodyne runs:
// every X1^2 gets the largest P2^2 (max_p), or rank-matched magnitudes (rank).
std::vector<double> zsup_samples(const std::vector<double>& x_run,
                                 const std::vector<double>& p_run,
                                 ZsupPairing pairing = ZsupPairing::max_p);

// Exact Fock populations of a single-mode state.
std::vector<double> exact_populations(const Operator& rho_cont);

// Deterministic sub-stream seeding.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

} // namespace catwit
