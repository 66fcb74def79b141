#pragma once

#include <optional>

#include "catwit/catspace.hpp"

namespace catwit {

// Largest value of sum_i |l_i||l_{i+1}| sqrt(i+1) over unit vectors on Fock
// levels 0..n: half the top eigenvalue of the symmetric tridiagonal matrix
// with off-diagonal sqrt(1)..sqrt(n).
double f_of_n(int n);

// Same constant via the largest root of the degree-(n+1) probabilists'
// Hermite polynomial (independent route, used as a cross-check).
double f_of_n_hermite(int n);
double hermite_largest_root(int degree);
// Probabilists' Hermite polynomial value (long-double recurrence).
long double hermite_he(int degree, long double x);

// Projected-gradient ascent oracle on the nonnegative unit sphere.
double f_of_n_bruteforce(int n, int restarts, int iterations, unsigned seed = 7);

// Optimizing coefficient vector (nonnegative, unit norm) achieving f_of_n.
Eigen::VectorXd optimal_chain_coefficients(int n);

// Quadrature scale factors and the Fock cutoff assumption of the witness.
// `max_level` is the highest Fock level assumed occupied.
struct WitnessConfig {
    double n_x = 1;
    double n_y = 1;
    int max_level = 1;

    // 2 f(max_level) max(1/n_x, 1/n_y) <= 1: no separable state supported on
    // levels 0..max_level can push the witness negative.
    bool certified(double slack = 1e-12) const;

    // Minimal certified symmetric scales for states on `levels` Fock basis
    // states (levels 0..levels-1): n_x = n_y = 2 f(levels - 1).
    static WitnessConfig for_levels(int levels);
};

enum class BoundMethod { worst_case, stats_informed };

struct PhotonStatistics; // homodyne.hpp

struct SeparableBound {
    double value = 0;
    BoundMethod method = BoundMethod::worst_case;
    double f_n = 0;                           // worst-case constant used
    std::vector<double> stats;                // populations (stats-informed)
    bool certified() const { return value <= 1.0 + 1e-12; }
};

SeparableBound separable_bound_worst_case(const WitnessConfig& config);
// 2 max(1/n_x, 1/n_y) sum_i sqrt(p_i p_{i+1}) sqrt(i+1) over the measured
// populations; valid for mixed states with no cutoff assumption.
SeparableBound separable_bound_from_stats(const std::vector<double>& populations,
                                          const WitnessConfig& config);

// 1 - (1/2)[1 + sx (x) (a+a^dag)/n_x - sy (x) i(a-a^dag)/n_y] on
// qubit (x) Fock(n_eval).
Operator quadrature_witness_operator(const WitnessConfig& config, int n_eval,
                                     bool allow_uncertified = false);

// Tr[W rho]; rho must be a qubit (x) Fock operator. Works for uncertified
// configs too (the value is a measurement, certification gates verdicts).
double witness_expectation(const Operator& rho, const WitnessConfig& config);

// Expectation on a product state (qubit amplitudes x continuous amplitudes),
// closed form; used by the Monte Carlo validity checks.
double witness_expectation_product(const Eigen::Vector2cd& qubit,
                                   const Eigen::VectorXcd& cont,
                                   const WitnessConfig& config);

struct CriticalNoiseResult {
    double eta_c = 0;
    bool detected_at_zero = false;
    WitnessConfig config;
    double f_used = 0;
};

// Largest eta = eta_d (bisection) with a negative witness expectation under
// the certified config for `levels` Fock basis states. Returns eta_c = 0
// flagged when even the noiseless state is not detected.
//
// With the stats-informed method the scales are re-tightened at every noise
// point to the minimal certified values allowed by the exact photon
// statistics of that state.
CriticalNoiseResult critical_noise(double alpha, int levels, BoundMethod method,
                                   double tol = 1e-4,
                                   std::optional<int> cutoff = std::nullopt);

// Monte Carlo check that no sampled separable state beats the bound.
struct ValidityCheckResult {
    double min_expectation = 0;
    long violations = 0;
    long samples = 0;
};
ValidityCheckResult witness_validity_check(const WitnessConfig& config, long n_samples,
                                           int max_mixture_terms, unsigned seed);

// Largest |<sx (x) (a+a')/nx - sy (x) i(a-a')/ny>| seen over random pure
// product states on levels 0..max_level.
double max_product_correlator(const WitnessConfig& config, long n_samples, unsigned seed);

} // namespace catwit
