#include "catwit/witness.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

namespace catwit {

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> chain_eigensolve(int n) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n + 1);
    Eigen::VectorXd sub(n);
    for (int i = 0; i < n; ++i) sub[i] = std::sqrt(double(i + 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub);
    return es;
}

} // namespace

double f_of_n(int n) {
    if (n < 1) throw DomainError("f_of_n: n must be >= 1");
    auto es = chain_eigensolve(n);
    return es.eigenvalues().maxCoeff() / 2.0;
}

long double hermite_he(int degree, long double x) {
    long double hm1 = 1.0L; // He_0
    if (degree == 0) return hm1;
    long double h = x; // He_1
    for (int k = 1; k < degree; ++k) {
        long double next = x * h - k * hm1;
        hm1 = h;
        h = next;
    }
    return h;
}

double hermite_largest_root(int degree) {
    if (degree < 1) throw DomainError("hermite_largest_root: degree must be >= 1");
    // All roots lie below sqrt(degree) + sqrt(degree-1); Newton from above
    // converges monotonically to the largest one.
    long double x = std::sqrt((long double)degree) + std::sqrt((long double)std::max(0, degree - 1)) + 1.0L;
    for (int it = 0; it < 200; ++it) {
        long double h = hermite_he(degree, x);
        long double dh = degree * hermite_he(degree - 1, x); // He_n' = n He_{n-1}
        if (dh == 0.0L) break;
        long double step = h / dh;
        x -= step;
        if (std::abs((double)step) < 1e-15) break;
    }
    return double(x);
}

double f_of_n_hermite(int n) {
    return hermite_largest_root(n + 1) / 2.0;
}

Eigen::VectorXd optimal_chain_coefficients(int n) {
    auto es = chain_eigensolve(n);
    Eigen::Index top;
    es.eigenvalues().maxCoeff(&top);
    Eigen::VectorXd v = es.eigenvectors().col(top);
    if (v.sum() < 0) v = -v;
    // Top eigenvector of a nonnegative irreducible chain is strictly positive.
    for (int i = 0; i <= n; ++i) v[i] = std::max(v[i], 0.0);
    v.normalize();
    return v;
}

double f_of_n_bruteforce(int n, int restarts, int iterations, unsigned seed) {
    if (n < 1) throw DomainError("f_of_n_bruteforce: n must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    auto objective = [&](const Eigen::VectorXd& v) {
        double q = 0;
        for (int i = 0; i < n; ++i) q += v[i] * v[i + 1] * std::sqrt(double(i + 1));
        return q;
    };
    double best = 0;
    for (int r = 0; r < restarts; ++r) {
        Eigen::VectorXd v(n + 1);
        for (int i = 0; i <= n; ++i) v[i] = uni(rng);
        v.normalize();
        double step = 0.5;
        double cur = objective(v);
        for (int it = 0; it < iterations; ++it) {
            Eigen::VectorXd grad(n + 1);
            grad.setZero();
            for (int i = 0; i < n; ++i) {
                double g = std::sqrt(double(i + 1));
                grad[i] += g * v[i + 1];
                grad[i + 1] += g * v[i];
            }
            Eigen::VectorXd cand = (v + step * grad).cwiseMax(0.0);
            double nn = cand.norm();
            if (nn == 0) break;
            cand /= nn;
            double val = objective(cand);
            if (val > cur) {
                v = cand;
                cur = val;
            } else {
                step *= 0.5;
                if (step < 1e-12) break;
            }
        }
        best = std::max(best, cur);
    }
    return best;
}

bool WitnessConfig::certified(double slack) const {
    if (n_x <= 0 || n_y <= 0) return false;
    double bound = 2.0 * f_of_n(max_level) * std::max(1.0 / n_x, 1.0 / n_y);
    return bound <= 1.0 + slack;
}

WitnessConfig WitnessConfig::for_levels(int levels) {
    if (levels < 2) throw DomainError("WitnessConfig::for_levels: need at least 2 levels");
    double scale = 2.0 * f_of_n(levels - 1);
    return WitnessConfig{scale, scale, levels - 1};
}

SeparableBound separable_bound_worst_case(const WitnessConfig& config) {
    if (config.n_x <= 0 || config.n_y <= 0) {
        throw DomainError("separable_bound_worst_case: scales must be > 0");
    }
    SeparableBound b;
    b.method = BoundMethod::worst_case;
    b.f_n = f_of_n(config.max_level);
    b.value = 2.0 * b.f_n * std::max(1.0 / config.n_x, 1.0 / config.n_y);
    return b;
}

SeparableBound separable_bound_from_stats(const std::vector<double>& populations,
                                          const WitnessConfig& config) {
    if (populations.empty()) throw BadStatistics("separable_bound_from_stats: empty stats");
    double sum = 0;
    for (double p : populations) {
        if (p < -1e-12) throw BadStatistics("separable_bound_from_stats: negative population");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
        throw BadStatistics("separable_bound_from_stats: populations sum to " +
                            std::to_string(sum));
    }
    double chain = 0;
    for (size_t i = 0; i + 1 < populations.size(); ++i) {
        chain += std::sqrt(std::max(0.0, populations[i]) * std::max(0.0, populations[i + 1])) *
                 std::sqrt(double(i + 1));
    }
    SeparableBound b;
    b.method = BoundMethod::stats_informed;
    b.stats = populations;
    b.value = 2.0 * std::max(1.0 / config.n_x, 1.0 / config.n_y) * chain;
    return b;
}

Operator quadrature_witness_operator(const WitnessConfig& config, int n_eval,
                                     bool allow_uncertified) {
    if (!allow_uncertified && !config.certified()) {
        throw UncertifiedConfig("quadrature_witness_operator: config not certified");
    }
    if (n_eval < config.max_level) {
        throw ShapeMismatch("quadrature_witness_operator: evaluation cutoff below max_level");
    }
    LadderOps l = ladder_ops(n_eval);
    const int d = n_eval + 1;
    Matrix x_op = l.a.mat + l.a_dagger.mat;
    Matrix y_op = cplx(0, 1) * (l.a.mat - l.a_dagger.mat);
    Eigen::Matrix2cd sx, sy;
    sx << 0, 1, 1, 0;
    sy << 0, cplx(0, -1), cplx(0, 1), 0;
    Matrix w = Matrix::Identity(2 * d, 2 * d);
    Matrix mid = Matrix::Identity(2 * d, 2 * d);
    auto kron_q = [&](const Eigen::Matrix2cd& q, const Matrix& f) {
        Matrix out(2 * d, 2 * d);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) out.block(i * d, j * d, d, d) = q(i, j) * f;
        return out;
    };
    mid += kron_q(sx, x_op) / config.n_x;
    mid -= kron_q(sy, y_op) / config.n_y;
    w -= 0.5 * mid;
    return Operator{std::move(w), ModeShape{2, d}};
}

double witness_expectation(const Operator& rho, const WitnessConfig& config) {
    if (rho.shape.n_modes() != 2 || rho.shape.dims[0] != 2) {
        throw ShapeMismatch("witness_expectation: expected qubit (x) Fock operator");
    }
    const int n_eval = rho.shape.dims[1] - 1;
    Operator w = quadrature_witness_operator(config, n_eval, /*allow_uncertified=*/true);
    cplx val = (w.mat * rho.mat).trace();
    if (std::abs(val.imag()) > 1e-10) {
        throw NumericalError("witness_expectation: imaginary residual " +
                             std::to_string(val.imag()));
    }
    return val.real();
}

double witness_expectation_product(const Eigen::Vector2cd& qubit,
                                   const Eigen::VectorXcd& cont,
                                   const WitnessConfig& config) {
    cplx q01 = std::conj(qubit[0]) * qubit[1];
    double sx = 2.0 * q01.real();
    double sy = 2.0 * q01.imag();
    cplx s = 0;
    for (Eigen::Index i = 0; i + 1 < cont.size(); ++i) {
        s += std::conj(cont[i]) * cont[i + 1] * std::sqrt(double(i + 1));
    }
    double x_exp = 2.0 * s.real();  // <a + a^dag>
    double y_exp = -2.0 * s.imag(); // <i(a - a^dag)>
    return 1.0 - 0.5 * (1.0 + sx * x_exp / config.n_x - sy * y_exp / config.n_y);
}

CriticalNoiseResult critical_noise(double alpha, int levels, BoundMethod method,
                                   double tol, std::optional<int> cutoff) {
    CriticalNoiseResult res;
    res.config = WitnessConfig::for_levels(levels);
    res.f_used = f_of_n(res.config.max_level);
    const int n = cutoff.value_or(default_cutoff(alpha));

    auto stats_of = [&](const Operator& rho) {
        Operator cont = partial_trace(rho, {1});
        std::vector<double> pops(size_t(cont.shape.dims[0]));
        for (int i = 0; i < cont.shape.dims[0]; ++i) pops[size_t(i)] = cont.mat(i, i).real();
        return pops;
    };

    // Negative expectation under the tightest certified scales for `method`.
    auto detects = [&](double eta) {
        Operator rho = noisy_hybrid_state(alpha, NoiseParams{eta, eta, 0}, n);
        WitnessConfig cfg = res.config;
        if (method == BoundMethod::stats_informed) {
            auto pops = stats_of(rho);
            double chain = 0;
            for (size_t i = 0; i + 1 < pops.size(); ++i) {
                chain += std::sqrt(std::max(0.0, pops[i]) * std::max(0.0, pops[i + 1])) *
                         std::sqrt(double(i + 1));
            }
            cfg.n_x = cfg.n_y = 2.0 * chain;
        }
        return witness_expectation(rho, cfg) < 0.0;
    };

    if (!detects(0.0)) {
        res.eta_c = 0;
        res.detected_at_zero = false;
        return res;
    }
    res.detected_at_zero = true;
    double lo = 0.0, hi = 1.0;
    // The witness is certainly blind at full loss.
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (detects(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    res.eta_c = 0.5 * (lo + hi);
    return res;
}

namespace {

Eigen::VectorXcd random_unit_vector(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::VectorXcd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = cplx(g(rng), g(rng));
    v /= v.norm();
    return v;
}

} // namespace

ValidityCheckResult witness_validity_check(const WitnessConfig& config, long n_samples,
                                           int max_mixture_terms, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> n_terms(1, max_mixture_terms);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const int dim = config.max_level + 1;
    ValidityCheckResult res;
    res.samples = n_samples;
    res.min_expectation = std::numeric_limits<double>::infinity();
    for (long s = 0; s < n_samples; ++s) {
        int k = n_terms(rng);
        double expect = 0;
        double wsum = 0;
        std::vector<double> weights(static_cast<size_t>(k));
        for (int t = 0; t < k; ++t) {
            weights[size_t(t)] = -std::log(1.0 - uni(rng)); // exponential => Dirichlet
            wsum += weights[size_t(t)];
        }
        for (int t = 0; t < k; ++t) {
            Eigen::Vector2cd q = random_unit_vector(2, rng);
            Eigen::VectorXcd c = random_unit_vector(dim, rng);
            expect += weights[size_t(t)] / wsum * witness_expectation_product(q, c, config);
        }
        res.min_expectation = std::min(res.min_expectation, expect);
        if (expect < -1e-9) ++res.violations;
    }
    return res;
}

double max_product_correlator(const WitnessConfig& config, long n_samples, unsigned seed) {
    std::mt19937_64 rng(seed);
    const int dim = config.max_level + 1;
    double worst = 0;
    for (long s = 0; s < n_samples; ++s) {
        Eigen::Vector2cd q = random_unit_vector(2, rng);
        Eigen::VectorXcd c = random_unit_vector(dim, rng);
        double e = witness_expectation_product(q, c, config);
        // W = 1 - (1/2)(1 + corr) => corr = 1 - 2 W
        worst = std::max(worst, std::abs(1.0 - 2.0 * e));
    }
    return worst;
}

} // namespace catwit
