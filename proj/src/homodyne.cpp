#include "catwit/homodyne.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace catwit {

double PhotonStatistics::mean_photons() const {
    double m = 0;
    for (size_t n = 0; n < populations.size(); ++n) m += double(n) * populations[n];
    return m;
}

void PhotonStatistics::validate(double tol) const {
    double sum = 0;
    for (double p : populations) {
        if (p < -1e-12) throw BadStatistics("PhotonStatistics: negative population");
        sum += p;
    }
    if (std::abs(sum - 1.0) > tol) {
        throw BadStatistics("PhotonStatistics: populations sum to " + std::to_string(sum));
    }
}

Eigen::VectorXd quadrature_wavefunctions(int n_max, double x) {
    Eigen::VectorXd h(n_max + 1);
    h[0] = std::pow(M_PI, -0.25) * std::exp(-x * x / 2.0);
    if (n_max >= 1) h[1] = std::sqrt(2.0) * x * h[0];
    for (int n = 2; n <= n_max; ++n) {
        h[n] = std::sqrt(2.0 / n) * x * h[n - 1] - std::sqrt((n - 1.0) / n) * h[n - 2];
    }
    return h;
}

double quadrature_pdf(const Operator& rho, double theta, double x) {
    if (rho.shape.n_modes() != 1) throw ShapeMismatch("quadrature_pdf: single mode expected");
    const int n_max = rho.shape.dims[0] - 1;
    Eigen::VectorXd h = quadrature_wavefunctions(n_max, x);
    // <x_theta| rho |x_theta> = sum_mn h_m e^{-im theta} rho_mn e^{in theta} h_n
    Vector psi(n_max + 1);
    for (int n = 0; n <= n_max; ++n) psi[n] = h[n] * std::exp(cplx(0, n * theta));
    cplx val = psi.dot(rho.mat * psi); // conj(psi)^T rho psi
    return val.real();
}

namespace {

// Common grid builder: refine until the CDF step rule is satisfied.
void build_grid_cdf(const std::function<double(double)>& pdf, double half_width,
                    int min_nodes, Eigen::VectorXd& grid, Eigen::VectorXd& pvals,
                    Eigen::VectorXd& cdf) {
    int nodes = min_nodes;
    for (int attempt = 0; attempt < 6; ++attempt) {
        grid.resize(nodes);
        pvals.resize(nodes);
        const double dx = 2.0 * half_width / (nodes - 1);
        for (int i = 0; i < nodes; ++i) {
            grid[i] = -half_width + i * dx;
            pvals[i] = std::max(0.0, pdf(grid[i]));
        }
        cdf.resize(nodes);
        cdf[0] = 0;
        double max_step = 0;
        for (int i = 1; i < nodes; ++i) {
            double step = 0.5 * (pvals[i] + pvals[i - 1]) * dx;
            cdf[i] = cdf[i - 1] + step;
            max_step = std::max(max_step, step);
        }
        double total = cdf[nodes - 1];
        if (total <= 0) throw NumericalError("quadrature grid: vanishing density");
        cdf /= total;
        pvals /= total;
        if (max_step / total < 1e-4) return;
        nodes *= 2;
    }
}

double icdf_draw(const Eigen::VectorXd& grid, const Eigen::VectorXd& cdf, double u) {
    const double* begin = cdf.data();
    const double* end = cdf.data() + cdf.size();
    const double* it = std::upper_bound(begin, end, u);
    long hi = std::min<long>(std::max<long>(it - begin, 1), cdf.size() - 1);
    long lo = hi - 1;
    double span = cdf[hi] - cdf[lo];
    double t = span > 0 ? (u - cdf[lo]) / span : 0.5;
    return grid[lo] + t * (grid[hi] - grid[lo]);
}

} // namespace

QuadratureSampler::QuadratureSampler(const Operator& rho, double theta, int min_nodes) {
    const int n_max = rho.shape.dims[0] - 1;
    const double half_width = std::sqrt(2.0 * n_max) + 5.0;
    build_grid_cdf([&](double x) { return quadrature_pdf(rho, theta, x); }, half_width,
                   min_nodes, grid_, pdf_, cdf_);
}

double QuadratureSampler::sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    return icdf_draw(grid_, cdf_, uni(rng));
}

double QuadratureSampler::pdf_at(double x) const {
    if (x <= grid_[0] || x >= grid_[grid_.size() - 1]) return 0;
    double dx = grid_[1] - grid_[0];
    long i = long((x - grid_[0]) / dx);
    double t = (x - grid_[i]) / dx;
    return (1 - t) * pdf_[i] + t * pdf_[i + 1];
}

JointQuadratureSampler::JointQuadratureSampler(const Operator& rho, double theta,
                                               int nodes) {
    if (rho.shape.n_modes() != 2 || rho.shape.dims[0] != 2) {
        throw ShapeMismatch("JointQuadratureSampler: expected qubit (x) Fock operator");
    }
    const int fock_dim = rho.shape.dims[1];
    nd_ = nodes;
    nc_ = nodes;
    const double wd = std::sqrt(2.0) + 5.0; // discrete side holds at most 1 photon
    const double wc = std::sqrt(2.0 * (fock_dim - 1)) + 5.0;
    grid_d_.resize(nd_);
    grid_c_.resize(nc_);
    for (int i = 0; i < nd_; ++i) grid_d_[i] = -wd + 2.0 * wd * i / (nd_ - 1);
    for (int j = 0; j < nc_; ++j) grid_c_[j] = -wc + 2.0 * wc * j / (nc_ - 1);

    // Rank decomposition keeps the grid build linear in the state rank.
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho.mat + rho.mat.adjoint()));
    std::vector<std::pair<double, Vector>> modes;
    for (long r = 0; r < es.eigenvalues().size(); ++r) {
        if (es.eigenvalues()[r] > 1e-13) {
            modes.emplace_back(es.eigenvalues()[r], es.eigenvectors().col(r));
        }
    }

    // Wavefunction tables with the phase absorbed.
    Eigen::MatrixXcd psi_d(2, nd_);
    for (int i = 0; i < nd_; ++i) {
        Eigen::VectorXd h = quadrature_wavefunctions(1, grid_d_[i]);
        for (int m = 0; m < 2; ++m) psi_d(m, i) = h[m] * std::exp(cplx(0, -m * theta));
    }
    Eigen::MatrixXcd psi_c(fock_dim, nc_);
    for (int j = 0; j < nc_; ++j) {
        Eigen::VectorXd h = quadrature_wavefunctions(fock_dim - 1, grid_c_[j]);
        for (int n = 0; n < fock_dim; ++n) psi_c(n, j) = h[n] * std::exp(cplx(0, -n * theta));
    }

    Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(nd_, nc_);
    for (auto& [lam, phi] : modes) {
        // phi indexed as [m * fock_dim + n]
        Eigen::VectorXcd u = Eigen::VectorXcd::Zero(nc_), v = Eigen::VectorXcd::Zero(nc_);
        u = psi_c.transpose() * phi.segment(0, fock_dim);
        v = psi_c.transpose() * phi.segment(fock_dim, fock_dim);
        for (int i = 0; i < nd_; ++i) {
            cplx a = psi_d(0, i), b = psi_d(1, i);
            joint.row(i) += lam * (a * u + b * v).cwiseAbs2().transpose();
        }
    }

    // Cell-mass CDF over the discrete axis; per-row conditional CDFs.
    const double dxd = grid_d_[1] - grid_d_[0];
    const double dxc = grid_c_[1] - grid_c_[0];
    marginal_cdf_.resize(nd_);
    double acc = 0;
    Eigen::VectorXd row_mass(nd_);
    for (int i = 0; i < nd_; ++i) {
        row_mass[i] = joint.row(i).sum() * dxc;
        acc += row_mass[i] * dxd;
        marginal_cdf_[i] = acc;
    }
    marginal_cdf_ /= acc;
    row_cdf_.resize(nd_, nc_);
    for (int i = 0; i < nd_; ++i) {
        double racc = 0;
        for (int j = 0; j < nc_; ++j) {
            racc += joint(i, j);
            row_cdf_(i, j) = racc;
        }
        if (racc > 0) row_cdf_.row(i) /= racc;
    }
}

std::pair<double, double> JointQuadratureSampler::sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double u1 = uni(rng);
    const double* begin = marginal_cdf_.data();
    const double* end = begin + nd_;
    long i = std::min<long>(std::upper_bound(begin, end, u1) - begin, nd_ - 1);
    // Jitter within the cell; conditional column from this row.
    double lo_cdf = i > 0 ? marginal_cdf_[i - 1] : 0.0;
    double span = marginal_cdf_[i] - lo_cdf;
    double frac = span > 0 ? (u1 - lo_cdf) / span : 0.5;
    double dxd = grid_d_[1] - grid_d_[0];
    double xd = grid_d_[i] - 0.5 * dxd + frac * dxd;

    double u2 = uni(rng);
    // Eigen matrices are column-major; binary search over the row by index.
    long lo = 0, hi = nc_ - 1;
    while (lo < hi) {
        long mid = (lo + hi) / 2;
        if (row_cdf_(i, mid) < u2) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    long j = lo;
    double lo_c = j > 0 ? row_cdf_(i, j - 1) : 0.0;
    double span_c = row_cdf_(i, j) - lo_c;
    double frac_c = span_c > 0 ? (u2 - lo_c) / span_c : 0.5;
    double dxc = grid_c_[1] - grid_c_[0];
    double xc = grid_c_[j] - 0.5 * dxc + frac_c * dxc;
    return {xd, xc};
}

std::vector<QuadratureSample> sample_quadrature(const Operator& rho, int mode,
                                                double theta, long count,
                                                std::uint64_t seed) {
    if (count < 1) throw DomainError("sample_quadrature: count must be >= 1");
    Operator reduced = rho.shape.n_modes() == 1 ? rho : partial_trace(rho, {mode});
    QuadratureSampler sampler(reduced, theta);
    std::mt19937_64 rng(seed);
    std::vector<QuadratureSample> out;
    out.reserve(size_t(count));
    Channel ch = (rho.shape.n_modes() > 1 && rho.shape.dims[mode] == 2) ? Channel::discrete
                                                                        : Channel::continuous;
    for (long k = 0; k < count; ++k) {
        out.push_back(QuadratureSample{sampler.sample(rng), theta, ch});
    }
    return out;
}

std::vector<double> exact_populations(const Operator& rho_cont) {
    if (rho_cont.shape.n_modes() != 1) {
        throw ShapeMismatch("exact_populations: single mode expected");
    }
    std::vector<double> pops(size_t(rho_cont.shape.dims[0]));
    for (int n = 0; n < rho_cont.shape.dims[0]; ++n) pops[size_t(n)] = rho_cont.mat(n, n).real();
    return pops;
}

double pz_density(const std::vector<double>& populations, double z) {
    if (z < 0) return 0;
    double term = std::exp(-z);
    double acc = 0;
    for (size_t n = 0; n < populations.size(); ++n) {
        if (n > 0) term *= z / double(n);
        acc += populations[n] * term;
    }
    return acc;
}

std::vector<double> sample_conjugate_z(const Operator& rho_cont, long count,
                                       std::uint64_t seed) {
    std::vector<double> pops = exact_populations(rho_cont);
    for (double& p : pops) p = std::max(0.0, p);
    std::mt19937_64 rng(seed);
    std::discrete_distribution<int> pick(pops.begin(), pops.end());
    std::vector<double> out;
    out.reserve(size_t(count));
    for (long k = 0; k < count; ++k) {
        int n = pick(rng);
        std::gamma_distribution<double> gamma(n + 1.0, 1.0);
        out.push_back(gamma(rng));
    }
    return out;
}

PhotonStatistics estimate_photon_stats_em(const std::vector<double>& z_samples,
                                          int n_max, EmOptions opts) {
    if (n_max < 1) throw DomainError("estimate_photon_stats_em: n_max must be >= 1");
    if (z_samples.size() < 2) throw DegenerateEstimate("estimate_photon_stats_em: too few samples");
    const double first = z_samples.front();
    bool all_same = std::all_of(z_samples.begin(), z_samples.end(),
                                [&](double z) { return z == first; });
    if (all_same) throw DegenerateEstimate("estimate_photon_stats_em: degenerate sample");

    const int k = n_max + 1;
    const long m = long(z_samples.size());
    std::vector<double> log_fact(size_t(k), 0.0);
    for (int n = 1; n < k; ++n) log_fact[size_t(n)] = log_fact[size_t(n - 1)] + std::log(double(n));

    // Histogram E-step: collapse the sample onto centroid-weighted bins, then
    // run the weighted EM. The component densities are fixed across
    // iterations, so each step is two small mat-vec products.
    const int n_bins = 4096;
    double z_max = *std::max_element(z_samples.begin(), z_samples.end());
    const double width = (z_max + 1e-9) / n_bins;
    std::vector<double> bin_weight(n_bins, 0.0), bin_sum(n_bins, 0.0);
    for (double z : z_samples) {
        if (z < 0) throw BadStatistics("estimate_photon_stats_em: negative record");
        int b = std::min(n_bins - 1, int(z / width));
        bin_weight[size_t(b)] += 1.0;
        bin_sum[size_t(b)] += z;
    }
    std::vector<double> centroid, weight;
    for (int b = 0; b < n_bins; ++b) {
        if (bin_weight[size_t(b)] > 0) {
            centroid.push_back(bin_sum[size_t(b)] / bin_weight[size_t(b)]);
            weight.push_back(bin_weight[size_t(b)]);
        }
    }
    const long nb = long(centroid.size());

    Eigen::MatrixXd comp(k, nb);
    Eigen::VectorXd log_scale(nb), w = Eigen::Map<Eigen::VectorXd>(weight.data(), nb);
    for (long s = 0; s < nb; ++s) {
        const double z = centroid[size_t(s)];
        double max_lw = -std::numeric_limits<double>::infinity();
        for (int n = 0; n < k; ++n) {
            double lw = -z + (z > 0 ? n * std::log(z) : (n > 0 ? -745.0 * n : 0.0)) -
                        log_fact[size_t(n)];
            comp(n, s) = lw;
            max_lw = std::max(max_lw, lw);
        }
        log_scale[s] = max_lw;
        for (int n = 0; n < k; ++n) comp(n, s) = std::exp(comp(n, s) - max_lw);
    }

    Eigen::VectorXd rho = Eigen::VectorXd::Constant(k, 1.0 / k);
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < opts.max_iter; ++it) {
        Eigen::VectorXd mix = comp.transpose() * rho; // per-bin mixture density
        double ll = (mix.array().log() * w.array()).sum() + log_scale.dot(w);
        if (ll + 1e-9 < prev_ll) {
            throw NumericalError("estimate_photon_stats_em: log-likelihood decreased");
        }
        prev_ll = ll;
        Eigen::VectorXd weighted = w.cwiseQuotient(mix);
        Eigen::VectorXd next = rho.cwiseProduct(comp * weighted) / double(m);
        double max_change = (next - rho).cwiseAbs().maxCoeff();
        rho = next;
        if (max_change < opts.tol) break;
    }
    if (rho[n_max] > 0.05) {
        throw DegenerateEstimate("estimate_photon_stats_em: top-level mass " +
                                 std::to_string(rho[n_max]) +
                                 "; cutoff too small for the data");
    }
    PhotonStatistics stats;
    stats.populations.assign(rho.data(), rho.data() + k);
    stats.n_samples = m;
    stats.method = StatsMethod::em_two_homodyne;
    return stats;
}

std::vector<double> zsup_samples(const std::vector<double>& x_run,
                                 const std::vector<double>& p_run, ZsupPairing pairing) {
    if (x_run.empty() || p_run.empty()) throw DomainError("zsup_samples: empty run");
    std::vector<double> out;
    out.reserve(x_run.size());
    if (pairing == ZsupPairing::max_p) {
        double p2max = 0;
        for (double p : p_run) p2max = std::max(p2max, p * p);
        for (double x : x_run) out.push_back(x * x + p2max);
    } else {
        std::vector<double> xs(x_run), ps(p_run);
        auto by_mag = [](double a, double b) { return std::abs(a) > std::abs(b); };
        std::sort(xs.begin(), xs.end(), by_mag);
        std::sort(ps.begin(), ps.end(), by_mag);
        for (size_t i = 0; i < xs.size(); ++i) {
            double p = ps[std::min(i, ps.size() - 1)];
            out.push_back(xs[i] * xs[i] + p * p);
        }
    }
    return out;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    // splitmix64 step over master + odd-stride stream
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace catwit
