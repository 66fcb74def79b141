#include "catwit/protocol.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace catwit {

std::string to_string(ProtocolMethod m) {
    switch (m) {
        case ProtocolMethod::worst_case: return "worst_case";
        case ProtocolMethod::stats_two_homodyne: return "stats_two_homodyne";
        case ProtocolMethod::stats_single_homodyne: return "stats_single_homodyne";
    }
    return "?";
}

std::string to_string(Verdict v) {
    return v == Verdict::entangled ? "entangled" : "inconclusive";
}

namespace {

constexpr long kBlock = 65536;

struct MeanSe {
    double mean = 0;
    double se = 0;
};

MeanSe mean_and_se(const std::vector<double>& xs) {
    double m = 0;
    for (double x : xs) m += x;
    m /= double(xs.size());
    double var = 0;
    for (double x : xs) var += (x - m) * (x - m);
    var /= double(xs.size() - 1);
    return {m, std::sqrt(var / double(xs.size()))};
}

PhotonStatistics estimate_with_growing_cutoff(const std::vector<double>& z, int start_level) {
    int level = start_level;
    for (;;) {
        try {
            return estimate_photon_stats_em(z, level);
        } catch (const DegenerateEstimate&) {
            if (level >= 20) throw;
            level += 4;
        }
    }
}

} // namespace

ProtocolResult analyze_runs(const RecordedRuns& runs, const WitnessConfig& config,
                            const ProtocolOptions& opts) {
    if (runs.x_pairs.empty() || runs.p_pairs.empty()) {
        throw DomainError("analyze_runs: empty correlation runs");
    }
    ProtocolResult res;
    res.config = config;
    res.method = opts.method;

    std::vector<double> gx, gy;
    gx.reserve(runs.x_pairs.size());
    for (auto& [xd, xc] : runs.x_pairs) gx.push_back(2.0 * xd * xc / config.n_x);
    gy.reserve(runs.p_pairs.size());
    for (auto& [pd, pc] : runs.p_pairs) gy.push_back(-2.0 * pd * pc / config.n_y);
    MeanSe mx = mean_and_se(gx);
    MeanSe my = mean_and_se(gy);
    res.corr_x = mx.mean;
    res.se_corr_x = mx.se;
    res.corr_y = my.mean;
    res.se_corr_y = my.se;
    res.witness_value = 1.0 - 0.5 * (1.0 + res.corr_x - res.corr_y);
    res.se_witness = 0.5 * std::hypot(mx.se, my.se);

    if (opts.method == ProtocolMethod::worst_case) {
        res.bound = separable_bound_worst_case(config);
    } else {
        if (runs.stats_x.empty()) throw DomainError("analyze_runs: missing statistics run");
        std::vector<double> z;
        if (opts.method == ProtocolMethod::stats_two_homodyne) {
            if (runs.stats_x.size() != runs.stats_p.size()) {
                throw DomainError("analyze_runs: unpaired conjugate records");
            }
            z.reserve(runs.stats_x.size());
            for (size_t k = 0; k < runs.stats_x.size(); ++k) {
                z.push_back(runs.stats_x[k] * runs.stats_x[k] + runs.stats_p[k] * runs.stats_p[k]);
            }
        } else {
            z = zsup_samples(runs.stats_x, runs.stats_p, opts.zsup_pairing);
        }
        res.stats = estimate_with_growing_cutoff(z, opts.stats_max_level);
        res.stats.method = opts.method == ProtocolMethod::stats_two_homodyne
                               ? StatsMethod::em_two_homodyne
                               : StatsMethod::em_zsup;
        res.bound = separable_bound_from_stats(res.stats.populations, config);
    }

    bool significant = res.witness_value < -opts.verdict_sigmas * res.se_witness;
    res.verdict = (significant && res.bound.certified()) ? Verdict::entangled
                                                         : Verdict::inconclusive;
    return res;
}

RecordedRuns simulate_runs(double alpha, const NoiseParams& noise,
                           const WitnessConfig& config, std::uint64_t seed,
                           const ProtocolOptions& opts) {
    (void)config;
    const int cutoff = default_cutoff(alpha);
    Operator rho = noisy_hybrid_state(alpha, noise, cutoff);
    RecordedRuns runs;

    auto run_joint = [&](double theta, std::uint64_t stream,
                         std::vector<std::pair<double, double>>& out, long count) {
        JointQuadratureSampler sampler(rho, theta);
        out.reserve(size_t(count));
        long done = 0, block = 0;
        while (done < count) {
            long todo = std::min(kBlock, count - done);
            std::mt19937_64 rng(derive_seed(seed, (stream << 32) | std::uint64_t(block)));
            for (long k = 0; k < todo; ++k) out.push_back(sampler.sample(rng));
            done += todo;
            ++block;
        }
    };
    run_joint(0.0, 1, runs.x_pairs, opts.counts.quadrature_samples);
    run_joint(M_PI / 2.0, 2, runs.p_pairs, opts.counts.quadrature_samples);

    if (opts.method == ProtocolMethod::stats_two_homodyne) {
        Operator cont = partial_trace(rho, {1});
        std::vector<double> z;
        z.reserve(size_t(opts.counts.stats_samples));
        long done = 0, block = 0;
        while (done < long(opts.counts.stats_samples)) {
            long todo = std::min(kBlock, opts.counts.stats_samples - done);
            auto zi = sample_conjugate_z(cont, todo,
                                         derive_seed(seed, (3ULL << 32) | std::uint64_t(block)));
            z.insert(z.end(), zi.begin(), zi.end());
            done += todo;
            ++block;
        }
        // Record each Z as a conjugate pair; the double-homodyne outcome of a
        // Fock-diagonal record is isotropic in the (X, P) plane.
        std::mt19937_64 angle_rng(derive_seed(seed, 4ULL << 32));
        std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
        runs.stats_x.reserve(z.size());
        runs.stats_p.reserve(z.size());
        for (double zv : z) {
            double phi = uni(angle_rng);
            double r = std::sqrt(std::max(0.0, zv));
            runs.stats_x.push_back(r * std::cos(phi));
            runs.stats_p.push_back(r * std::sin(phi));
        }
    } else if (opts.method == ProtocolMethod::stats_single_homodyne) {
        Operator cont = partial_trace(rho, {1});
        auto xs = sample_quadrature(cont, 0, 0.0, opts.counts.stats_samples,
                                    derive_seed(seed, 5ULL << 32));
        auto ps = sample_quadrature(cont, 0, M_PI / 2.0, opts.counts.stats_samples,
                                    derive_seed(seed, 6ULL << 32));
        for (auto& s : xs) runs.stats_x.push_back(s.value);
        for (auto& s : ps) runs.stats_p.push_back(s.value);
    }
    return runs;
}

ProtocolResult run_protocol(double alpha, const NoiseParams& noise,
                            const WitnessConfig& config, std::uint64_t seed,
                            const ProtocolOptions& opts) {
    RecordedRuns runs = simulate_runs(alpha, noise, config, seed, opts);
    ProtocolResult res = analyze_runs(runs, config, opts);
    const int cutoff = default_cutoff(alpha);
    Operator rho = noisy_hybrid_state(alpha, noise, cutoff);
    res.exact_witness = witness_expectation(rho, config);
    res.alpha = alpha;
    res.noise = noise;
    res.seed = seed;
    res.counts = opts.counts;
    return res;
}

nlohmann::json ProtocolResult::to_json() const {
    nlohmann::json j;
    j["corr_x"] = corr_x;
    j["corr_y"] = corr_y;
    j["witness_value"] = witness_value;
    j["standard_errors"] = {{"corr_x", se_corr_x}, {"corr_y", se_corr_y}, {"witness", se_witness}};
    j["exact_witness"] = exact_witness;
    j["verdict"] = to_string(verdict);
    j["bound"] = {{"value", bound.value},
                  {"method", bound.method == BoundMethod::worst_case ? "worst_case" : "stats_informed"},
                  {"f_n", bound.f_n},
                  {"certified", bound.certified()}};
    if (!stats.populations.empty()) {
        j["photon_statistics"] = {{"populations", stats.populations},
                                  {"n_samples", stats.n_samples},
                                  {"mean_photons", stats.mean_photons()}};
    }
    j["params"] = {{"alpha", alpha},
                   {"eta", noise.eta},
                   {"eta_d", noise.eta_d},
                   {"n_th", noise.n_th},
                   {"n_x", config.n_x},
                   {"n_y", config.n_y},
                   {"max_level", config.max_level},
                   {"method", to_string(method)},
                   {"seed", seed},
                   {"quadrature_samples", counts.quadrature_samples},
                   {"stats_samples", counts.stats_samples}};
    return j;
}

void write_samples_csv(std::ostream& os, const RecordedRuns& runs) {
    os << "channel,phase,value\n";
    os << std::setprecision(12);
    const double half_pi = M_PI / 2.0;
    for (auto& [xd, xc] : runs.x_pairs) {
        os << "discrete,0," << xd << "\n";
        os << "continuous,0," << xc << "\n";
    }
    for (auto& [pd, pc] : runs.p_pairs) {
        os << "discrete," << half_pi << "," << pd << "\n";
        os << "continuous," << half_pi << "," << pc << "\n";
    }
    const size_t n_stats = std::min(runs.stats_x.size(), runs.stats_p.size());
    for (size_t k = 0; k < n_stats; ++k) {
        os << "continuous,0," << runs.stats_x[k] << "\n";
        os << "continuous," << half_pi << "," << runs.stats_p[k] << "\n";
    }
}

RecordedRuns read_samples_csv(std::istream& is) {
    RecordedRuns runs;
    std::string line;
    if (!std::getline(is, line)) throw DomainError("read_samples_csv: empty file");
    struct Row {
        Channel channel;
        double phase;
        double value;
    };
    std::vector<Row> rows;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string ch, ph, val;
        if (!std::getline(ss, ch, ',') || !std::getline(ss, ph, ',') || !std::getline(ss, val)) {
            throw DomainError("read_samples_csv: malformed row: " + line);
        }
        Row r;
        if (ch == "discrete") {
            r.channel = Channel::discrete;
        } else if (ch == "continuous") {
            r.channel = Channel::continuous;
        } else {
            throw DomainError("read_samples_csv: unknown channel: " + ch);
        }
        r.phase = std::stod(ph);
        r.value = std::stod(val);
        rows.push_back(r);
    }
    const double half_pi = M_PI / 2.0;
    size_t i = 0;
    while (i < rows.size()) {
        if (i + 1 < rows.size() && rows[i].channel == Channel::discrete &&
            rows[i + 1].channel == Channel::continuous &&
            std::abs(rows[i].phase - rows[i + 1].phase) < 1e-9) {
            if (std::abs(rows[i].phase) < 1e-9) {
                runs.x_pairs.emplace_back(rows[i].value, rows[i + 1].value);
            } else {
                runs.p_pairs.emplace_back(rows[i].value, rows[i + 1].value);
            }
            i += 2;
        } else if (i + 1 < rows.size() && rows[i].channel == Channel::continuous &&
                   rows[i + 1].channel == Channel::continuous &&
                   std::abs(rows[i].phase) < 1e-9 &&
                   std::abs(rows[i + 1].phase - half_pi) < 1e-9) {
            runs.stats_x.push_back(rows[i].value);
            runs.stats_p.push_back(rows[i + 1].value);
            i += 2;
        } else {
            throw DomainError("read_samples_csv: rows do not form recognizable pairs at line " +
                              std::to_string(i + 2));
        }
    }
    return runs;
}

} // namespace catwit
