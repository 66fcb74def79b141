#pragma once

#include <string>

#include "catwit/homodyne.hpp"
#include "catwit/witness.hpp"

#include "json.hpp"

namespace catwit {

enum class ProtocolMethod { worst_case, stats_two_homodyne, stats_single_homodyne };
enum class Verdict { entangled, inconclusive };

std::string to_string(ProtocolMethod m);
std::string to_string(Verdict v);

struct ProtocolCounts {
    long quadrature_samples = 1000000; // per phase setting
    long stats_samples = 200000;       // conjugate-homodyne records
};

struct ProtocolOptions {
    ProtocolMethod method = ProtocolMethod::worst_case;
    ProtocolCounts counts;
    double verdict_sigmas = 3.0;   // entangled iff W < -k SE and bound certified
    int stats_max_level = 8;       // EM cutoff start; grown on degenerate fits
    ZsupPairing zsup_pairing = ZsupPairing::max_p;
};

struct ProtocolResult {
    double corr_x = 0; // estimate of <sx (x) (a+a^dag)> / n_x
    double corr_y = 0; // estimate of <sy (x) i(a-a^dag)> / n_y
    double witness_value = 0;
    double se_corr_x = 0;
    double se_corr_y = 0;
    double se_witness = 0;
    SeparableBound bound;
    PhotonStatistics stats; // empty for the worst-case method
    Verdict verdict = Verdict::inconclusive;
    double exact_witness = 0; // direct trace on the simulated state
    // run parameters, echoed for the record
    double alpha = 0;
    NoiseParams noise;
    WitnessConfig config;
    ProtocolMethod method = ProtocolMethod::worst_case;
    std::uint64_t seed = 0;
    ProtocolCounts counts;

    nlohmann::json to_json() const;
};

// Simulate the full measurement protocol on the lossy hybrid state: lock the
// phase at x on both channels, record correlations, repeat at p, optionally
// estimate the photon statistics for the stats-informed bound, and return
// the witness value with its verdict.
ProtocolResult run_protocol(double alpha, const NoiseParams& noise,
                            const WitnessConfig& config, std::uint64_t seed,
                            const ProtocolOptions& opts = {});

// Re-analysis entry point: the same computation, starting from recorded
// samples instead of a simulation.
struct RecordedRuns {
    std::vector<std::pair<double, double>> x_pairs; // (discrete, continuous) at phase 0
    std::vector<std::pair<double, double>> p_pairs; // (discrete, continuous) at phase pi/2
    // Continuous-channel records feeding the statistics estimate. Conjugate
    // pairs for the two-homodyne method, two unpaired runs for the
    // single-homodyne variant.
    std::vector<double> stats_x;
    std::vector<double> stats_p;
};
ProtocolResult analyze_runs(const RecordedRuns& runs, const WitnessConfig& config,
                            const ProtocolOptions& opts);

// CSV with columns channel,phase,value. Correlation pairs are adjacent
// discrete/continuous rows at the same phase; statistics records are
// adjacent continuous rows at phases 0 and pi/2.
void write_samples_csv(std::ostream& os, const RecordedRuns& runs);
RecordedRuns read_samples_csv(std::istream& is);

// Capture of the raw records produced by a simulated run (same seed =>
// identical records), for export and re-analysis.
RecordedRuns simulate_runs(double alpha, const NoiseParams& noise,
                           const WitnessConfig& config, std::uint64_t seed,
                           const ProtocolOptions& opts);

} // namespace catwit
