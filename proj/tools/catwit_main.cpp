#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "catwit/protocol.hpp"
#include "catwit/sweep.hpp"

using namespace catwit;

namespace {

struct OutputSpec {
    std::string path;   // empty = stdout
    std::string format = "csv";
};

void emit_table(const Table& table, const OutputSpec& out) {
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out.path.empty()) {
        file.open(out.path);
        if (!file) throw DomainError("cannot open output file: " + out.path);
        os = &file;
    }
    if (out.format == "csv") {
        write_csv(*os, table);
    } else if (out.format == "json") {
        write_json(*os, table);
    } else {
        throw DomainError("unknown format: " + out.format);
    }
}

void emit_json(const nlohmann::json& j, const std::string& path) {
    if (path.empty()) {
        std::cout << j.dump(2) << std::endl;
    } else {
        std::ofstream file(path);
        if (!file) throw DomainError("cannot open output file: " + path);
        file << j.dump(2) << std::endl;
    }
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    if (out.empty()) throw DomainError("empty list: '" + text + "'");
    return out;
}

// Optional JSON config file mirroring the flags; explicit flags win because
// CLI11 only writes bound variables for options actually given.
nlohmann::json load_config(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            std::ifstream f(argv[i + 1]);
            if (!f) throw DomainError(std::string("cannot open config: ") + argv[i + 1]);
            nlohmann::json j;
            f >> j;
            return j;
        }
    }
    return nlohmann::json::object();
}

template <typename T>
void from_config(const nlohmann::json& cfg, const char* key, T& target) {
    if (cfg.contains(key)) target = cfg.at(key).get<T>();
}

ProtocolMethod parse_method(const std::string& name) {
    if (name == "m1" || name == "worst-case") return ProtocolMethod::worst_case;
    if (name == "m2-two" || name == "m2") return ProtocolMethod::stats_two_homodyne;
    if (name == "m2-zsup") return ProtocolMethod::stats_single_homodyne;
    throw DomainError("unknown method: " + name);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"catwit: hybrid cat-state entanglement witness toolkit"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    nlohmann::json cfg;
    try {
        cfg = load_config(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::string config_path;

    OutputSpec out;
    int threads = 1;
    from_config(cfg, "format", out.format);
    from_config(cfg, "out", out.path);
    from_config(cfg, "threads", threads);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", out.path, "output file (default stdout)");
        sub->add_option("--format", out.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--threads", threads, "worker threads for grid evaluation");
        sub->add_option("--config", config_path, "JSON config mirroring the flags");
    };

    // concurrence-map / witness-map
    struct MapArgs {
        double alpha = 1.0;
        std::string alpha_range; // lo:hi:n -> (alpha, eta=eta_d) mode
        std::string eta = "0:1:50";
        std::string eta_d = "0:1:50";
        std::string diag = "0:1:50";
        bool clip = false;
    };
    MapArgs cmap, wmap;
    auto add_map_flags = [&](CLI::App* sub, MapArgs& a) {
        from_config(cfg, "alpha", a.alpha);
        sub->add_option("--alpha", a.alpha, "cat amplitude (fixed-alpha grid)");
        sub->add_option("--alpha-range", a.alpha_range,
                        "lo:hi:n; sweeps (alpha, eta = eta_d) instead of (eta, eta_d)");
        sub->add_option("--eta", a.eta, "continuous-loss range lo:hi:n");
        sub->add_option("--eta-d", a.eta_d, "discrete-loss range lo:hi:n");
        sub->add_option("--diag", a.diag, "eta = eta_d range for --alpha-range mode");
        sub->add_flag("--clip", a.clip, "append a max(0, value) column");
        add_common(sub);
    };
    CLI::App* cmd_cmap = app.add_subcommand("concurrence-map", "concurrence over a noise grid");
    add_map_flags(cmd_cmap, cmap);
    CLI::App* cmd_wmap = app.add_subcommand("witness-map", "-Tr[W rho] over a noise grid");
    add_map_flags(cmd_wmap, wmap);

    // tilde-sweep
    struct TildeArgs {
        double alpha = 1.0;
        int levels = 3;
        double nx = 0, ny = 0; // 0 = default certified scales
        std::string diag = "0:0.6:61";
        int cutoff = 0;
    } tilde;
    CLI::App* cmd_tilde =
        app.add_subcommand("tilde-sweep", "measurable-witness expectation along eta = eta_d");
    from_config(cfg, "alpha", tilde.alpha);
    from_config(cfg, "levels", tilde.levels);
    cmd_tilde->add_option("--alpha", tilde.alpha, "cat amplitude");
    cmd_tilde->add_option("--levels", tilde.levels, "assumed Fock basis states (>= 2)");
    cmd_tilde->add_option("--nx", tilde.nx, "x-quadrature scale (default certified)");
    cmd_tilde->add_option("--ny", tilde.ny, "y-quadrature scale (default certified)");
    cmd_tilde->add_option("--diag", tilde.diag, "eta = eta_d range lo:hi:n");
    cmd_tilde->add_option("--fock-cutoff", tilde.cutoff, "simulation cutoff override");
    add_common(cmd_tilde);

    // critical-noise
    struct CritArgs {
        std::string alphas = "1.0,1.3,1.6";
        int levels_min = 2;
        int levels_max = 5;
        std::string method = "m1";
        double tol = 1e-4;
    } crit;
    CLI::App* cmd_crit =
        app.add_subcommand("critical-noise", "largest detectable eta = eta_d per cutoff");
    cmd_crit->add_option("--alphas", crit.alphas, "comma-separated amplitudes");
    cmd_crit->add_option("--levels-min", crit.levels_min, "smallest Fock-state count");
    cmd_crit->add_option("--levels-max", crit.levels_max, "largest Fock-state count");
    cmd_crit->add_option("--method", crit.method, "m1 | m2")
        ->check(CLI::IsMember({"m1", "m2"}));
    cmd_crit->add_option("--tol", crit.tol, "bisection tolerance");
    add_common(cmd_crit);

    // f-of-n
    struct FArgs {
        int min = 1;
        int max = 8;
        bool brute = false;
    } fargs;
    CLI::App* cmd_f = app.add_subcommand("f-of-n", "separable-bound constants");
    cmd_f->add_option("--min", fargs.min, "smallest n");
    cmd_f->add_option("--max", fargs.max, "largest n");
    cmd_f->add_flag("--brute", fargs.brute, "include the gradient-ascent oracle column");
    add_common(cmd_f);

    // kraus-verify
    struct KrausArgs {
        std::string alphas = "0.7,1.0,1.3";
        std::string eta = "0.05:0.95:10";
        std::string eta_d = "0:0.8:5";
    } kargs;
    CLI::App* cmd_kraus = app.add_subcommand("kraus-verify", "channel-picture verification report");
    cmd_kraus->add_option("--alphas", kargs.alphas, "comma-separated amplitudes");
    cmd_kraus->add_option("--eta", kargs.eta, "continuous-loss range lo:hi:n");
    cmd_kraus->add_option("--eta-d", kargs.eta_d, "discrete-loss range lo:hi:n");
    add_common(cmd_kraus);

    // protocol / method2
    struct ProtoArgs {
        double alpha = 1.0;
        double eta = 0.0;
        double eta_d = -1.0; // -1 = mirror eta
        double n_th = 0.0;
        std::string method = "m1";
        int levels = 3;
        double nx = 0, ny = 0;
        long samples = 1000000;
        long stats_samples = 200000;
        std::uint64_t seed = 0;
        double k_sigmas = 3.0;
        std::string export_samples;
        std::string import_samples;
        bool zsup = false;
    };
    ProtoArgs proto, m2;
    auto add_proto_flags = [&](CLI::App* sub, ProtoArgs& a, bool is_method2) {
        from_config(cfg, "alpha", a.alpha);
        from_config(cfg, "levels", a.levels);
        sub->add_option("--alpha", a.alpha, "cat amplitude");
        sub->add_option("--eta", a.eta, "continuous-channel loss");
        sub->add_option("--eta-d", a.eta_d, "discrete-channel loss (default: same as --eta)");
        sub->add_option("--n-th", a.n_th, "thermal occupancy of the continuous ancilla");
        if (!is_method2) {
            sub->add_option("--method", a.method, "m1 | m2-two | m2-zsup")
                ->check(CLI::IsMember({"m1", "m2-two", "m2-zsup"}));
        } else {
            sub->add_flag("--zsup", a.zsup, "single-homodyne statistics variant");
            sub->add_option("--import", a.import_samples, "re-analyze recorded samples (CSV)");
        }
        sub->add_option("--levels", a.levels, "assumed Fock basis states for the scales");
        sub->add_option("--nx", a.nx, "x-quadrature scale (default certified)");
        sub->add_option("--ny", a.ny, "y-quadrature scale (default certified)");
        sub->add_option("--samples", a.samples, "quadrature samples per phase setting");
        sub->add_option("--stats-samples", a.stats_samples, "photon-statistics records");
        sub->add_option("--seed", a.seed, "RNG seed (stochastic commands require it)")
            ->required();
        sub->add_option("--k-sigmas", a.k_sigmas, "verdict threshold in standard errors");
        sub->add_option("--export-samples", a.export_samples, "write raw records (CSV)");
        add_common(sub);
    };
    CLI::App* cmd_proto = app.add_subcommand("protocol", "end-to-end measurement simulation");
    add_proto_flags(cmd_proto, proto, false);
    CLI::App* cmd_m2 = app.add_subcommand("method2",
                                          "statistics-informed witness run (two-homodyne)");
    add_proto_flags(cmd_m2, m2, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    auto run_protocol_cmd = [&](ProtoArgs& a, bool is_method2) {
        if (a.eta_d < 0) a.eta_d = a.eta;
        NoiseParams noise{a.eta, a.eta_d, a.n_th};
        WitnessConfig config = WitnessConfig::for_levels(a.levels);
        if (a.nx > 0) config.n_x = a.nx;
        if (a.ny > 0) config.n_y = a.ny;
        ProtocolOptions opts;
        opts.method = is_method2 ? (a.zsup ? ProtocolMethod::stats_single_homodyne
                                           : ProtocolMethod::stats_two_homodyne)
                                 : parse_method(a.method);
        opts.counts.quadrature_samples = a.samples;
        opts.counts.stats_samples = a.stats_samples;
        opts.verdict_sigmas = a.k_sigmas;

        ProtocolResult res;
        if (!a.import_samples.empty()) {
            std::ifstream f(a.import_samples);
            if (!f) throw DomainError("cannot open samples file: " + a.import_samples);
            RecordedRuns runs = read_samples_csv(f);
            res = analyze_runs(runs, config, opts);
            res.alpha = a.alpha;
            res.noise = noise;
            res.seed = a.seed;
            res.exact_witness = std::numeric_limits<double>::quiet_NaN();
        } else {
            if (!a.export_samples.empty()) {
                RecordedRuns runs = simulate_runs(a.alpha, noise, config, a.seed, opts);
                std::ofstream f(a.export_samples);
                if (!f) throw DomainError("cannot open export file: " + a.export_samples);
                write_samples_csv(f, runs);
                res = analyze_runs(runs, config, opts);
                Operator rho = noisy_hybrid_state(a.alpha, noise, default_cutoff(a.alpha));
                res.exact_witness = witness_expectation(rho, config);
                res.alpha = a.alpha;
                res.noise = noise;
                res.seed = a.seed;
                res.counts = opts.counts;
            } else {
                res = run_protocol(a.alpha, noise, config, a.seed, opts);
            }
        }
        nlohmann::json j = res.to_json();
        if (std::isnan(res.exact_witness)) j["exact_witness"] = nullptr;
        emit_json(j, out.path);
    };

    try {
        if (cmd_cmap->parsed() || cmd_wmap->parsed()) {
            MapArgs& a = cmd_cmap->parsed() ? cmap : wmap;
            bool is_conc = cmd_cmap->parsed();
            Table t;
            if (!a.alpha_range.empty()) {
                Range ar = Range::parse(a.alpha_range);
                Range dr = Range::parse(a.diag);
                t = is_conc ? concurrence_alpha_diag(ar, dr, a.clip, threads)
                            : witness_alpha_diag(ar, dr, a.clip, threads);
            } else {
                Range er = Range::parse(a.eta);
                Range edr = Range::parse(a.eta_d);
                t = is_conc ? concurrence_grid(a.alpha, er, edr, a.clip, threads)
                            : witness_grid(a.alpha, er, edr, a.clip, threads);
            }
            emit_table(t, out);
        } else if (cmd_tilde->parsed()) {
            std::optional<double> nx, ny;
            if (tilde.nx > 0) nx = tilde.nx;
            if (tilde.ny > 0) ny = tilde.ny;
            std::optional<int> cutoff;
            if (tilde.cutoff > 0) cutoff = tilde.cutoff;
            Table t = quadrature_witness_sweep(tilde.alpha, tilde.levels, nx, ny,
                                               Range::parse(tilde.diag), cutoff, threads);
            emit_table(t, out);
        } else if (cmd_crit->parsed()) {
            BoundMethod method = crit.method == "m1" ? BoundMethod::worst_case
                                                     : BoundMethod::stats_informed;
            Table t = critical_noise_table(parse_list(crit.alphas), crit.levels_min,
                                           crit.levels_max, method, crit.tol, threads);
            emit_table(t, out);
        } else if (cmd_f->parsed()) {
            emit_table(f_table(fargs.min, fargs.max, fargs.brute), out);
        } else if (cmd_kraus->parsed()) {
            nlohmann::json report = kraus_verify_report(
                parse_list(kargs.alphas), Range::parse(kargs.eta), Range::parse(kargs.eta_d));
            emit_json(report, out.path);
        } else if (cmd_proto->parsed()) {
            run_protocol_cmd(proto, false);
        } else if (cmd_m2->parsed()) {
            run_protocol_cmd(m2, true);
        }
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
