#include "catwit/sweep.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <thread>

namespace catwit {

std::vector<double> Range::values() const {
    if (steps < 2) throw DomainError("Range: steps must be >= 2");
    if (hi < lo) throw DomainError("Range: hi < lo");
    std::vector<double> v(static_cast<size_t>(steps));
    for (int i = 0; i < steps; ++i) v[size_t(i)] = lo + (hi - lo) * i / double(steps - 1);
    return v;
}

Range Range::parse(const std::string& text) {
    Range r;
    size_t c1 = text.find(':');
    size_t c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
        throw DomainError("Range: expected lo:hi:steps, got '" + text + "'");
    }
    try {
        r.lo = std::stod(text.substr(0, c1));
        r.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        r.steps = std::stoi(text.substr(c2 + 1));
    } catch (const std::exception&) {
        throw DomainError("Range: cannot parse '" + text + "'");
    }
    return r;
}

void write_csv(std::ostream& os, const Table& table) {
    os << "# catwit " << kVersion << "\n";
    for (auto it = table.meta.begin(); it != table.meta.end(); ++it) {
        os << "# " << it.key() << " = " << it.value().dump() << "\n";
    }
    for (size_t c = 0; c < table.columns.size(); ++c) {
        os << table.columns[c] << (c + 1 < table.columns.size() ? "," : "\n");
    }
    os << std::setprecision(12);
    for (const auto& row : table.rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            os << row[c] << (c + 1 < row.size() ? "," : "\n");
        }
    }
}

void write_json(std::ostream& os, const Table& table) {
    nlohmann::json j;
    j["tool"] = std::string("catwit ") + kVersion;
    j["params"] = table.meta;
    j["columns"] = table.columns;
    j["rows"] = table.rows;
    os << j.dump(2) << "\n";
}

void parallel_for(long n, int threads, const std::function<void(long)>& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || n < 2) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(size_t(threads));
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                long i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

namespace {

double raw_concurrence(const CatBasisState& s) {
    return 2.0 * s.c - 2.0 * std::sqrt(std::max(s.w, 0.0) * std::max(s.y, 0.0));
}

nlohmann::json grid_meta(const char* quantity, double alpha, const Range& eta,
                         const Range& eta_d, bool clip) {
    return {{"quantity", quantity},
            {"alpha", alpha},
            {"eta", {eta.lo, eta.hi, eta.steps}},
            {"eta_d", {eta_d.lo, eta_d.hi, eta_d.steps}},
            {"clip", clip}};
}

Table closed_form_grid(const char* quantity, double alpha, const Range& eta,
                       const Range& eta_d, bool clip, int threads,
                       const std::function<double(const CatBasisState&)>& value) {
    Table t;
    t.columns = {"alpha", "eta", "eta_d", "value"};
    if (clip) t.columns.push_back("value_clipped");
    t.meta = grid_meta(quantity, alpha, eta, eta_d, clip);
    auto evs = eta.values();
    auto edvs = eta_d.values();
    t.rows.assign(size_t(eta.steps) * size_t(eta_d.steps), {});
    parallel_for(long(t.rows.size()), threads, [&](long idx) {
        double e = evs[size_t(idx) / edvs.size()];
        double ed = edvs[size_t(idx) % edvs.size()];
        CatBasisState s = closed_form_entries(alpha, NoiseParams{e, ed, 0});
        double v = value(s);
        std::vector<double> row{alpha, e, ed, v};
        if (clip) row.push_back(std::max(0.0, v));
        t.rows[size_t(idx)] = std::move(row);
    });
    return t;
}

Table closed_form_alpha_diag(const char* quantity, const Range& alpha, const Range& eta,
                             bool clip, int threads,
                             const std::function<double(const CatBasisState&)>& value) {
    Table t;
    t.columns = {"alpha", "eta", "eta_d", "value"};
    if (clip) t.columns.push_back("value_clipped");
    t.meta = {{"quantity", quantity},
              {"alpha", {alpha.lo, alpha.hi, alpha.steps}},
              {"eta_diag", {eta.lo, eta.hi, eta.steps}},
              {"clip", clip}};
    auto avs = alpha.values();
    auto evs = eta.values();
    t.rows.assign(avs.size() * evs.size(), {});
    parallel_for(long(t.rows.size()), threads, [&](long idx) {
        double a = avs[size_t(idx) / evs.size()];
        double e = evs[size_t(idx) % evs.size()];
        CatBasisState s = closed_form_entries(a, NoiseParams{e, e, 0});
        double v = value(s);
        std::vector<double> row{a, e, e, v};
        if (clip) row.push_back(std::max(0.0, v));
        t.rows[size_t(idx)] = std::move(row);
    });
    return t;
}

} // namespace

Table concurrence_grid(double alpha, const Range& eta, const Range& eta_d, bool clip,
                       int threads) {
    return closed_form_grid("concurrence", alpha, eta, eta_d, clip, threads,
                            raw_concurrence);
}

Table concurrence_alpha_diag(const Range& alpha, const Range& eta, bool clip,
                             int threads) {
    return closed_form_alpha_diag("concurrence", alpha, eta, clip, threads,
                                  raw_concurrence);
}

Table witness_grid(double alpha, const Range& eta, const Range& eta_d, bool clip,
                   int threads) {
    return closed_form_grid("neg_ideal_witness", alpha, eta, eta_d, clip, threads,
                            [](const CatBasisState& s) { return -ideal_witness_value(s); });
}

Table witness_alpha_diag(const Range& alpha, const Range& eta, bool clip, int threads) {
    return closed_form_alpha_diag("neg_ideal_witness", alpha, eta, clip, threads,
                                  [](const CatBasisState& s) { return -ideal_witness_value(s); });
}

Table quadrature_witness_sweep(double alpha, int levels, std::optional<double> n_x,
                               std::optional<double> n_y, const Range& eta_diag,
                               std::optional<int> cutoff, int threads) {
    WitnessConfig cfg = WitnessConfig::for_levels(levels);
    if (n_x) cfg.n_x = *n_x;
    if (n_y) cfg.n_y = *n_y;
    SeparableBound bound = separable_bound_worst_case(cfg);
    const int n = cutoff.value_or(default_cutoff(alpha));

    Table t;
    t.columns = {"alpha", "eta", "eta_d", "value"};
    t.meta = {{"quantity", "quadrature_witness"},
              {"alpha", alpha},
              {"eta_diag", {eta_diag.lo, eta_diag.hi, eta_diag.steps}},
              {"levels", levels},
              {"max_level", cfg.max_level},
              {"n_x", cfg.n_x},
              {"n_y", cfg.n_y},
              {"fock_cutoff", n},
              {"bound_value", bound.value},
              {"bound_f", bound.f_n},
              {"bound_certified", bound.certified()}};
    auto evs = eta_diag.values();
    t.rows.assign(evs.size(), {});
    parallel_for(long(evs.size()), threads, [&](long idx) {
        double e = evs[size_t(idx)];
        Operator rho = noisy_hybrid_state(alpha, NoiseParams{e, e, 0}, n);
        t.rows[size_t(idx)] = {alpha, e, e, witness_expectation(rho, cfg)};
    });
    return t;
}

Table critical_noise_table(const std::vector<double>& alphas, int levels_lo,
                           int levels_hi, BoundMethod method, double tol, int threads) {
    if (levels_lo < 2 || levels_hi < levels_lo) {
        throw DomainError("critical_noise_table: bad levels range");
    }
    Table t;
    t.columns = {"alpha", "N", "eta_c", "f_N", "bound", "detected_at_zero"};
    t.meta = {{"quantity", "critical_noise"},
              {"alphas", alphas},
              {"levels", {levels_lo, levels_hi}},
              {"method", method == BoundMethod::worst_case ? "worst_case" : "stats_informed"},
              {"bisect_tol", tol},
              {"note", "N counts Fock basis states; the bound constant is f(N-1)"}};
    const long n_rows = long(alphas.size()) * (levels_hi - levels_lo + 1);
    t.rows.assign(size_t(n_rows), {});
    parallel_for(n_rows, threads, [&](long idx) {
        const long per = levels_hi - levels_lo + 1;
        double a = alphas[size_t(idx / per)];
        int levels = levels_lo + int(idx % per);
        CriticalNoiseResult r = critical_noise(a, levels, method, tol);
        SeparableBound b = separable_bound_worst_case(r.config);
        t.rows[size_t(idx)] = {a, double(levels), r.eta_c, r.f_used, b.value,
                               r.detected_at_zero ? 1.0 : 0.0};
    });
    return t;
}

Table f_table(int n_lo, int n_hi, bool include_bruteforce) {
    if (n_lo < 1 || n_hi < n_lo) throw DomainError("f_table: bad range");
    Table t;
    t.columns = {"n", "f_eigensolve", "f_hermite_root"};
    if (include_bruteforce) t.columns.push_back("f_bruteforce");
    t.meta = {{"quantity", "f_of_n"}, {"range", {n_lo, n_hi}}};
    for (int n = n_lo; n <= n_hi; ++n) {
        std::vector<double> row{double(n), f_of_n(n), f_of_n_hermite(n)};
        if (include_bruteforce) row.push_back(f_of_n_bruteforce(n, 8, 4000));
        t.rows.push_back(std::move(row));
    }
    return t;
}

nlohmann::json kraus_verify_report(const std::vector<double>& alphas, const Range& eta,
                                   const Range& eta_d) {
    nlohmann::json report;
    report["tool"] = std::string("catwit ") + kVersion;
    report["grid"] = {{"alphas", alphas},
                      {"eta", {eta.lo, eta.hi, eta.steps}},
                      {"eta_d", {eta_d.lo, eta_d.hi, eta_d.steps}}};

    double max_comp_c = 0, max_comp_d = 0;
    double max_channel_vs_closed = 0;
    double max_channel_vs_oracle = 0;
    double max_uc_residual = 0;
    double max_uc_dilation_delta = 0;
    double max_ud_dilation_delta = 0;
    double max_decomp_delta = 0;
    nlohmann::json per_point = nlohmann::json::array();
    nlohmann::json discrepancies = nlohmann::json::array();
    const char* entry_names[6] = {"w", "x1", "x2", "y", "z", "c"};

    for (double a : alphas) {
        const int cutoff = default_cutoff(a);
        for (double e : eta.values()) {
            for (double ed : eta_d.values()) {
                KrausSet cont = continuous_kraus(std::min(std::max(e, 1e-12), 1.0 - 1e-12), a);
                KrausSet disc = discrete_kraus(ed);
                double comp_c = cont.completeness_residual();
                double comp_d = disc.completeness_residual();
                max_comp_c = std::max(max_comp_c, comp_c);
                max_comp_d = std::max(max_comp_d, comp_d);

                BasisChange bc = basis_change_u(a, std::min(e, 1.0 - 1e-9));
                Eigen::Matrix4cd channel = apply_kraus_channel(ideal_cat_matrix(), cont,
                                                               disc, bc.u);
                CatBasisState closed = closed_form_entries(a, NoiseParams{e, ed, 0});
                double d_closed = (channel - closed.to_matrix()).cwiseAbs().maxCoeff();
                max_channel_vs_closed = std::max(max_channel_vs_closed, d_closed);

                Operator rho = noisy_hybrid_state(a, NoiseParams{e, ed, 0}, cutoff);
                CatBasisState oracle =
                    project_to_cat_basis(rho, a, std::min(e, 1.0 - 1e-9));
                double d_oracle = (channel - oracle.to_matrix()).cwiseAbs().maxCoeff();
                max_channel_vs_oracle = std::max(max_channel_vs_oracle, d_oracle);
                if (d_oracle > 1e-8) {
                    double ch_vals[6] = {channel(0, 0).real(), channel(1, 1).real(),
                                         channel(2, 2).real(), channel(3, 3).real(),
                                         channel(0, 3).real(), channel(1, 2).real()};
                    double or_vals[6] = {oracle.w, oracle.x1, oracle.x2,
                                         oracle.y, oracle.z, oracle.c};
                    for (int k = 0; k < 6; ++k) {
                        if (std::abs(ch_vals[k] - or_vals[k]) > 1e-8) {
                            discrepancies.push_back({{"alpha", a},
                                                     {"eta", e},
                                                     {"eta_d", ed},
                                                     {"entry", entry_names[k]},
                                                     {"channel", ch_vals[k]},
                                                     {"oracle", or_vals[k]}});
                        }
                    }
                }
                per_point.push_back({{"alpha", a},
                                     {"eta", e},
                                     {"eta_d", ed},
                                     {"completeness_continuous", comp_c},
                                     {"completeness_discrete", comp_d},
                                     {"channel_vs_closed_form", d_closed},
                                     {"channel_vs_oracle", d_oracle}});
            }

            // Dilation checks on the continuous side.
            double ec = std::min(std::max(e, 1e-9), 1.0 - 1e-9);
            DilationUnitary uc = naimark_continuous(a, ec);
            max_uc_residual = std::max(max_uc_residual, uc.unitarity_residual);
            Eigen::Matrix4cd dil_c = dilate_one_side(uc, ideal_cat_matrix(), true);
            Eigen::Matrix4cd chan_c = apply_kraus_channel(
                ideal_cat_matrix(), continuous_kraus(ec, a), discrete_kraus(0.0),
                Eigen::Matrix2cd::Identity());
            max_uc_dilation_delta =
                std::max(max_uc_dilation_delta, (dil_c - chan_c).cwiseAbs().maxCoeff());
        }
    }

    nlohmann::json ud_points = nlohmann::json::array();
    for (double ed : eta_d.values()) {
        DilationUnitary raw = naimark_discrete_raw(ed);
        DilationUnitary fixed = naimark_discrete(ed);
        Eigen::Matrix4cd dil_d = dilate_one_side(fixed, ideal_cat_matrix(), false);
        Eigen::Matrix4cd chan_d = apply_kraus_channel(
            ideal_cat_matrix(), KrausSet{{Eigen::Matrix2cd::Identity()}, "identity"},
            discrete_kraus(ed), Eigen::Matrix2cd::Identity());
        double delta = (dil_d - chan_d).cwiseAbs().maxCoeff();
        max_ud_dilation_delta = std::max(max_ud_dilation_delta, delta);
        ud_points.push_back({{"eta_d", ed},
                             {"raw_unitarity_residual", raw.unitarity_residual},
                             {"unitary_variant_residual", fixed.unitarity_residual},
                             {"dilation_vs_channel", delta}});
        if (ed > 0 && ed < 1) {
            DiscreteNoiseDecomposition dec = decompose_discrete_noise(ed);
            double rec = (dec.reconstruct() - chan_d).cwiseAbs().maxCoeff();
            max_decomp_delta = std::max(max_decomp_delta, rec);
        }
    }

    report["completeness"] = {{"max_residual_continuous", max_comp_c},
                              {"max_residual_discrete", max_comp_d},
                              {"tolerance", 1e-12},
                              {"pass", max_comp_c <= 1e-12 && max_comp_d <= 1e-12}};
    report["channel_vs_closed_form"] = {{"max_entry_delta", max_channel_vs_closed},
                                        {"tolerance", 1e-10},
                                        {"pass", max_channel_vs_closed <= 1e-10}};
    report["channel_vs_oracle"] = {{"max_entry_delta", max_channel_vs_oracle},
                                   {"tolerance", 1e-8},
                                   {"pass", max_channel_vs_oracle <= 1e-8},
                                   {"discrepancies", discrepancies}};
    report["dilation"] = {
        {"continuous_max_unitarity_residual", max_uc_residual},
        {"continuous_dilation_vs_channel", max_uc_dilation_delta},
        {"continuous_pass", max_uc_residual <= 1e-8 && max_uc_dilation_delta <= 1e-10},
        {"discrete_points", ud_points},
        {"discrete_dilation_vs_channel", max_ud_dilation_delta},
        {"discrete_pass", max_ud_dilation_delta <= 1e-10},
        {"discrete_raw_note",
         "raw discrete matrix duplicates sqrt(eta_d) in row 3 and is unitary only at "
         "eta_d = 1/2; the unitary variant replaces it with sqrt(1-eta_d)"},
        {"decomposition_max_delta", max_decomp_delta},
        {"decomposition_pass", max_decomp_delta <= 1e-10}};
    report["per_point"] = per_point;
    return report;
}

} // namespace catwit
