#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "catwit/channels.hpp"
#include "catwit/witness.hpp"

#include "json.hpp"

namespace catwit {

inline constexpr const char* kVersion = "0.1.0";

struct Range {
    double lo = 0;
    double hi = 1;
    int steps = 2; // number of grid points, >= 2

    std::vector<double> values() const;
    // "lo:hi:steps"
    static Range parse(const std::string& text);
};

// Long-format result grid: one row per point, with run metadata carried in
// `meta` and reproduced in every output header.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    nlohmann::json meta;
};

// CSV with '#' header lines holding the metadata, 12 significant digits.
void write_csv(std::ostream& os, const Table& table);
void write_json(std::ostream& os, const Table& table);

// Deterministic worker pool: results land in row-major order regardless of
// scheduling.
void parallel_for(long n, int threads, const std::function<void(long)>& fn);

// Concurrence over an (eta, eta_d) grid at fixed alpha, or over
// (alpha, eta = eta_d). `value` is the raw 2c - 2 sqrt(wy); a clipped column
// is appended when `clip` is set.
Table concurrence_grid(double alpha, const Range& eta, const Range& eta_d, bool clip,
                       int threads);
Table concurrence_alpha_diag(const Range& alpha, const Range& eta, bool clip, int threads);

// -Tr[W rho] over the same grids (sign flipped to compare with concurrence).
Table witness_grid(double alpha, const Range& eta, const Range& eta_d, bool clip,
                   int threads);
Table witness_alpha_diag(const Range& alpha, const Range& eta, bool clip, int threads);

// Tr[W~ rho] along eta = eta_d, Fock-space expectations. Scales default to
// the certified config for `levels` Fock basis states.
Table quadrature_witness_sweep(double alpha, int levels, std::optional<double> n_x,
                               std::optional<double> n_y, const Range& eta_diag,
                               std::optional<int> cutoff, int threads);

Table critical_noise_table(const std::vector<double>& alphas, int levels_lo,
                           int levels_hi, BoundMethod method, double tol, int threads);

Table f_table(int n_lo, int n_hi, bool include_bruteforce);

// Verification report for the channel picture: Kraus completeness, channel
// vs closed form, channel vs the dilation oracle, dilation-unitary checks.
nlohmann::json kraus_verify_report(const std::vector<double>& alphas, const Range& eta,
                                   const Range& eta_d);

} // namespace catwit
