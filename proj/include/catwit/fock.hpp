#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "catwit/errors.hpp"

namespace catwit {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Default truncation tolerance: a constructed state may lose at most this
// much squared norm to the cutoff.
inline constexpr double kTruncTol = 1e-10;

// Ordered list of per-mode dimensions of a tensor-product space. Mode 0 is
// the slowest-varying index (Kronecker convention).
struct ModeShape {
    std::vector<int> dims;

    ModeShape() = default;
    ModeShape(std::initializer_list<int> d) : dims(d) {}
    explicit ModeShape(std::vector<int> d) : dims(std::move(d)) {}

    int n_modes() const { return static_cast<int>(dims.size()); }
    long dim() const;
    std::vector<long> strides() const;

    bool operator==(const ModeShape& other) const { return dims == other.dims; }
};

struct Ket {
    Vector amps;
    ModeShape shape;

    double norm() const { return amps.norm(); }
    void normalize() { amps /= amps.norm(); }
};

struct Operator {
    Matrix mat;
    ModeShape shape;
};

cplx overlap(const Ket& a, const Ket& b);
Operator outer(const Ket& a, const Ket& b);

// Hermiticity/trace/positivity checks for density operators.
struct DensityCheck {
    double hermiticity_residual = 0;
    double trace_deviation = 0;
    double min_eigenvalue = 0;
    bool pass = false;
};
DensityCheck check_density(const Operator& rho, double herm_tol = 1e-12,
                           double trace_tol = kTruncTol, double eig_tol = 1e-10);
void assert_density(const Operator& rho, double herm_tol = 1e-12,
                    double trace_tol = kTruncTol, double eig_tol = 1e-10);

// Smallest cutoff N such that the Poisson tail of |alpha> beyond N stays
// below tol.
int coherent_cutoff(double alpha, double tol = kTruncTol);

Ket coherent_ket(double alpha, int cutoff, double tol = kTruncTol);

enum class CatSign { plus, minus };
Ket cat_ket(double alpha, CatSign sign, int cutoff, double tol = kTruncTol);

// Cat normalizer sqrt(2 (1 +/- exp(-2 alpha^2))), so <C|C> = 1.
double cat_normalizer(double alpha, CatSign sign);

struct LadderOps {
    Operator a;
    Operator a_dagger;
    Operator number;
};
LadderOps ladder_ops(int cutoff);

// Two-mode beam splitter on Fock(cutoff) x Fock(cutoff) mapping
// |alpha>|0> -> |sqrt(1-eta) alpha>|sqrt(eta) alpha>. Exact on every
// total-photon block that fits the cutoff.
Operator beamsplitter_unitary(double eta, int cutoff);

Ket tensor(const Ket& a, const Ket& b);
Operator tensor(const std::vector<Operator>& ops);
Operator tensor(const Operator& a, const Operator& b);

// Trace out all modes not listed in `keep`; kept modes stay in their
// original order.
Operator partial_trace(const Operator& rho, const std::vector<int>& keep);
// Same reduction directly from a pure state, without forming |psi><psi|.
Operator partial_trace_pure(const Ket& psi, const std::vector<int>& keep);

// Apply `u` to `n_modes` consecutive modes of `psi` starting at `first_mode`.
Ket apply_on_modes(const Operator& u, const Ket& psi, int first_mode, int n_modes);

Operator identity_op(const ModeShape& shape);
Ket basis_ket(const ModeShape& shape, const std::vector<int>& levels);

} // namespace catwit
