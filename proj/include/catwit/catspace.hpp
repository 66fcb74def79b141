#pragma once

#include <array>
#include <limits>

#include "catwit/states.hpp"

namespace catwit {

// The lossy hybrid state compressed to the damped-cat basis
// {|0>|C+(b)>, |1>|C+(b)>, |0>|C-(b)>, |1>|C-(b)>} with b = sqrt(1-eta) alpha.
// The matrix is X-shaped: populations (w, x1, x2, y) on the diagonal, z the
// outer and c the inner coherence, all real.
struct CatBasisState {
    double w = 0, x1 = 0, x2 = 0, y = 0;
    double z = 0, c = 0;
    double alpha = 0;
    double eta = 0;
    double eta_d = std::numeric_limits<double>::quiet_NaN(); // NaN when unknown

    Eigen::Matrix4cd to_matrix() const;
    static CatBasisState from_matrix(const Eigen::Matrix4cd& rho4, double alpha,
                                     double eta, double eta_d,
                                     double x_shape_tol = 1e-8);
    void validate(double tol = 1e-10) const;
};

// Orthonormal product kets of the damped-cat basis, in the order above, on
// qubit (x) Fock(cutoff).
std::array<Ket, 4> damped_cat_basis(double alpha, double eta, int cutoff,
                                    double tol = kTruncTol);

// Compress a qubit (x) Fock density operator to the damped-cat basis.
// Throws LeakageError if more than `leak_tol` of the weight lies outside the
// four-dimensional subspace.
CatBasisState project_to_cat_basis(const Operator& rho, double alpha, double eta,
                                   double leak_tol = 1e-6);

// Closed-form entries of the lossy state (vacuum ancillas only). These are
// the forms the dilation oracle reproduces; see tests for the entrywise
// comparison.
CatBasisState closed_form_entries(double alpha, const NoiseParams& noise);

// X-state concurrence max(0, 2c - 2 sqrt(w y)).
double concurrence(const CatBasisState& state);

// Wootters spin-flip concurrence of an arbitrary 4x4 two-qubit density
// matrix; independent oracle for the X-state formula.
double wootters_concurrence(const Eigen::Matrix4cd& rho4);

// Tr[(1/2 - |psi><psi|) rho] = (w + y - 2c)/2 with |psi> the maximally
// entangled ket (b2 + b3)/sqrt(2) of the same basis.
double ideal_witness_value(const CatBasisState& state);

// Pauli-like observables on the damped-cat subspace plus the qubit Paulis.
// X_C swaps |C+> and |C->, Z_C = |C-><C-| - |C+><C+|, Y_C = [Z_C, X_C]/(2i);
// the orientation is fixed by the requirement that
// (1/4)[P + sx (x) X_C - sy (x) Y_C + sz (x) Z_C] reproduces |psi><psi|
// with P the subspace projector.
struct PauliLikeOps {
    Operator x_c, y_c, z_c;           // single continuous mode, cutoff N
    Eigen::Matrix2cd sigma_x, sigma_y, sigma_z;
    Operator subspace_projector;      // |C+><C+| + |C-><C-|
};
PauliLikeOps pauli_like_ops(double alpha, double eta, int cutoff,
                            double tol = kTruncTol);

} // namespace catwit
