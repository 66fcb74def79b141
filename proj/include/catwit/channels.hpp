#pragma once

#include <string>
#include <vector>

#include "catwit/catspace.hpp"

namespace catwit {

struct KrausSet {
    std::vector<Eigen::Matrix2cd> elements;
    std::string label;

    // max |sum K^dag K - 1| entry
    double completeness_residual() const;
};

// Amplitude damping on the qubit: D1 = diag(1, sqrt(1-eta_d)),
// D2 = sqrt(eta_d) |0><1|.
KrausSet discrete_kraus(double eta_d);

// Channel on the cat-coefficient space (|C+>, |C->): C1 = diag(cos ta, cos tb),
// C2 the antidiagonal (sin tb, sin ta). The angles ta, tb come from the
// damped-cat overlap factors.
KrausSet continuous_kraus(double eta, double alpha);
struct KrausAngles {
    double theta_a;
    double theta_b;
};
KrausAngles continuous_kraus_angles(double eta, double alpha);

// Transfer of cat-subspace coefficients from the alpha basis to the
// sqrt(1-eta) alpha basis, columns orthonormalized. Parity keeps the raw
// overlap matrix diagonal, so the orthonormalized transfer is the identity;
// the raw diagonal is exposed for verification.
struct BasisChange {
    Eigen::Matrix2cd u;
    Eigen::Vector2d raw_overlaps; // <C+(b)|C+(a)>, <C-(b)|C-(a)>
};
BasisChange basis_change_u(double alpha, double eta);

// rho' = sum_ij (Ci U (x) Dj) rho (Ci U (x) Dj)^dag on the 4x4 basis
// (cont (x) qubit) matching CatBasisState ordering.
Eigen::Matrix4cd apply_kraus_channel(const Eigen::Matrix4cd& rho4,
                                     const KrausSet& continuous,
                                     const KrausSet& discrete,
                                     const Eigen::Matrix2cd& u);

// The ideal hybrid state as a 4x4 in the cat basis: x1 = x2 = c = 1/2.
Eigen::Matrix4cd ideal_cat_matrix();

// Single-photon-exchange dilation unitaries on (system, reservoir) pairs,
// basis |s r> with s the 2-dim system label and r the reservoir level.
struct DilationUnitary {
    Eigen::Matrix4cd matrix;
    std::array<std::string, 4> basis_labels;
    double unitarity_residual;
    bool unitary(double tol = 1e-8) const { return unitarity_residual <= tol; }
};

// Continuous-side dilation; unitary for every eta in (0,1).
DilationUnitary naimark_continuous(double alpha, double eta);
// Discrete-side dilation as transcribed, with sqrt(eta_d) duplicated in row 3;
// only unitary at eta_d = 1/2.
DilationUnitary naimark_discrete_raw(double eta_d);
// Discrete-side dilation with the duplicate replaced by sqrt(1-eta_d).
DilationUnitary naimark_discrete(double eta_d);

struct NaimarkPair {
    DilationUnitary u_c;
    DilationUnitary u_d_raw;
    DilationUnitary u_d;
};
NaimarkPair naimark_unitaries(double alpha, const NoiseParams& noise);

// Tr_r[U (rho (x) |0><0|) U^dag] for a 2-dim system.
Eigen::Matrix2cd dilate_and_trace(const DilationUnitary& u,
                                  const Eigen::Matrix2cd& rho_sys);

// Apply a one-sided dilation to the ideal 4x4 state (continuous side when
// `continuous_side`, else discrete side).
Eigen::Matrix4cd dilate_one_side(const DilationUnitary& u,
                                 const Eigen::Matrix4cd& rho4, bool continuous_side);

// The discrete-noise state as a convex sum of an entangled and a separable
// pure state.
struct DiscreteNoiseDecomposition {
    double weight_ent;
    double weight_sep;
    Eigen::Vector4cd psi_ent;
    Eigen::Vector4cd psi_sep;

    Eigen::Matrix4cd reconstruct() const;
};
DiscreteNoiseDecomposition decompose_discrete_noise(double eta_d);

} // namespace catwit
