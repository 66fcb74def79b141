#include "catwit/catspace.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Eigenvalues>

namespace catwit {

Eigen::Matrix4cd CatBasisState::to_matrix() const {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = w;
    m(1, 1) = x1;
    m(2, 2) = x2;
    m(3, 3) = y;
    m(0, 3) = m(3, 0) = z;
    m(1, 2) = m(2, 1) = c;
    return m;
}

CatBasisState CatBasisState::from_matrix(const Eigen::Matrix4cd& rho4, double alpha,
                                         double eta, double eta_d, double x_shape_tol) {
    double off_x = 0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            bool x_slot = (i == j) || (i == 0 && j == 3) || (i == 3 && j == 0) ||
                          (i == 1 && j == 2) || (i == 2 && j == 1);
            if (!x_slot) off_x = std::max(off_x, std::abs(rho4(i, j)));
        }
    }
    double imag = std::max({std::abs(rho4(0, 0).imag()), std::abs(rho4(1, 1).imag()),
                            std::abs(rho4(2, 2).imag()), std::abs(rho4(3, 3).imag()),
                            std::abs(rho4(0, 3).imag()), std::abs(rho4(1, 2).imag())});
    if (off_x > x_shape_tol || imag > x_shape_tol) {
        throw NotPositive("CatBasisState: matrix is not X-shaped (residual " +
                          std::to_string(std::max(off_x, imag)) + ")");
    }
    CatBasisState s;
    s.w = rho4(0, 0).real();
    s.x1 = rho4(1, 1).real();
    s.x2 = rho4(2, 2).real();
    s.y = rho4(3, 3).real();
    s.z = rho4(0, 3).real();
    s.c = rho4(1, 2).real();
    s.alpha = alpha;
    s.eta = eta;
    s.eta_d = eta_d;
    return s;
}

void CatBasisState::validate(double tol) const {
    const double neg = -1e-12;
    if (w < neg || x1 < neg || x2 < neg || y < neg) {
        throw NotPositive("CatBasisState: negative population");
    }
    if (std::abs(w + x1 + x2 + y - 1.0) > tol) {
        throw NotPositive("CatBasisState: trace deviates from 1");
    }
    if (std::abs(z) > std::sqrt(std::max(w, 0.0) * std::max(y, 0.0)) + tol) {
        throw NotPositive("CatBasisState: |z| violates block positivity");
    }
    if (std::abs(c) > std::sqrt(std::max(x1, 0.0) * std::max(x2, 0.0)) + tol) {
        throw NotPositive("CatBasisState: |c| violates block positivity");
    }
}

std::array<Ket, 4> damped_cat_basis(double alpha, double eta, int cutoff, double tol) {
    if (alpha <= 0) throw DomainError("damped_cat_basis: alpha must be > 0");
    if (eta < 0 || eta >= 1) throw DomainError("damped_cat_basis: eta outside [0,1)");
    const double beta = std::sqrt(1.0 - eta) * alpha;
    if (beta < 1e-8) throw DegenerateCat("damped_cat_basis: damped amplitude ~ 0");
    Ket cp = cat_ket(beta, CatSign::plus, cutoff, tol);
    Ket cm = cat_ket(beta, CatSign::minus, cutoff, tol);
    ModeShape qubit{2};
    Ket q0 = basis_ket(qubit, {0});
    Ket q1 = basis_ket(qubit, {1});
    return {tensor(q0, cp), tensor(q1, cp), tensor(q0, cm), tensor(q1, cm)};
}

CatBasisState project_to_cat_basis(const Operator& rho, double alpha, double eta,
                                   double leak_tol) {
    if (rho.shape.n_modes() != 2 || rho.shape.dims[0] != 2) {
        throw ShapeMismatch("project_to_cat_basis: expected qubit (x) Fock operator");
    }
    const int cutoff = rho.shape.dims[1] - 1;
    auto basis = damped_cat_basis(alpha, eta, cutoff);
    Eigen::Matrix4cd rho4;
    for (int i = 0; i < 4; ++i) {
        Vector rb = rho.mat * basis[size_t(i)].amps;
        for (int j = 0; j < 4; ++j) {
            rho4(j, i) = basis[size_t(j)].amps.dot(rb);
        }
    }
    double kept = rho4(0, 0).real() + rho4(1, 1).real() + rho4(2, 2).real() + rho4(3, 3).real();
    double leaked = rho.mat.trace().real() - kept;
    if (leaked > leak_tol) {
        throw LeakageError("project_to_cat_basis: leaked weight " + std::to_string(leaked));
    }
    return CatBasisState::from_matrix(rho4, alpha, eta,
                                      std::numeric_limits<double>::quiet_NaN());
}

CatBasisState closed_form_entries(double alpha, const NoiseParams& noise) {
    noise.validate();
    if (noise.n_th != 0) {
        throw DomainError("closed_form_entries: only vacuum ancillas (n_th = 0)");
    }
    const double a2 = alpha * alpha;
    const double f = std::exp(-2.0 * noise.eta * a2);         // reflected-pair overlap
    const double k = std::exp(-2.0 * (1.0 - noise.eta) * a2); // transmitted-pair overlap
    const double np2 = 2.0 * (1.0 + k * f);                   // N+(alpha)^2
    const double nm2 = 2.0 * (1.0 - k * f);
    const double npnm = std::sqrt(np2 * nm2);
    const double ed = noise.eta_d;

    CatBasisState s;
    s.w = (1.0 + k) * (1.0 - f) / (2.0 * nm2) + ed * (1.0 + k) * (1.0 + f) / (2.0 * np2);
    s.x1 = (1.0 - ed) * (1.0 + k) * (1.0 + f) / (2.0 * np2);
    s.x2 = (1.0 - k) * (1.0 + f) / (2.0 * nm2) + ed * (1.0 - k) * (1.0 - f) / (2.0 * np2);
    s.y = (1.0 - ed) * (1.0 - k) * (1.0 - f) / (2.0 * np2);
    s.z = std::sqrt((1.0 + k) * (1.0 - k)) * std::sqrt(1.0 - ed) * (1.0 - f) / (2.0 * npnm);
    s.c = std::sqrt((1.0 + k) * (1.0 - k)) * std::sqrt(1.0 - ed) * (1.0 + f) / (2.0 * npnm);
    s.alpha = alpha;
    s.eta = noise.eta;
    s.eta_d = noise.eta_d;
    return s;
}

double concurrence(const CatBasisState& state) {
    state.validate();
    return std::max(0.0, 2.0 * state.c - 2.0 * std::sqrt(std::max(state.w, 0.0) *
                                                         std::max(state.y, 0.0)));
}

double wootters_concurrence(const Eigen::Matrix4cd& rho4) {
    Operator as_op{rho4, ModeShape{2, 2}};
    DensityCheck chk = check_density(as_op, 1e-10, 1e-8, 1e-8);
    if (!chk.pass) throw NotPositive("wootters_concurrence: not a density matrix");
    Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
    // sigma_y (x) sigma_y is the antidiagonal (-1, 1, 1, -1).
    yy(0, 3) = -1;
    yy(1, 2) = 1;
    yy(2, 1) = 1;
    yy(3, 0) = -1;
    Eigen::Matrix4cd r = rho4 * yy * rho4.conjugate() * yy;
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(r);
    std::array<double, 4> lam{};
    for (int i = 0; i < 4; ++i) {
        lam[size_t(i)] = std::sqrt(std::max(0.0, es.eigenvalues()[i].real()));
    }
    std::sort(lam.begin(), lam.end(), std::greater<>());
    return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

double ideal_witness_value(const CatBasisState& state) {
    state.validate();
    return (state.w + state.y - 2.0 * state.c) / 2.0;
}

PauliLikeOps pauli_like_ops(double alpha, double eta, int cutoff, double tol) {
    const double beta = std::sqrt(1.0 - eta) * alpha;
    if (beta < 1e-8) throw DegenerateCat("pauli_like_ops: damped amplitude ~ 0");
    Ket cp = cat_ket(beta, CatSign::plus, cutoff, tol);
    Ket cm = cat_ket(beta, CatSign::minus, cutoff, tol);
    Matrix pp = cp.amps * cp.amps.adjoint();
    Matrix mm = cm.amps * cm.amps.adjoint();
    Matrix pm = cp.amps * cm.amps.adjoint();
    Matrix mp = cm.amps * cp.amps.adjoint();
    ModeShape sh{cutoff + 1};

    PauliLikeOps ops;
    ops.x_c = Operator{pm + mp, sh};
    ops.z_c = Operator{mm - pp, sh};
    Matrix comm = ops.z_c.mat * ops.x_c.mat - ops.x_c.mat * ops.z_c.mat;
    ops.y_c = Operator{comm / cplx(0, 2), sh};
    ops.subspace_projector = Operator{pp + mm, sh};
    ops.sigma_x << 0, 1, 1, 0;
    ops.sigma_y << 0, cplx(0, -1), cplx(0, 1), 0;
    ops.sigma_z << 1, 0, 0, -1;
    return ops;
}

} // namespace catwit
