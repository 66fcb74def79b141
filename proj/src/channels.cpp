#include "catwit/channels.hpp"

#include <algorithm>
#include <cmath>

namespace catwit {

namespace {

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::Matrix4cd out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

double clamped_acos(double x, const char* what) {
    if (x > 1.0 + 1e-12 || x < -1.0 - 1e-12) {
        throw DomainError(std::string(what) + ": arccos argument " + std::to_string(x));
    }
    return std::acos(std::clamp(x, -1.0, 1.0));
}

} // namespace

double KrausSet::completeness_residual() const {
    Eigen::Matrix2cd acc = Eigen::Matrix2cd::Zero();
    for (const auto& k : elements) acc += k.adjoint() * k;
    return (acc - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
}

KrausSet discrete_kraus(double eta_d) {
    if (eta_d < 0 || eta_d > 1) throw DomainError("discrete_kraus: eta_d outside [0,1]");
    Eigen::Matrix2cd d1 = Eigen::Matrix2cd::Zero(), d2 = Eigen::Matrix2cd::Zero();
    d1(0, 0) = 1;
    d1(1, 1) = std::sqrt(1.0 - eta_d);
    d2(0, 1) = std::sqrt(eta_d);
    return KrausSet{{d1, d2}, "discrete"};
}

KrausAngles continuous_kraus_angles(double eta, double alpha) {
    const double a2 = alpha * alpha;
    const double k = std::exp(-2.0 * (1.0 - eta) * a2);
    const double f = std::exp(-2.0 * eta * a2);
    const double np = std::sqrt(2.0 * (1.0 + k * f));
    const double nm = std::sqrt(2.0 * (1.0 - k * f));
    double ca = std::sqrt((1.0 + k) * (1.0 + f)) / np;
    double cb = std::sqrt((1.0 - k) * (1.0 + f)) / nm;
    return KrausAngles{clamped_acos(ca, "continuous_kraus theta_a"),
                       clamped_acos(cb, "continuous_kraus theta_b")};
}

KrausSet continuous_kraus(double eta, double alpha) {
    if (eta < 0 || eta > 1) throw DomainError("continuous_kraus: eta outside [0,1]");
    if (alpha <= 0) throw DomainError("continuous_kraus: alpha must be > 0");
    KrausAngles th = continuous_kraus_angles(eta, alpha);
    Eigen::Matrix2cd c1 = Eigen::Matrix2cd::Zero(), c2 = Eigen::Matrix2cd::Zero();
    c1(0, 0) = std::cos(th.theta_a);
    c1(1, 1) = std::cos(th.theta_b);
    c2(0, 1) = std::sin(th.theta_b);
    c2(1, 0) = std::sin(th.theta_a);
    return KrausSet{{c1, c2}, "continuous"};
}

BasisChange basis_change_u(double alpha, double eta) {
    if (alpha <= 0) throw DomainError("basis_change_u: alpha must be > 0");
    if (eta < 0 || eta >= 1) throw DomainError("basis_change_u: eta outside [0,1)");
    const double beta = std::sqrt(1.0 - eta) * alpha;
    if (beta < 1e-8) throw DegenerateCat("basis_change_u: damped amplitude ~ 0");
    auto pair_overlap = [](double a, double b, CatSign s) {
        double direct = std::exp(-(a - b) * (a - b) / 2.0);
        double cross = std::exp(-(a + b) * (a + b) / 2.0);
        double num = s == CatSign::plus ? 2.0 * (direct + cross) : 2.0 * (direct - cross);
        return num / (cat_normalizer(a, s) * cat_normalizer(b, s));
    };
    BasisChange bc;
    bc.raw_overlaps[0] = pair_overlap(beta, alpha, CatSign::plus);
    bc.raw_overlaps[1] = pair_overlap(beta, alpha, CatSign::minus);
    bc.u = Eigen::Matrix2cd::Zero();
    bc.u(0, 0) = bc.raw_overlaps[0] / std::abs(bc.raw_overlaps[0]);
    bc.u(1, 1) = bc.raw_overlaps[1] / std::abs(bc.raw_overlaps[1]);
    return bc;
}

Eigen::Matrix4cd apply_kraus_channel(const Eigen::Matrix4cd& rho4,
                                     const KrausSet& continuous,
                                     const KrausSet& discrete,
                                     const Eigen::Matrix2cd& u) {
    if (continuous.completeness_residual() > 1e-10 ||
        discrete.completeness_residual() > 1e-10) {
        throw IncompleteKraus("apply_kraus_channel: completeness violated");
    }
    Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
    for (const auto& c : continuous.elements) {
        for (const auto& d : discrete.elements) {
            Eigen::Matrix4cd k = kron2(c * u, d);
            out += k * rho4 * k.adjoint();
        }
    }
    return out;
}

Eigen::Matrix4cd ideal_cat_matrix() {
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
    rho(1, 1) = rho(2, 2) = 0.5;
    rho(1, 2) = rho(2, 1) = 0.5;
    return rho;
}

namespace {

double unitarity_residual(const Eigen::Matrix4cd& m) {
    return (m.adjoint() * m - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff();
}

} // namespace

DilationUnitary naimark_continuous(double alpha, double eta) {
    if (eta <= 0 || eta >= 1) throw DomainError("naimark_continuous: eta outside (0,1)");
    const double a2 = alpha * alpha;
    const double k = std::exp(-2.0 * (1.0 - eta) * a2);
    const double f = std::exp(-2.0 * eta * a2);
    const double np = std::sqrt(2.0 * (1.0 + k * f));
    const double nm = std::sqrt(2.0 * (1.0 - k * f));
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = std::sqrt((1 + k) * (1 + f)) / np;
    m(0, 3) = std::sqrt((1 - k) * (1 - f)) / np;
    m(1, 1) = std::sqrt((1 - k) * (1 + f)) / nm;
    m(1, 2) = std::sqrt((1 + k) * (1 - f)) / nm;
    m(2, 1) = -std::sqrt((1 + k) * (1 - f)) / nm;
    m(2, 2) = std::sqrt((1 - k) * (1 + f)) / nm;
    m(3, 0) = -std::sqrt((1 - k) * (1 - f)) / np;
    m(3, 3) = std::sqrt((1 + k) * (1 + f)) / np;
    DilationUnitary u{m, {"+0", "+1", "-0", "-1"}, 0};
    u.unitarity_residual = unitarity_residual(m);
    return u;
}

DilationUnitary naimark_discrete_raw(double eta_d) {
    if (eta_d < 0 || eta_d > 1) throw DomainError("naimark_discrete_raw: eta_d outside [0,1]");
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity();
    m(1, 1) = std::sqrt(1.0 - eta_d);
    m(1, 2) = std::sqrt(eta_d);
    m(2, 1) = -std::sqrt(eta_d);
    m(2, 2) = std::sqrt(eta_d);
    DilationUnitary u{m, {"+0", "+1", "-0", "-1"}, 0};
    u.unitarity_residual = unitarity_residual(m);
    return u;
}

DilationUnitary naimark_discrete(double eta_d) {
    if (eta_d < 0 || eta_d > 1) throw DomainError("naimark_discrete: eta_d outside [0,1]");
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity();
    m(1, 1) = std::sqrt(1.0 - eta_d);
    m(1, 2) = std::sqrt(eta_d);
    m(2, 1) = -std::sqrt(eta_d);
    m(2, 2) = std::sqrt(1.0 - eta_d);
    DilationUnitary u{m, {"+0", "+1", "-0", "-1"}, 0};
    u.unitarity_residual = unitarity_residual(m);
    return u;
}

NaimarkPair naimark_unitaries(double alpha, const NoiseParams& noise) {
    noise.validate();
    return NaimarkPair{naimark_continuous(alpha, noise.eta),
                       naimark_discrete_raw(noise.eta_d), naimark_discrete(noise.eta_d)};
}

Eigen::Matrix2cd dilate_and_trace(const DilationUnitary& u,
                                  const Eigen::Matrix2cd& rho_sys) {
    // Joint basis |s r>, index 2 s + r, reservoir starts in |0>.
    Eigen::Matrix4cd joint = Eigen::Matrix4cd::Zero();
    for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2) joint(2 * s1, 2 * s2) = rho_sys(s1, s2);
    Eigen::Matrix4cd evolved = u.matrix * joint * u.matrix.adjoint();
    Eigen::Matrix2cd out;
    for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2)
            out(s1, s2) = evolved(2 * s1, 2 * s2) + evolved(2 * s1 + 1, 2 * s2 + 1);
    return out;
}

Eigen::Matrix4cd dilate_one_side(const DilationUnitary& u,
                                 const Eigen::Matrix4cd& rho4, bool continuous_side) {
    // rho4 lives on (cont (x) qubit), index 2 c + q. Dilate one factor with a
    // 2-dim reservoir in |0>, apply u on (factor, reservoir), trace it out.
    Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
    // Treat the 4x4 as a (2x2x2x2) tensor and contract u on the chosen slot.
    auto idx = [](int c, int q) { return 2 * c + q; };
    for (int c1 = 0; c1 < 2; ++c1)
        for (int q1 = 0; q1 < 2; ++q1)
            for (int c2 = 0; c2 < 2; ++c2)
                for (int q2 = 0; q2 < 2; ++q2) {
                    cplx val = rho4(idx(c1, q1), idx(c2, q2));
                    if (val == cplx(0, 0)) continue;
                    for (int r = 0; r < 2; ++r) {
                        for (int s1 = 0; s1 < 2; ++s1)
                            for (int s2 = 0; s2 < 2; ++s2) {
                                if (continuous_side) {
                                    cplx amp = u.matrix(2 * s1 + r, 2 * c1) *
                                               std::conj(u.matrix(2 * s2 + r, 2 * c2));
                                    out(idx(s1, q1), idx(s2, q2)) += amp * val;
                                } else {
                                    cplx amp = u.matrix(2 * s1 + r, 2 * q1) *
                                               std::conj(u.matrix(2 * s2 + r, 2 * q2));
                                    out(idx(c1, s1), idx(c2, s2)) += amp * val;
                                }
                            }
                    }
                }
    return out;
}

Eigen::Matrix4cd DiscreteNoiseDecomposition::reconstruct() const {
    return weight_ent * (psi_ent * psi_ent.adjoint()) +
           weight_sep * (psi_sep * psi_sep.adjoint());
}

DiscreteNoiseDecomposition decompose_discrete_noise(double eta_d) {
    if (eta_d <= 0 || eta_d >= 1) {
        throw DomainError("decompose_discrete_noise: eta_d outside (0,1)");
    }
    DiscreteNoiseDecomposition d;
    d.weight_ent = (1.0 + (1.0 - eta_d)) / 2.0;
    d.weight_sep = (1.0 - (1.0 - eta_d)) / 2.0;
    // Basis (cont (x) qubit): b1 = |C+>|0>, b2 = |C+>|1>, b3 = |C->|0>, b4 = |C->|1>.
    d.psi_ent = Eigen::Vector4cd::Zero();
    d.psi_ent[2] = 1.0;                       // |0>|C->
    d.psi_ent[1] = std::sqrt(1.0 - eta_d);    // |1>|C+>
    d.psi_ent /= std::sqrt(2.0 - eta_d);
    d.psi_sep = Eigen::Vector4cd::Zero();
    d.psi_sep[0] = 1.0;                       // |0>|C+>
    return d;
}

} // namespace catwit
