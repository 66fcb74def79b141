#include "catwit/states.hpp"

#include <cmath>

namespace catwit {

void NoiseParams::validate() const {
    if (eta < 0 || eta > 1) throw DomainError("NoiseParams: eta outside [0,1]");
    if (eta_d < 0 || eta_d > 1) throw DomainError("NoiseParams: eta_d outside [0,1]");
    if (n_th < 0) throw DomainError("NoiseParams: n_th < 0");
}

Ket ideal_hybrid_state(double alpha, int cutoff, double tol) {
    if (alpha <= 0) throw DomainError("ideal_hybrid_state: alpha must be > 0");
    Ket minus = cat_ket(alpha, CatSign::minus, cutoff, tol);
    Ket plus = cat_ket(alpha, CatSign::plus, cutoff, tol);
    const int d = cutoff + 1;
    Vector amps = Vector::Zero(2 * d);
    amps.head(d) = minus.amps / std::sqrt(2.0);  // qubit |0>
    amps.tail(d) = plus.amps / std::sqrt(2.0);   // qubit |1>
    return Ket{std::move(amps), ModeShape{2, d}};
}

int thermal_cutoff(double n_th, double tol) {
    if (n_th <= 0) return 1;
    const double q = n_th / (1.0 + n_th);
    int n = 1;
    // tail mass beyond level n is q^{n+1}
    while (std::pow(q, n + 1) >= tol && n < 4096) ++n;
    return n;
}

Operator thermal_state(double n_th, int cutoff, double tol) {
    if (n_th < 0) throw DomainError("thermal_state: n_th < 0");
    const int d = cutoff + 1;
    Matrix rho = Matrix::Zero(d, d);
    if (n_th == 0) {
        rho(0, 0) = 1.0;
        return Operator{std::move(rho), ModeShape{d}};
    }
    const double q = n_th / (1.0 + n_th);
    if (std::pow(q, cutoff + 1) >= tol) {
        throw CutoffTooSmall("thermal_state: geometric tail above tolerance");
    }
    double p = 1.0 - q;
    double sum = 0;
    for (int n = 0; n <= cutoff; ++n) {
        rho(n, n) = p;
        sum += p;
        p *= q;
    }
    rho /= sum;
    return Operator{std::move(rho), ModeShape{d}};
}

Operator noisy_hybrid_state(double alpha, const NoiseParams& noise, int cutoff,
                            double tol) {
    noise.validate();
    const int n_anc = noise.n_th > 0 ? thermal_cutoff(noise.n_th, tol) : 0;
    const int nj = cutoff + n_anc; // joint cutoff keeps every photon block exact
    const int dj = nj + 1;

    Ket psi0 = ideal_hybrid_state(alpha, cutoff, tol);
    // Pad the continuous mode to the joint cutoff.
    Vector padded = Vector::Zero(2 * dj);
    padded.segment(0, cutoff + 1) = psi0.amps.head(cutoff + 1);
    padded.segment(dj, cutoff + 1) = psi0.amps.tail(cutoff + 1);

    // Two-level loss map on the qubit: [qt(2), qr(2), c(dj)].
    const double td = std::sqrt(1.0 - noise.eta_d);
    const double rd = std::sqrt(noise.eta_d);
    Vector split = Vector::Zero(long(4) * dj);
    split.segment(0, dj) = padded.head(dj);             // |0>|0>
    split.segment(long(2) * dj, dj) = td * padded.tail(dj); // |1>|0>
    split.segment(long(1) * dj, dj) = rd * padded.tail(dj); // |0>|1>
    Ket branched{std::move(split), ModeShape{2, 2, dj}};

    Operator bs = beamsplitter_unitary(noise.eta, nj);

    std::vector<double> anc_weights;
    if (noise.n_th == 0) {
        anc_weights = {1.0};
    } else {
        Operator th = thermal_state(noise.n_th, n_anc, tol);
        for (int n = 0; n <= n_anc; ++n) anc_weights.push_back(th.mat(n, n).real());
    }

    Matrix rho_out = Matrix::Zero(2 * dj, 2 * dj);
    for (size_t n = 0; n < anc_weights.size(); ++n) {
        Ket anc = basis_ket(ModeShape{dj}, {int(n)});
        Ket joint = tensor(branched, anc); // [qt, qr, c, anc]
        Ket mixed = apply_on_modes(bs, joint, 2, 2);
        Operator red = partial_trace_pure(mixed, {0, 2});
        rho_out += anc_weights[n] * red.mat;
    }
    return Operator{std::move(rho_out), ModeShape{2, dj}};
}

double thermal_occupation(double frequency_hz, double temperature_k) {
    if (frequency_hz <= 0 || temperature_k <= 0) {
        throw DomainError("thermal_occupation: frequency and temperature must be > 0");
    }
    const double x = kPlanck * frequency_hz / (kBoltzmann * temperature_k);
    return 1.0 / std::expm1(x);
}

int default_cutoff(double alpha, double tol) {
    return std::max(20, coherent_cutoff(alpha, tol));
}

} // namespace catwit
