#pragma once

#include "catwit/fock.hpp"

namespace catwit {

// Loss fractions per channel and thermal occupancy of the ancilla field.
struct NoiseParams {
    double eta = 0;   // continuous-channel intensity loss
    double eta_d = 0; // discrete-channel intensity loss
    double n_th = 0;  // ancilla mean thermal photon number

    void validate() const;
};

// (|0>|C-(alpha)> + |1>|C+(alpha)>)/sqrt(2) on qubit (x) Fock(cutoff).
// Mode order: qubit first.
Ket ideal_hybrid_state(double alpha, int cutoff, double tol = kTruncTol);

// Fock-diagonal thermal state with populations ~ (n_th/(1+n_th))^n.
Operator thermal_state(double n_th, int cutoff, double tol = kTruncTol);

// Smallest cutoff whose geometric tail stays below tol.
int thermal_cutoff(double n_th, double tol = kTruncTol);

// Lossy hybrid state by explicit dilation: a beam splitter with a vacuum or
// thermal ancilla on the continuous mode, the two-level loss map
// |1> -> sqrt(1-eta_d)|1>|0> + sqrt(eta_d)|0>|1> on the qubit, reflected
// modes traced out. With n_th > 0 the output Fock cutoff grows by the
// thermal ancilla cutoff.
Operator noisy_hybrid_state(double alpha, const NoiseParams& noise, int cutoff,
                            double tol = kTruncTol);

// Mean thermal occupation 1/(exp(h nu / kB T) - 1).
double thermal_occupation(double frequency_hz, double temperature_k);

inline constexpr double kPlanck = 6.62607015e-34;    // J s
inline constexpr double kBoltzmann = 1.380649e-23;   // J / K

// Default Fock cutoff used by sweeps for a given amplitude.
int default_cutoff(double alpha, double tol = kTruncTol);

} // namespace catwit
