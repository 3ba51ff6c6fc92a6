#pragma once

#include "qlqg/network.hpp"

namespace qlqg {

// Mechanical oscillator coupled to a driven optical cavity, in units of the
// oscillator frequency. lambda is the linearized radiation-pressure
// coupling in annihilation-operator normalization, i.e. the interaction is
// -lambda (a2 + a2^dag)(a1 + a1^dag) = -2 lambda q1 q2.
struct OscillatorParams {
    double omega = 1.0;            // oscillator frequency
    double delta_detuning = 1.0;   // cavity detuning
    double lambda = 0.3;           // radiation-pressure coupling
    double kappa = 4.0;            // cavity linewidth
    double gamma = 1e-7;           // mechanical bath coupling
    double nbar = 1e5;             // bath mean occupation
};

// Hamiltonian matrix of the oscillator-cavity pair (x = q1,p1,q2,p2):
// diag blocks omega*I, delta*I and the -2 lambda q1 q2 cross coupling.
Mat build_g(const OscillatorParams& p);

// Cavity-port coupling L = sqrt(kappa) a2, i.e. c = sqrt(kappa/2) [0,0,1,i].
CouplingMatrix build_coupling(const OscillatorParams& p);

// Adds the mechanical thermal bath: extra_drift = -(gamma/2) diag{1,1,0,0},
// extra_diffusion = gamma (2 nbar + 1) diag{1,1,0,0}. The structural
// matrices are untouched.
SystemModel apply_thermal_bath(SystemModel sys, const OscillatorParams& p);

// Direct drive on both oscillator quadratures, F = [I2; 0]. Full column
// rank and, together with the cavity coupling, stabilizing.
Mat default_actuation();

// Energy weight diag{1,1,0,0} selecting the oscillator block.
Mat energy_weight();

// Full model for one network configuration: coupling + network assembly
// + thermal bath. cfg.r is the squeezing of input channel 1.
SystemModel build_oscillator_system(const OscillatorParams& p, const NetworkConfig& cfg);

}  // namespace qlqg
