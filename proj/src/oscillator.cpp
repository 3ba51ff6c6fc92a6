#include "qlqg/oscillator.hpp"

#include <cmath>
#include <complex>

namespace qlqg {

Mat build_g(const OscillatorParams& p) {
    // H = (omega/2)(q1^2+p1^2) + (delta/2)(q2^2+p2^2) - 2 lambda q1 q2,
    // written as x^T G x / 2. The radiation-pressure term couples the
    // position quadratures only.
    Mat g = Mat::Zero(4, 4);
    g(0, 0) = p.omega;
    g(1, 1) = p.omega;
    g(2, 2) = p.delta_detuning;
    g(3, 3) = p.delta_detuning;
    g(0, 2) = g(2, 0) = -2.0 * p.lambda;
    return g;
}

CouplingMatrix build_coupling(const OscillatorParams& p) {
    CVec c(4);
    const double amp = std::sqrt(p.kappa / 2.0);
    c << 0.0, 0.0, std::complex<double>(amp, 0.0), std::complex<double>(0.0, amp);
    return coupling_from_vector(c);
}

SystemModel apply_thermal_bath(SystemModel sys, const OscillatorParams& p) {
    Mat q = energy_weight();
    sys.extra_drift = -(p.gamma / 2.0) * q;
    sys.extra_diffusion = p.gamma * (2.0 * p.nbar + 1.0) * q;
    return sys;
}

Mat default_actuation() {
    Mat f = Mat::Zero(4, 2);
    f(0, 0) = 1.0;
    f(1, 1) = 1.0;
    return f;
}

Mat energy_weight() {
    Mat q = Mat::Zero(4, 4);
    q(0, 0) = 1.0;
    q(1, 1) = 1.0;
    return q;
}

SystemModel build_oscillator_system(const OscillatorParams& p, const NetworkConfig& cfg) {
    SystemModel sys = assemble_network(cfg, build_coupling(p), build_g(p), default_actuation());
    return apply_thermal_bath(std::move(sys), p);
}

}  // namespace qlqg
