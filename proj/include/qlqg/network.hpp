#pragma once

#include "qlqg/gaussian.hpp"

namespace qlqg {

// Knobs of the three-channel input network: entangling beam splitter BS1,
// loss stage on the system's output arm, recombining beam splitter BS2,
// and the two homodyne phases. Reflectivities are stored squared because
// that is what the sweeps are parameterized by.
struct NetworkConfig {
    double beta1_sq = 1.0;   // BS1 reflectivity in [0,1]
    double beta2_sq = 0.0;   // BS2 reflectivity in [0,1]
    double delta_sq = 0.0;   // loss reflectivity in [0,1]
    double theta1 = 0.0;     // homodyne phase, detector 1 (radians)
    double theta2 = 0.0;     // homodyne phase, detector 2 (radians)
    double r = 0.0;          // squeezing parameter of input channel 1
};

// System-field coupling L = c^T x, stored both as the complex vector c and
// as the stacked real form cbar = sqrt(2) [Re(c)^T; Im(c)^T].
struct CouplingMatrix {
    Mat cbar;  // 2 x 2n
    CVec c;    // 2n
};

CouplingMatrix coupling_from_vector(const CVec& c);

// 6x6 scattering matrix of a beam splitter acting on channels 1 and 2:
// [[a I, b I, 0],[-b I, a I, 0],[0, 0, I]] with b = sqrt(beta_sq),
// a = sqrt(1-beta_sq). Throws std::invalid_argument outside [0,1].
Mat beam_splitter(double beta_sq);

// 6x6 loss stage mixing channel 1 with the vacuum channel 3; channel 2
// passes through. delta_sq = 0 is lossless.
Mat loss_stage(double delta_sq);

// 2x6 homodyne selector [D1, D2, O2]: row 1 measures the theta1-quadrature
// of channel 1, row 2 the theta2-quadrature of channel 2.
Mat homodyne_selectors(double theta1, double theta2);

// Assembles the full three-channel model: B from the coupling and BS1
// split, D = [D1,D2,O2] T2 TL T1, Theta = diag{squeezed(r), vacuum, vacuum},
// and (A, C) from the structural construction. The result always passes
// validate_system; a non-empty violation list indicates an internal error
// and throws std::logic_error.
SystemModel assemble_network(const NetworkConfig& cfg, const CouplingMatrix& coupling,
                             const Mat& g, const Mat& f);

// Swaps the roles of the two detectors (permutes output rows of C and D).
// Relabeling outputs cannot change the information content of y.
SystemModel swap_detectors(SystemModel sys);

}  // namespace qlqg
