#pragma once

#include "qlqg/gaussian.hpp"
#include "qlqg/riccati.hpp"

namespace qlqg {

// Symmetrized error covariance of the conditional (filtered) state.
// A physical covariance satisfies v + (i/2) Sigma_n >= 0.
struct CovarianceMatrix {
    Mat v;  // 2n x 2n symmetric
};

struct FilterGain {
    Mat k;  // 2n x ell
};

// Innovation covariance D Re(Theta) D^T of the measured outputs.
Mat innovation_covariance(const SystemModel& sys);

// K = (V C^T + B Re(Theta) D^T) (D Re(Theta) D^T)^{-1}.
// Throws std::runtime_error (reporting the condition number) if the
// innovation covariance is numerically singular, i.e. the two detectors
// carry linearly dependent noise.
FilterGain kalman_gain(const CovarianceMatrix& v, const SystemModel& sys);

// Covariance flow A V + V A^T + B Re(Theta) B^T + extra_diffusion
// - K D Re(Theta) D^T K^T, with A = structural drift + extra_drift.
// The result is symmetrized to machine precision.
Mat riccati_rhs(const CovarianceMatrix& v, const SystemModel& sys);

struct StationaryCovariance {
    CovarianceMatrix v;
    bool converged = false;
    double residual = 0.0;
    long ode_steps = 0;
    int newton_iters = 0;
    std::vector<double> residual_history;
};

// Stationary solution of the covariance flow, starting from vacuum (I/2)
// unless opts.x0 says otherwise. Non-convergence is reported through the
// flag and residual history, not thrown: an unstable or undetectable
// configuration is a data error, not a programming error.
StationaryCovariance stationary_covariance(const SystemModel& sys,
                                           const RiccatiOptions& opts = {});

// No-measurement stationary covariance: solves
// A V + V A^T + B Re(Theta) B^T + extra_diffusion = 0.
// Throws std::runtime_error if the (bath-corrected) drift is not Hurwitz.
CovarianceMatrix unconditional_covariance(const SystemModel& sys);

// Diagnostics for the uncertainty-relation invariant: smallest eigenvalue
// of v + (i/2) Sigma_n. Physical states give >= 0 up to solver tolerance.
double uncertainty_min_eigenvalue(const CovarianceMatrix& v);

}  // namespace qlqg
