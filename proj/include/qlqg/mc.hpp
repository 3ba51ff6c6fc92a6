#pragma once

#include <cstdint>
#include <vector>

#include "qlqg/filter.hpp"

namespace qlqg {

// Everything here treats the model as a classical Gaussian system: means
// and symmetrized covariances of the quantum model obey exactly these
// equations, with the quantum character entering only through Re(Theta)
// and the structural constraints on (A, B, C, D). No operator dynamics are
// simulated.

struct MeasurementRecord {
    double dt = 0.0;
    std::vector<Vec> dy;   // ell-dim increments
    std::uint64_t seed = 0;
    std::vector<Vec> du;   // applied control; empty = zero
};

struct SimulatedTrajectory {
    std::vector<Vec> x;    // states x_0..x_N (N = steps)
    MeasurementRecord record;  // dy_0..dy_{N-1}
};

// Euler-Maruyama simulation of dx = A x dt + B dW (+ bath diffusion),
// dy = C x dt + D dW, with dW ~ N(0, Re(Theta) dt). Deterministic for a
// fixed seed (counter-based generator). Throws std::invalid_argument for
// an unstable drift or a step too coarse for it (|A| dt > 0.1).
SimulatedTrajectory simulate_classical_analog(const SystemModel& sys, double horizon, double dt,
                                              std::uint64_t seed);

// Discrete filter recursion with a fixed gain:
// pi_{k+1} = pi_k + A pi_k dt + F u_k dt + K (dy_k - C pi_k dt).
// Returns pi_0..pi_N aligned with the state path (pi_0 = x0_estimate = 0).
std::vector<Vec> run_filter(const MeasurementRecord& record, const SystemModel& sys,
                            const FilterGain& gain);

struct EmpiricalCovariance {
    Mat cov;       // symmetrized sample covariance of x - pi
    Mat se;        // per-entry bootstrap standard error
    long samples = 0;
};

// Pools post-burn-in samples of x - pi across trajectories; standard
// errors are bootstrapped over trajectories (resampling whole trajectories
// respects within-trajectory correlation). Throws std::invalid_argument on
// fewer than 2 trajectories or burn_in >= path length.
EmpiricalCovariance empirical_error_covariance(const std::vector<std::vector<Vec>>& states,
                                               const std::vector<std::vector<Vec>>& estimates,
                                               int burn_in);

struct McOptions {
    int trajectories = 2000;
    std::uint64_t seed = 1;
    double dt = 1e-3;
    double horizon = 0.0;      // 0 = auto from the filter relaxation rate
    int tail_window = 50;      // tail samples kept per trajectory
    int threads = 1;
    int bootstrap_resamples = 200;
};

struct McReport {
    Mat v_expected;        // stationary Riccati solution
    Mat v_empirical;
    Mat v_se;
    double v_max_dev_se = 0.0;       // max |emp - exp| / SE over entries
    Mat innovation_expected;         // D Re(Theta) D^T dt
    Mat innovation_empirical;
    Mat innovation_se;
    double innovation_max_dev_se = 0.0;
    double lag1_max_dev_se = 0.0;    // lag-1 innovation autocorrelation
    double relaxation_rate = 0.0;    // |max Re eig(A - K C)|
    double horizon = 0.0;
    long steps_per_trajectory = 0;
    bool covariance_ok = false;      // v_max_dev_se < 5
    bool whiteness_ok = false;       // innovation_max_dev_se < 5
    bool lag1_ok = false;            // lag1_max_dev_se < 3
    bool passed() const { return covariance_ok && whiteness_ok && lag1_ok; }
};

// Streaming many-trajectory check of the stationary filter: empirical
// error covariance against the Riccati solution and innovation whiteness.
// Trajectory seeds derive from (seed, index), so the result is independent
// of the thread count.
McReport mc_check(const SystemModel& sys, const McOptions& opts);

}  // namespace qlqg
