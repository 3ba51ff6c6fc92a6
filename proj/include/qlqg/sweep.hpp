#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qlqg/lqg.hpp"
#include "qlqg/oscillator.hpp"

namespace qlqg {

// One reflectivity sweep: for each beta1^2 grid point the two homodyne
// phases are optimized and the cheap-control energy is recorded.
struct SweepSpec {
    std::vector<double> beta1_sq_grid;
    double beta2_sq = 0.0;
    double delta_sq = 0.9;
    int phase_grid_points = 24;  // per axis, uniform on [0, pi)
    int refine_iters = 30;       // coordinate-descent refinement budget
    OscillatorParams model;
    double r = 2.3;              // input squeezing
};

std::vector<double> uniform_grid(double lo, double hi, int points);

struct SweepRow {
    double beta1_sq = 0.0;
    double theta1_opt = 0.0;
    double theta2_opt = 0.0;
    double e_min = 0.0;
    double cheap_bound = 0.0;  // Tr(Q V) = 2 e_min + 1
    double residual = 0.0;     // Riccati residual at the optimum
    bool converged = false;
    // Diagnostics, not serialized:
    Mat v_inf;
    bool drift_hurwitz = false;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    int failures = 0;
};

struct PhaseOptimum {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double e_min = 0.0;
    bool converged = false;
    double residual = 0.0;
    Mat v_inf;
};

// Minimizes e_min over the two homodyne phases: exhaustive grid on
// [0, pi)^2 (the objective is pi-periodic) followed by deterministic
// coordinate descent with interval halving. cfg's phases are ignored.
PhaseOptimum optimize_phases(const OscillatorParams& model, NetworkConfig cfg,
                             int grid_points, int refine_iters);

// Evaluates every grid row (concurrently if threads > 1). Row order and
// content are deterministic and independent of the thread count; per-row
// failures are flagged, not fatal. Progress goes to `log` if non-null.
SweepResult run_sweep(const SweepSpec& spec, int threads = 1, std::ostream* log = nullptr);

// CSV serialization: fixed column order, 12 significant digits,
// byte-deterministic for identical results.
std::string to_csv(const SweepResult& result);
void emit_csv(const SweepResult& result, const std::string& path);

// Flat key = value configuration file (# starts a comment). Unknown keys
// are rejected. Returns the sweep spec plus the output path.
struct SweepConfig {
    SweepSpec spec;
    std::string output = "sweep.csv";
};

SweepConfig parse_config(std::istream& in);
SweepConfig load_config(const std::string& path);

}  // namespace qlqg
