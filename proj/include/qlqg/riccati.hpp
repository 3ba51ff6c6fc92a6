#pragma once

#include <vector>

#include "qlqg/linalg.hpp"

namespace qlqg {

// Stationary solver for the filter-form algebraic Riccati equation
//   A X + X A^T + N - (X C^T + L) S^{-1} (C X + L^T) = 0,
// which also covers the control form by the substitution
// (A, C, S, L, N) -> (A^T, F^T, R, 0, Q).
//
// The solution is reached by adaptive explicit integration of the matrix
// Riccati ODE dX/dt = rhs(X) from x0, interleaved with Newton (Kleinman)
// refinement on the algebraic equation once the iterate stabilizes the
// closed loop. Either path must drive max|rhs| below residual_tol; the ODE
// path additionally requires it on three consecutive accepted steps.

struct RiccatiOptions {
    double residual_tol = 1e-10;  // max-norm of the algebraic residual
    double rel_tol = 1e-9;        // ODE step error control (relative)
    double abs_tol = 1e-12;       // ODE step error control (absolute)
    double max_time = 1e6;        // pseudo-time budget for the ODE
    long max_steps = 200000;      // accepted-step budget
    double newton_after = 0.25;   // pseudo-time before first Newton attempt
    int newton_every = 8;         // accepted steps between Newton attempts
    int newton_max_iters = 80;
    bool use_newton = true;
    Mat x0;                       // initial condition; empty = caller default
};

struct RiccatiSolution {
    Mat x;
    bool converged = false;
    double residual = 0.0;        // max|rhs| at x
    long ode_steps = 0;           // accepted ODE steps
    int newton_iters = 0;         // Kleinman iterations in the final attempt
    std::vector<double> residual_history;
};

RiccatiSolution solve_stationary_riccati(const Mat& a, const Mat& c, const Mat& s,
                                         const Mat& l, const Mat& n_const,
                                         const RiccatiOptions& opts);

}  // namespace qlqg
