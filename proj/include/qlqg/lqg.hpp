#pragma once

#include "qlqg/filter.hpp"

namespace qlqg {

// Quadratic cost weights: running cost <x^T q x> + u^T rmat u.
struct CostWeights {
    Mat q;     // 2n x 2n symmetric PSD
    Mat rmat;  // k x k symmetric positive definite
};

struct ControlRiccatiSolution {
    Mat p;  // stationary P, symmetric PSD
    bool converged = false;
    double residual = 0.0;
    long ode_steps = 0;
    int newton_iters = 0;
};

// Stationary solution of P A + A^T P - P F R^{-1} F^T P + Q = 0 by backward
// integration of the differential form plus Newton refinement (shared
// Riccati engine). A includes the bath drift correction.
ControlRiccatiSolution control_riccati_stationary(const SystemModel& sys, const CostWeights& w,
                                                  const RiccatiOptions& opts = {});

// Complete LQG answer for one model and weight choice. When q >= 0,
// j_min >= j_cheap >= 0.
struct ControlSolution {
    Mat p_inf;       // stationary control Riccati solution
    Mat gain;        // optimal feedback on the filter estimate
    double j_min = 0.0;
    double j_cheap = 0.0;
    bool converged = false;
    double residual = 0.0;
};

ControlSolution solve_lqg(const SystemModel& sys, const CostWeights& w,
                          const CovarianceMatrix& v_inf, const RiccatiOptions& opts = {});

// Optimal state-feedback gain -R^{-1} F^T P on the filter estimate.
// Throws std::runtime_error if R is singular.
Mat optimal_gain(const Mat& p_inf, const SystemModel& sys, const CostWeights& w);

// Minimum stationary LQG cost
//   Tr(K S K^T P) + Tr(Q V),  S = D Re(Theta) D^T,
// evaluated at the stationary filter covariance and control solution.
double lqg_min_cost(const SystemModel& sys, const CostWeights& w, const CovarianceMatrix& v_inf,
                    const Mat& p_inf);

// Cheap-control lower bound Tr(Q V): the part of the cost no feedback can
// remove, reached in the R -> 0 limit for minimum-phase right-invertible
// actuation.
double cheap_bound(const CovarianceMatrix& v_inf, const Mat& q);

// Residual excitation number of the first mode under ideal cheap control:
// (V[0][0] + V[1][1] - 1) / 2. Zero for the ground state.
double e_min(const CovarianceMatrix& v_inf);

}  // namespace qlqg
