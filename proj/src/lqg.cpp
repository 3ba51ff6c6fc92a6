#include "qlqg/lqg.hpp"

#include <stdexcept>

namespace qlqg {

ControlRiccatiSolution control_riccati_stationary(const SystemModel& sys, const CostWeights& w,
                                                  const RiccatiOptions& opts) {
    const int dim = 2 * sys.n;
    if (w.q.rows() != dim || w.q.cols() != dim)
        throw std::invalid_argument("control_riccati_stationary: Q must be 2n x 2n");
    if (w.rmat.rows() != sys.f.cols() || w.rmat.cols() != sys.f.cols())
        throw std::invalid_argument("control_riccati_stationary: R size must match actuation");

    RiccatiOptions local = opts;
    if (local.x0.size() == 0) local.x0 = Mat::Zero(dim, dim);  // terminal condition

    // Dual of the filter form: (A, C, S, L, N) -> (A^T, F^T, R, 0, Q).
    RiccatiSolution core = solve_stationary_riccati(
        sys.effective_drift().transpose(), sys.f.transpose(), w.rmat,
        Mat::Zero(dim, sys.f.cols()), symmetrize(w.q), local);

    ControlRiccatiSolution out;
    out.p = std::move(core.x);
    out.converged = core.converged;
    out.residual = core.residual;
    out.ode_steps = core.ode_steps;
    out.newton_iters = core.newton_iters;
    return out;
}

ControlSolution solve_lqg(const SystemModel& sys, const CostWeights& w,
                          const CovarianceMatrix& v_inf, const RiccatiOptions& opts) {
    ControlRiccatiSolution riccati = control_riccati_stationary(sys, w, opts);
    ControlSolution out;
    out.p_inf = riccati.p;
    out.converged = riccati.converged;
    out.residual = riccati.residual;
    if (riccati.converged) {
        out.gain = optimal_gain(riccati.p, sys, w);
        out.j_min = lqg_min_cost(sys, w, v_inf, riccati.p);
        out.j_cheap = cheap_bound(v_inf, w.q);
    }
    return out;
}

Mat optimal_gain(const Mat& p_inf, const SystemModel& sys, const CostWeights& w) {
    Eigen::FullPivLU<Mat> lu(w.rmat);
    if (!lu.isInvertible()) throw std::runtime_error("optimal_gain: singular control weight R");
    return -lu.solve(sys.f.transpose() * p_inf);
}

double lqg_min_cost(const SystemModel& sys, const CostWeights& w, const CovarianceMatrix& v_inf,
                    const Mat& p_inf) {
    Mat s = innovation_covariance(sys);
    Mat k = kalman_gain(v_inf, sys).k;
    return (k * s * k.transpose() * p_inf).trace() + cheap_bound(v_inf, w.q);
}

double cheap_bound(const CovarianceMatrix& v_inf, const Mat& q) {
    return (q * v_inf.v).trace();
}

double e_min(const CovarianceMatrix& v_inf) {
    return (v_inf.v(0, 0) + v_inf.v(1, 1) - 1.0) / 2.0;
}

}  // namespace qlqg
