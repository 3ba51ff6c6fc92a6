#include "qlqg/filter.hpp"

#include <sstream>
#include <stdexcept>

namespace qlqg {

Mat innovation_covariance(const SystemModel& sys) {
    return symmetrize(sys.d * sys.noise.re_theta * sys.d.transpose());
}

FilterGain kalman_gain(const CovarianceMatrix& v, const SystemModel& sys) {
    Mat s = innovation_covariance(sys);
    double cond = condition_number(s);
    if (!(cond < 1e12)) {
        std::ostringstream os;
        os << "kalman_gain: degenerate measurement, innovation covariance has condition number "
           << cond;
        throw std::runtime_error(os.str());
    }
    Mat m = v.v * sys.c.transpose() + sys.b * sys.noise.re_theta * sys.d.transpose();
    FilterGain g;
    g.k = s.ldlt().solve(m.transpose()).transpose();
    return g;
}

Mat riccati_rhs(const CovarianceMatrix& v, const SystemModel& sys) {
    const Mat a = sys.effective_drift();
    Mat s = innovation_covariance(sys);
    Mat k = kalman_gain(v, sys).k;
    Mat r = a * v.v + v.v * a.transpose() + sys.b * sys.noise.re_theta * sys.b.transpose() -
            k * s * k.transpose();
    if (sys.extra_diffusion.size() > 0) r += sys.extra_diffusion;
    return symmetrize(r);
}

StationaryCovariance stationary_covariance(const SystemModel& sys, const RiccatiOptions& opts) {
    const int dim = 2 * sys.n;
    RiccatiOptions local = opts;
    if (local.x0.size() == 0) local.x0 = 0.5 * Mat::Identity(dim, dim);  // vacuum

    Mat n_const = symmetrize(sys.b * sys.noise.re_theta * sys.b.transpose());
    if (sys.extra_diffusion.size() > 0) n_const += sys.extra_diffusion;
    Mat l = sys.b * sys.noise.re_theta * sys.d.transpose();

    RiccatiSolution core = solve_stationary_riccati(sys.effective_drift(), sys.c,
                                                    innovation_covariance(sys), l, n_const, local);
    StationaryCovariance out;
    out.v.v = std::move(core.x);
    out.converged = core.converged;
    out.residual = core.residual;
    out.ode_steps = core.ode_steps;
    out.newton_iters = core.newton_iters;
    out.residual_history = std::move(core.residual_history);
    return out;
}

CovarianceMatrix unconditional_covariance(const SystemModel& sys) {
    const Mat a = sys.effective_drift();
    double max_re = max_real_eigenvalue(a);
    if (!(max_re < 0.0)) {
        std::ostringstream os;
        os << "unconditional_covariance: drift is not Hurwitz (max Re eig = " << max_re
           << "), open-loop moments diverge";
        throw std::runtime_error(os.str());
    }
    Mat w = symmetrize(sys.b * sys.noise.re_theta * sys.b.transpose());
    if (sys.extra_diffusion.size() > 0) w += sys.extra_diffusion;
    return CovarianceMatrix{solve_lyapunov(a, w)};
}

double uncertainty_min_eigenvalue(const CovarianceMatrix& v) {
    const int n = static_cast<int>(v.v.rows() / 2);
    CMat h = v.v.cast<std::complex<double>>() +
             std::complex<double>(0.0, 0.5) * symplectic(n).matrix.cast<std::complex<double>>();
    return min_eigenvalue_herm(h);
}

}  // namespace qlqg
