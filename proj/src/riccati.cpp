#include "qlqg/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace qlqg {

namespace {

struct AreContext {
    const Mat& a;
    const Mat& c;
    const Mat& s;
    const Mat& l;
    const Mat& n;
    Eigen::LDLT<Mat> s_fact;

    AreContext(const Mat& a_, const Mat& c_, const Mat& s_, const Mat& l_, const Mat& n_)
        : a(a_), c(c_), s(s_), l(l_), n(n_), s_fact(s_) {}

    Mat gain(const Mat& x) const {
        Mat m = x * c.transpose() + l;                    // 2n x ell
        return s_fact.solve(m.transpose()).transpose();   // m S^{-1}
    }

    Mat rhs(const Mat& x) const {
        Mat m = x * c.transpose() + l;
        Mat quad = m * s_fact.solve(m.transpose());       // m S^{-1} m^T
        Mat r = a * x + x * a.transpose() + n - quad;
        return symmetrize(r);
    }
};

// Kleinman iteration: at a closed-loop-stabilizing iterate the update is a
// Lyapunov solve, and convergence to the stabilizing root is quadratic and
// monotone. Returns the solution only if the residual target is met.
std::optional<Mat> kleinman(const AreContext& ctx, Mat x, const RiccatiOptions& opts,
                            int* iters_out) {
    double best_res = std::numeric_limits<double>::infinity();
    Mat best;
    for (int it = 0; it < opts.newton_max_iters; ++it) {
        Mat k = ctx.gain(x);
        Mat a_cl = ctx.a - k * ctx.c;
        if (!is_hurwitz(a_cl)) return std::nullopt;
        Mat w = ctx.n + k * ctx.s * k.transpose() - k * ctx.l.transpose() -
                ctx.l * k.transpose();
        Mat x_next;
        try {
            x_next = solve_lyapunov(a_cl, symmetrize(w));
        } catch (const std::exception&) {
            return std::nullopt;
        }
        x = std::move(x_next);
        if (!x.allFinite()) return std::nullopt;
        double res = max_abs(ctx.rhs(x));
        if (iters_out) *iters_out = it + 1;
        if (res < best_res) {
            best_res = res;
            best = x;
        } else if (best_res <= opts.residual_tol) {
            break;  // numerical floor reached below target
        } else if (it > 4 && res > 0.9 * best_res) {
            return std::nullopt;  // stagnating above target
        }
        if (res <= opts.residual_tol) return x;
    }
    if (best_res <= opts.residual_tol) return best;
    return std::nullopt;
}

bool plausible_psd(const Mat& x) {
    return min_eigenvalue_sym(x) >= -1e-7 * (1.0 + max_abs(x));
}

}  // namespace

RiccatiSolution solve_stationary_riccati(const Mat& a, const Mat& c, const Mat& s,
                                         const Mat& l, const Mat& n_const,
                                         const RiccatiOptions& opts) {
    const long dim = a.rows();
    if (a.cols() != dim || c.cols() != dim || s.rows() != s.cols() || s.rows() != c.rows() ||
        l.rows() != dim || l.cols() != c.rows() || n_const.rows() != dim || n_const.cols() != dim)
        throw std::invalid_argument("solve_stationary_riccati: dimension mismatch");
    if (opts.x0.rows() != dim || opts.x0.cols() != dim)
        throw std::invalid_argument("solve_stationary_riccati: options must carry an initial matrix");

    double cond = condition_number(s);
    if (!(cond < 1e12)) {
        std::ostringstream os;
        os << "solve_stationary_riccati: innovation/weight matrix is numerically singular"
           << " (condition number " << cond << ")";
        throw std::runtime_error(os.str());
    }

    AreContext ctx(a, c, s, l, n_const);
    RiccatiSolution sol;
    Mat x = symmetrize(opts.x0);

    auto try_newton = [&](const Mat& seed) -> bool {
        if (!opts.use_newton) return false;
        int iters = 0;
        auto refined = kleinman(ctx, seed, opts, &iters);
        if (refined && plausible_psd(*refined)) {
            sol.x = *refined;
            sol.newton_iters = iters;
            sol.residual = max_abs(ctx.rhs(*refined));
            sol.converged = true;
            return true;
        }
        return false;
    };

    // Most configurations are already inside the stabilizing basin at the
    // caller's initial matrix; the ODE below is the homotopy fallback.
    if (try_newton(x)) {
        sol.residual_history.push_back(sol.residual);
        return sol;
    }

    // Bogacki-Shampine 3(2) adaptive integration of dX/dt = rhs(X), FSAL.
    double t = 0.0;
    double h = 1e-3;
    Mat k1 = ctx.rhs(x);
    int consecutive_ok = 0;
    long rejected_in_row = 0;
    // The ODE path's attainable residual scales with the step tolerance
    // (local error in X maps to |A|-scaled residual error). When the
    // residual plateaus above target, tighten the tolerance and continue.
    double rel_tol = opts.rel_tol;
    double abs_tol = opts.abs_tol;
    double best_res = std::numeric_limits<double>::infinity();
    int stalled = 0;

    while (t < opts.max_time && sol.ode_steps < opts.max_steps) {
        Mat k2 = ctx.rhs(x + (0.5 * h) * k1);
        Mat k3 = ctx.rhs(x + (0.75 * h) * k2);
        Mat x_new = x + (h / 9.0) * (2.0 * k1 + 3.0 * k2 + 4.0 * k3);
        Mat k4 = ctx.rhs(x_new);
        Mat err = h * (-5.0 / 72.0 * k1 + 1.0 / 12.0 * k2 + 1.0 / 9.0 * k3 - 1.0 / 8.0 * k4);

        bool finite = x_new.allFinite() && k4.allFinite();
        double enorm = 0.0;
        if (finite) {
            for (long j = 0; j < err.cols(); ++j)
                for (long i = 0; i < err.rows(); ++i) {
                    double scale =
                        abs_tol + rel_tol * std::max(std::abs(x(i, j)), std::abs(x_new(i, j)));
                    enorm = std::max(enorm, std::abs(err(i, j)) / scale);
                }
        }

        if (!finite || enorm > 1.0) {
            h *= finite ? std::max(0.2, 0.9 * std::pow(enorm, -1.0 / 3.0)) : 0.5;
            if (++rejected_in_row > 60 || h < 1e-14) break;
            continue;
        }
        rejected_in_row = 0;
        t += h;
        x = symmetrize(x_new);
        k1 = k4;  // FSAL
        ++sol.ode_steps;

        double res = max_abs(k4);
        sol.residual_history.push_back(res);
        consecutive_ok = (res < opts.residual_tol) ? consecutive_ok + 1 : 0;
        if (consecutive_ok >= 3) {
            sol.x = x;
            sol.residual = res;
            sol.converged = true;
            return sol;
        }

        if (res < 0.8 * best_res) {
            best_res = res;
            stalled = 0;
        } else if (++stalled >= 40 && best_res < 1e5 * opts.residual_tol && rel_tol > 1e-14) {
            rel_tol *= 1e-2;
            abs_tol = std::max(abs_tol * 1e-2, 1e-16);
            stalled = 0;
        }

        if (t >= opts.newton_after && sol.ode_steps % opts.newton_every == 0 && try_newton(x)) {
            sol.residual_history.push_back(sol.residual);
            return sol;
        }

        double grow = (enorm > 0.0) ? 0.9 * std::pow(enorm, -1.0 / 3.0) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
    }

    // Last chance before reporting failure.
    if (try_newton(x)) {
        sol.residual_history.push_back(sol.residual);
        return sol;
    }
    sol.x = x;
    sol.residual = max_abs(ctx.rhs(x));
    sol.converged = false;
    return sol;
}

}  // namespace qlqg
