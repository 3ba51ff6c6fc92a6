#include "qlqg/mc.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace qlqg {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

std::uint64_t splitmix_next(std::uint64_t& s) {
    s += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Small counter-based generator: the stream is a pure function of the seed,
// so trajectories are reproducible independently of scheduling.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : state_(seed) {}

    double uniform() { return static_cast<double>(splitmix_next(state_) >> 11) * 0x1.0p-53; }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform();  // (0,1], keeps the log finite
        double u2 = uniform();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = kTwoPi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0xD1B54A32D192ED03ULL + index * 0x9E3779B97F4A7C15ULL);
    (void)splitmix_next(s);
    return splitmix_next(s);
}

// Keeps only columns with nonzero norm; the bath diffusion usually acts on
// a low-dimensional block, so fewer gaussian draws are needed per step.
Mat nonzero_columns(const Mat& factor) {
    std::vector<long> keep;
    for (long j = 0; j < factor.cols(); ++j)
        if (factor.col(j).norm() > 0.0) keep.push_back(j);
    Mat out(factor.rows(), static_cast<long>(keep.size()));
    for (size_t k = 0; k < keep.size(); ++k) out.col(static_cast<long>(k)) = factor.col(keep[k]);
    return out;
}

// Precomputed Euler-Maruyama update for dx = A x dt + B dW (+ bath noise),
// dy = C x dt + D dW. Every consumer, streaming or path-recording, uses the
// same kernel, so the discretization and the per-step draw order coincide.
struct SimKernel {
    Mat a_dt, b_lw, lw, le, c_dt, d;
    int dim = 0, noise_dim = 0, ell = 0, bath_dim = 0;

    SimKernel(const SystemModel& sys, double dt) {
        dim = 2 * sys.n;
        noise_dim = 2 * sys.m;
        ell = sys.ell;
        a_dt = sys.effective_drift() * dt;
        c_dt = sys.c * dt;
        // Physical correlation blocks have det(Re Theta_j) >= 1/4, so the
        // Cholesky factor exists; fall back to the PSD root otherwise.
        Eigen::LLT<Mat> chol(sys.noise.re_theta * dt);
        lw = chol.info() == Eigen::Success ? Mat(chol.matrixL())
                                           : psd_sqrt(sys.noise.re_theta * dt);
        b_lw = sys.b * lw;
        d = sys.d;
        if (sys.extra_diffusion.size() > 0 && max_abs(sys.extra_diffusion) > 0.0) {
            le = nonzero_columns(psd_sqrt(sys.extra_diffusion * dt));
            bath_dim = static_cast<int>(le.cols());
        }
    }
};

// One trajectory step on matrices of static or dynamic size. z is the
// standard-normal draw for the field channels; the record increment is
// dy = C x dt + D L z computed from the pre-update state.
template <typename MatA, typename MatBL, typename MatDL, typename MatLE, typename MatC,
          typename VecX, typename VecZ, typename VecY>
inline void sim_step(const MatA& a_dt, const MatBL& b_lw, const MatDL& d_lw, const MatLE& le,
                     int bath_dim, CounterRng& rng, VecX& x, VecX& tmp, VecZ& z, VecY& dy,
                     const MatC& c_dt) {
    for (long i = 0; i < z.size(); ++i) z(i) = rng.gaussian();
    dy.noalias() = c_dt * x;
    dy.noalias() += d_lw * z;
    tmp.noalias() = a_dt * x;
    tmp.noalias() += b_lw * z;
    for (int k = 0; k < bath_dim; ++k) tmp += le.col(k) * rng.gaussian();
    x += tmp;
}

struct FilterKernel {
    Mat a_dt, f_dt, c_dt, k;

    FilterKernel(const SystemModel& sys, const FilterGain& gain, double dt)
        : a_dt(sys.effective_drift() * dt), f_dt(sys.f * dt), c_dt(sys.c * dt), k(gain.k) {}
};

struct TrajStats {
    Mat cov, innov, lag1;
};

// Streaming tail statistics over all trajectories. Fixed-size instantiation
// for the production model dimensions, dynamic fallback otherwise.
template <int D, int W, int L>
std::vector<TrajStats> run_trajectories(const SimKernel& sim, const FilterKernel& filt,
                                        const McOptions& opts, long steps, int window) {
    using MatDD = Eigen::Matrix<double, D, D>;
    using MatDW = Eigen::Matrix<double, D, W>;
    using MatLW = Eigen::Matrix<double, L, W>;
    using MatLD = Eigen::Matrix<double, L, D>;
    using MatDL = Eigen::Matrix<double, D, L>;
    using VecD = Eigen::Matrix<double, D, 1>;
    using VecW = Eigen::Matrix<double, W, 1>;
    using VecL = Eigen::Matrix<double, L, 1>;

    const MatDD a_dt = sim.a_dt;
    const MatDW b_lw = sim.b_lw;
    const MatLW d_lw = sim.d * sim.lw;
    const MatLD c_dt = sim.c_dt;
    const Mat le = sim.le;  // few columns; dynamic is fine
    const MatDD fa_dt = filt.a_dt;
    const MatLD fc_dt = filt.c_dt;
    const MatDL gain = filt.k;

    const int ntraj = opts.trajectories;
    std::vector<TrajStats> stats(ntraj);
    std::atomic<int> next{0};

    auto worker = [&]() {
        VecD x, pi, tmp;
        VecW z;
        VecL dy, innov, prev_innov;
        if constexpr (D == Eigen::Dynamic) {
            x.resize(sim.dim);
            pi.resize(sim.dim);
            tmp.resize(sim.dim);
            z.resize(sim.noise_dim);
            dy.resize(sim.ell);
            innov.resize(sim.ell);
            prev_innov.resize(sim.ell);
        }
        const long dim = x.size();
        const long ell = dy.size();
        while (true) {
            int t = next.fetch_add(1);
            if (t >= ntraj) break;
            CounterRng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(t)));
            x.setZero();
            pi.setZero();
            Mat cov_acc = Mat::Zero(dim, dim);
            Mat innov_acc = Mat::Zero(ell, ell);
            Mat lag1_acc = Mat::Zero(ell, ell);
            bool have_prev = false;
            const long tail_start = steps - window;
            for (long k = 0; k < steps; ++k) {
                sim_step(a_dt, b_lw, d_lw, le, sim.bath_dim, rng, x, tmp, z, dy, c_dt);
                innov = dy;
                innov.noalias() -= fc_dt * pi;
                tmp.noalias() = fa_dt * pi;
                tmp.noalias() += gain * innov;
                pi += tmp;
                if (k >= tail_start) {
                    tmp = x - pi;
                    cov_acc.noalias() += tmp * tmp.transpose();
                    innov_acc.noalias() += innov * innov.transpose();
                    if (have_prev) lag1_acc.noalias() += prev_innov * innov.transpose();
                    prev_innov = innov;
                    have_prev = true;
                }
            }
            stats[t].cov = cov_acc / window;
            stats[t].innov = innov_acc / window;
            stats[t].lag1 = window > 1 ? Mat(lag1_acc / (window - 1)) : Mat::Zero(ell, ell);
        }
    };

    int nthreads = std::max(1, std::min(opts.threads, ntraj));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return stats;
}

}  // namespace

SimulatedTrajectory simulate_classical_analog(const SystemModel& sys, double horizon, double dt,
                                              std::uint64_t seed) {
    if (!(dt > 0.0 && horizon > 0.0))
        throw std::invalid_argument("simulate_classical_analog: need positive horizon and dt");
    const Mat a = sys.effective_drift();
    if (!is_hurwitz(a))
        throw std::invalid_argument("simulate_classical_analog: unstable drift, moments diverge");
    if (max_abs(a) * dt > 0.1)
        throw std::invalid_argument("simulate_classical_analog: dt too coarse for |A| (need |A| dt <= 0.1)");

    const long steps = std::lround(horizon / dt);
    SimKernel kernel(sys, dt);
    CounterRng rng(seed);

    SimulatedTrajectory traj;
    traj.record.dt = dt;
    traj.record.seed = seed;
    traj.record.dy.reserve(steps);
    traj.x.reserve(steps + 1);

    const Mat d_lw = kernel.d * kernel.lw;
    Vec x = Vec::Zero(kernel.dim);
    Vec tmp(kernel.dim), z(kernel.noise_dim), dy(kernel.ell);
    traj.x.push_back(x);
    for (long i = 0; i < steps; ++i) {
        sim_step(kernel.a_dt, kernel.b_lw, d_lw, kernel.le, kernel.bath_dim, rng, x, tmp, z, dy,
                 kernel.c_dt);
        traj.record.dy.push_back(dy);
        traj.x.push_back(x);
    }
    return traj;
}

std::vector<Vec> run_filter(const MeasurementRecord& record, const SystemModel& sys,
                            const FilterGain& gain) {
    if (gain.k.rows() != 2 * sys.n || gain.k.cols() != sys.ell)
        throw std::invalid_argument("run_filter: gain dimensions do not match the model");
    if (!record.du.empty() && record.du.size() != record.dy.size())
        throw std::invalid_argument("run_filter: control sequence length mismatch");

    FilterKernel kernel(sys, gain, record.dt);
    std::vector<Vec> pi_path;
    pi_path.reserve(record.dy.size() + 1);
    Vec pi = Vec::Zero(2 * sys.n);
    Vec tmp(2 * sys.n), innov(sys.ell);
    pi_path.push_back(pi);
    for (size_t k = 0; k < record.dy.size(); ++k) {
        innov = record.dy[k];
        innov.noalias() -= kernel.c_dt * pi;
        tmp.noalias() = kernel.a_dt * pi;
        tmp.noalias() += kernel.k * innov;
        if (!record.du.empty()) tmp.noalias() += kernel.f_dt * record.du[k];
        pi += tmp;
        pi_path.push_back(pi);
    }
    return pi_path;
}

EmpiricalCovariance empirical_error_covariance(const std::vector<std::vector<Vec>>& states,
                                               const std::vector<std::vector<Vec>>& estimates,
                                               int burn_in) {
    if (states.size() < 2 || states.size() != estimates.size())
        throw std::invalid_argument("empirical_error_covariance: need >= 2 aligned trajectories");
    const size_t ntraj = states.size();
    const long dim = states[0].at(0).size();

    std::vector<Mat> per_traj;
    per_traj.reserve(ntraj);
    long total = 0;
    for (size_t t = 0; t < ntraj; ++t) {
        if (states[t].size() != estimates[t].size())
            throw std::invalid_argument("empirical_error_covariance: path length mismatch");
        const long len = static_cast<long>(states[t].size());
        if (burn_in < 0 || burn_in >= len)
            throw std::invalid_argument("empirical_error_covariance: burn_in exceeds path length");
        Mat acc = Mat::Zero(dim, dim);
        long count = 0;
        for (long k = burn_in; k < len; ++k) {
            Vec delta = states[t][k] - estimates[t][k];
            acc.noalias() += delta * delta.transpose();
            ++count;
        }
        per_traj.push_back(acc / count);
        total += count;
    }

    EmpiricalCovariance out;
    out.samples = total;
    Mat mean = Mat::Zero(dim, dim);
    for (const Mat& m : per_traj) mean += m;
    mean /= static_cast<double>(ntraj);
    out.cov = symmetrize(mean);

    // Bootstrap over whole trajectories; within-trajectory correlation is
    // preserved by resampling at the trajectory level.
    const int resamples = 200;
    CounterRng rng(derive_seed(0x626F6F74ULL, ntraj));
    Mat sum = Mat::Zero(dim, dim), sumsq = Mat::Zero(dim, dim);
    for (int b = 0; b < resamples; ++b) {
        Mat m = Mat::Zero(dim, dim);
        for (size_t t = 0; t < ntraj; ++t) {
            size_t idx = static_cast<size_t>(rng.uniform() * ntraj);
            if (idx >= ntraj) idx = ntraj - 1;
            m += per_traj[idx];
        }
        m /= static_cast<double>(ntraj);
        sum += m;
        sumsq += m.cwiseProduct(m);
    }
    Mat var = (sumsq - sum.cwiseProduct(sum) / resamples) / (resamples - 1);
    out.se = var.cwiseMax(0.0).cwiseSqrt();
    return out;
}

McReport mc_check(const SystemModel& sys, const McOptions& opts) {
    if (opts.trajectories < 2) throw std::invalid_argument("mc_check: need >= 2 trajectories");

    McReport report;
    StationaryCovariance stat = stationary_covariance(sys);
    if (!stat.converged)
        throw std::runtime_error("mc_check: stationary covariance did not converge for this model");
    report.v_expected = stat.v.v;

    FilterGain gain = kalman_gain(stat.v, sys);
    Mat a_cl = sys.effective_drift() - gain.k * sys.c;
    report.relaxation_rate = -max_real_eigenvalue(a_cl);
    if (!(report.relaxation_rate > 1e-6))
        throw std::runtime_error("mc_check: filter error dynamics do not relax (rate <= 1e-6)");

    // 12 relaxation times leave the covariance within e^-24 of stationary,
    // far below the statistical resolution of a few thousand trajectories.
    const double horizon = opts.horizon > 0.0 ? opts.horizon : 12.0 / report.relaxation_rate;
    const long steps = std::max<long>(opts.tail_window + 1, std::lround(horizon / opts.dt));
    report.horizon = steps * opts.dt;
    report.steps_per_trajectory = steps;

    const Mat s_innov = innovation_covariance(sys);
    report.innovation_expected = s_innov * opts.dt;

    SimKernel sim(sys, opts.dt);
    FilterKernel filt(sys, gain, opts.dt);
    const int ell = sim.ell;
    const int ntraj = opts.trajectories;
    const int window = static_cast<int>(std::min<long>(opts.tail_window, steps));

    std::vector<TrajStats> stats =
        (sim.dim == 4 && sim.noise_dim == 6 && sim.ell == 2)
            ? run_trajectories<4, 6, 2>(sim, filt, opts, steps, window)
            : run_trajectories<Eigen::Dynamic, Eigen::Dynamic, Eigen::Dynamic>(sim, filt, opts,
                                                                               steps, window);

    auto aggregate = [&](auto member, Mat& mean_out, Mat& se_out) {
        const Mat& first = stats[0].*member;
        const long r = first.rows(), c = first.cols();
        Mat mean = Mat::Zero(r, c);
        for (const TrajStats& s : stats) mean += s.*member;
        mean /= static_cast<double>(ntraj);
        CounterRng rng(derive_seed(opts.seed ^ 0x5E5E5E5EULL, static_cast<std::uint64_t>(r)));
        Mat sum = Mat::Zero(r, c), sumsq = Mat::Zero(r, c);
        for (int b = 0; b < opts.bootstrap_resamples; ++b) {
            Mat m = Mat::Zero(r, c);
            for (int t = 0; t < ntraj; ++t) {
                int idx = static_cast<int>(rng.uniform() * ntraj);
                if (idx >= ntraj) idx = ntraj - 1;
                m += stats[idx].*member;
            }
            m /= static_cast<double>(ntraj);
            sum += m;
            sumsq += m.cwiseProduct(m);
        }
        Mat var = (sumsq - sum.cwiseProduct(sum) / opts.bootstrap_resamples) /
                  (opts.bootstrap_resamples - 1);
        mean_out = mean;
        se_out = var.cwiseMax(0.0).cwiseSqrt();
    };

    auto max_dev = [](const Mat& emp, const Mat& expect, const Mat& se) {
        double worst = 0.0;
        for (long j = 0; j < emp.cols(); ++j)
            for (long i = 0; i < emp.rows(); ++i) {
                double d = std::abs(emp(i, j) - expect(i, j));
                double denom = std::max(se(i, j), 1e-300);
                worst = std::max(worst, d / denom);
            }
        return worst;
    };

    aggregate(&TrajStats::cov, report.v_empirical, report.v_se);
    report.v_empirical = symmetrize(report.v_empirical);
    report.v_max_dev_se = max_dev(report.v_empirical, report.v_expected, report.v_se);
    report.covariance_ok = report.v_max_dev_se < 5.0;

    aggregate(&TrajStats::innov, report.innovation_empirical, report.innovation_se);
    report.innovation_max_dev_se =
        max_dev(report.innovation_empirical, report.innovation_expected, report.innovation_se);
    report.whiteness_ok = report.innovation_max_dev_se < 5.0;

    Mat lag1_mean, lag1_se;
    aggregate(&TrajStats::lag1, lag1_mean, lag1_se);
    report.lag1_max_dev_se = max_dev(lag1_mean, Mat::Zero(ell, ell), lag1_se);
    report.lag1_ok = report.lag1_max_dev_se < 3.0;

    return report;
}

}  // namespace qlqg
