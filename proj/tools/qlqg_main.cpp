#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <thread>

#include "qlqg/mc.hpp"
#include "qlqg/sweep.hpp"

namespace {

using namespace qlqg;

struct PointArgs {
    double beta1_sq = -1.0;  // <0 = take beta1_sq_min from the config
    double theta1 = -1.0;    // <0 = optimize
    double theta2 = -1.0;
};

NetworkConfig make_cfg(const SweepSpec& spec, double beta1_sq) {
    NetworkConfig cfg;
    cfg.beta1_sq = beta1_sq;
    cfg.beta2_sq = spec.beta2_sq;
    cfg.delta_sq = spec.delta_sq;
    cfg.r = spec.r;
    return cfg;
}

void print_matrix(const char* name, const Mat& m) {
    std::printf("%s =\n", name);
    for (long i = 0; i < m.rows(); ++i) {
        std::printf("   ");
        for (long j = 0; j < m.cols(); ++j) std::printf(" % .6e", m(i, j));
        std::printf("\n");
    }
}

int cmd_sweep(const SweepConfig& cfg, const std::string& output_override, int threads) {
    SweepResult result = run_sweep(cfg.spec, threads, &std::cerr);
    const std::string path = output_override.empty() ? cfg.output : output_override;
    emit_csv(result, path);
    std::cerr << "wrote " << result.rows.size() << " rows to " << path << " ("
              << result.failures << " failed)\n";
    return result.failures == 0 ? 0 : 2;
}

int cmd_point(const SweepConfig& cfg, const PointArgs& args) {
    const SweepSpec& spec = cfg.spec;
    if ((args.theta1 >= 0.0) != (args.theta2 >= 0.0)) {
        std::cerr << "point: fix both --theta1 and --theta2, or neither\n";
        return 1;
    }
    double b1 = args.beta1_sq >= 0.0 ? args.beta1_sq : spec.beta1_sq_grid.front();
    NetworkConfig net = make_cfg(spec, b1);

    double t1 = args.theta1, t2 = args.theta2;
    Mat v;
    double residual = 0.0;
    if (t1 >= 0.0 && t2 >= 0.0) {
        net.theta1 = t1;
        net.theta2 = t2;
        SystemModel sys = build_oscillator_system(spec.model, net);
        StationaryCovariance sol = stationary_covariance(sys);
        if (!sol.converged) {
            std::cerr << "point: Riccati did not converge (residual " << sol.residual << ")\n";
            return 2;
        }
        v = sol.v.v;
        residual = sol.residual;
    } else {
        PhaseOptimum opt = optimize_phases(spec.model, net, spec.phase_grid_points, spec.refine_iters);
        if (!opt.converged) {
            std::cerr << "point: no phase converged\n";
            return 2;
        }
        t1 = opt.theta1;
        t2 = opt.theta2;
        v = opt.v_inf;
        residual = opt.residual;
        net.theta1 = t1;
        net.theta2 = t2;
    }

    SystemModel sys = build_oscillator_system(spec.model, net);
    CovarianceMatrix cov{v};
    std::printf("beta1_sq     = %.12g\n", b1);
    std::printf("beta2_sq     = %.12g\n", spec.beta2_sq);
    std::printf("delta_sq     = %.12g\n", spec.delta_sq);
    std::printf("theta1       = %.12g\n", t1);
    std::printf("theta2       = %.12g\n", t2);
    std::printf("e_min        = %.12g\n", e_min(cov));
    std::printf("cheap_bound  = %.12g\n", cheap_bound(cov, energy_weight()));
    std::printf("residual     = %.3e\n", residual);
    std::printf("uncert_eig   = %.3e   (v + i/2 Sigma, min eigenvalue)\n",
                uncertainty_min_eigenvalue(cov));
    std::printf("drift_stable = %s\n", is_hurwitz(sys.effective_drift()) ? "yes" : "no");

    // finite-R cost at the default weights, next to its cheap-control floor
    CostWeights w{energy_weight(), Mat::Identity(2, 2)};
    ControlSolution lqg = solve_lqg(sys, w, cov);
    if (lqg.converged) {
        std::printf("j_min (R=I)  = %.12g\n", lqg.j_min);
        std::printf("j_cheap      = %.12g\n", lqg.j_cheap);
    }
    print_matrix("v_inf", v);
    return 0;
}

int cmd_validate(const SweepConfig& cfg) {
    const SweepSpec& spec = cfg.spec;
    int bad = 0;
    auto check = [&](const std::string& what, bool ok, double defect) {
        std::printf("[%s] %-58s %.3e\n", ok ? "ok" : "FAIL", what.c_str(), defect);
        if (!ok) ++bad;
    };

    for (double x : {0.0, 0.3, 1.0}) {
        double defect = max_abs(beam_splitter(x) * beam_splitter(x).transpose() -
                                Mat::Identity(6, 6));
        check("beam splitter orthogonal, beta^2=" + std::to_string(x), defect < 1e-12, defect);
        defect = max_abs(loss_stage(x) * loss_stage(x).transpose() - Mat::Identity(6, 6));
        check("loss stage orthogonal, delta^2=" + std::to_string(x), defect < 1e-12, defect);
    }

    for (double b1 : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        NetworkConfig net = make_cfg(spec, b1);
        net.theta1 = 0.4;
        net.theta2 = 2.0;
        SystemModel sys = build_oscillator_system(spec.model, net);
        auto violations = validate_system(sys);
        std::string what = "model structure, beta1_sq=" + std::to_string(b1);
        if (violations.empty()) {
            check(what, true, 0.0);
        } else {
            for (const auto& v : violations) check(what + ": " + v, false, 0.0);
        }
        const Mat sm = symplectic(sys.m).matrix;
        double defect = max_abs(sys.d * sm * sys.d.transpose());
        check("D Sigma_m D^T = 0, beta1_sq=" + std::to_string(b1), defect < 1e-12, defect);
        double max_re = max_real_eigenvalue(sys.effective_drift());
        check("drift Hurwitz, beta1_sq=" + std::to_string(b1), max_re < 0.0, max_re);
    }
    std::printf("%s\n", bad == 0 ? "all checks passed" : "structural violations found");
    return bad == 0 ? 0 : 2;
}

int cmd_mc_check(const SweepConfig& cfg, const PointArgs& args, int trajectories,
                 std::uint64_t seed, int threads) {
    const SweepSpec& spec = cfg.spec;
    if ((args.theta1 >= 0.0) != (args.theta2 >= 0.0)) {
        std::cerr << "mc-check: fix both --theta1 and --theta2, or neither\n";
        return 1;
    }
    double b1 = args.beta1_sq >= 0.0 ? args.beta1_sq : spec.beta1_sq_grid.front();
    NetworkConfig net = make_cfg(spec, b1);
    if (args.theta1 >= 0.0 && args.theta2 >= 0.0) {
        net.theta1 = args.theta1;
        net.theta2 = args.theta2;
    } else {
        PhaseOptimum opt = optimize_phases(spec.model, net, spec.phase_grid_points, spec.refine_iters);
        if (!opt.converged) {
            std::cerr << "mc-check: no phase converged\n";
            return 2;
        }
        net.theta1 = opt.theta1;
        net.theta2 = opt.theta2;
        std::cerr << "mc-check: using optimized phases (" << opt.theta1 << ", " << opt.theta2 << ")\n";
    }

    SystemModel sys = build_oscillator_system(spec.model, net);
    McOptions opts;
    opts.trajectories = trajectories;
    opts.seed = seed;
    opts.threads = threads;
    McReport rep = mc_check(sys, opts);

    std::printf("relaxation rate  = %.6g, horizon = %.6g (%ld steps/trajectory)\n",
                rep.relaxation_rate, rep.horizon, rep.steps_per_trajectory);
    const long d = rep.v_expected.rows();
    for (long i = 0; i < d; ++i)
        for (long j = i; j < d; ++j) {
            double dev = std::abs(rep.v_empirical(i, j) - rep.v_expected(i, j));
            double se = rep.v_se(i, j);
            bool ok = dev < 5.0 * std::max(se, 1e-300);
            std::printf("[%s] V(%ld,%ld): expected % .6e empirical % .6e  dev %.2f SE\n",
                        ok ? "ok" : "FAIL", i, j, rep.v_expected(i, j), rep.v_empirical(i, j),
                        dev / std::max(se, 1e-300));
        }
    std::printf("[%s] covariance: max deviation %.2f SE (< 5)\n", rep.covariance_ok ? "ok" : "FAIL",
                rep.v_max_dev_se);
    std::printf("[%s] innovation whiteness: max deviation %.2f SE (< 5)\n",
                rep.whiteness_ok ? "ok" : "FAIL", rep.innovation_max_dev_se);
    std::printf("[%s] innovation lag-1 autocorrelation: max %.2f SE (< 3)\n",
                rep.lag1_ok ? "ok" : "FAIL", rep.lag1_max_dev_se);
    return rep.passed() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entanglement-assisted cooling bounds for linear quantum systems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_override;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    app.add_option("--config", config_path, "flat key=value configuration file")->required();
    app.add_option("--output", output_override, "override the config's output path");
    app.add_option("--threads", threads, "worker threads");

    auto* sweep_cmd = app.add_subcommand("sweep", "reflectivity sweep with phase optimization -> CSV");

    PointArgs pargs;
    auto* point_cmd = app.add_subcommand("point", "single configuration report");
    point_cmd->add_option("--beta1-sq", pargs.beta1_sq, "BS1 reflectivity (default: beta1_sq_min)");
    point_cmd->add_option("--theta1", pargs.theta1, "fix homodyne phase 1 (default: optimize)");
    point_cmd->add_option("--theta2", pargs.theta2, "fix homodyne phase 2 (default: optimize)");

    auto* validate_cmd = app.add_subcommand("validate", "structural checks of the assembled model");

    int trajectories = 2000;
    std::uint64_t seed = 1;
    auto* mc_cmd = app.add_subcommand("mc-check", "Monte Carlo check of the stationary filter");
    mc_cmd->add_option("--trajectories", trajectories, "trajectory count");
    mc_cmd->add_option("--seed", seed, "base RNG seed");
    mc_cmd->add_option("--beta1-sq", pargs.beta1_sq, "BS1 reflectivity (default: beta1_sq_min)");
    mc_cmd->add_option("--theta1", pargs.theta1, "fix homodyne phase 1 (default: optimize)");
    mc_cmd->add_option("--theta2", pargs.theta2, "fix homodyne phase 2 (default: optimize)");

    CLI11_PARSE(app, argc, argv);

    try {
        SweepConfig cfg = load_config(config_path);
        if (sweep_cmd->parsed()) return cmd_sweep(cfg, output_override, threads);
        if (point_cmd->parsed()) return cmd_point(cfg, pargs);
        if (validate_cmd->parsed()) return cmd_validate(cfg);
        if (mc_cmd->parsed()) return cmd_mc_check(cfg, pargs, trajectories, seed, threads);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
