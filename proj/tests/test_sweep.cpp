#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qlqg/sweep.hpp"
#include "test_helpers.hpp"

using namespace qlqg;

namespace {

SweepSpec small_spec(double delta_sq, double beta2_sq, int points) {
    SweepSpec spec;
    spec.beta1_sq_grid = uniform_grid(0.0, 1.0, points);
    spec.beta2_sq = beta2_sq;
    spec.delta_sq = delta_sq;
    spec.phase_grid_points = 8;   // cheap but honest search for unit tests
    spec.refine_iters = 15;
    spec.r = 2.3;
    return spec;
}

}  // namespace

TEST_CASE("uniform grid endpoints and spacing") {
    auto g = uniform_grid(0.0, 1.0, 5);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 1.0);
    CHECK(g[2] == doctest::Approx(0.5));
    CHECK(uniform_grid(0.3, 0.9, 1) == std::vector<double>{0.3});
    CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("phase optimization: flat detector axis is handled") {
    // beta1^2 = 1 with beta2 = 0: detector 2 watches the decoupled squeezed
    // arm, so the objective is exactly independent of theta2.
    OscillatorParams model;
    NetworkConfig cfg;
    cfg.beta1_sq = 1.0;
    cfg.beta2_sq = 0.0;
    cfg.delta_sq = 0.9;
    cfg.r = 2.3;
    PhaseOptimum opt = optimize_phases(model, cfg, 8, 10);
    REQUIRE(opt.converged);

    for (double t2 : {0.0, 0.7, 2.2}) {
        cfg.theta1 = opt.theta1;
        cfg.theta2 = t2;
        StationaryCovariance sol = stationary_covariance(build_oscillator_system(model, cfg));
        REQUIRE(sol.converged);
        CHECK(e_min(sol.v) == doctest::Approx(opt.e_min).epsilon(1e-10));
    }
    CHECK_THROWS_AS(optimize_phases(model, cfg, 3, 10), std::invalid_argument);
}

TEST_CASE("phase optimization: doubling the grid moves the optimum < 1e-4") {
    OscillatorParams model;
    NetworkConfig cfg;
    cfg.beta1_sq = 0.65;
    cfg.beta2_sq = 0.0;
    cfg.delta_sq = 0.9;
    cfg.r = 2.3;
    PhaseOptimum coarse = optimize_phases(model, cfg, 24, 30);
    PhaseOptimum fine = optimize_phases(model, cfg, 48, 30);
    REQUIRE(coarse.converged);
    REQUIRE(fine.converged);
    CHECK(std::abs(coarse.e_min - fine.e_min) < 1e-4);
}

TEST_CASE("sweep rows are deterministic and thread-count independent") {
    SweepSpec spec = small_spec(0.9, 0.0, 7);
    SweepResult serial = run_sweep(spec, 1);
    SweepResult parallel = run_sweep(spec, 2);
    SweepResult again = run_sweep(spec, 2);
    CHECK(to_csv(serial) == to_csv(parallel));
    CHECK(to_csv(parallel) == to_csv(again));
    CHECK(serial.failures == 0);

    for (const auto& row : serial.rows) {
        CHECK(row.converged);
        CHECK(row.residual <= 1e-10);
        CHECK(row.e_min >= -1e-9);                                   // ground state floor
        CHECK(row.e_min == (row.cheap_bound - 1.0) / 2.0);           // exact by construction
        CHECK(row.drift_hurwitz);
    }
}

TEST_CASE("csv: header-only for empty results, one line per row, stable format") {
    SweepResult empty;
    CHECK(to_csv(empty) == "beta1_sq,theta1_opt,theta2_opt,e_min,cheap_bound,residual,converged\n");

    SweepResult one;
    SweepRow row;
    row.beta1_sq = 0.5;
    row.theta1_opt = 1.0 / 3.0;
    row.theta2_opt = 0.25;
    row.e_min = 0.123456789012345;
    row.cheap_bound = 1.24691357802469;
    row.residual = 1e-12;
    row.converged = true;
    one.rows.push_back(row);
    std::string csv = to_csv(one);
    CHECK(csv ==
          "beta1_sq,theta1_opt,theta2_opt,e_min,cheap_bound,residual,converged\n"
          "0.5,0.333333333333,0.25,0.123456789012,1.24691357802,1e-12,1\n");
}

TEST_CASE("fully decoupled squeezed arm: the beta1^2 = 1 row ignores r") {
    SweepSpec a = small_spec(0.9, 0.0, 2);
    a.beta1_sq_grid = {1.0};
    SweepSpec b = a;
    b.r = 0.0;
    SweepResult ra = run_sweep(a, 1);
    SweepResult rb = run_sweep(b, 1);
    REQUIRE(ra.rows.size() == 1);
    REQUIRE(rb.rows.size() == 1);
    CHECK(ra.rows[0].e_min == doctest::Approx(rb.rows[0].e_min).epsilon(1e-9));
    CHECK(ra.rows[0].theta1_opt == doctest::Approx(rb.rows[0].theta1_opt).epsilon(1e-9));
    CHECK(ra.rows[0].cheap_bound == doctest::Approx(rb.rows[0].cheap_bound).epsilon(1e-9));
}

TEST_CASE("row failures are flagged and the sweep continues") {
    SweepSpec spec = small_spec(0.3, 0.0, 3);
    spec.model.lambda = 0.0;
    spec.model.kappa = 0.0;
    spec.model.gamma = -1e-3;  // heating bath: unobservable and unstable
    spec.phase_grid_points = 4;
    spec.refine_iters = 2;
    SweepResult result = run_sweep(spec, 2);
    CHECK(result.rows.size() == 3);
    CHECK(result.failures == 3);
    for (const auto& row : result.rows) CHECK_FALSE(row.converged);
}

TEST_CASE("config parsing: round trip, comments, validation") {
    std::istringstream in(
        "# sweep configuration\n"
        "omega = 1.0\n"
        "lambda = 0.3\n"
        "kappa = 4.0\n"
        "delta_detuning = 1.0\n"
        "gamma = 1e-7\n"
        "nbar = 1e5\n"
        "r = 2.3\n"
        "beta2_sq = 0.2   # global measurement\n"
        "delta_loss_sq = 0.9\n"
        "beta1_sq_min = 0.0\n"
        "beta1_sq_max = 1.0\n"
        "beta1_sq_steps = 11\n"
        "phase_grid = 12\n"
        "refine_iters = 20\n"
        "output = out.csv\n");
    SweepConfig cfg = parse_config(in);
    CHECK(cfg.spec.model.kappa == 4.0);
    CHECK(cfg.spec.model.nbar == 1e5);
    CHECK(cfg.spec.beta2_sq == 0.2);
    CHECK(cfg.spec.delta_sq == 0.9);
    CHECK(cfg.spec.beta1_sq_grid.size() == 11);
    CHECK(cfg.spec.beta1_sq_grid[1] == doctest::Approx(0.1));
    CHECK(cfg.spec.phase_grid_points == 12);
    CHECK(cfg.spec.refine_iters == 20);
    CHECK(cfg.output == "out.csv");

    std::istringstream unknown("omeega = 1.0\n");
    CHECK_THROWS(parse_config(unknown));
    std::istringstream bad_range("beta1_sq_min = 0.8\nbeta1_sq_max = 0.2\n");
    CHECK_THROWS(parse_config(bad_range));
    std::istringstream bad_grid("phase_grid = 2\n");
    CHECK_THROWS(parse_config(bad_grid));
    std::istringstream bad_value("kappa = fast\n");
    CHECK_THROWS(parse_config(bad_value));
}
