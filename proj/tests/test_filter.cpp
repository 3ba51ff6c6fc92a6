#include <doctest.h>

#include <cmath>

#include "qlqg/oscillator.hpp"
#include "qlqg/sweep.hpp"
#include "test_helpers.hpp"

using namespace qlqg;
using qlqg::test::max_abs_diff;
using qlqg::test::one_mode_cavity;

namespace {

SystemModel sql_fixture_system() {
    OscillatorParams p;
    NetworkConfig cfg;
    cfg.beta1_sq = 1.0;
    cfg.beta2_sq = 0.0;
    cfg.delta_sq = 0.9;
    cfg.theta1 = 1.2;
    cfg.theta2 = 0.3;
    cfg.r = 2.3;
    return build_oscillator_system(p, cfg);
}

// Stationary covariance of the fixture above, from an independent
// dense-ARE route (regression anchor).
Mat sql_fixture_v() {
    Mat v(4, 4);
    v << 1.293310163579505, 0.022282815406644, 0.135853453324893, 0.251987528265253,
         0.022282815406644, 1.188421192411941, 0.027524659880197, -0.121059890520320,
         0.135853453324893, 0.027524659880197, 0.515227755677986, 0.030927297506729,
         0.251987528265253, -0.121059890520320, 0.030927297506729, 0.559250018639246;
    return v;
}

}  // namespace

TEST_CASE("kalman gain: zero information flow gives zero gain") {
    // B = 0 removes both the measured signal (C = 0) and the noise
    // correlation, so K must vanish identically.
    SystemModel sys = one_mode_cavity(3.0, 0.5, 0.4, vacuum_block());
    sys.b.setZero();
    auto [a, c] = build_structured_matrices(sys.g, sys.b, sys.d);
    sys.a = a;
    sys.c = c;
    FilterGain g = kalman_gain(CovarianceMatrix{Mat::Identity(2, 2)}, sys);
    CHECK(max_abs(g.k) == 0.0);
}

TEST_CASE("kalman gain is affine in V: K(2V) - K(V) = V C^T S^{-1}") {
    SystemModel sys = sql_fixture_system();
    Mat v = sql_fixture_v();
    Mat k1 = kalman_gain(CovarianceMatrix{v}, sys).k;
    Mat k2 = kalman_gain(CovarianceMatrix{2.0 * v}, sys).k;
    Mat s = innovation_covariance(sys);
    Mat expected = s.ldlt().solve((v * sys.c.transpose()).transpose()).transpose();
    CHECK(max_abs_diff(k2 - k1, expected) < 1e-12);
}

TEST_CASE("kalman gain rejects degenerate detectors") {
    SystemModel sys = sql_fixture_system();
    sys.d.row(1) = sys.d.row(0);  // both detectors read the same quadrature
    sys.c.row(1) = sys.c.row(0);
    CHECK_THROWS_AS(kalman_gain(CovarianceMatrix{sql_fixture_v()}, sys), std::runtime_error);
}

TEST_CASE("riccati rhs vanishes at the stationary point and carries the bath term") {
    SystemModel sys = sql_fixture_system();
    CHECK(max_abs(riccati_rhs(CovarianceMatrix{sql_fixture_v()}, sys)) < 1e-8);

    // at V = 0 the rhs is the full constant term, bath included
    Mat at_zero = riccati_rhs(CovarianceMatrix{Mat::Zero(4, 4)}, sys);
    Mat s = innovation_covariance(sys);
    Mat l = sys.b * sys.noise.re_theta * sys.d.transpose();
    Mat correction = l * s.ldlt().solve(l.transpose());
    Mat expected = sys.b * sys.noise.re_theta * sys.b.transpose() + sys.extra_diffusion - correction;
    CHECK(max_abs_diff(at_zero, symmetrize(expected)) < 1e-14);
    // the bath's diagonal contribution is gamma (2 nbar + 1) = 0.0200001
    OscillatorParams p;
    CHECK(sys.extra_diffusion(0, 0) == doctest::Approx(0.0200001).epsilon(1e-12));
}

TEST_CASE("stationary covariance: vacuum-driven cavity stays in vacuum") {
    // Passive decay of a vacuum-input cavity conditions on pure noise; the
    // conditional state remains the vacuum for every homodyne phase.
    for (double theta : {0.0, 0.4, 1.1, 2.6}) {
        SystemModel sys = one_mode_cavity(3.0, 0.7, theta, vacuum_block());
        StationaryCovariance sol = stationary_covariance(sys);
        REQUIRE(sol.converged);
        CHECK(sol.residual <= 1e-10);
        CHECK(max_abs_diff(sol.v.v, 0.5 * Mat::Identity(2, 2)) < 1e-10);
    }
}

TEST_CASE("stationary covariance matches the independent dense-ARE fixture") {
    SystemModel sys = sql_fixture_system();
    StationaryCovariance sol = stationary_covariance(sys);
    REQUIRE(sol.converged);
    CHECK(sol.residual <= 1e-10);
    CHECK(max_abs_diff(sol.v.v, sql_fixture_v()) < 1e-8);
    CHECK(uncertainty_min_eigenvalue(sol.v) > -1e-9);
}

TEST_CASE("stationary gain matches the independent dense-ARE fixture") {
    SystemModel sys = sql_fixture_system();
    StationaryCovariance sol = stationary_covariance(sys);
    REQUIRE(sol.converged);
    Mat k = kalman_gain(sol.v, sys).k;
    Mat expected(4, 2);
    expected << 0.359348303132964, 0.0,
               -0.130107203496422, 0.0,
                0.043441277640337, 0.0,
                0.084028142284125, 0.0;
    CHECK(max_abs_diff(k, expected) < 1e-8);
}

TEST_CASE("decoupled oscillator relaxes to the bath balance (2 nbar + 1)") {
    // lambda = 0 and kappa = 0: no information path to the oscillator; the
    // drift -gamma/2 against diffusion gamma(2 nbar + 1) balances at
    // variance 2 nbar + 1 per quadrature.
    OscillatorParams p;
    p.lambda = 0.0;
    p.kappa = 0.0;
    p.gamma = 1e-3;  // faster bath keeps the test cheap; balance is rate-free
    p.nbar = 50.0;
    NetworkConfig cfg;
    cfg.beta1_sq = 0.7;
    cfg.delta_sq = 0.3;
    cfg.theta1 = 0.2;
    cfg.theta2 = 1.9;
    cfg.r = 1.0;
    SystemModel sys = build_oscillator_system(p, cfg);
    StationaryCovariance sol = stationary_covariance(sys);
    REQUIRE(sol.converged);
    double expected = 2.0 * p.nbar + 1.0;
    CHECK(sol.v.v(0, 0) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(sol.v.v(1, 1) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(std::abs(sol.v.v(0, 1)) < 1e-6);
}

TEST_CASE("stationary covariance is independent of the seed matrix") {
    SystemModel sys = sql_fixture_system();
    RiccatiOptions o1, o2;
    o1.x0 = 0.6 * Mat::Identity(4, 4);
    o2.x0 = 10.0 * Mat::Identity(4, 4);
    StationaryCovariance a = stationary_covariance(sys, o1);
    StationaryCovariance b = stationary_covariance(sys, o2);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(max_abs_diff(a.v.v, b.v.v) < 1e-8);
}

TEST_CASE("stationary covariance never reads the actuation matrix") {
    SystemModel sys = sql_fixture_system();
    StationaryCovariance base = stationary_covariance(sys);
    sys.f = 17.0 * sys.f;
    sys.f(3, 0) = -2.5;
    StationaryCovariance perturbed = stationary_covariance(sys);
    CHECK(max_abs_diff(base.v.v, perturbed.v.v) == 0.0);  // bit-identical
}

TEST_CASE("riccati flow preserves symmetry from a symmetric start") {
    SystemModel sys = sql_fixture_system();
    Mat v = 0.5 * Mat::Identity(4, 4);
    double h = 1e-3;
    for (int i = 0; i < 2000; ++i) {
        v += h * riccati_rhs(CovarianceMatrix{v}, sys);
        CHECK(max_abs_diff(v, v.transpose()) < 1e-11);
    }
}

TEST_CASE("unconditional covariance: closed-form thermal cavity, and B = 0") {
    // one lossy mode with thermal input N: stationary variance N + 1/2
    double n_mean = 2.0;
    SystemModel sys = one_mode_cavity(3.0, 0.0, 0.0, noise_block_from_nm(n_mean, 0.0));
    CovarianceMatrix v = unconditional_covariance(sys);
    CHECK(max_abs_diff(v.v, (n_mean + 0.5) * Mat::Identity(2, 2)) < 1e-10);

    SystemModel quiet = sys;
    quiet.b.setZero();
    auto [a, c] = build_structured_matrices(quiet.g, quiet.b, quiet.d);
    // keep the damped drift but remove all noise input
    quiet.a = sys.a;
    quiet.c = c;
    CovarianceMatrix zero = unconditional_covariance(quiet);
    CHECK(max_abs(zero.v) < 1e-14);
}

TEST_CASE("unconditional covariance rejects non-Hurwitz drift") {
    SystemModel sys = one_mode_cavity(0.0, 1.0, 0.0, vacuum_block());  // pure rotation
    CHECK_THROWS_AS(unconditional_covariance(sys), std::runtime_error);
}

TEST_CASE("stationary covariance flags an unobservable unstable model") {
    // Unstable drift with no measurement path: the flow diverges and the
    // solver must report failure with its residual history, not throw.
    SystemModel sys = one_mode_cavity(3.0, 0.5, 0.2, vacuum_block());
    sys.b.setZero();
    sys.c.setZero();
    sys.a = 0.1 * Mat::Identity(2, 2);
    RiccatiOptions opts;
    opts.max_time = 50.0;
    StationaryCovariance sol = stationary_covariance(sys, opts);
    CHECK_FALSE(sol.converged);
    CHECK(!sol.residual_history.empty());
}

TEST_CASE("conditioning refines knowledge: V_uncond - V_inf is PSD") {
    SystemModel sys = sql_fixture_system();
    StationaryCovariance cond = stationary_covariance(sys);
    REQUIRE(cond.converged);
    CovarianceMatrix unc = unconditional_covariance(sys);
    CHECK(min_eigenvalue_sym(unc.v - cond.v.v) > -1e-9);
}
