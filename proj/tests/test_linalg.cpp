#include <doctest.h>

#include "test_helpers.hpp"

using namespace qlqg;
using qlqg::test::max_abs_diff;
using qlqg::test::TestRng;

TEST_CASE("lyapunov solver closes the equation") {
    TestRng rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        Mat a(4, 4);
        for (long i = 0; i < 4; ++i)
            for (long j = 0; j < 4; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
        a -= 3.0 * Mat::Identity(4, 4);
        Mat w(4, 4);
        for (long i = 0; i < 4; ++i)
            for (long j = 0; j <= i; ++j) w(i, j) = w(j, i) = rng.uniform(-1.0, 1.0);
        Mat x = solve_lyapunov(a, w);
        CHECK(max_abs_diff(x, x.transpose()) == 0.0);
        CHECK(max_abs(a * x + x * a.transpose() + w) < 1e-12);
    }
}

TEST_CASE("lyapunov solver reports a singular operator") {
    Mat a(2, 2);
    a << 0.0, 1.0, -1.0, 0.0;  // pure rotation: eigenvalue pairs sum to zero
    CHECK_THROWS(solve_lyapunov(a, Mat::Identity(2, 2)));
}

TEST_CASE("hurwitz test and extreme eigenvalues") {
    Mat stable(2, 2);
    stable << -1.0, 5.0, 0.0, -0.1;
    CHECK(is_hurwitz(stable));
    CHECK(max_real_eigenvalue(stable) == doctest::Approx(-0.1));

    Mat marginal(2, 2);
    marginal << 0.0, 1.0, -1.0, 0.0;
    CHECK_FALSE(is_hurwitz(marginal));

    Mat sym(2, 2);
    sym << 2.0, 1.0, 1.0, 2.0;
    CHECK(min_eigenvalue_sym(sym) == doctest::Approx(1.0));
}

TEST_CASE("psd square root reproduces the matrix") {
    Mat m(3, 3);
    m << 4.0, 1.0, 0.0, 1.0, 3.0, 0.5, 0.0, 0.5, 2.0;
    Mat r = psd_sqrt(m);
    CHECK(max_abs_diff(r * r, m) < 1e-12);
    // clamped case: rank-deficient input
    Mat rank1 = Mat::Zero(2, 2);
    rank1(0, 0) = 9.0;
    Mat r1 = psd_sqrt(rank1);
    CHECK(r1(0, 0) == doctest::Approx(3.0));
    CHECK(max_abs(Mat(r1 * r1 - rank1)) < 1e-12);
}

TEST_CASE("condition number of a diagonal matrix") {
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = 1e-6;
    CHECK(condition_number(d) == doctest::Approx(1e6));
}
