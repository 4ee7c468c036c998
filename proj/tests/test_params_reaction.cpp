#include <doctest.h>

#include <cmath>
#include <random>

#include "dnlkpp/reaction.hpp"

using namespace dnlkpp;

TEST_CASE("derived constants and regime tags") {
    const auto lin = make_params(1.0, 2.0);
    CHECK(lin.gamma == 0.0);
    CHECK(lin.mu == 0.0);
    CHECK(lin.pseudo_linear());

    const auto slow = make_params(2.0, 2.0);
    CHECK(slow.gamma == doctest::Approx(1.0));
    CHECK(slow.mu == doctest::Approx(1.0));
    CHECK(slow.slow());

    CHECK_THROWS_AS(make_params(0.5, 2.0), config_error);  // gamma = -0.5
    CHECK_THROWS_AS(make_params(-1.0, 2.0), config_error);
    CHECK_THROWS_AS(make_params(1.0, 1.0), config_error);
}

TEST_CASE("gamma equals mu + p - 2 across the admissible range") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> um(0.05, 5.0), up(1.05, 6.0);
    int tested = 0;
    while (tested < 500) {
        const double m = um(rng), p = up(rng);
        if (m * (p - 1.0) - 1.0 < 0.0) continue;
        const auto d = make_params(m, p);
        CHECK(std::abs(d.gamma - (d.mu + p - 2.0)) <= 1e-14 * (1.0 + std::abs(d.gamma)));
        ++tested;
    }
}

TEST_CASE("reaction evaluation") {
    const auto lg = Reaction::logistic();
    CHECK(eval_f(lg, 0.5) == doctest::Approx(0.25));
    CHECK(eval_f(lg, 1.0) == 0.0);
    CHECK(eval_f(lg, 0.0) == 0.0);
    CHECK_THROWS_AS(eval_f(lg, 1.5), config_error);
    CHECK_THROWS_AS(eval_f(lg, -0.1), config_error);

    const auto sp = Reaction::strong_power(0.5);
    CHECK(eval_f(sp, 0.25) == doctest::Approx(0.375));
}

TEST_CASE("f_mp values and origin limits") {
    const auto lg = Reaction::logistic();
    const auto lin = make_params(1.0, 2.0);
    CHECK(eval_fmp(lin, lg, 0.5) == doctest::Approx(0.5));
    CHECK(eval_fmp(lin, lg, 0.0) == doctest::Approx(1.0));  // m f'(0)

    const auto pme = make_params(2.0, 2.0);
    CHECK(eval_fmp(pme, lg, 0.0) == 0.0);
    CHECK(eval_fmp(pme, lg, 0.5) == doctest::Approx(0.5));  // 2 X (1-X)

    // nonnegative on [0,1], zero at X = 1
    for (int i = 0; i <= 100; ++i) {
        const double X = i / 100.0;
        CHECK(eval_fmp(pme, lg, X) >= 0.0);
    }
    CHECK(eval_fmp(pme, lg, 1.0) == 0.0);

    // log form agrees with the direct form
    for (double X : {1e-8, 1e-4, 0.3, 0.9}) {
        CHECK(eval_fmp_log(pme, lg, std::log(X)) ==
              doctest::Approx(eval_fmp(pme, lg, X)).epsilon(1e-12));
    }
}

TEST_CASE("f_mp maximum: scan plus golden section") {
    const auto lg = Reaction::logistic();

    auto fm = fmp_max(make_params(1.0, 2.0), lg);
    CHECK(fm.X_mp == doctest::Approx(0.0));
    CHECK(fm.F_mp == doctest::Approx(1.0));

    fm = fmp_max(make_params(2.0, 2.0), lg);
    CHECK(std::abs(fm.X_mp - 0.5) <= 2e-8);  // derivative-free max: noise plateau ~ sqrt(ulp)
    CHECK(fm.F_mp == doctest::Approx(0.5).epsilon(1e-12));

    // brute-force oracle for m = 3, p = 2: 10^6-point scan of 3 X^2 (1-X)
    const auto d3 = make_params(3.0, 2.0);
    double bestX = 0.0, bestF = 0.0;
    for (int i = 0; i <= 1000000; ++i) {
        const double X = i * 1e-6;
        const double v = 3.0 * X * X * (1.0 - X);
        if (v > bestF) {
            bestF = v;
            bestX = X;
        }
    }
    fm = fmp_max(d3, lg);
    CHECK(std::abs(fm.X_mp - bestX) <= 1e-6);
    CHECK(std::abs(fm.F_mp - bestF) <= 1e-9);
}

TEST_CASE("normalization to f'(0) = 1") {
    const auto d = make_params(1.0, 2.0);
    const auto lg = Reaction::logistic();

    auto [r1, s1] = normalize_reaction(d, lg);
    CHECK(s1.A == doctest::Approx(1.0));
    CHECK(s1.speed_factor == doctest::Approx(1.0));
    CHECK(r1.fprime0() == doctest::Approx(1.0));

    const auto four = Reaction::logistic(4.0);
    auto [r4, s4] = normalize_reaction(d, four);
    CHECK(s4.speed_factor == doctest::Approx(2.0));  // 4^{1/2}
    CHECK(r4.fprime0() == doctest::Approx(1.0));
    // invariant: speed_factor A^{p-1} = 1
    CHECK(std::abs(s4.speed_factor * std::pow(s4.A, d.p - 1.0) - 1.0) <= 1e-14);
}

TEST_CASE("tabulated reactions interpolate and validate") {
    const int n = 41;
    Eigen::ArrayXd u(n), f(n);
    for (int i = 0; i < n; ++i) {
        u[i] = double(i) / (n - 1);
        f[i] = u[i] * (1.0 - u[i]);
    }
    const auto tab = Reaction::tabulated(u, f, 1.0, -1.0);
    for (double x : {0.1, 0.33, 0.5, 0.77}) {
        CHECK(tab.value(x) == doctest::Approx(x * (1.0 - x)).epsilon(2e-3));
    }
    CHECK(tab.fprime0() == 1.0);

    // non-concave table rejected
    Eigen::ArrayXd g = f;
    g[n / 2] = 0.05;  // dent
    CHECK_THROWS_AS(Reaction::tabulated(u, g, 1.0, -1.0), config_error);

    // f_mp with a tabulated reaction matches the logistic one
    const auto d = make_params(2.0, 2.0);
    const auto lg = Reaction::logistic();
    for (double X : {0.2, 0.5, 0.8}) {
        CHECK(eval_fmp(d, tab, X) == doctest::Approx(eval_fmp(d, lg, X)).epsilon(5e-3));
    }
}
