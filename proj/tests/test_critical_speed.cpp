#include <doctest.h>

#include <cmath>

#include "dnlkpp/critical_speed.hpp"

using namespace dnlkpp;

namespace {
const Reaction lg = Reaction::logistic();
}

TEST_CASE("linear case: c* = 2") {
    const auto d = make_params(1.0, 2.0);
    const auto res = critical_speed(d, lg, 1e-6);
    CHECK(res.closed_form);
    CHECK(res.c_star == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(res.regime == Regime::PseudoLinear);
}

TEST_CASE("pseudo-linear closed form p (m^2 f'(0))^{1/(mp)}") {
    const auto d = make_params(2.0, 1.5);  // gamma = 0
    const auto res = critical_speed(d, lg, 1e-6);
    CHECK(res.closed_form);
    CHECK(res.c_star == doctest::Approx(1.5 * std::pow(4.0, 1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("porous-medium case m = 2, p = 2: c* = 1") {
    // oracle: phi(xi) = (1 - e^{-xi/2})_+ solves the profile equation at c = 1
    const auto d = make_params(2.0, 2.0);
    const auto res = critical_speed(d, lg, 1e-8);
    CHECK(!res.closed_form);
    CHECK(res.c_star == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(res.c_hi - res.c_lo <= 1e-8);
    CHECK(res.terminal == OrbitTerminal::HitRc);
    // terminal height approaches C = c*^{1/(p-1)} = 1
    CHECK(res.terminal_z == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("c0 bound and its ordering") {
    CHECK(c0_upper_bound(make_params(1.0, 2.0), lg) == doctest::Approx(2.0));
    CHECK(c0_upper_bound(make_params(2.0, 2.0), lg) ==
          doctest::Approx(2.0 * std::sqrt(0.5)));
    for (auto [m, p] : {std::pair{2.0, 2.0}, {3.0, 2.0}, {2.0, 1.8}}) {
        const auto d = make_params(m, p);
        const auto res = critical_speed(d, lg, 1e-4);
        CHECK(res.c_star < c0_upper_bound(d, lg));
    }
}

TEST_CASE("bracket certificate re-classifies under tightened tolerance") {
    const auto d = make_params(2.0, 2.0);
    const auto res = critical_speed(d, lg, 1e-4);
    IntegrateOpts tight;
    tight.rtol = 0.5e-10;
    tight.record = false;
    CHECK(classify_speed(d, lg, res.c_lo, tight) == OrbitTerminal::EscapedUp);
    CHECK(classify_speed(d, lg, res.c_hi, tight) != OrbitTerminal::EscapedUp);
}

TEST_CASE("lambda roots of the pseudo-linear axis equation") {
    const auto d = make_params(1.0, 2.0);
    auto r = pseudo_linear_roots(d, lg, 2.0);
    CHECK(r.lambda1 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.lambda_star == doctest::Approx(1.0));
    CHECK(r.lambda2 == doctest::Approx(1.0).epsilon(1e-6));

    r = pseudo_linear_roots(d, lg, 2.5);
    CHECK(r.lambda1 == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(r.lambda2 == doctest::Approx(2.0).epsilon(1e-10));
    CHECK_THROWS_AS(pseudo_linear_roots(d, lg, 1.9), numerics_error);

    // sign structure: c - p lambda^{p-1} positive at lambda_1, negative at lambda_2
    const double c = 2.5;
    CHECK(c - 2.0 * r.lambda1 > 0.0);
    CHECK(c - 2.0 * r.lambda2 < 0.0);
}

TEST_CASE("scaling covariance of the critical speed") {
    // c*(kappa f) = kappa^{(p-1)/p} c*(f)
    const auto d = make_params(2.0, 2.0);
    const double tol = 1e-5;
    const auto base = critical_speed(d, lg, tol);
    const auto scaled = critical_speed(d, Reaction::logistic(4.0), tol);
    CHECK(std::abs(scaled.c_star - 2.0 * base.c_star) <= 5 * tol + 2e-5);

    // and the pseudo-linear closed form obeys it exactly
    const auto dl = make_params(1.0, 2.0);
    CHECK(critical_speed(dl, Reaction::logistic(4.0), 1e-6).c_star ==
          doctest::Approx(4.0));
}

TEST_CASE("slow-regime speeds extrapolate to the pseudo-linear closed form") {
    // along m = 1 + gamma, p = 2 (so m(p-1) = 1 + gamma)
    const double c1 = critical_speed(make_params(1.01, 2.0), lg, 1e-5).c_star;
    const double c2 = critical_speed(make_params(1.001, 2.0), lg, 1e-5).c_star;
    const double extrap = c2 + (c2 - c1) * 1e-3 / (1e-2 - 1e-3);
    CHECK(std::abs(extrap - 2.0) / 2.0 <= 1e-2);
}

TEST_CASE("continuity sweep runs in parallel and is continuous") {
    std::vector<std::pair<double, double>> path;
    for (int k = 0; k <= 6; ++k) path.emplace_back(2.0, 1.6 + 0.05 * k);
    const auto rows = continuity_sweep(path, lg, 1e-4);
    REQUIRE(rows.size() == path.size());
    double max_jump = 0.0;
    for (size_t i = 1; i < rows.size(); ++i)
        max_jump = std::max(max_jump, std::abs(rows[i].c_star - rows[i - 1].c_star));
    CHECK(max_jump < 0.2);

    // halving the spacing roughly halves the largest jump
    std::vector<std::pair<double, double>> fine;
    for (int k = 0; k <= 12; ++k) fine.emplace_back(2.0, 1.6 + 0.025 * k);
    const auto rows2 = continuity_sweep(fine, lg, 1e-4);
    double max_jump2 = 0.0;
    for (size_t i = 1; i < rows2.size(); ++i)
        max_jump2 = std::max(max_jump2, std::abs(rows2[i].c_star - rows2[i - 1].c_star));
    CHECK(max_jump2 < 0.7 * max_jump);

    const auto single = continuity_sweep({{2.0, 2.0}}, lg, 1e-4);
    CHECK(single.size() == 1);
    CHECK(single[0].c_star == doctest::Approx(1.0).epsilon(1e-3));
}
