#include <doctest.h>

#include <cmath>

#include "dnlkpp/critical_speed.hpp"
#include "dnlkpp/wave_profile.hpp"

using namespace dnlkpp;

namespace {
const Reaction lg = Reaction::logistic();

WaveProfile wave_at(const DiffusionParams& d, double c, double x_floor = 1e-10) {
    IntegrateOpts opts;
    opts.x_floor = x_floor;
    return reconstruct_profile(d, lg, integrate_from_S(d, lg, c, opts));
}
}  // namespace

TEST_CASE("critical wave of the porous-medium case is finite with a free boundary") {
    const auto d = make_params(2.0, 2.0);
    const auto cs = critical_speed(d, lg, 1e-8);
    const auto w = wave_at(d, cs.c_hi, 1e-8);
    CHECK(w.kind == WaveKind::FinitePositiveTW);
    CHECK(std::isfinite(w.xi_free_boundary));
    // exact zeros left of the boundary
    CHECK(w.phi[0] == 0.0);
    CHECK(w.phi[1] == 0.0);
    // monotone, reaches the upper state
    for (Eigen::Index i = 1; i < w.phi.size(); ++i) CHECK(w.phi[i] >= w.phi[i - 1]);
    CHECK(w.phi[w.phi.size() - 1] >= 1.0 - 1e-4);
    // nonlinear flux is continuous at the free boundary: tiny just right of it
    for (Eigen::Index i = 0; i < w.phi.size(); ++i) {
        if (w.phi[i] > 0.0 && w.phi[i] < 1e-6) CHECK(std::abs(w.flux[i]) < 1e-4);
    }

    // exact profile oracle: phi = (1 - e^{-xi/2})_+ at c = 1, anchored phi(0)=1/2:
    // phi(xi) = 1 - e^{-(xi + 2 ln 2)/2}
    for (double xi : {-1.0, 0.0, 1.0, 3.0}) {
        const double expect = 1.0 - std::exp(-(xi + 2.0 * std::log(2.0)) / 2.0);
        CHECK(w.phi_at(xi) == doctest::Approx(expect).epsilon(2e-4));
    }
    // free boundary of the anchored exact wave: xi0 = -2 ln 2
    CHECK(w.xi_free_boundary == doctest::Approx(-2.0 * std::log(2.0)).epsilon(2e-3));
}

TEST_CASE("free-boundary exponent matches (p-1)/gamma") {
    // oracle: dX/dxi = (C/m) X^{(1-mu)/(p-1)} near the edge integrates to
    // X ~ (xi-xi0)^{(p-1)/gamma}
    for (auto [m, p] : {std::pair{2.0, 2.0}, {3.0, 2.0}}) {
        const auto d = make_params(m, p);
        const auto cs = critical_speed(d, lg, 1e-8);
        const auto w = wave_at(d, cs.c_hi, 1e-8);
        REQUIRE(w.kind == WaveKind::FinitePositiveTW);
        const double expect = (p - 1.0) / d.gamma;
        CHECK(std::abs(free_boundary_exponent(w, d) - expect) <= 0.05 * expect);
    }
}

TEST_CASE("supercritical slow-diffusion tails are exponential with rate f'(0)/c") {
    const auto d = make_params(2.0, 2.0);
    for (double c : {1.5, 2.0}) {
        const auto w = wave_at(d, c);
        REQUIRE(w.kind == WaveKind::PositiveTW);
        const auto fit = fit_tail(w, d, lg);
        CHECK(fit.model == TailFit::Model::PureExp);
        CHECK(std::abs(fit.rate - 1.0 / c) <= 0.02 / c);
        CHECK(fit.residual <= 0.05);
    }
}

TEST_CASE("pseudo-linear tails: lambda_1/m supercritical, |xi|^{2/p} prefactor at c0*") {
    const auto d = make_params(2.0, 1.5);  // gamma = 0
    const auto cs = critical_speed(d, lg, 1e-8);

    const double c_sup = 1.5 * cs.c_star;
    const auto w = wave_at(d, c_sup);
    REQUIRE(w.kind == WaveKind::PositiveTW);
    const auto fit = fit_tail(w, d, lg);
    CHECK(fit.model == TailFit::Model::PureExp);
    const double lam1 = pseudo_linear_roots(d, lg, c_sup).lambda1;
    CHECK(std::abs(fit.rate - lam1 / d.m) <= 0.02 * lam1 / d.m);

    const auto wc = wave_at(d, cs.c_star);
    REQUIRE(wc.kind == WaveKind::PositiveTW);
    const auto fc = fit_tail(wc, d, lg);
    CHECK(fc.model == TailFit::Model::ExpWithPowerPrefactor);
    CHECK(std::abs(fc.power - 2.0 / d.p) <= 0.1 * (2.0 / d.p));
    // rate lambda*/m = m^{(2-p)/p} f'(0)^{1/p}
    const double expect_rate = std::pow(d.m, (2.0 - d.p) / d.p);
    CHECK(fc.rate == doctest::Approx(expect_rate).epsilon(0.05));
}

TEST_CASE("translation invariance of the anchor") {
    const auto d = make_params(2.0, 2.0);
    IntegrateOpts opts;
    const auto tr = integrate_from_S(d, lg, 1.5, opts);
    const auto w1 = reconstruct_profile(d, lg, tr, 0.5);
    const auto w2 = reconstruct_profile(d, lg, tr, 0.25);
    const double shift = w2.xi[0] - w1.xi[0];
    for (Eigen::Index i = 0; i < w1.xi.size(); i += 50) {
        CHECK(w2.xi[i] - w1.xi[i] == doctest::Approx(shift).epsilon(1e-12));
        CHECK(w2.phi[i] == doctest::Approx(w1.phi[i]).epsilon(1e-10));
    }
}

TEST_CASE("profile ODE residual in integrated form") {
    const auto d = make_params(2.0, 2.0);
    const auto w = wave_at(d, 1.5);
    CHECK(profile_ode_residual(w, d, lg) <= 1e-6);

    const auto dl = make_params(2.0, 1.5);
    const auto wl = wave_at(dl, 1.2 * critical_speed(dl, lg, 1e-6).c_star);
    CHECK(profile_ode_residual(wl, dl, lg) <= 1e-6);
}

TEST_CASE("change-sign waves: finite zeros, derivative law, truncated view") {
    const auto d = make_params(2.0, 2.0);
    const auto w = build_cs_tw(d, lg, 0.5, 0.9);
    CHECK(w.kind == WaveKind::ChangeSignTW);
    CHECK(std::isfinite(w.xi_left_zero));
    CHECK(std::isfinite(w.xi_right_zero));
    CHECK(w.xi_left_zero < 0.0);
    CHECK(w.xi_right_zero > 0.0);
    CHECK(w.peak == doctest::Approx(0.9));
    CHECK(w.phi.maxCoeff() <= 0.9 + 1e-9);

    // near the zeros dX/dxi ~ a X^{1-m}, i.e. phi ~ (xi-xi0)^{1/m}
    const double expo = free_boundary_exponent(w, d);
    CHECK(std::abs(expo - 1.0 / d.m) <= 0.05 / d.m);

    const Eigen::ArrayXd q = Eigen::ArrayXd::LinSpaced(9, -2.0, w.xi_right_zero + 1.0);
    const Eigen::ArrayXd v = eval_truncated(w, q);
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        if (q[i] <= 0.0) CHECK(v[i] == doctest::Approx(0.9));
        if (q[i] >= w.xi_right_zero) CHECK(v[i] == 0.0);
    }

    // no type-2 wave at or above the critical speed
    CHECK_THROWS_AS(build_cs_tw(d, lg, 1.2, 0.9), numerics_error);
}
