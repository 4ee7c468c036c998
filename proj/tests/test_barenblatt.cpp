#include <doctest.h>
#include <tuple>

#include <cmath>

#include "dnlkpp/barenblatt.hpp"

using namespace dnlkpp;

namespace {

// closed-form mass of the compact profile via the Beta function:
// M = S_{N-1} (C/k)^{N/a} C^b  B(N/a, b+1) / a,  a = p/(p-1), b = (p-1)/gamma,
// with the profile constant k = gamma/(m p) (alpha/N)^{1/(p-1)}
double beta_mass_oracle(const DiffusionParams& d, int N, double C) {
    const double a = d.p / (d.p - 1.0);
    const double b = (d.p - 1.0) / d.gamma;
    const double alpha = 1.0 / (d.gamma + d.p / N);
    const double k = d.gamma / (d.m * d.p) * std::pow(alpha / N, 1.0 / (d.p - 1.0));
    const double S = 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N);
    const double logB = std::lgamma(double(N) / a) + std::lgamma(b + 1.0) -
                        std::lgamma(double(N) / a + b + 1.0);
    return S * std::pow(C / k, double(N) / a) * std::pow(C, b) * std::exp(logB) / a;
}

}  // namespace

TEST_CASE("quadrature mass matches the Beta-function closed form (gamma > 0)") {
    using Case = std::tuple<double, double, int>;
    for (auto [m, p, N] : {Case{2.0, 2.0, 1}, Case{3.0, 2.0, 1}, Case{2.0, 1.8, 2}}) {
        const auto d = make_params(m, p);
        for (double C : {0.3, 1.0, 2.5}) {
            const double got = barenblatt_mass(d, N, C);
            const double want = beta_mass_oracle(d, N, C);
            CHECK(got == doctest::Approx(want).epsilon(1e-9));
        }
    }
}

TEST_CASE("Gaussian case recovers the analytic normalization") {
    const auto d = make_params(1.0, 2.0);
    const auto spec = make_barenblatt(d, 1, 1.0);
    CHECK(spec.alpha == doctest::Approx(0.5));          // N/p
    CHECK(spec.k == doctest::Approx(0.25));             // (p-1) p^{-p/(p-1)}
    CHECK(spec.C_M == doctest::Approx(1.0 / std::sqrt(4.0 * M_PI)).epsilon(1e-9));
    // value check against the heat kernel at a few points
    for (double t : {0.5, 1.0, 4.0}) {
        for (double x : {0.0, 0.7, 2.0}) {
            const double want = std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * M_PI * t);
            CHECK(barenblatt_eval(spec, x, t) == doctest::Approx(want).epsilon(1e-9));
        }
    }
}

TEST_CASE("mass round trip, monotonicity, and conservation in time") {
    const auto d = make_params(2.0, 2.0);
    for (double M : {0.5, 1.0, 3.0}) {
        const double C = mass_to_constant(d, 1, M);
        CHECK(barenblatt_mass(d, 1, C) == doctest::Approx(M).epsilon(1e-8));
    }
    CHECK(mass_to_constant(d, 1, 2.0) > mass_to_constant(d, 1, 1.0));

    // numerically integrated mass of B_M(.,t) is M at widely separated times
    const auto spec = make_barenblatt(d, 1, 3.0);
    for (double t : {0.5, 5.0, 50.0}) {
        const double R = barenblatt_support_radius(spec, t);
        const int n = 40000;
        const double h = R / n;
        double mass = 0.0;  // Simpson, then doubled for the two half-lines
        for (int i = 0; i < n; ++i) {
            const double x0 = i * h, x1 = (i + 1) * h;
            mass += h / 6.0 *
                    (barenblatt_eval(spec, x0, t) +
                     4.0 * barenblatt_eval(spec, 0.5 * (x0 + x1), t) +
                     barenblatt_eval(spec, x1, t));
        }
        CHECK(2.0 * mass == doctest::Approx(3.0).epsilon(1e-6));
    }
}

TEST_CASE("compact support for gamma > 0, positivity for gamma = 0") {
    const auto ds = make_params(2.0, 2.0);
    const auto s1 = make_barenblatt(ds, 1, 1.0);
    const double R = barenblatt_support_radius(s1, 2.0);
    CHECK(barenblatt_eval(s1, R * 1.01, 2.0) == 0.0);
    CHECK(barenblatt_eval(s1, R * 0.99, 2.0) > 0.0);
    // support radius is the inverted cutoff: F(R t^{-alpha/N}) = 0
    const double xi_edge = R * std::pow(2.0, -s1.alpha / s1.N);
    CHECK(s1.C_M - s1.k * std::pow(xi_edge, ds.p / (ds.p - 1.0)) ==
          doctest::Approx(0.0).epsilon(1e-10));

    const auto dl = make_params(2.0, 1.5);
    const auto s0 = make_barenblatt(dl, 1, 1.0);
    CHECK(s0.alpha == doctest::Approx(double(s0.N) / dl.p));
    for (double x : {0.0, 5.0, 50.0}) CHECK(barenblatt_eval(s0, x, 1.0) > 0.0);
}

TEST_CASE("mass scaling identity B_M(x,t) = M B_1(x, M^gamma t)") {
    const auto d = make_params(2.0, 2.0);
    const auto spec = make_barenblatt(d, 1, 3.0);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            const double x = -4.0 + 8.0 * i / 9.0;
            const double t = 0.25 + 2.0 * j / 9.0;
            worst = std::max(worst, scaling_identity_check(spec, x, t));
        }
    }
    CHECK(worst <= 1e-8);

    // M = 1 is the identity; gamma = 0 reduces to linear scaling in M
    const auto unit = make_barenblatt(d, 1, 1.0);
    CHECK(scaling_identity_check(unit, 0.7, 1.3) <= 1e-12);
    const auto dl = make_params(1.0, 2.0);
    const auto g0 = make_barenblatt(dl, 1, 2.0);
    CHECK(scaling_identity_check(g0, 0.7, 1.3) <= 1e-10);
}

TEST_CASE("the profile solves the pure diffusion equation in the interior") {
    // finite-difference residual of du/dt = (|(u^m)_x|^{p-2}(u^m)_x)_x
    const auto d = make_params(2.0, 2.0);
    const auto spec = make_barenblatt(d, 1, 1.0);
    const double t = 1.0;
    const double R = barenblatt_support_radius(spec, t);
    const double hx = 1e-3, ht = 1e-5;
    auto flux = [&](double x) {
        const double vp = (std::pow(barenblatt_eval(spec, x + 0.5 * hx, t), d.m) -
                           std::pow(barenblatt_eval(spec, x - 0.5 * hx, t), d.m)) /
                          hx;
        return std::copysign(std::pow(std::abs(vp), d.p - 1.0), vp);
    };
    for (double xr : {0.2, 0.45, 0.7}) {
        const double x = xr * R;
        const double dudt = (barenblatt_eval(spec, x, t + ht) -
                             barenblatt_eval(spec, x, t - ht)) /
                            (2.0 * ht);
        const double div = (flux(x + 0.5 * hx) - flux(x - 0.5 * hx)) / hx;
        CHECK(dudt == doctest::Approx(div).epsilon(5e-4));
    }
}
