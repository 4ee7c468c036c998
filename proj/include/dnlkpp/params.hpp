#pragma once

#include <cmath>

#include "dnlkpp/errors.hpp"

namespace dnlkpp {

enum class Regime { Slow, PseudoLinear };

// gamma = m(p-1)-1 == 0 is an exact algebraic case in the theory; floating-point
// inputs get a detection band instead.
inline constexpr double kPseudoLinearBand = 1e-12;

/// Diffusion exponents (m, p) of  du/dt = div(|grad u^m|^{p-2} grad u^m) + f(u)
/// together with the derived constants mu = (m-1)(p-1) and gamma = m(p-1)-1.
/// gamma > 0 is the slow-diffusion range (finite propagation, free boundaries),
/// gamma == 0 the pseudo-linear range (homogeneity one, infinite propagation).
struct DiffusionParams {
    double m = 1.0;
    double p = 2.0;
    double gamma = 0.0;
    double mu = 0.0;
    Regime regime = Regime::PseudoLinear;

    bool slow() const { return regime == Regime::Slow; }
    bool pseudo_linear() const { return regime == Regime::PseudoLinear; }

    /// C = c^{1/(p-1)}, height of the critical point R_c on the Z-axis.
    double z_of_speed(double c) const { return std::pow(c, 1.0 / (p - 1.0)); }
};

/// Validates m > 0, p > 1 and rejects the fast-diffusion range gamma < 0.
inline DiffusionParams make_params(double m, double p) {
    if (!(m > 0.0)) throw config_error("diffusion power m must be > 0");
    if (!(p > 1.0)) throw config_error("gradient power p must be > 1");
    DiffusionParams d;
    d.m = m;
    d.p = p;
    d.gamma = m * (p - 1.0) - 1.0;
    d.mu = (m - 1.0) * (p - 1.0);
    if (d.gamma < -kPseudoLinearBand)
        throw config_error("fast diffusion (gamma = m(p-1)-1 < 0) is not supported");
    d.regime = (d.gamma > kPseudoLinearBand) ? Regime::Slow : Regime::PseudoLinear;
    if (d.regime == Regime::PseudoLinear) d.gamma = 0.0;
    return d;
}

/// Exact pseudo-linear parameters from p alone: m = 1/(p-1), so gamma == 0 holds
/// without floating-point drift.
inline DiffusionParams make_pseudo_linear(double p) {
    if (!(p > 1.0)) throw config_error("gradient power p must be > 1");
    return make_params(1.0 / (p - 1.0), p);
}

}  // namespace dnlkpp
