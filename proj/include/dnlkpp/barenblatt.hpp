#pragma once

#include "dnlkpp/params.hpp"

namespace dnlkpp {

/// Source-type self-similar solution of the pure diffusion equation
/// du/dt = div(|grad u^m|^{p-2} grad u^m):  B_M(x,t) = t^{-alpha} F(|x| t^{-alpha/N}),
///   gamma > 0:  F(xi) = (C_M - k xi^{p/(p-1)})_+^{(p-1)/gamma}   (compact support)
///   gamma = 0:  F(xi) = C_M exp(-k xi^{p/(p-1)})                 (positive)
struct BarenblattSpec {
    DiffusionParams params;
    int N = 1;
    double M = 1.0;
    double C_M = 0.0;
    double alpha = 0.0;  // 1/(gamma + p/N)
    double k = 0.0;
};

/// Builds the spec with C_M solved from the mass by radial quadrature and
/// root-finding on the monotone map C -> mass.
BarenblattSpec make_barenblatt(const DiffusionParams& d, int N, double M);

/// Total mass for a given profile constant (radial quadrature).
double barenblatt_mass(const DiffusionParams& d, int N, double C);

/// C_M such that the mass equals M.
double mass_to_constant(const DiffusionParams& d, int N, double M);

/// B_M at radius |x| and time t > 0.
double barenblatt_eval(const BarenblattSpec& spec, double x, double t);

/// Support radius at time t (gamma > 0; infinity for gamma = 0).
double barenblatt_support_radius(const BarenblattSpec& spec, double t);

/// |B_M(x,t) - M B_1(x, M^gamma t)| with B_1 built independently.
double scaling_identity_check(const BarenblattSpec& spec, double x, double t);

}  // namespace dnlkpp
