#pragma once

#include <vector>

#include "dnlkpp/phase_plane.hpp"

namespace dnlkpp {

struct CriticalSpeedResult {
    double c_star = 0.0;
    double c_lo = 0.0;  // certified EscapedUp
    double c_hi = 0.0;  // certified axis connection
    int evaluations = 0;
    Regime regime = Regime::Slow;
    bool closed_form = false;   // origin-limit f_mp: c* is the isocline-touch value
    double terminal_z = 0.0;    // Z at the end of the c_hi orbit
    OrbitTerminal terminal = OrbitTerminal::ReachedXZero;
};

/// Isocline-touching speed c0 = p (F_mp/(p-1))^{(p-1)/p}; an upper bound for c*
/// whenever f_mp has an interior maximum, and equal to c* when f_mp attains its
/// maximum at X = 0 (pseudo-linear case and the q = 0 strong-reaction balance).
double c0_upper_bound(const DiffusionParams& d, const Reaction& r);

/// Classifies the S-orbit at speed c as subcritical (EscapedUp) or connecting,
/// with the patch-halving agreement rule: the verdict must be identical when
/// the seed patch is halved, else the integrator tolerance is tightened once
/// before giving up.
OrbitTerminal classify_speed(const DiffusionParams& d, const Reaction& r, double c,
                             const IntegrateOpts& opts = {}, int* evals = nullptr);

/// Critical wave speed. Bisection on the orbit dichotomy when f_mp has an
/// interior maximum; the closed-form touch value (flip-checked at +-10 tol)
/// when f_mp is maximal at the origin.
CriticalSpeedResult critical_speed(const DiffusionParams& d, const Reaction& r,
                                   double tol = 1e-6);

struct PseudoLinearRoots {
    double lambda1 = 0.0;
    double lambda_star = 0.0;
    double lambda2 = 0.0;
};

/// Roots 0 < lambda_1 <= lambda_* <= lambda_2 of c l - l^p - m f'(0) = 0 for the
/// pseudo-linear case; the double root lambda_* at c = c0*. Throws below c0*.
PseudoLinearRoots pseudo_linear_roots(const DiffusionParams& d, const Reaction& r, double c);

struct SweepRow {
    double m = 0.0, p = 0.0, gamma = 0.0;
    double c_star = 0.0, c0_bound = 0.0;
    int evaluations = 0;
};

/// c* along a path of (m,p) points; points run in parallel.
std::vector<SweepRow> continuity_sweep(const std::vector<std::pair<double, double>>& path,
                                       const Reaction& r, double tol = 1e-6);

}  // namespace dnlkpp
