#pragma once

#include <vector>

#include "dnlkpp/critical_speed.hpp"
#include "dnlkpp/wave_profile.hpp"

namespace dnlkpp {

/// f(u) = u^n (1-u): the transformed reaction is f_mp(X) = m X^q (1-X) with
/// q = [gamma + (n-1)(p-1)]/(p-1), the slow-diffusion/strong-reaction balance.
struct StrongReactionCase {
    DiffusionParams params;
    double n = 1.0;
    double q = 0.0;
};

StrongReactionCase make_strong_case(const DiffusionParams& d, double n);

enum class TwClass {
    NoTWs,                       // q < 0
    AllFinite,                   // q == 0
    CriticalFiniteOthersFinite,  // q > 0, n < 1: every wave is finite
    CriticalFiniteOthersPositive,  // q > 0, n >= 1 (gamma > 0)
    AllPositive                  // gamma == 0, n >= 1
};

const char* to_string(TwClass c);

/// Symbolic classification from (q, n). Finiteness of the supercritical waves
/// follows the xi-quadrature endpoint power -n: convergent exactly when n < 1.
TwClass classify(const StrongReactionCase& sc);

struct StrongVerifyRow {
    double c = 0.0;
    bool finite_predicted = false;
    bool finite_measured = false;
    double endpoint_power = 0.0;  // measured ln-integrand slope as X -> 0
    double guide_ratio = 0.0;     // Z X^{-q} c / m at the smallest sampled X
};

struct StrongVerifyReport {
    StrongReactionCase sc;
    TwClass symbolic = TwClass::NoTWs;
    double c_star = 0.0;
    std::vector<StrongVerifyRow> rows;
    bool agree = false;
};

/// Computes c*(m,p,n) with the shared bisection machinery, reconstructs waves at
/// multipliers {1, 1.5, 2, ...} of c*, and checks measured finiteness and the
/// near-origin orbit law Z ~ (m/c) X^q against the symbolic classification.
StrongVerifyReport verify_numerically(const StrongReactionCase& sc, int c_count = 3,
                                      double tol = 1e-6);

}  // namespace dnlkpp
