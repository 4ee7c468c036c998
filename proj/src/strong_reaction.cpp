#include "dnlkpp/strong_reaction.hpp"

#include <cmath>

#include "dnlkpp/errors.hpp"

namespace dnlkpp {

StrongReactionCase make_strong_case(const DiffusionParams& d, double n) {
    StrongReactionCase sc;
    sc.params = d;
    sc.n = n;
    sc.q = (d.gamma + (n - 1.0) * (d.p - 1.0)) / (d.p - 1.0);
    return sc;
}

const char* to_string(TwClass c) {
    switch (c) {
        case TwClass::NoTWs: return "NoTWs";
        case TwClass::AllFinite: return "AllFinite";
        case TwClass::CriticalFiniteOthersFinite: return "CriticalFiniteOthersFinite";
        case TwClass::CriticalFiniteOthersPositive: return "CriticalFiniteOthersPositive";
        case TwClass::AllPositive: return "AllPositive";
    }
    return "?";
}

TwClass classify(const StrongReactionCase& sc) {
    const double q = sc.q;
    if (sc.params.pseudo_linear()) {
        // q = n - 1 here; no waves below n = 1, positive waves from n = 1 on
        return sc.n < 1.0 ? TwClass::NoTWs : TwClass::AllPositive;
    }
    if (q < -kPseudoLinearBand) return TwClass::NoTWs;
    if (std::abs(q) <= kPseudoLinearBand) return TwClass::AllFinite;
    return sc.n < 1.0 ? TwClass::CriticalFiniteOthersFinite
                      : TwClass::CriticalFiniteOthersPositive;
}

StrongVerifyReport verify_numerically(const StrongReactionCase& sc, int c_count,
                                      double tol) {
    if (sc.q < 0.0) throw config_error("numerical verification needs q >= 0");
    StrongVerifyReport rep;
    rep.sc = sc;
    rep.symbolic = classify(sc);
    const Reaction r = Reaction::strong_power(sc.n);
    const DiffusionParams& d = sc.params;

    const CriticalSpeedResult cs = critical_speed(d, r, tol);
    rep.c_star = cs.c_star;

    const double beta = (1.0 - d.mu) / (d.p - 1.0);
    rep.agree = true;
    for (int k = 0; k < c_count; ++k) {
        const double mult = 1.0 + 0.5 * k;
        StrongVerifyRow row;
        row.c = mult * cs.c_star;
        const bool critical = (k == 0);
        // finiteness prediction per the symbolic class
        switch (rep.symbolic) {
            case TwClass::AllFinite:
            case TwClass::CriticalFiniteOthersFinite:
                row.finite_predicted = true;
                break;
            case TwClass::CriticalFiniteOthersPositive:
                row.finite_predicted = critical;
                break;
            case TwClass::AllPositive:
                row.finite_predicted = false;
                break;
            case TwClass::NoTWs:
                row.finite_predicted = false;
                break;
        }

        IntegrateOpts opts;
        opts.record = true;
        const double c_run = critical ? cs.c_hi : row.c;
        const OrbitTrace tr = integrate_from_S(d, r, c_run, opts);
        const WaveProfile w = reconstruct_profile(d, r, tr);
        row.finite_measured = (w.kind == WaveKind::FinitePositiveTW);

        // measured endpoint power of the xi-integrand m/(Z X^beta): the slope of
        // its logarithm against ln X over the deepest sampled decade pair
        const auto& ss = tr.samples;
        if (ss.size() > 10) {
            const auto& tail = ss.back();
            const auto& mid = ss[ss.size() / 2 + ss.size() / 4];
            const double g1 = std::log(d.m / (tail.Z * std::pow(tail.X, beta)));
            const double g0 = std::log(d.m / (mid.Z * std::pow(mid.X, beta)));
            row.endpoint_power = (g1 - g0) / (std::log(tail.X) - std::log(mid.X));
        }
        if (!critical && sc.q > 0.0) {
            const auto& tail = ss.back();
            row.guide_ratio = tail.Z * std::pow(tail.X, -sc.q) * row.c / d.m;
        }
        if (row.finite_measured != row.finite_predicted) rep.agree = false;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace dnlkpp
