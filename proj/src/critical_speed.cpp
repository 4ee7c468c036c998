#include "dnlkpp/critical_speed.hpp"

#include <cmath>
#include <future>
#include <sstream>

#include "dnlkpp/errors.hpp"

namespace dnlkpp {

double c0_upper_bound(const DiffusionParams& d, const Reaction& r) {
    const FmpMax fm = fmp_max(d, r);
    return d.p * std::pow(fm.F_mp / (d.p - 1.0), (d.p - 1.0) / d.p);
}

OrbitTerminal classify_speed(const DiffusionParams& d, const Reaction& r, double c,
                             const IntegrateOpts& opts, int* evals) {
    IntegrateOpts o = opts;
    o.record = false;
    for (int attempt = 0; attempt < 2; ++attempt) {
        IntegrateOpts half = o;
        half.x_patch = 0.5 * o.x_patch;
        const OrbitTrace a = integrate_from_S(d, r, c, o);
        const OrbitTrace b = integrate_from_S(d, r, c, half);
        if (evals) *evals += 2;
        if (a.escaped() == b.escaped() && a.reached_axis() == b.reached_axis() &&
            (a.escaped() || a.reached_axis()))
            return a.terminal;
        // Richardson disagreement: tighten and retry once
        o.rtol *= 1e-3;
        o.atol *= 1e-3;
    }
    std::ostringstream msg;
    msg << "orbit classification uncertain at c = " << c;
    throw numerics_error(msg.str());
}

CriticalSpeedResult critical_speed(const DiffusionParams& d, const Reaction& r, double tol) {
    if (!(tol >= 1e-8)) throw config_error("critical-speed tolerance must be >= 1e-8");
    const double e0 = fmp_origin_power(d, r);
    if (e0 < 0.0)
        throw config_error("f_mp diverges at the origin (q < 0): no admissible waves");

    CriticalSpeedResult res;
    res.regime = d.regime;

    if (e0 == 0.0) {
        // f_mp is maximal at X = 0: the touch value is the critical speed.
        res.closed_form = true;
        res.c_star = c0_upper_bound(d, r);
        const double probe = 10.0 * tol;
        res.c_lo = res.c_star * (1.0 - probe);
        res.c_hi = res.c_star * (1.0 + probe);
        const OrbitTerminal lo = classify_speed(d, r, res.c_lo, {}, &res.evaluations);
        const OrbitTerminal hi = classify_speed(d, r, res.c_hi, {}, &res.evaluations);
        if (lo != OrbitTerminal::EscapedUp || hi == OrbitTerminal::EscapedUp) {
            std::ostringstream msg;
            msg << "closed-form critical speed failed its flip check: classify("
                << res.c_lo << ") = " << to_string(lo) << ", classify(" << res.c_hi
                << ") = " << to_string(hi);
            throw numerics_error(msg.str());
        }
        OrbitTrace t = integrate_from_S(d, r, res.c_hi, {});
        res.terminal = t.terminal;
        res.terminal_z = t.z_end;
        return res;
    }

    // Interior-maximum f_mp: bisection on [~0, c0].
    const double c0 = c0_upper_bound(d, r);
    double lo = 1e-3 * c0, hi = c0;
    OrbitTerminal tlo = classify_speed(d, r, lo, {}, &res.evaluations);
    for (int widen = 0; tlo != OrbitTerminal::EscapedUp && widen < 6; ++widen) {
        lo *= 0.1;
        tlo = classify_speed(d, r, lo, {}, &res.evaluations);
    }
    const OrbitTerminal thi = classify_speed(d, r, hi, {}, &res.evaluations);
    if (tlo != OrbitTerminal::EscapedUp || thi == OrbitTerminal::EscapedUp) {
        std::ostringstream msg;
        msg << "bisection bracket failure on [" << lo << ", " << hi
            << "]: classify(lo) = " << to_string(tlo) << ", classify(hi) = " << to_string(thi);
        throw numerics_error(msg.str());
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (classify_speed(d, r, mid, {}, &res.evaluations) == OrbitTerminal::EscapedUp)
            lo = mid;
        else
            hi = mid;
    }
    res.c_lo = lo;
    res.c_hi = hi;
    res.c_star = 0.5 * (lo + hi);
    // terminal certificate at c_hi: stop above the depth where the residual
    // bracket width would visibly peel the orbit off the critical connection
    IntegrateOpts fin;
    fin.x_floor = std::max(1e-10, std::sqrt(0.5 * (hi - lo)));
    OrbitTrace t = integrate_from_S(d, r, hi, fin);
    res.terminal = t.terminal;
    res.terminal_z = t.z_end;
    return res;
}

namespace {
PseudoLinearRoots lambda_roots_impl(const DiffusionParams& d, const Reaction& r, double c) {
    const double mf0 = d.m * r.fprime0();
    const double c0s = d.p * std::pow(mf0 / (d.p - 1.0), (d.p - 1.0) / d.p);
    if (c < c0s * (1.0 - 1e-12)) throw numerics_error("no real lambda-roots below c0*");
    PseudoLinearRoots out;
    out.lambda_star = std::pow(c0s / d.p, 1.0 / (d.p - 1.0));
    const auto roots = isocline_roots(c, d.p, mf0);
    if (!roots) {
        // c == c0* within rounding: double root
        out.lambda1 = out.lambda2 = out.lambda_star;
        return out;
    }
    out.lambda1 = roots->first;
    out.lambda2 = roots->second;
    return out;
}
}  // namespace

PseudoLinearRoots pseudo_linear_roots(const DiffusionParams& d, const Reaction& r, double c) {
    if (!d.pseudo_linear()) throw config_error("lambda-roots apply to the gamma = 0 case");
    return lambda_roots_impl(d, r, c);
}

std::vector<SweepRow> continuity_sweep(const std::vector<std::pair<double, double>>& path,
                                       const Reaction& r, double tol) {
    std::vector<std::future<SweepRow>> futs;
    futs.reserve(path.size());
    for (const auto& [m, p] : path) {
        futs.push_back(std::async(std::launch::async, [m = m, p = p, &r, tol] {
            const DiffusionParams d = make_params(m, p);
            SweepRow row;
            row.m = m;
            row.p = p;
            row.gamma = d.gamma;
            row.c0_bound = c0_upper_bound(d, r);
            const CriticalSpeedResult cs = critical_speed(d, r, tol);
            row.c_star = cs.c_star;
            row.evaluations = cs.evaluations;
            return row;
        }));
    }
    std::vector<SweepRow> rows;
    rows.reserve(futs.size());
    for (auto& f : futs) rows.push_back(f.get());
    return rows;
}

}  // namespace dnlkpp
