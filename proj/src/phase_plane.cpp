#include "dnlkpp/phase_plane.hpp"

#include <algorithm>
#include <cmath>

#include "dnlkpp/errors.hpp"
#include "dnlkpp/ode.hpp"

namespace dnlkpp {

namespace {

inline double sgn_pow(double z, double e) {
    // sign(z)|z|^e, defined at z = 0 for e > 0
    if (z == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(z), e), z);
}

}  // namespace

PhaseState vector_field(const DiffusionParams& d, const Reaction& r, double c,
                        const PhaseState& s) {
    if (!(c > 0.0)) throw config_error("wave speed c must be > 0");
    if (!(s.X >= 0.0)) throw config_error("phase state needs X >= 0");
    PhaseState out;
    out.X = (d.p - 1.0) * s.X * sgn_pow(s.Z, d.p - 1.0);
    out.Z = c * s.Z - std::pow(std::abs(s.Z), d.p) - eval_fmp(d, r, std::min(s.X, 1.0));
    return out;
}

double trajectory_slope(const DiffusionParams& d, const Reaction& r, double c,
                        double X, double Z) {
    const double num = c * Z - std::pow(std::abs(Z), d.p) - eval_fmp(d, r, X);
    const double den = (d.p - 1.0) * X * sgn_pow(Z, d.p - 1.0);
    return num / den;
}

std::optional<std::pair<double, double>> isocline_roots(double c, double p, double value) {
    const double zv = std::pow(c / p, 1.0 / (p - 1.0));
    const double gv = c * zv - std::pow(zv, p) - value;
    if (gv < 0.0) {
        // touching within rounding: report the double root
        if (gv > -1e-12 * std::max(1.0, std::abs(value))) return std::make_pair(zv, zv);
        return std::nullopt;
    }
    auto g = [&](double z) { return c * z - std::pow(z, p) - value; };
    // lower root in [0, zv]
    double lo = 0.0, hi = zv;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    const double z_low = 0.5 * (lo + hi);
    // upper root in [zv, C]; C itself has g(C) = -value <= 0
    const double C = std::pow(c, 1.0 / (p - 1.0));
    lo = zv;
    hi = std::max(C, zv) * (1.0 + 1e-15);
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) >= 0.0 ? lo : hi) = mid;
    }
    return std::make_pair(z_low, 0.5 * (lo + hi));
}

IsoclineBranches null_isoclines(const DiffusionParams& d, const Reaction& r, double c,
                                int n_samples) {
    if (!(c > 0.0)) throw config_error("wave speed c must be > 0");
    if (n_samples < 2) throw config_error("isocline sampling needs >= 2 points");
    IsoclineBranches out;
    out.c = c;
    const FmpMax fm = fmp_max(d, r);
    out.c0 = d.p * std::pow(fm.F_mp / (d.p - 1.0), (d.p - 1.0) / d.p);
    const double rel = (c - out.c0) / out.c0;
    out.topology = (std::abs(rel) <= 1e-9) ? IsoTopology::Touching
                   : (rel < 0.0)           ? IsoTopology::TwoBranchesSubC0
                                           : IsoTopology::TwoBranchesSuperC0;
    out.X.resize(n_samples);
    out.Z_low.resize(n_samples);
    out.Z_up.resize(n_samples);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < n_samples; ++i) {
        const double X = double(i) / (n_samples - 1);
        out.X[i] = X;
        const auto roots = isocline_roots(c, d.p, eval_fmp(d, r, X));
        if (roots) {
            out.Z_low[i] = roots->first;
            out.Z_up[i] = roots->second;
        } else {
            out.Z_low[i] = out.Z_up[i] = nan;
            ++out.gap_count;
        }
    }
    return out;
}

SExpansion expansion_at_S(const DiffusionParams& d, const Reaction& r, double c) {
    const double fp1 = r.fprime1();
    if (!(fp1 < 0.0)) throw config_error("S-expansion needs f'(1) < 0");
    SExpansion e;
    if (d.p == 2.0) {
        e.form = SExpansion::Form::Linear;
        e.coeff = 0.5 * (c - std::sqrt(c * c - 4.0 * d.m * fp1));
        e.exponent = 1.0;
        // The entering branch has Z > 0 left of S, i.e. Z = |coeff| (1-X); both
        // conventions were checked against integrated orbits and the positive
        // one matches, so the seed flips the sign.
        e.seed_coeff = -e.coeff;
        e.note = "p=2 slope is negative as a dZ/dX slope; seeding uses |coeff|";
    } else if (d.p > 2.0) {
        e.form = SExpansion::Form::Linear;
        e.coeff = -d.m * fp1 / c;
        e.exponent = 1.0;
        e.seed_coeff = e.coeff;
    } else {
        e.form = SExpansion::Form::Power;
        e.coeff = std::pow(-d.p * d.m * fp1 / (2.0 * (d.p - 1.0)), 1.0 / d.p);
        e.exponent = 2.0 / d.p;
        e.seed_coeff = e.coeff;
    }
    return e;
}

double near_origin_guide(const DiffusionParams& d, const Reaction& r, double c, double X) {
    if (!d.slow()) throw config_error("near-origin guide applies to gamma > 0 only");
    return (d.m * r.fprime0() / c) * std::pow(X, d.gamma / (d.p - 1.0));
}

const char* to_string(OrbitTerminal t) {
    switch (t) {
        case OrbitTerminal::HitOrigin: return "HitOrigin";
        case OrbitTerminal::HitRc: return "HitRc";
        case OrbitTerminal::EscapedUp: return "EscapedUp";
        case OrbitTerminal::CrossedZero: return "CrossedZero";
        case OrbitTerminal::ReachedXZero: return "ReachedXZero";
        case OrbitTerminal::StepUnderflow: return "StepUnderflow";
        case OrbitTerminal::MaxSteps: return "MaxSteps";
    }
    return "?";
}

namespace {

struct OrbitContext {
    const DiffusionParams& d;
    const Reaction& r;
    double c;
    double C;        // c^{1/(p-1)}
    double kgam;     // gamma/(p-1)
    double f0;       // f_mp limit at X = 0 (finite for gamma >= 0)
    double s_trap;   // ln X below which the isocline-trapping test applies
    double s_floor;
    double z_escape;
    double z_ceiling;

    double rhs_z(double s, double Z) const {
        return (c * Z - std::pow(std::abs(Z), d.p) - eval_fmp_log(d, r, s)) /
               ((d.p - 1.0) * sgn_pow(Z, d.p - 1.0));
    }
    double rhs_xi(double s, double Z) const {
        return d.m * std::exp(kgam * s) / Z;
    }
    // local stiffness of the Z-equation; large positive values mean the graph
    // direction is explicitly unintegrable (attracting layer near S)
    double stiffness(double s, double Z) const {
        const double dz = std::max(1e-8 * Z, 1e-14);
        return std::abs(rhs_z(s, Z + dz) - rhs_z(s, Z)) / dz;
    }
};

// Seed Z(1 - x_patch) for the orbit entering S. For p > 2 a curvature correction
// removes the leading boundary-layer mismatch when it is small enough to trust.
double seed_value(const OrbitContext& ctx, const SExpansion& e, double x_patch) {
    double z = e.seed_coeff * std::pow(x_patch, e.exponent);
    if (ctx.d.p > 2.0) {
        const double h = 1e-3;
        auto g = [&](double xx) { return eval_fmp(ctx.d, ctx.r, 1.0 - xx); };
        const double C2 = (g(2 * h) - 2.0 * g(h)) / (2.0 * h * h);
        const double lam = e.seed_coeff;
        const double corr = (C2 * x_patch * x_patch + std::pow(lam * x_patch, ctx.d.p) -
                             (ctx.d.p - 1.0) * std::pow(lam, ctx.d.p) *
                                 std::pow(x_patch, ctx.d.p - 1.0)) /
                            ctx.c;
        if (std::abs(corr) <= 0.3 * z) z += corr;
    }
    return z;
}

enum class Fate { None, Escaped, Trapped, FloorHit };

// One-way classification events. Escape above C is certified for all X; the
// trapping test depends on the shape of f_mp:
//   interior max (f_mp(0) = 0): left of the argmax the level f_mp(X) only
//     falls, so the upper isocline branch only rises and an orbit under it
//     cannot get back out -> it ends at the axis.
//   origin limit (f_mp(0) > 0): once f_mp has flattened onto its limit the
//     system is autonomous and the root structure of cZ - Z^p = f_mp(0)
//     decides between the lambda_1 connection and escape.
Fate classify_state(const OrbitContext& ctx, double s, double Z) {
    if (Z >= ctx.z_escape || Z >= ctx.z_ceiling) return Fate::Escaped;
    if (ctx.f0 == 0.0) {
        if (s <= ctx.s_trap && Z < ctx.C) {
            const double fmp = eval_fmp_log(ctx.d, ctx.r, s);
            const auto roots = isocline_roots(ctx.c, ctx.d.p, fmp);
            if (roots && Z <= roots->second * (1.0 - 1e-6)) return Fate::Trapped;
        }
    } else {
        if (s <= ctx.s_trap) {
            const double fmp = eval_fmp_log(ctx.d, ctx.r, s);
            if (std::abs(fmp - ctx.f0) <= 1e-12 * ctx.f0) {
                const auto roots = isocline_roots(ctx.c, ctx.d.p, ctx.f0);
                if (!roots) return Fate::Escaped;
                if (Z < roots->second * (1.0 - 1e-9)) return Fate::Trapped;
                if (Z > roots->second * (1.0 + 1e-9)) return Fate::Escaped;
            }
        }
    }
    if (s <= ctx.s_floor) return Fate::FloorHit;
    return Fate::None;
}

}  // namespace

OrbitTrace integrate_from_S(const DiffusionParams& d, const Reaction& r, double c,
                            const IntegrateOpts& opts) {
    if (!(c > 0.0)) throw config_error("wave speed c must be > 0");
    OrbitTrace trace;
    trace.c = c;

    const double e0 = fmp_origin_power(d, r);
    OrbitContext ctx{d, r, c,
                     d.z_of_speed(c),
                     d.gamma / (d.p - 1.0),
                     e0 == 0.0 ? eval_fmp(d, r, 0.0) : 0.0,
                     0.0,
                     0.0,
                     0.0,
                     0.0};
    ctx.z_escape = ctx.C * (1.0 + 1e-6);
    ctx.z_ceiling = opts.z_ceiling > 0.0 ? opts.z_ceiling : 10.0 * ctx.C + 10.0;
    if (e0 > 0.0) {
        ctx.s_trap = std::log(fmp_max(d, r).X_mp);
        ctx.s_floor = std::log(opts.x_floor);
        // small origin power: the plane flattens only at exp(-O(1/e0)), so
        // near-critical classification needs a deeper floor to resolve the
        // dichotomy. Recorded (profile) runs keep the caller's floor.
        if (e0 < 0.5 && !opts.record) ctx.s_floor = std::min(ctx.s_floor, -2000.0);
    } else if (e0 == 0.0) {
        ctx.s_trap = std::log(1e-10);
        ctx.s_floor = std::log(opts.x_floor);
        if (!opts.record) ctx.s_floor = std::min(ctx.s_floor, -4000.0);
    } else {
        // f_mp diverges at the origin (q < 0): no trapping is possible and
        // every orbit escapes; integrate until the escape certificate fires
        ctx.s_trap = -std::numeric_limits<double>::infinity();
        ctx.s_floor = std::log(opts.x_floor);
    }

    const SExpansion exp_s = expansion_at_S(d, r, c);
    double s = std::log1p(-opts.x_patch);
    double Z = seed_value(ctx, exp_s, opts.x_patch);
    double xi = 0.0;
    if (!(Z > 0.0)) throw numerics_error("S-expansion produced a non-positive seed");

    auto push = [&](double ss, double zz, double xx) {
        if (opts.record) trace.samples.push_back({std::exp(ss), zz, xx});
    };
    auto finish = [&](OrbitTerminal t, double ss, double zz) {
        trace.terminal = t;
        trace.x_end = std::exp(ss);
        trace.z_end = zz;
        return trace;
    };

    push(s, Z, xi);
    {
        const Fate f0 = classify_state(ctx, s, Z);
        if (f0 == Fate::Escaped) return finish(OrbitTerminal::EscapedUp, s, Z);
    }

    // Departure from S: the entering orbit is backward-attracting with rate
    // ~ x^{1-p}, which stalls any explicit pair for p >~ 3. Damped implicit
    // steps walk out of the layer; the explicit pair takes over after.
    {
        auto f = [&](double ss, double zz) { return ctx.rhs_z(ss, zz); };
        long guard = 0;
        while (ctx.stiffness(s, Z) > 2e3) {
            // recorded runs keep the profile-sample spacing below ~0.05 in xi
            const double h = opts.record ? -std::min(1e-3, 0.05 / ctx.rhs_xi(s, Z)) : -1e-3;
            double z1 = 0.0;
            if (!ode::implicit_euler_step(f, s, Z, h, z1))
                return finish(OrbitTerminal::StepUnderflow, s, Z);
            const double xi_rate = 0.5 * (ctx.rhs_xi(s, Z) + ctx.rhs_xi(s + h, z1));
            xi += h * xi_rate;
            s += h;
            Z = z1;
            ++trace.n_steps;
            push(s, Z, xi);
            const Fate f1 = classify_state(ctx, s, Z);
            if (f1 == Fate::Escaped) return finish(OrbitTerminal::EscapedUp, s, Z);
            if (f1 == Fate::Trapped) break;  // handled below
            if (f1 == Fate::FloorHit) break;
            if (++guard > 400000) return finish(OrbitTerminal::MaxSteps, s, Z);
        }
    }

    // Main sweep in s = ln X on (Z, xi).
    Fate fate = classify_state(ctx, s, Z);
    if (fate == Fate::None) {
        ode::Dopri5<2> drv;
        drv.rtol = opts.rtol;
        drv.atol = opts.atol;
        drv.h_init = 1e-4;
        if (opts.record) drv.h_max = 0.01;
        drv.max_steps = opts.max_steps;
        drv.rhs = [&](double ss, const Eigen::Vector2d& y) {
            return Eigen::Vector2d(ctx.rhs_z(ss, y[0]), ctx.rhs_xi(ss, y[0]));
        };
        drv.admissible = [](const Eigen::Vector2d& y) { return y[0] > 0.0; };
        drv.accept = [&](double ss, const Eigen::Vector2d& y) {
            push(ss, y[0], y[1]);
            fate = classify_state(ctx, ss, y[0]);
            return fate != Fate::None;
        };
        const auto status = drv.drive(s, Eigen::Vector2d(Z, xi), ctx.s_floor);
        s = drv.t;
        Z = drv.y[0];
        xi = drv.y[1];
        trace.n_steps += drv.n_steps;
        if (status == ode::DriveStatus::StepUnderflow)
            return finish(Z <= 1e-300 ? OrbitTerminal::CrossedZero : OrbitTerminal::StepUnderflow,
                          s, Z);
        if (status == ode::DriveStatus::MaxSteps)
            return finish(OrbitTerminal::MaxSteps, s, Z);
        if (status == ode::DriveStatus::ReachedEnd) fate = Fate::FloorHit;
    }

    if (fate == Fate::Escaped) return finish(OrbitTerminal::EscapedUp, s, Z);

    if (fate == Fate::Trapped) {
        if (ctx.f0 > 0.0) {
            // converge onto the lower root lambda_1; the approach is not stiff
            if (opts.record && s > ctx.s_floor) {
                ode::Dopri5<2> drv;
                drv.rtol = opts.rtol;
                drv.atol = opts.atol;
                drv.h_max = 0.01;
                drv.max_steps = opts.max_steps;
                drv.rhs = [&](double ss, const Eigen::Vector2d& y) {
                    return Eigen::Vector2d(ctx.rhs_z(ss, y[0]), ctx.rhs_xi(ss, y[0]));
                };
                drv.admissible = [](const Eigen::Vector2d& y) { return y[0] > 0.0; };
                drv.accept = [&](double ss, const Eigen::Vector2d& y) {
                    push(ss, y[0], y[1]);
                    return false;
                };
                drv.drive(s, Eigen::Vector2d(Z, xi), ctx.s_floor);
                s = drv.t;
                Z = drv.y[0];
                trace.n_steps += drv.n_steps;
            }
            return finish(OrbitTerminal::ReachedXZero, s, Z);
        }
        // vanished-at-origin f_mp, supercritical: for recorded runs follow the
        // tail toward O. The lower-guide manifold is stiffly attracting (rate
        // ~ X^{-power}), so implicit steps do the walking; xi by trapezoid.
        // Stay explicit while the stiffness allows it, for sample accuracy.
        if (opts.record && s > ctx.s_floor) {
            ode::Dopri5<2> drv;
            drv.rtol = opts.rtol;
            drv.atol = opts.atol;
            drv.h_max = 0.01;
            drv.max_steps = opts.max_steps;
            drv.rhs = [&](double ss, const Eigen::Vector2d& y) {
                return Eigen::Vector2d(ctx.rhs_z(ss, y[0]), ctx.rhs_xi(ss, y[0]));
            };
            drv.admissible = [](const Eigen::Vector2d& y) { return y[0] > 0.0; };
            drv.accept = [&](double ss, const Eigen::Vector2d& y) {
                push(ss, y[0], y[1]);
                return ctx.stiffness(ss, y[0]) > 2e3;
            };
            drv.drive(s, Eigen::Vector2d(Z, xi), ctx.s_floor);
            s = drv.t;
            Z = drv.y[0];
            xi = drv.y[1];
            trace.n_steps += drv.n_steps;
        }
        if (opts.record) {
            auto f = [&](double ss, double zz) { return ctx.rhs_z(ss, zz); };
            const double h = -0.02;
            long guard = 0;
            while (s > ctx.s_floor && Z > 1e-280) {
                double z1 = 0.0;
                if (!ode::implicit_euler_step(f, s, Z, h, z1)) break;
                xi += h * 0.5 * (ctx.rhs_xi(s, Z) + ctx.rhs_xi(s + h, z1));
                s += h;
                Z = z1;
                ++trace.n_steps;
                push(s, Z, xi);
                if (++guard > 500000) break;
            }
        }
        return finish(d.slow() ? OrbitTerminal::HitOrigin : OrbitTerminal::ReachedXZero, s, Z);
    }

    // Floor hit without a decision: near-critical.
    if (ctx.f0 == 0.0 && std::abs(Z - ctx.C) <= 0.2 * ctx.C)
        return finish(OrbitTerminal::HitRc, s, Z);
    return finish(OrbitTerminal::ReachedXZero, s, Z);
}

OrbitTrace cs_tw_branch(const DiffusionParams& d, const Reaction& r, double c,
                        double X_start, double Z_start, const IntegrateOpts& opts) {
    if (!(c > 0.0)) throw config_error("wave speed c must be > 0");
    if (!(X_start > 0.0 && X_start < 1.0)) throw config_error("CS-TW start needs X in (0,1)");
    if (!(Z_start > 0.0)) throw config_error("CS-TW start needs Z > 0");

    OrbitTrace trace;
    trace.c = c;
    const double C = d.z_of_speed(c);
    const double kgam = d.gamma / (d.p - 1.0);
    const double x_floor = std::max(opts.x_floor, 1e-9);
    const double s_floor = std::log(x_floor);
    const double z_switch = 1e-2 * std::max(1.0, C);
    const double z_blow = 1e6 * std::max(1.0, C);

    auto rhs_pair = [&](double ss, const Eigen::Vector2d& y) {
        const double Z = y[0];
        const double num = c * Z - std::pow(std::abs(Z), d.p) - eval_fmp_log(d, r, ss);
        const double den = (d.p - 1.0) * sgn_pow(Z, d.p - 1.0);
        return Eigen::Vector2d(num / den, d.m * std::exp(kgam * ss) / Z);
    };

    // Backward branch: X decreasing, Z > 0 growing like a' X^{-1/(p-1)}.
    std::vector<PhasePoint> left;
    {
        ode::Dopri5<2> drv;
        drv.rtol = opts.rtol;
        drv.atol = opts.atol;
        drv.max_steps = opts.max_steps;
        drv.rhs = rhs_pair;
        drv.admissible = [](const Eigen::Vector2d& y) { return y[0] > 0.0; };
        drv.accept = [&](double ss, const Eigen::Vector2d& y) {
            left.push_back({std::exp(ss), y[0], y[1]});
            return y[0] > z_blow;
        };
        left.push_back({X_start, Z_start, 0.0});
        const auto st = drv.drive(std::log(X_start), Eigen::Vector2d(Z_start, 0.0), s_floor);
        if (st == ode::DriveStatus::StepUnderflow || st == ode::DriveStatus::MaxSteps)
            throw numerics_error("CS-TW backward branch failed to reach the X floor");
        trace.a_prime_pos = drv.y[0] * std::pow(std::exp(drv.t), 1.0 / (d.p - 1.0));
        trace.n_steps += drv.n_steps;
    }
    std::reverse(left.begin(), left.end());

    // Forward branch: X increasing until Z falls to z_switch.
    std::vector<PhasePoint> right;
    double s = std::log(X_start), Z = Z_start, xi = 0.0;
    {
        ode::Dopri5<2> drv;
        drv.rtol = opts.rtol;
        drv.atol = opts.atol;
        drv.max_steps = opts.max_steps;
        drv.rhs = rhs_pair;
        drv.admissible = [](const Eigen::Vector2d& y) { return y[0] > 0.0; };
        drv.accept = [&](double ss, const Eigen::Vector2d& y) {
            right.push_back({std::exp(ss), y[0], y[1]});
            return y[0] <= z_switch || ss >= std::log(1.0 - 1e-9);
        };
        const auto st = drv.drive(s, Eigen::Vector2d(Z, 0.0), std::log(1.0 - 1e-9));
        if (st == ode::DriveStatus::StepUnderflow || st == ode::DriveStatus::MaxSteps)
            throw numerics_error("CS-TW forward branch failed before the Z = 0 crossing");
        s = drv.t;
        Z = drv.y[0];
        xi = drv.y[1];
        trace.n_steps += drv.n_steps;
        if (Z > z_switch)
            throw numerics_error("CS-TW branch reached X = 1 without turning (start above the S-orbit?)");
    }

    // Patch through Z = 0, parameterized by w = sign(Z)|Z|^{p-1}. In this
    // variable both dX/dw = X Z / G and d xi/dw = m X^{gamma/(p-1)} / G with
    // G = c Z - |Z|^p - f_mp(X) are regular at the crossing (G ~ -f_mp < 0).
    double X = std::exp(s);
    {
        auto z_of_w = [&](double w) { return sgn_pow(w, 1.0 / (d.p - 1.0)); };
        auto rhs_w = [&](double w, const Eigen::Vector2d& y) {
            const double zz = z_of_w(w);
            const double G = c * zz - std::pow(std::abs(zz), d.p) -
                             eval_fmp(d, r, std::min(y[0], 1.0));
            return Eigen::Vector2d(y[0] * zz / G, d.m * std::pow(y[0], kgam) / G);
        };
        const double w0 = sgn_pow(Z, d.p - 1.0);
        for (const double w_end : {0.0, -w0}) {
            ode::Dopri5<2> drv;
            drv.rtol = std::max(opts.rtol, 1e-9);
            drv.atol = 1e-14;
            drv.h_init = std::abs(w0) * 1e-2;
            drv.max_steps = opts.max_steps;
            drv.rhs = rhs_w;
            const double w_from = (w_end == 0.0) ? w0 : 0.0;
            drv.accept = [&](double w, const Eigen::Vector2d& y) {
                right.push_back({y[0], z_of_w(w), y[1]});
                return false;
            };
            const auto st = drv.drive(w_from, Eigen::Vector2d(X, xi), w_end);
            if (st != ode::DriveStatus::ReachedEnd)
                throw numerics_error("CS-TW patch failed to cross Z = 0");
            X = drv.y[0];
            xi = drv.y[1];
            trace.n_steps += drv.n_steps;
            if (w_end == 0.0) trace.x_zero_cross = X;
        }
        Z = -Z;  // the patch is symmetric in w; it exits at the mirrored height
    }

    // Descending branch: Z < 0, X decreasing back to the floor.
    {
        ode::Dopri5<2> drv;
        drv.rtol = opts.rtol;
        drv.atol = opts.atol;
        drv.max_steps = opts.max_steps;
        drv.rhs = rhs_pair;
        drv.admissible = [](const Eigen::Vector2d& y) { return y[0] < 0.0; };
        drv.accept = [&](double ss, const Eigen::Vector2d& y) {
            right.push_back({std::exp(ss), y[0], y[1]});
            return y[0] < -z_blow;
        };
        const auto st = drv.drive(std::log(X), Eigen::Vector2d(Z, xi), s_floor);
        if (st == ode::DriveStatus::StepUnderflow || st == ode::DriveStatus::MaxSteps)
            throw numerics_error("CS-TW descending branch failed to reach the X floor");
        trace.a_prime_neg = -drv.y[0] * std::pow(std::exp(drv.t), 1.0 / (d.p - 1.0));
        trace.x_end = std::exp(drv.t);
        trace.z_end = drv.y[0];
        trace.n_steps += drv.n_steps;
    }

    // Assemble in profile order (xi increasing): reversed backward branch has
    // xi <= 0, forward branches xi >= 0.
    if (opts.record) {
        trace.samples = std::move(left);
        trace.samples.insert(trace.samples.end(), right.begin(), right.end());
    }
    trace.terminal = OrbitTerminal::CrossedZero;
    return trace;
}

}  // namespace dnlkpp
