#include "dnlkpp/pde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dnlkpp/errors.hpp"

namespace dnlkpp {

namespace {

inline double sgn_pow(double z, double e) {
    if (z == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(z), e), z);
}

constexpr double kEpsReg = 1e-30;   // division guard only
constexpr double kClipPerStep = 1e-8;

}  // namespace

Eigen::ArrayXd Grid::centers() const {
    Eigen::ArrayXd x(J);
    for (int j = 0; j < J; ++j) x[j] = center(j);
    return x;
}

Grid make_line_grid(double L, int J, Grid::Bc bc) {
    if (!(L > 0.0) || J < 4) throw config_error("line grid needs L > 0 and J >= 4");
    Grid g;
    g.geometry = Grid::Geometry::Line;
    g.bc = bc;
    g.L = L;
    g.J = J;
    g.dx = 2.0 * L / J;
    return g;
}

Grid make_radial_grid(double L, int J, int N, Grid::Bc bc) {
    if (!(L > 0.0) || J < 4) throw config_error("radial grid needs L > 0 and J >= 4");
    if (N < 1) throw config_error("radial grid needs N >= 1");
    Grid g;
    g.geometry = Grid::Geometry::Radial;
    g.bc = bc;
    g.L = L;
    g.J = J;
    g.N = N;
    g.dx = L / J;
    return g;
}

Eigen::ArrayXd InitialDatum::eval(const DiffusionParams& d, const Grid& g) const {
    Eigen::ArrayXd u(g.J);
    const double a_exp = d.p / (d.p - 1.0);
    for (int j = 0; j < g.J; ++j) {
        const double ax = std::abs(g.center(j));
        double v = 0.0;
        switch (kind) {
            case Kind::PlateauIndicator:
                v = (ax <= rho0) ? eps : 0.0;
                break;
            case Kind::PlateauWithExpTail: {
                const double amp = eps * std::exp(b0 * std::pow(rho0, a_exp));
                v = (ax <= rho0) ? eps : amp * std::exp(-b0 * std::pow(ax, a_exp));
                break;
            }
            case Kind::ExpDecay:
                v = std::min(1.0, a0 * std::exp(-rate * ax));
                break;
            case Kind::ExpDecayWithPower:
                v = std::min(1.0, a0 * std::pow(std::max(ax, 1.0), power) *
                                      std::exp(-rate * ax));
                break;
            case Kind::BarenblattSnapshot:
                v = std::min(1.0, barenblatt_eval(*barenblatt, ax, t_offset));
                break;
            case Kind::Custom:
                v = custom[j];
                break;
        }
        u[j] = v;
    }
    return u;
}

InitialDatum plateau_indicator(double eps, double rho0) {
    InitialDatum i;
    i.kind = InitialDatum::Kind::PlateauIndicator;
    i.eps = eps;
    i.rho0 = rho0;
    return i;
}

InitialDatum plateau_with_exp_tail(double eps, double rho0, double b0) {
    InitialDatum i;
    i.kind = InitialDatum::Kind::PlateauWithExpTail;
    i.eps = eps;
    i.rho0 = rho0;
    i.b0 = b0;
    return i;
}

InitialDatum exp_decay(double a0, double rate) {
    InitialDatum i;
    i.kind = InitialDatum::Kind::ExpDecay;
    i.a0 = a0;
    i.rate = rate;
    i.rho0 = 0.0;
    return i;
}

InitialDatum exp_decay_with_power(double a0, double rate, double power) {
    InitialDatum i;
    i.kind = InitialDatum::Kind::ExpDecayWithPower;
    i.a0 = a0;
    i.rate = rate;
    i.power = power;
    i.rho0 = 0.0;
    return i;
}

InitialDatum barenblatt_snapshot(const BarenblattSpec& spec, double t_offset) {
    InitialDatum i;
    i.kind = InitialDatum::Kind::BarenblattSnapshot;
    i.barenblatt = spec;
    i.t_offset = t_offset;
    return i;
}

PdeState make_state(const DiffusionParams& d, const Grid& g, const InitialDatum& datum) {
    PdeState s;
    s.u = datum.eval(d, g);
    if ((s.u < 0.0).any() || (s.u > 1.0).any())
        throw config_error("initial datum leaves [0,1]");
    return s;
}

double suggest_dt(const DiffusionParams& d, const Grid& g, const Eigen::ArrayXd& u,
                  double safety) {
    if (!(safety > 0.0 && safety <= 1.0)) throw config_error("safety must be in (0,1]");
    const double mp = std::pow(d.m, d.p - 1.0);
    double smax = 0.0;
    for (int j = 0; j + 1 < g.J; ++j) {
        const double du = std::abs(u[j + 1] - u[j]);
        const double ub = 0.5 * (u[j + 1] + u[j]);
        if (ub <= 0.0) continue;
        double eff = du;
        if (d.p < 2.0) {
            // singular diffusivity: flat faces are handled by the flux limiter,
            // so the dt scan floors |du| at the resolution scale dx ubar
            eff = std::max(du, g.dx * ub);
            if (eff <= 0.0) continue;
        } else if (du == 0.0) {
            if (d.p > 2.0) continue;
            eff = 1.0;  // p == 2: |du|^0
        }
        const double s = mp * std::pow(ub, d.mu) *
                         (d.p == 2.0 ? 1.0 : std::pow(eff, d.p - 2.0));
        smax = std::max(smax, s);
    }
    return safety * std::pow(g.dx, d.p) / (kEpsReg + smax);
}

void advance(const DiffusionParams& d, const Reaction* r, const Grid& g, PdeState& s,
             double dt) {
    if (!(dt > 0.0)) throw numerics_error("step-size collapse: dt underflowed");
    const int J = g.J;
    const Eigen::ArrayXd& u = s.u;
    const bool radial = g.geometry == Grid::Geometry::Radial;
    const int Nd = g.N;

    // face fluxes (J+1 faces; boundary faces 0 and J)
    Eigen::ArrayXd flux(J + 1);
    flux[0] = 0.0;
    flux[J] = 0.0;
    auto face_flux = [&](double ul, double ur) {
        const double Dv = (std::pow(ur, d.m) - std::pow(ul, d.m)) / g.dx;
        double F = sgn_pow(Dv, d.p - 1.0);
        if (d.p < 2.0) {
            const double du = ur - ul;
            const double ub = 0.5 * (ul + ur);
            if (std::abs(du) < g.dx * ub) {
                const double cap = g.dx * std::abs(du) / (2.0 * dt);
                if (std::abs(F) > cap) {
                    F = std::copysign(cap, Dv);
                    ++s.cap_count;
                }
            }
        }
        return F;
    };
    for (int f = 1; f < J; ++f) flux[f] = face_flux(u[f - 1], u[f]);
    if (g.bc == Grid::Bc::Dirichlet0) {
        if (!radial) flux[0] = face_flux(0.0, u[0]);
        flux[J] = face_flux(u[J - 1], 0.0);
    }

    Eigen::ArrayXd unew(J);
    if (!radial) {
        for (int j = 0; j < J; ++j)
            unew[j] = u[j] + dt * (flux[j + 1] - flux[j]) / g.dx;
    } else {
        for (int j = 0; j < J; ++j) {
            const double r0 = j * g.dx, r1 = (j + 1) * g.dx;
            const double A0 = std::pow(r0, Nd - 1), A1 = std::pow(r1, Nd - 1);
            const double vol = (std::pow(r1, Nd) - std::pow(r0, Nd)) / Nd;
            unew[j] = u[j] + dt * (A1 * flux[j + 1] - A0 * flux[j]) / vol;
        }
    }
    if (r) {
        for (int j = 0; j < J; ++j) unew[j] += dt * r->value(std::clamp(unew[j], 0.0, 1.0));
    }

    double clip = 0.0;
    for (int j = 0; j < J; ++j) {
        if (unew[j] < 0.0) {
            clip -= unew[j];
            unew[j] = 0.0;
        } else if (unew[j] > 1.0) {
            clip += unew[j] - 1.0;
            unew[j] = 1.0;
        }
    }
    s.clip_last = clip;
    s.clip_max = std::max(s.clip_max, clip);
    s.clip_total += clip;
    if (clip > kClipPerStep) {
        std::ostringstream msg;
        msg << "clipping excess at t = " << s.t << ": " << clip << " in one step";
        throw numerics_error(msg.str());
    }

    s.u = std::move(unew);
    s.t += dt;
    s.last_dt = dt;
    ++s.step_count;
    s.dt_history.push_back(dt);
}

void step(const DiffusionParams& d, const Reaction* r, const Grid& g, PdeState& s,
          double safety) {
    double dt = suggest_dt(d, g, s.u, safety);
    if (r && r->fprime0() > 0.0 && std::isfinite(r->fprime0()))
        dt = std::min(dt, 0.1 / r->fprime0());
    advance(d, r, g, s, dt);
}

namespace {

double rightmost_crossing(const Grid& g, const Eigen::ArrayXd& u, double omega) {
    for (int j = g.J - 1; j >= 0; --j) {
        if (u[j] >= omega) {
            if (j + 1 < g.J && u[j + 1] < u[j])
                return g.center(j) + g.dx * (u[j] - omega) / (u[j] - u[j + 1]);
            return g.center(j);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double support_edge(const Grid& g, const Eigen::ArrayXd& u) {
    for (int j = g.J - 1; j >= 0; --j)
        if (u[j] > 0.0) return g.center(j) + 0.5 * g.dx;
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

RunResult run_until(const DiffusionParams& d, const Reaction* r, const Grid& g,
                    const InitialDatum& datum, double T, const RunProbes& probes) {
    if (!(T > 0.0)) throw config_error("run time T must be > 0");
    if (probes.levels.empty()) throw config_error("at least one probe level is required");
    RunResult out;
    out.state = make_state(d, g, datum);
    out.fronts.reserve(probes.levels.size());
    for (double w : probes.levels) {
        FrontRecord f;
        f.omega = w;
        out.fronts.push_back(std::move(f));
    }
    const bool track_support = probes.track_support && d.slow();
    const Eigen::ArrayXd xs = g.centers();
    Eigen::ArrayXd cell_vol(g.J);
    if (g.geometry == Grid::Geometry::Line) {
        cell_vol.setConstant(g.dx);
    } else {
        for (int j = 0; j < g.J; ++j)
            cell_vol[j] = (std::pow((j + 1) * g.dx, g.N) - std::pow(j * g.dx, g.N)) / g.N;
    }

    auto record = [&](PdeState& s) {
        for (auto& f : out.fronts) {
            f.t.push_back(s.t);
            f.x.push_back(rightmost_crossing(g, s.u, f.omega));
            if (track_support) f.support.push_back(support_edge(g, s.u));
        }
        out.diagnostics.mass_t.push_back(s.t);
        out.diagnostics.mass.push_back((s.u * cell_vol).sum());
        if (probes.region_radius > 0.0) {
            double mn = 1.0;
            for (int j = 0; j < g.J; ++j)
                if (std::abs(xs[j]) <= probes.region_radius) mn = std::min(mn, s.u[j]);
            out.diagnostics.region_min.push_back(mn);
        }
    };

    PdeState& s = out.state;
    record(s);
    const double dt_record = T / probes.records;
    double next_record = dt_record;
    const double fp0 = (r && std::isfinite(r->fprime0())) ? r->fprime0() : 0.0;
    while (s.t < T) {
        double dt = suggest_dt(d, g, s.u, probes.safety);
        if (fp0 > 0.0) dt = std::min(dt, 0.1 / fp0);
        dt = std::min(dt, T - s.t);
        dt = std::min(dt, next_record - s.t + 1e-14 * T);
        advance(d, r, g, s, dt);
        if (s.t >= next_record - 1e-12 * T) {
            record(s);
            next_record = std::min(T, next_record + dt_record);
        }
        if (s.step_count > 200'000'000)
            throw numerics_error("PDE run exceeded the step budget");
    }

    auto& diag = out.diagnostics;
    diag.steps = s.step_count;
    diag.clip_max = s.clip_max;
    diag.clip_total = s.clip_total;
    diag.cap_count = s.cap_count;
    if (!s.dt_history.empty()) {
        diag.dt_min = *std::min_element(s.dt_history.begin(), s.dt_history.end());
        diag.dt_max = *std::max_element(s.dt_history.begin(), s.dt_history.end());
        double acc = 0.0;
        for (double h : s.dt_history) acc += h;
        diag.dt_mean = acc / double(s.dt_history.size());
    }
    return out;
}

SpeedFit spreading_speed(const FrontRecord& front, double t_a, double t_b) {
    std::vector<double> ts, xs;
    for (size_t i = 0; i < front.t.size(); ++i) {
        if (front.t[i] >= t_a && front.t[i] <= t_b && std::isfinite(front.x[i])) {
            ts.push_back(front.t[i]);
            xs.push_back(front.x[i]);
        }
    }
    if (ts.size() < 20) throw numerics_error("speed-fit window too short (< 20 samples)");
    const auto n = static_cast<Eigen::Index>(ts.size());
    Eigen::Map<Eigen::ArrayXd> t(ts.data(), n), x(xs.data(), n);
    const double tm = t.mean(), xm = x.mean();
    const double stt = ((t - tm) * (t - tm)).sum();
    const double stx = ((t - tm) * (x - xm)).sum();
    SpeedFit fit;
    fit.n = int(n);
    fit.speed = stx / stt;
    const Eigen::ArrayXd res = x - xm - fit.speed * (t - tm);
    fit.stderr_ = std::sqrt((res * res).sum() / double(n - 2) / stt);
    return fit;
}

bool positivity_persistence_check(const DiffusionParams& d, const Reaction& r,
                                  const Grid& g, const InitialDatum& datum, double rho1,
                                  double T, const RunProbes& probes_in) {
    RunProbes probes = probes_in;
    probes.region_radius = d.slow() ? 0.5 * rho1 : rho1;
    RunResult res = run_until(d, &r, g, datum, T, probes);
    const double eps = datum.eps;
    bool ok = true;
    for (size_t i = 0; i < res.diagnostics.mass_t.size(); ++i) {
        if (res.diagnostics.mass_t[i] < 0.5 * T) continue;
        if (res.diagnostics.region_min[i] < eps) ok = false;
    }
    return ok;
}

FreeBoundaryInfo free_boundary_check(const PdeState& s, const DiffusionParams& d,
                                     const Grid& g) {
    FreeBoundaryInfo info;
    const bool any_zero = (s.u == 0.0).any();
    if (d.slow()) {
        info.has_exact_zeros = any_zero;
        info.edge = support_edge(g, s.u);
    } else {
        info.has_exact_zeros = any_zero;
    }
    return info;
}

double required_half_width(double c_expected, double T, double initial_radius) {
    return 1.5 * c_expected * T + initial_radius;
}

}  // namespace dnlkpp
