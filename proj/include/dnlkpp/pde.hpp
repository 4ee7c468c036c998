#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "dnlkpp/barenblatt.hpp"
#include "dnlkpp/params.hpp"
#include "dnlkpp/reaction.hpp"

namespace dnlkpp {

// Explicit conservative scheme for du/dt = div(|grad u^m|^{p-2} grad u^m) + f(u)
// on a uniform 1D line [-L, L] or a radial grid [0, L] in N dimensions.
// Face fluxes are |Dv|^{p-2} Dv with v = u^m and D the divided face difference;
// dt follows safety dx^p / max_faces(m^{p-1} ubar^mu |Du|^{p-2}).
//
// For p < 2 the diffusivity is singular at flat faces. Faces whose undivided
// difference is below the resolution scale dx ubar cannot satisfy an explicit
// CFL bound at any useful dt; their flux is limited to the pairwise
// monotonicity bound dx |du| / (2 dt), which is inactive wherever the CFL
// bound holds, is exactly conservative, and preserves compact supports. For
// p >= 2 no face is ever limited.

struct Grid {
    enum class Geometry { Line, Radial };
    enum class Bc { ZeroFlux, Dirichlet0 };

    Geometry geometry = Geometry::Line;
    Bc bc = Bc::ZeroFlux;
    double L = 0.0;  // half-width (Line) or radius (Radial)
    int J = 0;       // cell count
    int N = 1;       // spatial dimension (Radial)
    double dx = 0.0;

    double center(int j) const {
        return geometry == Geometry::Line ? (-L + (j + 0.5) * dx) : (j + 0.5) * dx;
    }
    Eigen::ArrayXd centers() const;
};

Grid make_line_grid(double L, int J, Grid::Bc bc = Grid::Bc::ZeroFlux);
Grid make_radial_grid(double L, int J, int N, Grid::Bc bc = Grid::Bc::ZeroFlux);

struct PdeState {
    double t = 0.0;
    Eigen::ArrayXd u;
    long step_count = 0;
    double last_dt = 0.0;
    // ledgers
    double clip_last = 0.0;   // clipped mass in the most recent step
    double clip_max = 0.0;    // worst step so far
    double clip_total = 0.0;
    long cap_count = 0;       // faces limited by the monotonicity bound (p < 2)
    std::vector<double> dt_history;
};

struct InitialDatum {
    enum class Kind {
        PlateauIndicator,     // eps on |x| <= rho0, 0 outside
        PlateauWithExpTail,   // eps inside, a0 exp(-b0 |x|^{p/(p-1)}) outside
        ExpDecay,             // min(1, a0 exp(-rate |x|))
        ExpDecayWithPower,    // min(1, a0 max(|x|,1)^{power} exp(-rate |x|))
        BarenblattSnapshot,   // B_M(x, t_offset)
        Custom
    };
    Kind kind = Kind::PlateauIndicator;
    double eps = 0.1;
    double rho0 = 1.0;
    double b0 = 1.0;
    double a0 = 1.0;
    double rate = 1.0;
    double power = 0.0;
    double t_offset = 1.0;
    std::optional<BarenblattSpec> barenblatt;
    Eigen::ArrayXd custom;

    Eigen::ArrayXd eval(const DiffusionParams& d, const Grid& g) const;
};

InitialDatum plateau_indicator(double eps, double rho0);
InitialDatum plateau_with_exp_tail(double eps, double rho0, double b0);
InitialDatum exp_decay(double a0, double rate);
InitialDatum exp_decay_with_power(double a0, double rate, double power);
InitialDatum barenblatt_snapshot(const BarenblattSpec& spec, double t_offset);

PdeState make_state(const DiffusionParams& d, const Grid& g, const InitialDatum& datum);

/// Stable step size for the current state (before the reaction cap).
double suggest_dt(const DiffusionParams& d, const Grid& g, const Eigen::ArrayXd& u,
                  double safety);

/// One explicit update with a prescribed dt (diffusion, then reaction evaluated
/// at the post-diffusion state; clipping to [0,1] recorded in the ledgers).
/// Throws ClippingExcess-style numerics_error when a step clips more than 1e-8.
void advance(const DiffusionParams& d, const Reaction* r, const Grid& g, PdeState& s,
             double dt);

/// Adaptive step: dt = min(suggest_dt, 0.1/f'(0)).
void step(const DiffusionParams& d, const Reaction* r, const Grid& g, PdeState& s,
          double safety = 0.4);

struct FrontRecord {
    double omega = 0.5;
    std::vector<double> t;
    std::vector<double> x;        // rightmost crossing of the level
    std::vector<double> support;  // sup{x : u > 0}; only tracked when gamma > 0
};

struct RunProbes {
    std::vector<double> levels = {0.5};
    int records = 400;                 // sampling cadence over [0, T]
    double safety = 0.4;
    bool track_support = true;         // effective only for gamma > 0
    double region_radius = -1.0;       // if > 0, record min u over |x| <= radius
};

struct RunDiagnostics {
    std::vector<double> mass_t, mass;
    std::vector<double> region_min;    // min over |x| <= region_radius per record
    double dt_min = 0.0, dt_max = 0.0, dt_mean = 0.0;
    long steps = 0;
    double clip_max = 0.0, clip_total = 0.0;
    long cap_count = 0;
};

struct RunResult {
    PdeState state;
    std::vector<FrontRecord> fronts;
    RunDiagnostics diagnostics;
};

/// Integrates to T, recording level positions at the probe cadence.
RunResult run_until(const DiffusionParams& d, const Reaction* r, const Grid& g,
                    const InitialDatum& datum, double T, const RunProbes& probes);

struct SpeedFit {
    double speed = 0.0;
    double stderr_ = 0.0;
    int n = 0;
};

/// Least-squares slope of x(t) over t in [t_a, t_b].
SpeedFit spreading_speed(const FrontRecord& front, double t_a, double t_b);

/// Proposition-style persistence check: min over the inner region of radius
/// rho1/2 (gamma > 0) or rho1 (gamma = 0) stays >= eps for all recorded times
/// in the second half of [0, T].
bool positivity_persistence_check(const DiffusionParams& d, const Reaction& r,
                                  const Grid& g, const InitialDatum& datum, double rho1,
                                  double T, const RunProbes& probes = {});

struct FreeBoundaryInfo {
    bool has_exact_zeros = false;
    double edge = std::numeric_limits<double>::quiet_NaN();
};

/// gamma > 0: confirms exact zero cells beyond a finite support edge;
/// gamma = 0: confirms every cell is strictly positive.
FreeBoundaryInfo free_boundary_check(const PdeState& s, const DiffusionParams& d,
                                     const Grid& g);

/// Domain-sizing rule: L must cover the expected front excursion with margin.
double required_half_width(double c_expected, double T, double initial_radius);

}  // namespace dnlkpp
