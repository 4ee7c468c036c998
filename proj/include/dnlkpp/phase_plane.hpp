#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "dnlkpp/params.hpp"
#include "dnlkpp/reaction.hpp"

namespace dnlkpp {

// Transformed phase plane of the wave ODE  c phi' = (|(phi^m)'|^{p-2}(phi^m)')' + f(phi),
// xi = x + ct, in the variables
//     X = phi,   Z = m X^{(mu-1)/(p-1)} X'      (density / pressure-derivative),
// where the system becomes
//     dX/dtau = (p-1) X |Z|^{p-2} Z,   dZ/dtau = c Z - |Z|^p - f_mp(X)
// with critical points S = (1,0), O = (0,0), R_c = (0, c^{1/(p-1)}).
// Orbits are integrated as graphs Z(X) via dZ/dX = H(X,Z;c), stepping in ln X.

struct PhaseState {
    double X = 0.0;
    double Z = 0.0;
};

/// tau-system right-hand side; |Z|^{p-2} Z is formed as sign(Z)|Z|^{p-1} so the
/// field stays defined at Z = 0 for 1 < p < 2.
PhaseState vector_field(const DiffusionParams& d, const Reaction& r, double c,
                        const PhaseState& s);

/// Slope field of the trajectory equation dZ/dX (singular at Z = 0 and X = 0).
double trajectory_slope(const DiffusionParams& d, const Reaction& r, double c,
                        double X, double Z);

enum class IsoTopology { TwoBranchesSubC0, Touching, TwoBranchesSuperC0 };

/// Null isoclines c Z - Z^p = f_mp(X): per grid point the two roots in [0, C],
/// NaN where f_mp exceeds the attainable maximum (branch gap).
struct IsoclineBranches {
    double c = 0.0;
    double c0 = 0.0;  // isocline-touching speed p (F_mp/(p-1))^{(p-1)/p}
    IsoTopology topology = IsoTopology::TwoBranchesSubC0;
    Eigen::ArrayXd X, Z_low, Z_up;
    int gap_count = 0;  // grid points with no root
};

IsoclineBranches null_isoclines(const DiffusionParams& d, const Reaction& r, double c,
                                int n_samples = 401);

/// Roots of c Z - Z^p = value on [0, C]; nullopt when the level is unattainable.
std::optional<std::pair<double, double>> isocline_roots(double c, double p, double value);

/// Local behaviour of the unique orbit entering S = (1,0):
///   p >= 2: Z ~ coeff (1-X)            (coeff as printed in the source analysis:
///                                       negative for p = 2, positive for p > 2)
///   p < 2:  Z ~ coeff (1-X)^{2/p}
/// `seed_coeff` is the positive factor actually used to start integrations; when
/// it disagrees in sign with `coeff`, `note` records the flip instead of hiding it.
struct SExpansion {
    enum class Form { Linear, Power };
    Form form = Form::Linear;
    double coeff = 0.0;
    double exponent = 1.0;
    double seed_coeff = 0.0;
    std::string note;
};

SExpansion expansion_at_S(const DiffusionParams& d, const Reaction& r, double c);

enum class OrbitTerminal {
    HitOrigin,      // gamma > 0, c > c*: trapped under the upper isocline, -> O
    HitRc,          // gamma > 0, near-critical: reached the X floor with Z ~ C
    EscapedUp,      // c < c*: Z exceeded the escape certificate above C
    CrossedZero,    // Z reached 0 in the interior (CS-TW branches only)
    ReachedXZero,   // reached the X floor (gamma = 0 connections, Z_end ~ lambda)
    StepUnderflow,  // integrator stall; last state reported
    MaxSteps
};

const char* to_string(OrbitTerminal t);

struct PhasePoint {
    double X = 0.0;
    double Z = 0.0;
    double xi = 0.0;  // profile coordinate, quadrature of d xi = m dX / (Z X^{(1-mu)/(p-1)})
};

struct OrbitTrace {
    std::vector<PhasePoint> samples;  // X decreasing while Z > 0
    OrbitTerminal terminal = OrbitTerminal::MaxSteps;
    double c = 0.0;
    double x_end = 0.0;
    double z_end = 0.0;
    long n_steps = 0;
    // CS-TW extras (see cs_tw_branch)
    double x_zero_cross = std::numeric_limits<double>::quiet_NaN();
    double a_prime_pos = std::numeric_limits<double>::quiet_NaN();
    double a_prime_neg = std::numeric_limits<double>::quiet_NaN();

    bool escaped() const { return terminal == OrbitTerminal::EscapedUp; }
    bool reached_axis() const {
        return terminal == OrbitTerminal::HitOrigin || terminal == OrbitTerminal::HitRc ||
               terminal == OrbitTerminal::ReachedXZero;
    }
};

struct IntegrateOpts {
    double x_patch = 1e-4;    // seed distance from S
    double x_floor = 1e-10;   // stop when X falls below this
    double z_ceiling = -1.0;  // < 0: auto 10 c^{1/(p-1)} + 10 (runtime backstop only)
    double rtol = 1e-10;
    double atol = 1e-13;
    bool record = true;       // keep samples; classification-only runs pass false
    long max_steps = 2'000'000;
};

/// Integrates the orbit entering S backward (X decreasing) and classifies its fate.
/// Escape above C = c^{1/(p-1)} is certified analytically (H < 0 for Z > C means Z
/// grows as X decreases); capture below the upper isocline branch is likewise a
/// one-way event, so the dichotomy is decided without racing to the ceiling.
OrbitTrace integrate_from_S(const DiffusionParams& d, const Reaction& r, double c,
                            const IntegrateOpts& opts = {});

/// Lower-isocline guide near the origin for gamma > 0 and c > c*:
/// Z ~ (m f'(0)/c) X^{gamma/(p-1)}.
double near_origin_guide(const DiffusionParams& d, const Reaction& r, double c, double X);

/// Change-sign TW (type 2) branch through (X_start, Z_start), integrated in both
/// xi-directions. The trace runs in profile order: X rising from ~0 (Z > 0, with
/// Z X^{1/(p-1)} -> a_prime_pos), through the Z = 0 crossing at the profile
/// maximum, back down to ~0 (Z < 0). xi is anchored at 0 on the first sample.
OrbitTrace cs_tw_branch(const DiffusionParams& d, const Reaction& r, double c,
                        double X_start, double Z_start, const IntegrateOpts& opts = {});

}  // namespace dnlkpp
