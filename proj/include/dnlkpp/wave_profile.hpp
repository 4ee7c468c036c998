#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>

#include "dnlkpp/phase_plane.hpp"

namespace dnlkpp {

enum class WaveKind { FinitePositiveTW, PositiveTW, ChangeSignTW };

const char* to_string(WaveKind k);

struct TailFit {
    enum class Model { PureExp, ExpWithPowerPrefactor, PowerFreeBoundary };
    Model model = Model::PureExp;
    double rate = 0.0;       // exponential rate (PureExp, ExpWithPowerPrefactor)
    double power = 0.0;      // |xi| prefactor power, or the free-boundary exponent
    double amplitude = 0.0;  // fitted a0
    double residual = 0.0;   // max relative deviation over the fit window
    int n_window = 0;
};

/// Sampled wave profile phi(xi), phi ascending with xi, with the nonlinear flux
/// |(phi^m)'|^{p-2}(phi^m)' per sample (equal to sign(Z)|Z|^{p-1} X in phase
/// variables).
struct WaveProfile {
    Eigen::ArrayXd xi, phi, flux;
    double c = 0.0;
    WaveKind kind = WaveKind::PositiveTW;
    double xi_free_boundary = std::numeric_limits<double>::quiet_NaN();  // finite waves
    double xi_left_zero = std::numeric_limits<double>::quiet_NaN();     // CS waves
    double xi_right_zero = std::numeric_limits<double>::quiet_NaN();
    double peak = 1.0;  // max phi (CS waves; 1 for admissible waves)
    double splice_X = 0.0;     // smallest integrated X before analytic extension
    std::string splice_note;

    /// phi at xi by monotone interpolation within the sampled range.
    double phi_at(double xi_query) const;
};

/// Profile from an orbit trace by the separation-of-variables quadrature
/// d xi = m dX / (Z X^{(1-mu)/(p-1)}) accumulated during integration. The
/// translation gauge puts phi = anchor_phi at xi = 0 (CS traces anchor their
/// maximum instead).
WaveProfile reconstruct_profile(const DiffusionParams& d, const Reaction& r,
                                const OrbitTrace& orbit, double anchor_phi = 0.5);

/// Least-squares tail fit over the window phi in [1e-8, 1e-3] (positive waves)
/// or phi in [1e-6, 1e-3] against (xi - xi0) (finite waves). Model selection:
/// finite -> PowerFreeBoundary; positive with f_mp(0) > 0 at the touch speed ->
/// ExpWithPowerPrefactor; otherwise PureExp.
TailFit fit_tail(const WaveProfile& w, const DiffusionParams& d, const Reaction& r);

/// Log-log slope of phi against (xi - xi0) near the vanishing point.
double free_boundary_exponent(const WaveProfile& w, const DiffusionParams& d);

/// Change-sign TW of type 2 with maximum `peak` at xi = 0 and finite zeros on
/// both sides; the sub-solution barrier shape. Throws if the requested speed
/// admits no such wave (c at or above the critical speed).
WaveProfile build_cs_tw(const DiffusionParams& d, const Reaction& r, double c, double peak);

/// The truncated barrier: peak for xi <= 0, the descending CS branch on
/// [0, xi_right_zero], zero beyond.
Eigen::ArrayXd eval_truncated(const WaveProfile& cs, const Eigen::ArrayXd& xi);

/// Integrated-form residual of the profile ODE per unit xi, maximized over
/// subintervals of the sample range with phi inside [lo, hi]:
///   | c (phi_b - phi_a) - (flux_b - flux_a) - int f(phi) dxi | / (b - a).
double profile_ode_residual(const WaveProfile& w, const DiffusionParams& d,
                            const Reaction& r, double lo = 1e-4, double hi = 0.999,
                            int n_intervals = 40);

}  // namespace dnlkpp
