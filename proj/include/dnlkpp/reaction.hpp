#pragma once

#include <Eigen/Core>
#include <utility>

#include "dnlkpp/params.hpp"

namespace dnlkpp {

/// KPP reaction term f on [0,1]: f(0) = f(1) = 0, f > 0 in (0,1).
///
/// Kinds:
///   Logistic     scale * u(1-u)
///   StrongPower  scale * u^n (1-u), n real; the "strong reaction" family.
///                n < 1 is singular/non-vanishing at u = 0 and is admitted for
///                phase-plane classification only.
///   Tabulated    monotone piecewise-cubic interpolant of user samples.
///                f'(0) and f'(1) must be supplied, not differenced: the wave
///                tails depend sensitively on them.
class Reaction {
  public:
    enum class Kind { Logistic, StrongPower, Tabulated };

    static Reaction logistic(double scale = 1.0);
    static Reaction strong_power(double n, double scale = 1.0);
    static Reaction tabulated(Eigen::ArrayXd u, Eigen::ArrayXd f,
                              double fprime0, double fprime1);

    Kind kind() const { return kind_; }
    double power() const { return n_; }
    double scale() const { return scale_; }

    /// f(u) without domain checks; callers inside integrators use this.
    double value(double u) const;
    double fprime0() const { return fprime0_; }
    double fprime1() const { return fprime1_; }

    /// A copy with f multiplied by kappa (kappa > 0).
    Reaction scaled(double kappa) const;

  private:
    Reaction() = default;
    void validate() const;

    Kind kind_ = Kind::Logistic;
    double n_ = 1.0;
    double scale_ = 1.0;
    double fprime0_ = 1.0;
    double fprime1_ = -1.0;
    // tabulated data and PCHIP slopes
    Eigen::ArrayXd ux_, fy_, slope_;
};

/// f(u) with the [0,1] domain check.
double eval_f(const Reaction& r, double u);

/// f_{m,p}(X) = m X^{gamma/(p-1) - 1} f(X), the reaction as it appears in the
/// transformed phase plane; continuous on [0,1] whenever gamma >= 0.
/// At X = 0 returns the limit: 0 if the effective power is positive,
/// m f'(0) (resp. m scale for StrongPower) if it vanishes.
double eval_fmp(const DiffusionParams& d, const Reaction& r, double X);

/// f_{m,p}(e^s) evaluated stably for very negative s (X far below underflow of
/// intermediate powers). Orbit integrations step in s = ln X and use this form.
double eval_fmp_log(const DiffusionParams& d, const Reaction& r, double s);

/// Exponent e of f_{m,p}(X) ~ const X^e as X -> 0 (q for the strong-power
/// family, gamma/(p-1) otherwise). e > 0 vanishing, e == 0 finite limit,
/// e < 0 divergent (no admissible waves).
double fmp_origin_power(const DiffusionParams& d, const Reaction& r);

struct FmpMax {
    double X_mp = 0.0;  // argmax in [0,1]
    double F_mp = 0.0;  // max value
};

/// Maximum of f_{m,p} on [0,1] by a 10^4-point scan refined with golden section.
/// Asserts unimodality of the scanned values and throws numerics_error if the
/// scan sees more than one separated local maximum.
FmpMax fmp_max(const DiffusionParams& d, const Reaction& r);

/// Space/time rescaling constants that normalize f'(0) to 1 (A = f'(0)^{-1/p}).
/// Speeds of the normalized problem map back through c = speed_factor * nu.
struct ScalingReduction {
    double A = 1.0;
    double speed_factor = 1.0;
};

std::pair<Reaction, ScalingReduction> normalize_reaction(const DiffusionParams& d,
                                                         const Reaction& r);

}  // namespace dnlkpp
