#include "dnlkpp/reaction.hpp"

#include <algorithm>
#include <cmath>

#include "dnlkpp/errors.hpp"

namespace dnlkpp {

namespace {

// Fritsch-Carlson monotone cubic slopes.
Eigen::ArrayXd pchip_slopes(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
    const Eigen::Index n = x.size();
    Eigen::ArrayXd d(n - 1), m(n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        if (d[i - 1] * d[i] <= 0.0) {
            m[i] = 0.0;
        } else {
            const double w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
            const double w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    // clamp to keep the interpolant monotone on each interval
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        if (d[i] == 0.0) {
            m[i] = m[i + 1] = 0.0;
        } else {
            const double a = m[i] / d[i], b = m[i + 1] / d[i];
            const double s = a * a + b * b;
            if (s > 9.0) {
                const double t = 3.0 / std::sqrt(s);
                m[i] = t * a * d[i];
                m[i + 1] = t * b * d[i];
            }
        }
    }
    return m;
}

double pchip_eval(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y,
                  const Eigen::ArrayXd& m, double u) {
    const Eigen::Index n = x.size();
    Eigen::Index i = std::upper_bound(x.data(), x.data() + n, u) - x.data();
    i = std::clamp<Eigen::Index>(i - 1, 0, n - 2);
    const double h = x[i + 1] - x[i];
    const double t = (u - x[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return y[i] * (2 * t3 - 3 * t2 + 1) + h * m[i] * (t3 - 2 * t2 + t) +
           y[i + 1] * (-2 * t3 + 3 * t2) + h * m[i + 1] * (t3 - t2);
}

}  // namespace

Reaction Reaction::logistic(double scale) {
    if (!(scale > 0.0)) throw config_error("reaction scale must be > 0");
    Reaction r;
    r.kind_ = Kind::Logistic;
    r.scale_ = scale;
    r.fprime0_ = scale;
    r.fprime1_ = -scale;
    return r;
}

Reaction Reaction::strong_power(double n, double scale) {
    if (!(scale > 0.0)) throw config_error("reaction scale must be > 0");
    Reaction r;
    r.kind_ = Kind::StrongPower;
    r.n_ = n;
    r.scale_ = scale;
    // f'(0) in the usual sense exists only for n == 1; the phase plane never
    // needs it for other n, but keep the n == 1 case exact.
    r.fprime0_ = (n == 1.0) ? scale : (n > 1.0 ? 0.0
                                               : std::numeric_limits<double>::infinity());
    r.fprime1_ = -scale;
    return r;
}

Reaction Reaction::tabulated(Eigen::ArrayXd u, Eigen::ArrayXd f,
                             double fprime0, double fprime1) {
    if (u.size() != f.size() || u.size() < 4)
        throw config_error("tabulated reaction needs >= 4 matching samples");
    if (u[0] != 0.0 || u[u.size() - 1] != 1.0)
        throw config_error("tabulated reaction samples must span [0,1]");
    for (Eigen::Index i = 0; i + 1 < u.size(); ++i)
        if (!(u[i + 1] > u[i])) throw config_error("tabulated abscissae must increase");
    if (!(fprime0 > 0.0)) throw config_error("tabulated reaction needs f'(0) > 0");
    if (!(fprime1 < 0.0)) throw config_error("tabulated reaction needs f'(1) < 0");
    Reaction r;
    r.kind_ = Kind::Tabulated;
    r.ux_ = std::move(u);
    r.fy_ = std::move(f);
    r.slope_ = pchip_slopes(r.ux_, r.fy_);
    r.fprime0_ = fprime0;
    r.fprime1_ = fprime1;
    r.validate();
    return r;
}

double Reaction::value(double u) const {
    switch (kind_) {
        case Kind::Logistic:
            return scale_ * u * (1.0 - u);
        case Kind::StrongPower:
            return scale_ * std::pow(u, n_) * (1.0 - u);
        case Kind::Tabulated:
            if (u <= 0.0) return 0.0;
            if (u >= 1.0) return 0.0;
            if (u < ux_[1]) {
                // blend to the prescribed derivative at the left endpoint
                return fprime0_ * u + (pchip_eval(ux_, fy_, slope_, ux_[1]) - fprime0_ * ux_[1]) *
                                          (u / ux_[1]) * (u / ux_[1]);
            }
            return pchip_eval(ux_, fy_, slope_, u);
    }
    return 0.0;
}

Reaction Reaction::scaled(double kappa) const {
    if (!(kappa > 0.0)) throw config_error("reaction scale factor must be > 0");
    Reaction r = *this;
    r.scale_ *= kappa;
    r.fprime0_ *= kappa;
    r.fprime1_ *= kappa;
    if (kind_ == Kind::Tabulated) r.fy_ *= kappa;
    return r;
}

void Reaction::validate() const {
    if (std::abs(value(0.0)) > 1e-12 || std::abs(value(1.0)) > 1e-12)
        throw config_error("reaction must vanish at u = 0 and u = 1");
    const int N = 2000;
    double prev2 = 0.0, prev1 = 0.0;
    for (int i = 1; i < N; ++i) {
        const double u = double(i) / N;
        const double f = value(u);
        if (!(f > 0.0)) throw config_error("reaction must be positive on (0,1)");
        if (i >= 2) {
            // discrete concavity, with slack for interpolation wiggle
            const double second = prev2 - 2.0 * prev1 + f;
            if (second > 1e-6 * std::max(1.0, scale_))
                throw config_error("tabulated reaction is not concave on [0,1]");
        }
        prev2 = prev1;
        prev1 = f;
    }
}

double eval_f(const Reaction& r, double u) {
    if (!(u >= 0.0 && u <= 1.0)) throw config_error("reaction argument outside [0,1]");
    return r.value(u);
}

namespace {

// Effective endpoint power of f_{m,p} at X = 0: the exponent e in
// f_{m,p} ~ const * X^e.
double origin_power(const DiffusionParams& d, const Reaction& r) {
    const double k = d.gamma / (d.p - 1.0);
    if (r.kind() == Reaction::Kind::StrongPower) return k - 1.0 + r.power();
    return k;  // f ~ f'(0) X for the smooth kinds
}

double origin_coeff(const DiffusionParams& d, const Reaction& r) {
    if (r.kind() == Reaction::Kind::StrongPower) return d.m * r.scale();
    return d.m * r.fprime0();
}

}  // namespace

double fmp_origin_power(const DiffusionParams& d, const Reaction& r) {
    return origin_power(d, r);
}

double eval_fmp(const DiffusionParams& d, const Reaction& r, double X) {
    if (!(X >= 0.0 && X <= 1.0)) throw config_error("f_mp argument outside [0,1]");
    if (X == 0.0) {
        const double e = origin_power(d, r);
        if (e > 0.0) return 0.0;
        if (e == 0.0) return origin_coeff(d, r);
        throw numerics_error("f_mp diverges at X = 0 (effective power < 0)");
    }
    return eval_fmp_log(d, r, std::log(X));
}

double eval_fmp_log(const DiffusionParams& d, const Reaction& r, double s) {
    const double k = d.gamma / (d.p - 1.0);
    switch (r.kind()) {
        case Reaction::Kind::Logistic:
            // m scale X^k (1 - X)
            return d.m * r.scale() * std::exp(k * s) * (-std::expm1(s));
        case Reaction::Kind::StrongPower: {
            const double q = k - 1.0 + r.power();
            return d.m * r.scale() * std::exp(q * s) * (-std::expm1(s));
        }
        case Reaction::Kind::Tabulated: {
            const double X = std::exp(s);
            if (X < 1e-8) return origin_coeff(d, r) * std::exp(k * s);
            return d.m * std::exp((k - 1.0) * s) * r.value(X);
        }
    }
    return 0.0;
}

FmpMax fmp_max(const DiffusionParams& d, const Reaction& r) {
    const int N = 10000;
    auto f = [&](double X) { return eval_fmp(d, r, X); };
    int best = 0;
    double fbest = f(0.0);
    Eigen::ArrayXd vals(N + 1);
    vals[0] = fbest;
    for (int i = 1; i <= N; ++i) {
        vals[i] = f(double(i) / N);
        if (vals[i] > fbest) {
            fbest = vals[i];
            best = i;
        }
    }
    // unimodality: values must rise to the scanned argmax and fall after it
    const double tol = 1e-12 * std::max(1.0, fbest);
    for (int i = 1; i <= N; ++i) {
        const bool rising = vals[i] >= vals[i - 1] - tol;
        if (i <= best && !rising)
            throw numerics_error("f_mp is not unimodal on [0,1]");
        if (i > best && vals[i] > vals[i - 1] + tol)
            throw numerics_error("f_mp is not unimodal on [0,1]");
    }
    if (best == 0 || best == N) return {double(best) / N, fbest};
    // golden-section refinement on the bracketing interval
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = double(best - 1) / N, b = double(best + 1) / N;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-14; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        }
    }
    const double X = 0.5 * (a + b);
    return {X, f(X)};
}

std::pair<Reaction, ScalingReduction> normalize_reaction(const DiffusionParams& d,
                                                         const Reaction& r) {
    const double fp0 = r.fprime0();
    if (!(fp0 > 0.0) || !std::isfinite(fp0))
        throw config_error("normalization needs finite f'(0) > 0");
    ScalingReduction s;
    s.A = std::pow(fp0, -1.0 / d.p);
    s.speed_factor = std::pow(fp0, (d.p - 1.0) / d.p);
    // f~ = A^p f  has  f~'(0) = 1
    return {r.scaled(1.0 / fp0), s};
}

}  // namespace dnlkpp
