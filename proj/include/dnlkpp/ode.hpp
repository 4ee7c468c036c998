#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <limits>

namespace dnlkpp::ode {

/// Outcome of an adaptive integration drive.
enum class DriveStatus { Event, ReachedEnd, StepUnderflow, MaxSteps };

/// Embedded Dormand-Prince 4(5) pair with PI-free step control.
/// State is a fixed-size Eigen vector; `rhs(t, y)` returns the derivative,
/// `accept(t, y)` is called after every accepted step and may stop the drive
/// by returning true. `admissible(y)` rejects trial stages that leave the
/// domain (step is halved instead of evaluated).
template <int N>
struct Dopri5 {
    using Vec = Eigen::Matrix<double, N, 1>;

    double rtol = 1e-10;
    double atol = 1e-13;
    double h_init = 1e-4;
    double h_min = 1e-15;
    double h_max = std::numeric_limits<double>::infinity();
    long max_steps = 2'000'000;

    std::function<Vec(double, const Vec&)> rhs;
    std::function<bool(const Vec&)> admissible;      // optional
    std::function<bool(double, const Vec&)> accept;  // optional stop event

    // filled by drive()
    double t = 0.0;
    Vec y = Vec::Zero();
    long n_steps = 0;

    DriveStatus drive(double t0, Vec y0, double t_end) {
        static constexpr double A[7][6] = {
            {},
            {1.0 / 5},
            {3.0 / 40, 9.0 / 40},
            {44.0 / 45, -56.0 / 15, 32.0 / 9},
            {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
            {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
            {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
        static constexpr double Cn[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1, 1};
        static constexpr double B5[7] = {35.0 / 384,      0.0,        500.0 / 1113, 125.0 / 192,
                                         -2187.0 / 6784,  11.0 / 84,  0.0};
        static constexpr double B4[7] = {5179.0 / 57600,  0.0,          7571.0 / 16695, 393.0 / 640,
                                         -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
        t = t0;
        y = y0;
        n_steps = 0;
        const double dir = (t_end > t0) ? 1.0 : -1.0;
        double h = dir * std::abs(h_init);
        Vec k[7];
        while ((t_end - t) * dir > 0.0) {
            if ((t + h - t_end) * dir > 0.0) h = t_end - t;
            bool bad = false;
            for (int i = 0; i < 7; ++i) {
                Vec yi = y;
                for (int j = 0; j < i; ++j) yi += (h * A[i][j]) * k[j];
                if (admissible && !admissible(yi)) {
                    bad = true;
                    break;
                }
                k[i] = rhs(t + Cn[i] * h, yi);
                if (!k[i].allFinite()) {
                    bad = true;
                    break;
                }
            }
            if (bad) {
                h *= 0.5;
                if (std::abs(h) < h_min) return DriveStatus::StepUnderflow;
                continue;
            }
            Vec y5 = y, y4 = y;
            for (int i = 0; i < 7; ++i) {
                y5 += (h * B5[i]) * k[i];
                y4 += (h * B4[i]) * k[i];
            }
            double err = 0.0;
            for (int c = 0; c < N; ++c) {
                const double sc = atol + rtol * std::max(std::abs(y[c]), std::abs(y5[c]));
                const double e = (y5[c] - y4[c]) / sc;
                err += e * e;
            }
            err = std::sqrt(err / N);
            if (err <= 1.0) {
                t += h;
                y = y5;
                ++n_steps;
                if (n_steps >= max_steps) return DriveStatus::MaxSteps;
                if (accept && accept(t, y)) return DriveStatus::Event;
            }
            h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
            if (std::abs(h) > h_max) h = std::copysign(h_max, h);
            if (std::abs(h) < h_min) return DriveStatus::StepUnderflow;
        }
        return DriveStatus::ReachedEnd;
    }
};

/// One backward-Euler step y1 = y0 + h f(t0+h, y1) for a scalar stiff relaxation,
/// solved by damped Newton with a numerical derivative. Used to leave attracting
/// boundary layers where an explicit pair would be stability-limited.
inline bool implicit_euler_step(const std::function<double(double, double)>& f,
                                double t0, double y0, double h, double& y1_out) {
    const double t1 = t0 + h;
    double y = y0;
    for (int it = 0; it < 60; ++it) {
        const double g = y - y0 - h * f(t1, y);
        const double dy = std::max(1e-9 * std::abs(y), 1e-14);
        const double gp = (y + dy - y0 - h * f(t1, y + dy) - g) / dy;
        if (!(std::isfinite(g) && std::isfinite(gp)) || gp == 0.0) return false;
        double step = g / gp;
        // keep iterates positive; Z stays in (0, inf) in every use here
        while (y - step <= 0.0) step *= 0.5;
        y -= step;
        if (std::abs(step) <= 1e-13 * std::max(1.0, std::abs(y))) {
            y1_out = y;
            return true;
        }
    }
    return false;
}

}  // namespace dnlkpp::ode
