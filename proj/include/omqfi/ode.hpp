// ode.hpp — Adaptive embedded Dormand–Prince 5(4) stepper for small systems.
//
// The forcing terms in this project are smooth trigonometric functions, so a
// classic DOPRI5 pair with PI-free step control is plenty. Steps are clipped
// to land exactly on requested endpoints, which keeps downstream sampling free
// of interpolation error.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "omqfi/errors.hpp"

namespace omqfi::ode {

struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double h_init = 1e-3;
    double h_max = 0.1;
};

// Integrates y' = rhs(t, y) in place from t0 to t1 (t1 >= t0).
// rhs signature: void(double t, const std::vector<double>& y, std::vector<double>& dydt).
template <typename Rhs>
void integrate(const Rhs& rhs, double t0, double t1, std::vector<double>& y,
               const Options& opt = {}) {
    if (t1 <= t0) return;

    const std::size_t n = y.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    std::vector<double> ytmp(n), ynew(n);

    rhs(t0, y, k1);

    double t = t0;
    double h = std::min({opt.h_init, opt.h_max, t1 - t0});

    auto stage = [&](double c, const double* a, int na, std::vector<double>& out) {
        const std::vector<double>* ks[] = {&k1, &k2, &k3, &k4, &k5, &k6};
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < na; ++j) acc += a[j] * (*ks[j])[i];
            ytmp[i] = y[i] + h * acc;
        }
        rhs(t + c * h, ytmp, out);
    };

    while (t < t1) {
        h = std::min(h, t1 - t);
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            throw IntegratorError("ode: step size underflow", t);
        }

        static constexpr double a2[] = {1.0 / 5};
        static constexpr double a3[] = {3.0 / 40, 9.0 / 40};
        static constexpr double a4[] = {44.0 / 45, -56.0 / 15, 32.0 / 9};
        static constexpr double a5[] = {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561,
                                        -212.0 / 729};
        static constexpr double a6[] = {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247,
                                        49.0 / 176, -5103.0 / 18656};
        static constexpr double b[] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192,
                                       -2187.0 / 6784, 11.0 / 84};
        // b - b_hat, with b_hat the embedded 4th-order weights
        static constexpr double e[] = {71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920,
                                       -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

        stage(1.0 / 5, a2, 1, k2);
        stage(3.0 / 10, a3, 2, k3);
        stage(4.0 / 5, a4, 3, k4);
        stage(8.0 / 9, a5, 4, k5);
        stage(1.0, a6, 5, k6);
        for (std::size_t i = 0; i < n; ++i) {
            ynew[i] = y[i] + h * (b[0] * k1[i] + b[2] * k3[i] + b[3] * k4[i] +
                                  b[4] * k5[i] + b[5] * k6[i]);
        }
        rhs(t + h, ynew, k7);  // FSAL stage

        double err_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double err_i = h * (e[0] * k1[i] + e[2] * k3[i] + e[3] * k4[i] +
                                e[4] * k5[i] + e[5] * k6[i] + e[6] * k7[i]);
            double scale =
                opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err_sq += (err_i / scale) * (err_i / scale);
        }
        double err = std::sqrt(err_sq / static_cast<double>(n));

        if (err <= 1.0) {
            t += h;
            y.swap(ynew);
            k1.swap(k7);
            double factor = (err == 0.0) ? 5.0
                                         : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h = std::min(h * factor, opt.h_max);
        } else {
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
        }
    }
}

}  // namespace omqfi::ode
