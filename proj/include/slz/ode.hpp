#pragma once

// Embedded Dormand–Prince 5(4) pair with FSAL, PI step-size control, and the
// standard order-4 continuous extension for dense output.  The state is a
// fixed-size array of double or complex<double>; the driver reports every
// accepted node to a sink which may rescale the state in place (used for
// overflow-safe log-scaled propagation).

#include <array>
#include <cmath>
#include <complex>
#include <type_traits>

#include "slz/common.hpp"

namespace slz {

template <class T>
inline double abs2(const T& v) {
    if constexpr (std::is_same_v<T, double>) {
        return v * v;
    } else {
        return std::norm(v);
    }
}

struct ode_options {
    double tol = 1e-10;  // local error tolerance (abs and rel)
    double h_init = 0.0; // 0: choose automatically
    double h_max = 0.0;  // 0: span / 4
    bool want_dense = false;
    // absolute-error floor: per-component scale is tol·(floor + |y_i|).
    // By default floor = 1; with atol_state_frac >= 0 the floor becomes
    // frac·max_j|y_j| instead, which keeps small components accurate relative
    // to the state as a whole (needed when another equation divides by a
    // small coefficient and would amplify their error).
    double atol_state_frac = -1.0;
    long max_steps = 40'000'000;
};

// One accepted node: position, state, state derivative (same log-gauge as y).
template <class T, std::size_t N>
struct ode_node {
    double x;
    std::array<T, N> y;
    std::array<T, N> dy;
};

// Continuous extension over one accepted step [x0, x0+h] (h signed).
template <class T, std::size_t N>
struct dense_data {
    double x0 = 0, h = 0;
    std::array<T, N> rc[5];

    std::array<T, N> eval(double x) const {
        double th = (x - x0) / h, th1 = 1.0 - th;
        std::array<T, N> out;
        for (std::size_t i = 0; i < N; ++i)
            out[i] = rc[0][i] +
                     th * (rc[1][i] + th1 * (rc[2][i] + th * (rc[3][i] + th1 * rc[4][i])));
        return out;
    }
};

namespace detail {
// Dormand–Prince coefficients.
constexpr double dp_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
// 5th-order weights are row dp_a[6]; error weights = b5 - b4.
constexpr double dp_e[7] = {71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920,
                            -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
// dense-output weights
constexpr double dp_d[7] = {-12715105075.0 / 11282082432.0, 0.0,
                            87487479700.0 / 32700410799.0, -10690763975.0 / 1880347072.0,
                            701980252875.0 / 199316789632.0, -1453857185.0 / 822651844.0,
                            69997945.0 / 29380423.0};
}  // namespace detail

// Integrate dy/dx = f(x, y, dy) from x0 to x1 (either direction).
//   f: void(double x, const std::array<T,N>& y, std::array<T,N>& dydx)
//   sink: bool(double x, std::array<T,N>& y, std::array<T,N>& dy,
//              const dense_data<T,N>* seg)
// The sink runs at x0 (seg == nullptr) and after every accepted step; with
// opt.want_dense the seg argument carries the continuous extension of the
// step just taken, expressed in the gauge the step started in.  The sink may
// rescale y (and dy consistently) in place; it must return true when it does
// so the driver refreshes its FSAL stage from the rescaled state.
template <class T, std::size_t N, class F, class Sink>
void integrate_ode(F&& f, double x0, double x1, std::array<T, N>& y,
                   const ode_options& opt, Sink&& sink) {
    std::array<T, N> k[7], ytmp, ynew, yerr;
    double x = x0;

    f(x, y, k[0]);
    if (sink(x, y, k[0], nullptr)) f(x, y, k[0]);
    if (x0 == x1) return;

    const double dir = (x1 > x0) ? 1.0 : -1.0;
    const double span = std::fabs(x1 - x0);
    const double hmax = (opt.h_max > 0) ? opt.h_max : span / 4;
    const double tol = opt.tol;

    // initial step: crude scale estimate, controller fixes it quickly
    double h;
    if (opt.h_init > 0) {
        h = opt.h_init;
    } else {
        double ny = 0, nf = 0;
        for (std::size_t i = 0; i < N; ++i) {
            ny = std::max(ny, std::sqrt(abs2(y[i])));
            nf = std::max(nf, std::sqrt(abs2(k[0][i])));
        }
        h = (nf > 0) ? 0.01 * std::max(ny, 1.0) / nf : span / 100;
        h = std::min(h, span / 10);
        h = std::max(h, span * 1e-12);
    }
    h = std::min(h, hmax);

    dense_data<T, N> seg;
    double err_prev = 1.0;
    long steps = 0;
    bool last = false;

    while (true) {
        if (++steps > opt.max_steps)
            throw numeric_error("ode: step limit exceeded at x=" + fmt17(x));
        double remaining = std::fabs(x1 - x);
        if (h >= remaining) {
            h = remaining;
            last = true;
        } else {
            last = false;
        }
        double hd = dir * h;

        for (int s = 1; s < 7; ++s) {
            for (std::size_t i = 0; i < N; ++i) {
                T acc{};
                for (int j = 0; j < s; ++j) acc += detail::dp_a[s][j] * k[j][i];
                ytmp[i] = y[i] + hd * acc;
            }
            f(x + detail::dp_c[s] * hd, ytmp, k[s]);
        }
        ynew = ytmp;  // stage 7 state is the 5th-order solution (c7 = 1, a7 = b)
        for (std::size_t i = 0; i < N; ++i) {
            T acc{};
            for (int j = 0; j < 7; ++j) acc += detail::dp_e[j] * k[j][i];
            yerr[i] = hd * acc;
        }

        double afloor = 1.0;
        if (opt.atol_state_frac >= 0) {
            double m = 0;
            for (std::size_t i = 0; i < N; ++i)
                m = std::max({m, std::sqrt(abs2(y[i])), std::sqrt(abs2(ynew[i]))});
            afloor = opt.atol_state_frac * m;
        }
        double err = 0;
        for (std::size_t i = 0; i < N; ++i) {
            double sc = tol * afloor +
                        tol * std::max(std::sqrt(abs2(y[i])), std::sqrt(abs2(ynew[i])));
            err += abs2(yerr[i]) / (sc * sc);
        }
        err = std::sqrt(err / N);

        if (err <= 1.0) {
            if (opt.want_dense) {
                seg.x0 = x;
                seg.h = hd;
                for (std::size_t i = 0; i < N; ++i) {
                    T ydiff = ynew[i] - y[i];
                    T bspl = hd * k[0][i] - ydiff;
                    seg.rc[0][i] = y[i];
                    seg.rc[1][i] = ydiff;
                    seg.rc[2][i] = bspl;
                    seg.rc[3][i] = ydiff - hd * k[6][i] - bspl;
                    seg.rc[4][i] = hd * (detail::dp_d[0] * k[0][i] + detail::dp_d[2] * k[2][i] +
                                         detail::dp_d[3] * k[3][i] + detail::dp_d[4] * k[4][i] +
                                         detail::dp_d[5] * k[5][i] + detail::dp_d[6] * k[6][i]);
                }
            }
            x = last ? x1 : x + hd;
            y = ynew;
            k[0] = k[6];  // FSAL: derivative at (x, y)
            double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) *
                         std::pow(std::max(err_prev, 1e-10), 0.4 / 5.0);
            fac = std::clamp(fac, 0.2, 5.0);
            err_prev = std::max(err, 1e-10);
            h = std::min(h * fac, hmax);
            if (sink(x, y, k[0], opt.want_dense ? &seg : nullptr)) f(x, y, k[0]);
            if (last) break;
        } else {
            double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            h *= fac;
            if (h < span * 1e-15 || x + dir * h == x)
                throw numeric_error("ode: step size underflow at x=" + fmt17(x));
        }
    }
}

// Cubic Hermite interpolation between two nodes (same gauge); used where the
// full continuous extension is unavailable.
template <class T, std::size_t N>
std::array<T, N> hermite_eval(double x, const ode_node<T, N>& a, const ode_node<T, N>& b) {
    double hseg = b.x - a.x;
    if (hseg == 0) return a.y;
    double s = (x - a.x) / hseg;
    double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    double h10 = s * (1 - s) * (1 - s);
    double h01 = s * s * (3 - 2 * s);
    double h11 = s * s * (s - 1);
    std::array<T, N> out;
    for (std::size_t i = 0; i < N; ++i)
        out[i] = h00 * a.y[i] + (h10 * hseg) * a.dy[i] + h01 * b.y[i] + (h11 * hseg) * b.dy[i];
    return out;
}

}  // namespace slz
