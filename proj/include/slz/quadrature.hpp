#pragma once

// Adaptive Gauss–Kronrod 15(7) quadrature on finite intervals, plus a
// geometric-panel driver for semi-infinite integrals of decaying integrands.
// Works for real- or complex-valued integrands of a real variable.

#include <cmath>
#include <complex>

#include "slz/common.hpp"

namespace slz {

namespace detail {
// 15-point Kronrod abscissae/weights with embedded 7-point Gauss rule.
constexpr double gk_x[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double gk_wk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double gk_wg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class V, class F>
void gk15(F&& f, double a, double b, V& kronrod, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    V fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * gk_x[i]);
        fv[14 - i] = f(c + h * gk_x[i]);
    }
    fv[7] = f(c);
    V sk{}, sg{};
    for (int i = 0; i < 8; ++i) {
        sk += gk_wk[i] * (i == 7 ? fv[7] : fv[i] + fv[14 - i]);
    }
    // Gauss points are the odd-index abscissae (x[1], x[3], x[5], x[7]=0).
    for (int i = 0; i < 3; ++i) sg += gk_wg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    sg += gk_wg[3] * fv[7];
    kronrod = h * sk;
    err = std::abs(h) * std::abs(sk - sg);
}
}  // namespace detail

// Adaptive bisection to an absolute-ish tolerance: a panel is accepted when
// its Gauss/Kronrod discrepancy is below tol scaled by panel fraction.
template <class V, class F>
V integrate_adaptive(F&& f, double a, double b, double tol, int max_depth = 40) {
    struct frame {
        double a, b;
        int depth;
    };
    const double span = std::fabs(b - a);
    if (span == 0) return V{};
    V total{};
    // deterministic left-to-right recursion via explicit stack
    std::vector<frame> stack{{a, b, 0}};
    while (!stack.empty()) {
        frame fr = stack.back();
        stack.pop_back();
        V val;
        double err;
        detail::gk15(f, fr.a, fr.b, val, err);
        double frac = std::fabs(fr.b - fr.a) / span;
        if (err <= tol * std::max(frac, 1e-3) || std::fabs(fr.b - fr.a) < 1e-15 * span) {
            total += val;
            continue;
        }
        if (fr.depth >= max_depth)
            throw numeric_error("quadrature: max depth at [" + fmt17(fr.a) + "," + fmt17(fr.b) + "]");
        double m = 0.5 * (fr.a + fr.b);
        stack.push_back({m, fr.b, fr.depth + 1});
        stack.push_back({fr.a, m, fr.depth + 1});
    }
    return total;
}

// ∫_a^∞ f for integrands decaying fast enough that geometric panels
// [a·g^k, a·g^{k+1}] (a > 0) eventually contribute below tol.
template <class V, class F>
V integrate_to_infinity(F&& f, double a, double tol, double growth = 2.0,
                        int max_panels = 200) {
    if (!(a > 0)) throw validation_error("integrate_to_infinity: need a > 0");
    V total{};
    double lo = a;
    int small_count = 0;
    for (int k = 0; k < max_panels; ++k) {
        double hi = lo * growth;
        V val = integrate_adaptive<V>(f, lo, hi, tol);
        total += val;
        if (std::abs(val) < tol * std::max(1.0, std::abs(total))) {
            if (++small_count >= 2) return total;
        } else {
            small_count = 0;
        }
        lo = hi;
    }
    throw numeric_error("integrate_to_infinity: no decay after max panels");
}

}  // namespace slz
