#include "slz/partialzeta.hpp"

#include <algorithm>
#include <cmath>

#include "slz/common.hpp"
#include "slz/ode.hpp"
#include "slz/propagate.hpp"
#include "slz/quadrature.hpp"

namespace slz {

namespace {

constexpr double pi = 3.14159265358979323846;

void check_span(const Problem& prob, double c, double x) {
    if (!std::isfinite(c) || !std::isfinite(x) || !(c < x))
        throw validation_error("needs finite c < x, got [" + fmt17(c) + ", " + fmt17(x) + "]");
    if (c < prob.a || x > prob.b)
        throw validation_error("range [" + fmt17(c) + ", " + fmt17(x) +
                               "] must lie inside the problem interval");
    if (x == prob.b && prob.right.classification != endpoint_class::regular)
        throw validation_error("right endpoint is singular; choose x strictly inside");
}

// ---------------------------------------------------------------------------
// zeta_recursive internals

// Integrates the Taylor-coefficient chain
//   (p T_j')' = (q - shift r) T_j - r T_{j-1},   j = 0..LMAX
// as one first-order system in quasi-derivative form, with a shared log gauge
// maintained by renormalizing at accepted nodes.  At each requested x the
// ratios rho_j = T_j / T_0 feed the log-series recurrence
//   l b_l = l rho_l - sum_{k<l} k b_k rho_{l-k},   zeta(l) = -l b_l,
// which is the Taylor expansion of ln(phi(mu,x)/phi(0,x)) term by term.
template <int LMAX>
void recursive_sweep(const Problem& prob, double x_start, const std::vector<double>& xs,
                     double shift, double tol, bool principal_launch, PartialZetaTable& out) {
    constexpr std::size_t N = 2 * (LMAX + 1);
    std::array<double, N> y{};

    if (principal_launch) {
        // the catalog's principal-solution data is affine in the spectral
        // parameter, so the first Taylor coefficient is a seed difference
        auto s0 = principal_seed(prob, cplx(shift), x_start);
        auto s1 = principal_seed(prob, cplx(shift + 1.0), x_start);
        y[0] = s0[0].real();
        y[1] = s0[1].real();
        if constexpr (LMAX >= 1) {
            y[2] = (s1[0] - s0[0]).real();
            y[3] = (s1[1] - s0[1]).real();
        }
    } else {
        y[1] = 1.0;  // Dirichlet launch: T_0 = 0, T_0^[1] = 1
    }

    auto rhs = [&prob, shift](double x, const std::array<double, N>& v,
                              std::array<double, N>& dv) {
        double p = prob.p(x), q = prob.q(x), r = prob.r(x);
        if (!(p > 0))
            throw numeric_error("taylor chain needs p > 0 inside the interval; p(" + fmt17(x) +
                                ") = " + fmt17(p));
        double qe = q - shift * r;
        for (int j = 0; j <= LMAX; ++j) {
            dv[2 * j] = v[2 * j + 1] / p;
            dv[2 * j + 1] = qe * v[2 * j] - (j > 0 ? r * v[2 * j - 2] : 0.0);
        }
    };

    double phi0_sign = 0;
    auto sink = [&phi0_sign](double x, std::array<double, N>& v, std::array<double, N>& dv,
                             const dense_data<double, N>*) {
        if (v[0] != 0) {
            double sg = v[0] > 0 ? 1.0 : -1.0;
            if (phi0_sign == 0)
                phi0_sign = sg;
            else if (sg != phi0_sign)
                throw numeric_error("phi_0 vanishes near x = " + fmt17(x) +
                                    "; pick a different c or a lower shift");
        }
        double m = 0;
        for (double t : v) m = std::max(m, std::fabs(t));
        if (m > 1e12) {
            for (double& t : v) t /= m;
            for (double& t : dv) t /= m;
            return true;  // shared gauge factor dropped; ratios are unaffected
        }
        return false;
    };

    ode_options opt;
    // same margin as propagate(): the controller bounds the per-step estimate,
    // accumulated drift needs headroom to deliver tol on the result
    opt.tol = std::max(tol / 32.0, 1e-14);
    opt.atol_state_frac = 1e-2;

    double x_prev = x_start;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        integrate_ode(rhs, x_prev, xs[k], y, opt, sink);
        x_prev = xs[k];

        double m = 0;
        for (double t : y) m = std::max(m, std::fabs(t));
        if (!(std::fabs(y[0]) > 1e-10 * m))
            throw numeric_error("phi_0 vanishes near x = " + fmt17(xs[k]) +
                                "; pick a different c or a lower shift");

        double rho[LMAX + 1], b[LMAX + 1];
        rho[0] = 1;
        for (int j = 1; j <= LMAX; ++j) rho[j] = y[2 * j] / y[0];
        for (int l = 1; l <= LMAX; ++l) {
            double acc = l * rho[l];
            for (int kk = 1; kk < l; ++kk) acc -= kk * b[kk] * rho[l - kk];
            b[l] = acc / l;
            out.values[l - 1][k] = -l * b[l];
        }
    }
}

// Liouville-Green decay data for (p y')' = (q - lambda r) y at x: y = 1 and
// y1 = -p s - (ps)'/(2s) with s = sqrt((q - lambda r)/p), the first-order
// correction keeping the seed on the decaying branch.
std::array<double, 2> lg_decay_seed(const Problem& prob, double lambda, double x) {
    auto s_at = [&](double t) {
        double v = (prob.q(t) - lambda * prob.r(t)) / prob.p(t);
        if (!(v > 0))
            throw numeric_error("no classically forbidden region at x = " + fmt17(t) +
                                "; lambda is not below the potential there");
        return std::sqrt(v);
    };
    double h = 1e-5 * std::max(1.0, std::fabs(x));
    double s = s_at(x);
    double ps_d = (prob.p(x + h) * s_at(x + h) - prob.p(x - h) * s_at(x - h)) / (2 * h);
    return {1.0, -prob.p(x) * s - ps_d / (2 * s)};
}

}  // namespace

std::string to_string(zeta_method m) {
    switch (m) {
        case zeta_method::direct: return "direct";
        case zeta_method::recursive: return "recursive";
        case zeta_method::integral: return "integral";
        case zeta_method::lg: return "lg";
    }
    return "?";
}

double PartialZetaTable::value(int ell, std::size_t k) const {
    if (ell < 1 || ell > ell_max) throw validation_error("ell out of table range");
    if (k >= xs.size()) throw validation_error("x index out of table range");
    return values[ell - 1][k];
}

std::string PartialZetaTable::to_csv() const {
    std::string out = "x,ell,value,method,shift\n";
    for (std::size_t k = 0; k < xs.size(); ++k)
        for (int l = 1; l <= ell_max; ++l)
            out += fmt17(xs[k]) + "," + std::to_string(l) + "," + fmt17(values[l - 1][k]) +
                   "," + to_string(method) + "," + fmt17(shift) + "\n";
    return out;
}

double weyl_tail(const EigenList& eigs, int ell) {
    if (ell < 1) throw validation_error("ell must be >= 1");
    if (eigs.entries.empty()) throw validation_error("weyl_tail needs a nonempty list");
    if (!(eigs.entries.back().lambda > 0))
        throw validation_error("weyl_tail needs the last eigenvalue positive");
    double L = eigs.weyl_length;
    double a = static_cast<double>(eigs.entries.size()) + 1;
    double s = 2.0 * ell;
    // Euler-Maclaurin for sum_{n >= a} C n^(-s), C = (L/pi)^(2 ell)
    double ln_lead = s * std::log(L / pi) + (1 - s) * std::log(a) - std::log(s - 1);
    if (ln_lead < std::log(1e-14)) return 0.0;
    double C = std::exp(s * std::log(L / pi));
    double t = C * (std::pow(a, 1 - s) / (s - 1) + 0.5 * std::pow(a, -s) +
                    (s / 12.0) * std::pow(a, -s - 1) -
                    (s * (s + 1) * (s + 2) / 720.0) * std::pow(a, -s - 3));
    return t < 1e-14 ? 0.0 : t;
}

double zeta_direct(const EigenList& eigs, int ell) {
    if (ell < 1) throw validation_error("ell must be >= 1");
    if (eigs.entries.empty()) throw validation_error("zeta_direct needs a nonempty list");
    double acc = 0;
    for (const auto& e : eigs.entries) {
        if (std::fabs(e.lambda) < 1e-12)
            throw validation_error("zero eigenvalue at index " + std::to_string(e.j) +
                                   "; apply a spectral shift first");
        acc += std::pow(e.lambda, -static_cast<double>(ell));
    }
    return acc + weyl_tail(eigs, ell);
}

PartialZetaTable zeta_recursive(const Problem& prob, double c, const std::vector<double>& xs,
                                int ell_max, double shift, double tol) {
    if (ell_max < 1 || ell_max > 6) throw validation_error("ell_max must be in 1..6");
    if (!(tol > 0)) throw validation_error("tol must be positive");
    if (xs.empty()) throw validation_error("x grid must be nonempty");
    for (std::size_t k = 0; k + 1 < xs.size(); ++k)
        if (!(xs[k] < xs[k + 1])) throw validation_error("x grid must be strictly increasing");
    if (!std::isfinite(c) || c < prob.a)
        throw validation_error("c must be finite and inside the problem interval");
    check_span(prob, c, xs.back());

    double x_start = c;
    bool principal_launch = false;
    if (c == prob.a && prob.left.classification != endpoint_class::regular) {
        // launch with the principal solution's data just inside the endpoint;
        // principal_seed rejects families without cataloged data
        x_start = prob.a + 1e-8;
        principal_launch = true;
    }
    if (!(xs.front() > x_start))
        throw validation_error("x grid must start strictly right of the launch point");

    PartialZetaTable out;
    out.c = c;
    out.xs = xs;
    out.ell_max = ell_max;
    out.values.assign(ell_max, std::vector<double>(xs.size(), 0.0));
    out.method = zeta_method::recursive;
    out.shift = shift;
    out.tol = tol;

    switch (ell_max) {
        case 1: recursive_sweep<1>(prob, x_start, xs, shift, tol, principal_launch, out); break;
        case 2: recursive_sweep<2>(prob, x_start, xs, shift, tol, principal_launch, out); break;
        case 3: recursive_sweep<3>(prob, x_start, xs, shift, tol, principal_launch, out); break;
        case 4: recursive_sweep<4>(prob, x_start, xs, shift, tol, principal_launch, out); break;
        case 5: recursive_sweep<5>(prob, x_start, xs, shift, tol, principal_launch, out); break;
        case 6: recursive_sweep<6>(prob, x_start, xs, shift, tol, principal_launch, out); break;
    }
    return out;
}

double zeta1_integral(const Problem& prob, double lambda, double c, double x, double tol) {
    if (!(tol > 0)) throw validation_error("tol must be positive");
    check_span(prob, c, x);
    if (c == prob.a && prob.left.classification != endpoint_class::regular)
        throw validation_error("left endpoint is singular; choose c strictly inside");

    // Green-diagonal normalization: the kernel is u v / C with C = p(v'u - vu'),
    // i.e. C = -W(v,u); both branches arrange C = +1
    Trajectory u, v;
    if (prob.right.classification == endpoint_class::regular) {
        // regular box: the plain iterated integral with v Dirichlet at c and
        // u a unit solution; no asymptotic meaning, kept as the degenerate case
        u = propagate(prob, lambda, c, 1.0, 0.0, x, tol);
        v = propagate(prob, lambda, c, 0.0, 1.0, x, tol);
    } else {
        // grow the principal (decaying) solution backward from X' chosen so
        // that the Liouville-Green phase from x to X' buries the seed error
        double phase = 0, X = x, step = 0.5 * std::max(1.0, std::fabs(x));
        auto s_sq = [&](double t) { return (prob.q(t) - lambda * prob.r(t)) / prob.p(t); };
        for (int it = 0; phase < 20.0; ++it) {
            if (it > 80)
                throw numeric_error("could not accumulate decay phase beyond x = " + fmt17(X));
            double Xn = X + step;
            if (!(s_sq(X) > 0) || !(s_sq(Xn) > 0))
                throw numeric_error("lambda is not below the potential beyond x = " + fmt17(X));
            phase += integrate_adaptive<double>(
                [&](double t) { return std::sqrt(std::max(s_sq(t), 0.0)); }, X, Xn, 1e-6);
            X = Xn;
            step *= 1.6;
        }
        auto seed = lg_decay_seed(prob, lambda, X);
        u = propagate(prob, lambda, X, seed[0], seed[1], c, tol);

        double sign0 = 0;
        for (const auto& val : u.values) {
            double uu = val[0].real();
            if (uu == 0 || (sign0 != 0 && (uu > 0) != (sign0 > 0)))
                throw numeric_error("principal solution changes sign on the range; "
                                    "lambda may not lie below the truncated spectrum");
            if (sign0 == 0) sign0 = uu;
        }

        traj_sample uc = u.at(c);
        v = propagate(prob, lambda, c, 0.0, cplx(1.0 / uc.y.real()), x, tol, -uc.logscale);
    }

    WronskianValue w = wronskian(v, u);
    if (std::abs(w.value + cplx(1.0)) > 1e-5)
        throw numeric_error("normalization failed: W(v,u) = " + fmt17(w.value.real()) + " + " +
                            fmt17(w.value.imag()) + "i, expected -1");

    auto f = [&](double t) {
        traj_sample su = u.at(t), sv = v.at(t);
        return prob.r(t) * su.y.real() * sv.y.real() * std::exp(su.logscale + sv.logscale);
    };
    return integrate_adaptive<double>(f, c, x, tol * std::max(1.0, x - c));
}

double lg_xi(const Problem& prob, int ell, double c, double x, double tol) {
    if (ell < 1) throw validation_error("ell must be >= 1");
    if (!(tol > 0)) throw validation_error("tol must be positive");
    check_span(prob, c, x);
    for (int k = 0; k <= 8; ++k) {
        double t = c + k * (x - c) / 8;
        if (std::fabs(prob.p(t) - 1) > 1e-12 || std::fabs(prob.r(t) - 1) > 1e-12)
            throw validation_error("needs Schrodinger form (p = r = 1); found p(" + fmt17(t) +
                                   ") = " + fmt17(prob.p(t)) + ", r = " + fmt17(prob.r(t)));
        if (!(prob.q(t) > 0))
            throw numeric_error("q must be positive on [c, x]; q(" + fmt17(t) +
                                ") = " + fmt17(prob.q(t)));
    }
    double df = 1;  // (2 ell - 3)!!, with (-1)!! = 1
    for (int k = 2 * ell - 3; k >= 2; k -= 2) df *= k;
    double fact = 1;
    for (int k = 2; k <= ell - 1; ++k) fact *= k;
    double coeff = df / std::ldexp(fact, ell);

    auto f = [&](double t) {
        double q = prob.q(t);
        if (!(q > 0))
            throw numeric_error("q must be positive on [c, x]; q(" + fmt17(t) +
                                ") = " + fmt17(q));
        return std::pow(q, 0.5 - ell);
    };
    return coeff * integrate_adaptive<double>(f, c, x, tol * std::max(1.0, x - c));
}

}  // namespace slz
