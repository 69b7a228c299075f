#include "slz/charfn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>

#include <json.hpp>

#include "slz/quadrature.hpp"

namespace slz {

namespace {

// power-law model lambda_n ~ C n^beta fitted to the top half of a zero list
line_fit fit_zero_growth(const std::vector<double>& zeros) {
    std::size_t n = zeros.size();
    std::vector<double> lx, ly;
    for (std::size_t j = n / 2; j < n; ++j) {
        lx.push_back(std::log(static_cast<double>(j + 1)));
        ly.push_back(std::log(std::fabs(zeros[j])));
    }
    return fit_line(lx, ly);
}

// log E(w, p) on the branch continuous at w = 0; requires |w| < 1/2
cplx log_elementary_tail(cplx w, int p) {
    cplx term = std::pow(w, p + 1), acc = 0;
    for (int j = p + 1; j < 200; ++j) {
        cplx t = term / static_cast<double>(j);
        acc -= t;
        if (std::abs(t) < 1e-18 * (1 + std::abs(acc))) break;
        term *= w;
    }
    return acc;
}

constexpr double lg_buried_phase = 20.0;  // e-folds burying a Liouville-Green seed

// Seed location for a decaying solution at an infinite endpoint (dir = +1 for
// +infinity, -1 for -infinity): push `anchor` out until the region is safely
// forbidden, then keep going until the accumulated decay phase beyond the
// pushed anchor exceeds lg_buried_phase.  The geometry is computed at a fixed
// reference z so that every evaluation of a characteristic function launches
// from the same point: the seed's arbitrary normalization then depends on z
// only through the slowly varying WKB data at that one point, which keeps the
// gauge affine in z to within O(z^2 / X^2).  A z-dependent seed point would
// jump between ladder rungs as z crosses thresholds and wreck ratios of
// evaluations at nearby z.
double lg_seed_point(const Problem& prob, cplx z_geom, double anchor, int dir) {
    auto s_sq = [&](double t) { return (prob.q(t) - z_geom * prob.r(t)) / prob.p(t); };
    double t0 = anchor;
    for (int it = 0; s_sq(t0).real() < 1.0 + std::abs(z_geom.imag()); ++it) {
        if (it > 200)
            throw numeric_error("no classically forbidden region found toward the endpoint "
                                "for z = " + fmt17(z_geom.real()) + " + " +
                                fmt17(z_geom.imag()) + "i");
        t0 += dir * 0.5 * std::max(1.0, std::fabs(t0));
    }
    double phase = 0, X = t0, step = 0.5 * std::max(1.0, std::fabs(t0));
    for (int it = 0; phase < lg_buried_phase; ++it) {
        if (it > 80)
            throw numeric_error("could not accumulate decay phase beyond x = " + fmt17(X));
        double Xn = X + dir * step;
        phase += integrate_adaptive<double>(
            [&](double t) { return std::sqrt(s_sq(t)).real(); }, std::min(X, Xn),
            std::max(X, Xn), 1e-6);
        X = Xn;
        step *= 1.6;
    }
    return X;
}

// Decaying solution grown from a one-term WKB seed at the precomputed seed
// point X, integrated back to `to_x` (the trajectory spans [to_x, X]).
Trajectory lg_decaying_traj(const Problem& prob, cplx z, double X, double to_x, int dir,
                            double ptol) {
    auto s_sq = [&](double t) { return (prob.q(t) - z * prob.r(t)) / prob.p(t); };
    if (s_sq(X).real() < 0.5 * (1.0 + std::abs(z.imag())))
        throw numeric_error("seed point x = " + fmt17(X) +
                            " is not classically forbidden for z = " + fmt17(z.real()) +
                            " + " + fmt17(z.imag()) + "i; widen the launch geometry");
    auto ps = [&](double t) { return prob.p(t) * std::sqrt(s_sq(t)); };
    double h = 1e-5 * std::max(1.0, std::fabs(X));
    cplx dps = (ps(X + h) - ps(X - h)) / (2 * h);
    // toward the endpoint the solution decays, so along +x its log-derivative
    // is -s at +infinity and +s at -infinity
    cplx y1 = static_cast<double>(-dir) * ps(X) - dps / (2.0 * std::sqrt(s_sq(X)));
    return propagate(prob, z, X, 1.0, y1, to_x, ptol);
}

cplx log_sample(const traj_sample& s) {
    if (s.y == cplx(0.0)) return cplx(-746.0, 0.0);
    return std::log(s.y) + s.logscale;
}

double charfn_propagate_tol(double tol) { return std::clamp(tol * 1e-2, 1e-11, 1e-5); }

struct stabilized {
    cplx scaled;  // relative to e^(Re w_last)
    double logscale;
    bool converged;
    double last_change;
};

// stabilize exp(w_k) over the truncation grid: geometric-difference test with
// at most one Richardson step
stabilized stabilize_exp(const std::vector<cplx>& w, double tol) {
    std::size_t K = w.size();
    double ref = w.back().real();
    std::vector<cplx> v(K);
    for (std::size_t k = 0; k < K; ++k) v[k] = std::exp(w[k] - ref);
    stabilized out;
    out.logscale = ref;
    out.scaled = v.back();
    if (K == 1) {
        out.converged = true;
        out.last_change = 0;
        return out;
    }
    out.last_change = std::abs(v[K - 1] - v[K - 2]) * std::exp(std::min(ref, 0.0));
    out.converged = out.last_change < tol;
    if (K >= 3) {
        cplx d1 = v[K - 2] - v[K - 3], d2 = v[K - 1] - v[K - 2];
        if (d1 != cplx(0.0)) {
            cplx r = d2 / d1;
            if (std::abs(r) < 0.9) out.scaled = v[K - 1] + d2 * r / (1.0 - r);
        }
    }
    return out;
}

// left-solution seed for a regular endpoint with boundary angle alpha
// (cos a * y + sin a * y1 = 0); Dirichlet keeps the (0,1) gauge shared with
// the anchor solutions so G(s0) comes out exactly 1
std::array<cplx, 2> regular_seed(double alpha) {
    if (alpha == 0.0) return {cplx(0.0), cplx(1.0)};
    return {cplx(std::sin(alpha)), cplx(-std::cos(alpha))};
}

// second solution at a finite limit-circle endpoint, complementing
// principal_seed; the scale convention (unit quasi-derivative for the
// unbounded branch) fixes which realization a mixed boundary angle labels
std::array<cplx, 2> complementary_seed(const Problem& prob, cplx z, double x) {
    if (prob.name != "laguerre")
        throw validation_error(
            "second-solution launch data is only cataloged for the laguerre family");
    double gamma = prob.params.at("gamma");
    double eps = x - prob.a;
    if (!(eps > 0))
        throw validation_error("second-solution seed needs x strictly inside the interval");
    if (gamma == 1) return {cplx(std::log(eps)), cplx(1.0)};
    if (gamma > 1) return {cplx(std::pow(eps, 1 - gamma) / (1 - gamma)), cplx(1.0)};
    return {cplx(1.0), -z * std::pow(eps, gamma) / gamma};
}

double pick_anchor(const Problem& prob) {
    if (prob.a > -infinite) return prob.a;
    return (prob.b > 0.5) ? 0.0 : prob.b - 1.0;
}

// launch of the Dirichlet/principal solution based at c (used by the
// truncated characteristic function and the nonprincipal construction)
Trajectory launch_at_anchor(const Problem& prob, double c, cplx z, double X_last,
                            double ptol) {
    if (c == prob.a && prob.left.classification != endpoint_class::regular) {
        double x0 = prob.a + 1e-8;
        auto seed = principal_seed(prob, z, x0);
        return propagate(prob, z, x0, seed[0], seed[1], X_last, ptol);
    }
    return propagate(prob, z, c, 0.0, 1.0, X_last, ptol);
}

void validate_grid(const Problem& prob, double c, const std::vector<double>& X) {
    if (X.empty()) throw validation_error("truncation grid is empty");
    for (std::size_t k = 0; k + 1 < X.size(); ++k)
        if (!(X[k] < X[k + 1]))
            throw validation_error("truncation grid must be strictly increasing");
    if (!(c < X.front())) throw validation_error("anchor c must precede the truncation grid");
    if (!(X.back() <= prob.b))
        throw validation_error("truncation grid leaves the problem interval");
    if (X.back() == prob.b && prob.right.classification != endpoint_class::regular)
        throw validation_error("grid may touch b only when the right endpoint is regular");
    if (!(c >= prob.a)) throw validation_error("anchor c lies left of the interval");
}

int genus_of(const Problem& prob) {
    if (!prob.genus_hint)
        throw validation_error("problem carries no genus hint; estimate the rank first "
                               "(exponent_of_convergence of a deep truncation)");
    int g = *prob.genus_hint;
    if (g < 0 || g > 6) throw validation_error("genus hint out of supported range 0..6");
    return g;
}

}  // namespace

// ---------------------------------------------------------------------------

cplx elementary_factor(cplx w, int p) {
    if (p < 0) throw validation_error("elementary factor needs p >= 0");
    if (std::abs(w) < 0.5) return std::exp(log_elementary_tail(w, p));
    cplx s = 0;
    cplx term = 1;
    for (int j = 1; j <= p; ++j) {
        term *= w;
        s += term / static_cast<double>(j);
    }
    return (1.0 - w) * std::exp(s);
}

namespace {

// log of the product; the flag reports an exact zero of F (a listed zero hit
// or z = 0 with m0 > 0), where no finite log exists
std::pair<cplx, bool> hadamard_log(const HadamardProduct& H, cplx z) {
    if (H.zeros.empty()) throw validation_error("hadamard product needs a zero list");
    if (H.genus < 0 || H.m0 < 0) throw validation_error("genus and m0 must be nonnegative");
    for (double lam : H.zeros)
        if (lam == 0.0) throw validation_error("zero eigenvalue belongs in m0, not the zero list");
    line_fit growth = fit_zero_growth(H.zeros);
    double beta = growth.slope;
    if (beta * (H.genus + 1) <= 1.02)
        throw validation_error("genus " + std::to_string(H.genus) +
                               " too small for zero growth ~ n^" + fmt17(beta));
    double lamN = std::fabs(H.zeros.back());
    if (!(lamN > 2.5 * std::abs(z)))
        throw numeric_error("zero list too short: |z| = " + fmt17(std::abs(z)) +
                            " needs zeros beyond " + fmt17(2.5 * std::abs(z)));

    cplx lnF = 0;
    for (double lam : H.zeros) {
        cplx w = z / lam;
        if (w == cplx(1.0)) return {cplx(0.0), true};  // z hits a listed zero exactly
        if (std::abs(w) < 0.5) {
            lnF += log_elementary_tail(w, H.genus);
        } else {
            cplx s = std::log(1.0 - w), t = 1.0;
            for (int m = 1; m <= H.genus; ++m) {
                t *= w;
                s += t / static_cast<double>(m);
            }
            lnF += s;
        }
    }
    // model tail: lambda_j ~ C j^beta beyond the list.  A stretch of explicit
    // model factors brings |z|/lambda down from the depth bound, then the rest
    // is summed power by power, ln E(w,p) = -sum_m w^m/m with the j-sums taken
    // by midpoint integrals (their error is O(J^-2) relative, far below the
    // m-series truncation).
    double lnC = growth.intercept;
    std::size_t N = H.zeros.size();
    std::size_t j = N + 1;
    cplx tail = 0;
    for (; j <= N + 2000; ++j) {
        double lam = std::exp(lnC + beta * std::log(static_cast<double>(j)));
        cplx t = log_elementary_tail(z / lam, H.genus);
        tail += t;
        if (std::abs(t) < 1e-17 * (1.0 + std::abs(tail))) break;
    }
    if (j > N + 2000) {
        double J = static_cast<double>(j) - 0.5;
        cplx wJ = z / std::exp(lnC + beta * std::log(J));  // model w at the seam
        cplx wpow = 1.0;
        for (int m = 1; m <= H.genus; ++m) wpow *= wJ;
        for (int m = H.genus + 1;; ++m) {
            wpow *= wJ;
            cplx term = -wpow * J / (m * (beta * m - 1.0));
            tail += term;
            if (std::abs(term) < 1e-17 * (1.0 + std::abs(tail))) break;
            if (m > 600)
                throw numeric_error("hadamard tail series stalled: |z| too close to the "
                                    "zero-list depth");
        }
    }
    lnF += tail;
    if (H.m0 > 0) {
        if (z == cplx(0.0)) return {cplx(0.0), true};
        lnF += static_cast<double>(H.m0) * std::log(z);
    }
    return {lnF, false};
}

}  // namespace

cplx hadamard_char(const HadamardProduct& H, cplx z) {
    auto [lnF, hit_zero] = hadamard_log(H, z);
    return hit_zero ? cplx(0.0) : std::exp(lnF);
}

// ---------------------------------------------------------------------------

cplx cfn_point::value() const { return scaled * std::exp(logscale); }
double cfn_point::logabs() const {
    return scaled == cplx(0.0) ? -infinite : logscale + std::log(std::abs(scaled));
}

cplx scaled_value::log() const { return std::log(value) + logscale; }

void CharFnEval::fill_caches() {
    double ptol = charfn_propagate_tol(tol_);
    // implicit in the construction: phi_c(s0, X) never vanishes, since s0
    // sits below the truncated spectra
    Trajectory den = launch_at_anchor(prob_, c_, cplx(s0_), X_.back(), ptol);
    denom_log_.clear();
    for (double X : X_) denom_log_.push_back(log_sample(den.at(X)));
    if (genus_ >= 1) {
        PartialZetaTable t = zeta_recursive(prob_, c_, X_, genus_, s0_, std::min(tol_, 1e-10));
        zt_ = t.values;
    }
}

Trajectory CharFnEval::launch_left(cplx z) const {
    double ptol = charfn_propagate_tol(tol_);
    switch (mode_) {
        case left_data::regular_bc: {
            auto seed = regular_seed(bc_alpha_);
            return propagate(prob_, z, launch_x_, seed[0], seed[1], X_.back(), ptol);
        }
        case left_data::principal_seed: {
            auto seed = principal_seed(prob_, z, launch_x_);
            return propagate(prob_, z, launch_x_, seed[0], seed[1], X_.back(), ptol);
        }
        case left_data::lc_mixed: {
            auto up = principal_seed(prob_, z, launch_x_);
            auto th = complementary_seed(prob_, z, launch_x_);
            double ca = std::cos(bc_alpha_), sa = std::sin(bc_alpha_);
            return propagate(prob_, z, launch_x_, ca * up[0] - sa * th[0],
                             ca * up[1] - sa * th[1], X_.back(), ptol);
        }
        case left_data::decaying_lg:
            return lg_decaying_traj(prob_, z, launch_x_, X_.back(), -1, ptol);
    }
    throw numeric_error("unreachable left-data mode");
}

cfn_point CharFnEval::evaluate(cplx z) const {
    Trajectory num = launch_left(z);
    std::vector<cplx> w(X_.size());
    cplx mu = z - s0_;
    for (std::size_t k = 0; k < X_.size(); ++k) {
        w[k] = log_sample(num.at(X_[k])) - denom_log_[k];
        cplx mup = 1;
        for (int l = 1; l <= genus_; ++l) {
            mup *= mu;
            w[k] += mup / static_cast<double>(l) * zt_[l - 1][k];
        }
    }
    stabilized s = stabilize_exp(w, tol_);
    cfn_point out;
    out.scaled = s.scaled;
    out.logscale = s.logscale;
    out.converged = s.converged;
    out.last_change = s.last_change;
    return out;
}

CharFnEval make_charfn_F0(const Problem& prob, std::vector<double> X_grid,
                          BoundaryCondition bc_left, double tol) {
    if (!(tol > 0)) throw validation_error("tol must be positive");
    CharFnEval F;
    F.prob_ = prob;
    F.X_ = std::move(X_grid);
    F.tol_ = tol;
    F.genus_ = genus_of(prob);
    F.s0_ = prob.default_shift;
    F.c_ = pick_anchor(prob);
    validate_grid(prob, F.c_, F.X_);

    switch (prob.left.classification) {
        case endpoint_class::regular:
            if (bc_left.kind == bc_kind::friedrichs_principal)
                throw validation_error("friedrichs data is for singular endpoints; "
                                       "the left endpoint is regular");
            F.mode_ = left_data::regular_bc;
            F.bc_alpha_ = bc_left.alpha;
            if (bc_left.kind == bc_kind::neumann) F.bc_alpha_ = 1.5707963267948966;
            F.launch_x_ = prob.a;
            break;
        case endpoint_class::limit_circle:
            if (prob.a <= -infinite)
                throw validation_error("limit-circle data at an infinite endpoint is not "
                                       "cataloged");
            F.launch_x_ = prob.a + 1e-8;
            if (bc_left.kind == bc_kind::dirichlet ||
                bc_left.kind == bc_kind::friedrichs_principal) {
                F.mode_ = left_data::principal_seed;
            } else {
                // mixed condition cos(a) phi - sin(a) theta at the endpoint
                F.mode_ = left_data::lc_mixed;
                F.bc_alpha_ = bc_left.alpha;
                if (bc_left.kind == bc_kind::neumann) F.bc_alpha_ = 1.5707963267948966;
            }
            break;
        case endpoint_class::limit_point:
            if (bc_left.kind != bc_kind::dirichlet &&
                bc_left.kind != bc_kind::friedrichs_principal)
                throw validation_error("a limit-point endpoint admits no boundary choice; "
                                       "pass dirichlet or friedrichs data");
            if (prob.a <= -infinite) {
                F.mode_ = left_data::decaying_lg;
                F.launch_x_ = lg_seed_point(prob, cplx(F.s0_), F.c_ - 1.0, -1);
            } else {
                F.mode_ = left_data::principal_seed;
                F.launch_x_ = prob.a + 1e-8;
            }
            break;
        default:
            throw validation_error("left endpoint classification unknown");
    }
    F.fill_caches();
    return F;
}

cfn_point charfn_F0(const Problem& prob, cplx z, const std::vector<double>& X_grid,
                    BoundaryCondition bc_left, double tol) {
    return make_charfn_F0(prob, X_grid, bc_left, tol).evaluate(z);
}

CharFnEval make_truncated_charfn(const Problem& prob, double c, std::vector<double> X_grid,
                                 double tol) {
    if (!(tol > 0)) throw validation_error("tol must be positive");
    CharFnEval F;
    F.prob_ = prob;
    F.X_ = std::move(X_grid);
    F.tol_ = tol;
    F.genus_ = genus_of(prob);
    F.s0_ = prob.default_shift;
    F.c_ = c;
    validate_grid(prob, c, F.X_);
    if (c == prob.a) {
        if (prob.left.classification == endpoint_class::regular) {
            F.mode_ = left_data::regular_bc;
            F.bc_alpha_ = 0;
            F.launch_x_ = c;
        } else if (prob.a <= -infinite) {
            throw validation_error("anchor c must be finite");
        } else {
            F.mode_ = left_data::principal_seed;
            F.launch_x_ = prob.a + 1e-8;
        }
    } else {
        if (!(c > prob.a)) throw validation_error("anchor c must be finite and inside (a, b)");
        F.mode_ = left_data::regular_bc;
        F.bc_alpha_ = 0;
        F.launch_x_ = c;
    }
    F.fill_caches();
    return F;
}

cplx truncated_charfn(const Problem& prob, double c, const std::vector<double>& X_grid,
                      cplx z, double tol) {
    cfn_point p = make_truncated_charfn(prob, c, X_grid, tol).evaluate(z);
    if (!p.converged)
        throw numeric_error("characteristic function did not stabilize: last change " +
                            fmt17(p.last_change) + " at X = " + fmt17(X_grid.back()));
    return p.value();
}

// ---------------------------------------------------------------------------

scaled_value principal_normalized(const Problem& prob, endpoint_side side, cplx z,
                                  double x, double tol) {
    if (!(tol > 0)) throw validation_error("tol must be positive");
    double ptol = std::clamp(tol, 1e-12, 1e-8);
    if (side == endpoint_side::left) {
        if (prob.left.classification == endpoint_class::regular)
            throw validation_error("principal normalization applies to singular endpoints");
        if (prob.a <= -infinite) {
            if (!(x < prob.b)) throw validation_error("x outside the interval");
            double Xs = lg_seed_point(prob, cplx(prob.default_shift),
                                      std::min(x, pick_anchor(prob)) - 1.0, -1);
            Trajectory t = lg_decaying_traj(prob, z, Xs, x, -1, ptol);
            traj_sample s = t.at(x);
            return {s.y, s.logscale};
        }
        if (!(x > prob.a && x <= prob.b))
            throw validation_error("x outside the interval");
        // descending offset grid; the catalog's finite singular endpoints all
        // have rank 0, so no regularizing factor enters
        double eps0 = 0.1 * std::min(x - prob.a, 1e-2 * std::max(1.0, x - prob.a));
        std::vector<cplx> w;
        for (double eps : {eps0, eps0 / 2, eps0 / 4}) {
            auto seed = principal_seed(prob, z, prob.a + eps);
            Trajectory t = propagate(prob, z, prob.a + eps, seed[0], seed[1], x, ptol);
            w.push_back(log_sample(t.at(x)));
        }
        stabilized s = stabilize_exp(w, tol);
        if (!s.converged && !(s.last_change < 0.05))
            throw numeric_error("principal launch did not stabilize in the offset: "
                                "last change " + fmt17(s.last_change));
        return {s.scaled, s.logscale};
    }
    // right endpoint: only the infinite limit-point case arises in the catalog
    if (!(prob.b >= infinite))
        throw validation_error("principal normalization at the right endpoint needs b = +inf");
    if (!(x > prob.a)) throw validation_error("x outside the interval");
    double Xs = lg_seed_point(prob, cplx(prob.default_shift), x, +1);
    Trajectory t = lg_decaying_traj(prob, z, Xs, x, +1, ptol);
    traj_sample s = t.at(x);
    return {s.y, s.logscale};
}

scaled_value nonprincipal_normalized(const Problem& prob, endpoint_side side, cplx z,
                                     double x, double tol) {
    if (side != endpoint_side::right)
        throw validation_error("nonprincipal normalization is built toward the right endpoint");
    if (!(tol > 0)) throw validation_error("tol must be positive");
    if (!(x > prob.a && x < prob.b)) throw validation_error("x outside the interval");
    double cbase = pick_anchor(prob);
    double X1 = 1.2 * std::max({x, cbase + 1.0, 5.0});
    std::vector<double> grid = {X1, 1.2 * X1, 1.44 * X1};
    if (prob.b < infinite)
        throw validation_error("nonprincipal normalization needs an infinite right endpoint");

    for (double c : {cbase, cbase + 0.31}) {
        CharFnEval G = make_truncated_charfn(prob, c, grid, tol);
        cfn_point g = G.evaluate(z);
        if (g.logabs() < std::log(1e-8)) continue;  // z on the truncated spectrum: nudge c
        double ptol = charfn_propagate_tol(tol);
        Trajectory phi = launch_at_anchor(prob, c, z, x, ptol);
        traj_sample s = phi.at(x);
        return {s.y / g.scaled, s.logscale - g.logscale};
    }
    throw numeric_error("z = " + fmt17(z.real()) +
                        " sits on the truncated spectrum for both anchors");
}

// ---------------------------------------------------------------------------

double exponent_of_convergence(const std::vector<double>& eigs) {
    if (eigs.size() < 20)
        throw validation_error("need at least 20 eigenvalues to estimate the exponent");
    std::vector<double> lx, ly;
    for (std::size_t j = eigs.size() / 2; j < eigs.size(); ++j) {
        if (!(eigs[j] > 0) || (j > 0 && !(eigs[j] > eigs[j - 1])))
            throw validation_error("eigenvalues must be positive and increasing");
        lx.push_back(std::log(eigs[j]));
        ly.push_back(std::log(static_cast<double>(j + 1)));
    }
    return fit_line(lx, ly).slope;
}

namespace {

double order_from_logabs(const std::function<double(cplx)>& logabsF,
                         const std::vector<double>& radii, int* nonconv_on_last) {
    if (radii.size() < 2) throw validation_error("need at least two radii");
    constexpr int n_angles = 64;
    std::vector<double> lr, llm;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        double r = radii[i];
        if (!(r > 0) || (i > 0 && !(r > radii[i - 1])))
            throw validation_error("radii must be positive and increasing");
        double m = -infinite;
        for (int k = 0; k < n_angles; ++k) {
            double th = 2 * 3.14159265358979323846 * k / n_angles;
            m = std::max(m, logabsF(r * cplx(std::cos(th), std::sin(th))));
        }
        if (!(m > 1.05))
            throw numeric_error("max modulus too small on |z| = " + fmt17(r) +
                                " for a log-log growth fit");
        lr.push_back(std::log(r));
        llm.push_back(std::log(m));
    }
    if (nonconv_on_last && *nonconv_on_last > n_angles / 2)
        throw numeric_error("characteristic function failed to stabilize on most of "
                            "the largest circle");
    return fit_line(lr, llm).slope;
}

}  // namespace

double estimate_order(const CharFnEval& F, const std::vector<double>& radii) {
    // truncation grids long enough for |z| beyond this are impractical
    if (!radii.empty() && radii.back() > 30.0)
        throw validation_error("order-estimation radii for truncation-based evaluators "
                               "are capped at |z| = 30");
    int unusable = 0;
    double rmax = radii.empty() ? 0.0 : radii.back();
    auto f = [&](cplx z) {
        cfn_point p = F.evaluate(z);
        // The growth fit consumes log-magnitudes, so judge stabilization in that
        // currency: a point is usable once its log-magnitude uncertainty is small
        // against ln|F| itself, even if the value-relative tolerance was missed.
        double log_unc = std::log1p(p.last_change);
        bool usable = p.converged || log_unc < 0.05 * std::abs(p.logabs());
        if (!usable && std::abs(z) >= 0.999 * rmax) ++unusable;
        return p.logabs();
    };
    return order_from_logabs(f, radii, &unusable);
}

double estimate_order(const HadamardProduct& H, const std::vector<double>& radii) {
    auto f = [&](cplx z) {
        auto [lnF, hit_zero] = hadamard_log(H, z);
        return hit_zero ? -infinite : lnF.real();
    };
    return order_from_logabs(f, radii, nullptr);
}

genus_estimate genus_from_exponent(double kappa_hat) {
    if (!(kappa_hat > 0)) throw validation_error("exponent estimate must be positive");
    genus_estimate g;
    g.genus = static_cast<int>(std::floor(kappa_hat));
    g.integer_ambiguous = std::fabs(kappa_hat - std::round(kappa_hat)) < 0.05;
    if (g.integer_ambiguous) g.genus = static_cast<int>(std::round(kappa_hat));
    return g;
}

// ---------------------------------------------------------------------------

std::string charfn_scan_csv(const CharFnEval& F, const std::vector<double>& zs) {
    std::ostringstream os;
    os << "z,re,im,converged\n";
    for (double z : zs) {
        cfn_point p = F.evaluate(z);
        cplx v = p.value();
        os << fmt17(z) << ',' << fmt17(v.real()) << ',' << fmt17(v.imag()) << ','
           << (p.converged ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string cfn_diagnostics_json(cplx z, const cfn_point& p) {
    nlohmann::json j;
    j["z_re"] = z.real();
    j["z_im"] = z.imag();
    j["scaled_re"] = p.scaled.real();
    j["scaled_im"] = p.scaled.imag();
    j["logscale"] = p.logscale;
    j["converged"] = p.converged;
    j["last_change"] = p.last_change;
    return j.dump();
}

}  // namespace slz
