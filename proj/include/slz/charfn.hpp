#pragma once

// Characteristic functions built from truncated problems: Hadamard products
// over computed spectra, normalized principal/nonprincipal solutions at
// singular endpoints, the truncated characteristic function G_c, the
// minimal-order characteristic function F0, and growth-order estimators.
//
// All x -> b limits are detected by stabilization over a caller-supplied
// grid of truncation points, with at most one Richardson step; nothing is
// extrapolated silently past that.  Exponentially large and small solution
// values travel as (value, logscale) pairs throughout.

#include <functional>
#include <vector>

#include "slz/eigensolve.hpp"
#include "slz/partialzeta.hpp"
#include "slz/problem.hpp"
#include "slz/propagate.hpp"

namespace slz {

// ---------------------------------------------------------------------------
// Hadamard products over an explicit zero list

struct HadamardProduct {
    std::vector<double> zeros;  // nonzero eigenvalues, increasing magnitude
    int genus = 0;              // elementary-factor order p
    int m0 = 0;                 // multiplicity of the zero eigenvalue
};

// E(w, p) = (1 - w) exp(sum_{j<=p} w^j / j); log-form for |w| < 1/2
cplx elementary_factor(cplx w, int p);

// z^m0 * prod_j E(z / zeros_j, genus), with a power-law tail model fitted to
// the top of the zero list standing in for the factors beyond it.
// Throws validation_error when the genus is too small for the zero growth.
cplx hadamard_char(const HadamardProduct& H, cplx z);

// ---------------------------------------------------------------------------
// Characteristic functions by truncation

// One evaluation of a characteristic function: value = scaled * e^logscale.
struct cfn_point {
    cplx scaled = 0;         // O(1) mantissa
    double logscale = 0;     // log magnitude carried separately
    bool converged = false;  // last_change < the evaluator's declared tol
    double last_change = 0;  // relative change between the last two truncations
    cplx value() const;
    double logabs() const;
};

enum class left_data { regular_bc, principal_seed, lc_mixed, decaying_lg };

// Immutable evaluator for F(z) = lim_X [phi_left(z,X)/phi_c(s0,X)] *
// exp(sum_{l<=genus} ((z-s0)^l / l) zeta_s(l; (c,X))), the shift s0 taken
// from the catalog so the reference spectrum stays away from zero.  The
// denominator solutions and the partial-zeta table are cached at
// construction; evaluate() is const and shareable across threads.
class CharFnEval {
  public:
    cfn_point evaluate(cplx z) const;
    const std::vector<double>& x_sequence() const { return X_; }
    double tol() const { return tol_; }
    int genus() const { return genus_; }
    double shift() const { return s0_; }
    double anchor() const { return c_; }

    friend CharFnEval make_charfn_F0(const Problem&, std::vector<double>,
                                     BoundaryCondition, double);
    friend CharFnEval make_truncated_charfn(const Problem&, double,
                                            std::vector<double>, double);

  private:
    CharFnEval() = default;
    Trajectory launch_left(cplx z) const;
    void fill_caches();

    Problem prob_;
    std::vector<double> X_;
    double tol_ = 1e-6;
    int genus_ = 0;
    double s0_ = 0;
    double c_ = 0;                        // anchor of the zeta table / denominator
    left_data mode_ = left_data::regular_bc;
    double bc_alpha_ = 0;                 // regular_bc and lc_mixed
    double launch_x_ = 0;                 // where the left solution starts
    std::vector<cplx> denom_log_;         // ln phi_c(s0, X_k)
    std::vector<std::vector<double>> zt_; // zeta_s(l; (c, X_k)), zt_[l-1][k]
};

// F0: left data fixed by the problem's own left endpoint (regular BC,
// principal seed at a limit-circle endpoint, or the decaying solution at an
// infinite one).  At a limit-circle endpoint a nonzero boundary angle selects
// the mixed solution cos(a) phi - sin(a) theta, theta being the cataloged
// second solution there; at a limit-point endpoint only dirichlet/friedrichs
// data is admissible.
CharFnEval make_charfn_F0(const Problem& prob, std::vector<double> X_grid,
                          BoundaryCondition bc_left, double tol = 1e-6);
cfn_point charfn_F0(const Problem& prob, cplx z, const std::vector<double>& X_grid,
                    BoundaryCondition bc_left, double tol = 1e-6);

// G_c: the same limit for the problem restricted to (c, b) with Dirichlet
// data at c (principal data when c sits at a singular left endpoint).
CharFnEval make_truncated_charfn(const Problem& prob, double c,
                                 std::vector<double> X_grid, double tol = 1e-6);
cplx truncated_charfn(const Problem& prob, double c, const std::vector<double>& X_grid,
                      cplx z, double tol = 1e-6);

// ---------------------------------------------------------------------------
// Normalized solutions at a singular endpoint

struct scaled_value {
    cplx value = 0;
    double logscale = 0;
    cplx log() const;  // full complex log, scale folded in
};

enum class endpoint_side { left, right };

// Principal solution: at a finite singular left endpoint, the principal-data
// launch extrapolated over a descending offset grid (the catalog's left
// endpoints all have rank 0, so the regularizing factor is empty); at an
// infinite endpoint, the decaying solution grown from a Liouville-Green seed
// planted deep in the forbidden region.  Gauge is per-call deterministic;
// only power-sum-matched products of these values are gauge-free.
scaled_value principal_normalized(const Problem& prob, endpoint_side side, cplx z,
                                  double x, double tol = 1e-10);

// Nonprincipal solution at the right endpoint: theta(z,x) = phi_c(z,x)/G_c(z),
// normalized so matched power-sum products tend to 1.  If z sits on the
// truncated spectrum of (c,b) the anchor is nudged to c + 0.31 once.
scaled_value nonprincipal_normalized(const Problem& prob, endpoint_side side, cplx z,
                                     double x, double tol = 1e-6);

// ---------------------------------------------------------------------------
// Growth-order estimators

// least-squares slope of ln n against ln lambda_n over the top half
double exponent_of_convergence(const std::vector<double>& eigs);

// slope of ln ln max_{|z|=r} |F| against ln r, 64 angles per circle
double estimate_order(const CharFnEval& F, const std::vector<double>& radii);
double estimate_order(const HadamardProduct& H, const std::vector<double>& radii);

// genus from an exponent-of-convergence estimate; flags the ambiguous
// integer-kappa case instead of resolving it
struct genus_estimate {
    int genus;
    bool integer_ambiguous;
};
genus_estimate genus_from_exponent(double kappa_hat);

// ---------------------------------------------------------------------------
// External interfaces

std::string charfn_scan_csv(const CharFnEval& F, const std::vector<double>& zs);
std::string cfn_diagnostics_json(cplx z, const cfn_point& p);

}  // namespace slz
