#pragma once

// Partial spectral zeta values zeta(l;(c,x)) = sum_j lambda_j(c,x)^(-l) over
// the Dirichlet eigenvalues of a truncated problem, computed by four routes:
//
//  - zeta_direct: plain eigenvalue sum plus a closed-form Weyl-model tail.
//  - zeta_recursive: Taylor coefficients of the shooting solution in the
//    spectral parameter.  phi(mu, x) with phi-data fixed at c has Taylor
//    coefficients T_j satisfying the driven chain (p T_j')' = q T_j - r T_{j-1},
//    integrated here as one coupled log-rescaled linear system; the zeta values
//    fall out of the log-series recurrence for ln(phi/phi_0).
//  - zeta1_integral: the principal x nonprincipal product integral for l = 1,
//    normalized through a unit Wronskian.
//  - lg_xi: the Liouville-Green surrogate integral (Schrodinger form only).
//
// All routes accept a spectral shift s (work with q - s*r) so that problems
// with an eigenvalue at or near 0 stay usable; reported values are then
// sum_j (lambda_j - s)^(-l).

#include <string>
#include <vector>

#include "slz/eigensolve.hpp"
#include "slz/problem.hpp"

namespace slz {

enum class zeta_method { direct, recursive, integral, lg };

std::string to_string(zeta_method m);

struct PartialZetaTable {
    double c = 0;
    std::vector<double> xs;  // increasing right endpoints
    int ell_max = 0;
    // values[l-1][k] = zeta(l; (c, xs[k])), shifted spectrum when shift != 0
    std::vector<std::vector<double>> values;
    zeta_method method = zeta_method::recursive;
    double shift = 0;
    double tol = 0;

    double value(int ell, std::size_t k) const;
    // CSV rows: x, ell, value, method, shift
    std::string to_csv() const;
};

// Closed-form tail sum_{n > N} (L/(n pi))^(2 ell) for the Weyl model
// lambda_n ~ (n pi / L)^2, Euler-Maclaurin corrected; returns 0 once the tail
// drops below 1e-14.  Only meaningful when lambda_N has reached the Weyl
// regime of the list's truncation.
double weyl_tail(const EigenList& eigs, int ell);

// sum of lambda_j^(-ell) over the list plus weyl_tail.  The list must not
// contain a zero eigenvalue (shift the spectrum first).
double zeta_direct(const EigenList& eigs, int ell);

// Taylor-coefficient route on (c, x) for every x in xs and l = 1..ell_max
// (ell_max <= 6).  c must be a regular point or interval endpoint; c equal to
// a limit-circle endpoint launches with the principal solution's data just
// inside.  Throws numeric_error if phi_0 vanishes on the range (the shift is
// then not below the truncated spectrum).
PartialZetaTable zeta_recursive(const Problem& prob, double c, const std::vector<double>& xs,
                                int ell_max, double shift = 0.0, double tol = 1e-10);

// Integral route for l = 1: int_c^x u v r dt with u principal at the singular
// right endpoint (grown backward from a Liouville-Green seed far outside x),
// v determined by v(c) = 0 and W(v,u) = 1.  For a regular right endpoint the
// roles degenerate (u Dirichlet at c, v = unit at c); that value is the plain
// iterated integral, not an asymptotic zeta estimate.
double zeta1_integral(const Problem& prob, double lambda, double c, double x,
                      double tol = 1e-10);

// Liouville-Green surrogate ((2l-3)!! / (2^l (l-1)!)) int_c^x q^(1/2 - l) dt.
// Requires Schrodinger form (p = r = 1) and q > 0 on [c, x].
double lg_xi(const Problem& prob, int ell, double c, double x, double tol = 1e-12);

}  // namespace slz
