#pragma once

// Eigenvalues of the truncated regular problem on [c, d] by Prüfer shooting.
// The scaled Prüfer angle uses a per-step frozen weight w = sqrt(p*r*lambda_bar)
// so that counting is exact (multiples of pi are hit exactly at zeros of y) and
// no derivatives of the coefficients are ever needed; indexing is by
// oscillation count, never by sorting shooting roots.

#include <array>
#include <string>
#include <vector>

#include "slz/problem.hpp"
#include "slz/propagate.hpp"

namespace slz {

// one converged eigenvalue of a truncated problem
struct eigen_entry {
    int j = 0;            // 1-based oscillation index
    double lambda = 0;    // eigenvalue
    int n_zeros = 0;      // interior zeros of the eigenfunction (= j - 1)
    double residual = 0;  // terminal-angle mismatch at the converged lambda, radians
};

struct EigenList {
    double c = 0, d = 0;
    BoundaryCondition bc_left, bc_right;
    std::vector<eigen_entry> entries;  // strictly increasing in lambda
    int index_base = 1;
    double tol = 0;
    double weyl_length = 0;  // integral of sqrt(r/p) over (c, d)

    std::vector<double> eigs() const;
    std::string to_csv() const;  // columns j,lambda,n_zeros,residual
};

// Terminal Prüfer angle theta(d) of the solution launched at c with bc_left,
// where tan(theta) = w*y/y1.  Continuous and strictly increasing in lambda.
double prufer_angle(const Problem& prob, double lambda, double c, double d,
                    const BoundaryCondition& bc_left, double tol = 1e-10);

// Number of eigenvalues of the truncated problem strictly below lambda.
int count_eigs_below(const Problem& prob, double c, double d,
                     const BoundaryCondition& bc_left, const BoundaryCondition& bc_right,
                     double lambda, double tol = 1e-10);

// First n_max Dirichlet eigenvalues of the truncation to (c, d).  When the
// left endpoint of the underlying problem is limit-circle and c sits within
// 0.01 of it, the launch is delegated to principal-solution data at c: the
// truncated Dirichlet eigenvalues converge to that limit anyway, and the
// literal Dirichlet launch converges only logarithmically.
EigenList dirichlet_eigs(const Problem& prob, double c, double d, int n_max,
                         double tol = 1e-10);

// General separated boundary conditions.  A friedrichs() left condition means:
// launch with principal-solution data at offsets eps0, eps0/2, eps0/4 from the
// singular endpoint and extrapolate the per-index eigenvalues to eps -> 0.
EigenList bc_eigs(const Problem& prob, double c, double d,
                  const BoundaryCondition& bc_left, const BoundaryCondition& bc_right,
                  int n_max, double tol = 1e-10);

// integral of sqrt(r/p) over (c, d) — the Weyl first-order length
double weyl_length(const Problem& prob, double c, double d);

// Leading-order data (y, y1) at small x of the principal solution near the
// singular left endpoint, for spectral parameter z in (p y')' = (q - z r) y.
// Catalog laguerre family only: for gamma >= 1 the principal solution tends
// to 1 with y1 = -z x^gamma / gamma; for gamma < 1 it is x^(1-gamma) with
// y1 = 1 - gamma.
std::array<cplx, 2> principal_seed(const Problem& prob, cplx z, double x);

}  // namespace slz
