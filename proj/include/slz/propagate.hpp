#pragma once

// Solution propagation for τf = zf in quasi-derivative form:
//   y' = y¹/p,   (y¹)' = (q − z·r)·y
// with adaptive RK5(4) stepping and overflow-safe log rescaling.  A stored
// node holds (ŷ, ŷ¹, s) with the true solution (ŷ·eˢ, ŷ¹·eˢ) and
// max(|ŷ|,|ŷ¹|) kept within [1e-2, 1e2].

#include <complex>
#include <string>

#include "slz/ode.hpp"
#include "slz/problem.hpp"

namespace slz {

using cplx = std::complex<double>;

struct traj_sample {
    cplx y, y1;
    double logscale;
};

struct Trajectory {
    cplx z;
    std::vector<double> mesh;                 // strictly increasing
    std::vector<std::array<cplx, 2>> values;  // (y, y¹) per node, rescaled
    std::vector<double> logscale;             // s per node
    std::vector<dense_data<cplx, 2>> segs;    // continuous extension per segment
    std::vector<double> seg_logscale;         // gauge each segment is expressed in
    double tol = 0;

    // dense evaluation anywhere on [mesh.front(), mesh.back()]
    traj_sample at(double x) const;
    traj_sample start() const { return {values.front()[0], values.front()[1], logscale.front()}; }
    traj_sample end() const { return {values.back()[0], values.back()[1], logscale.back()}; }
};

struct WronskianValue {
    cplx value;    // W(f,g) at the start of the shared range, log factors included
    double drift;  // max relative deviation of W along the shared range
};

Trajectory propagate(const Problem& prob, cplx z, double x0, cplx y0, cplx y1_0, double x1,
                     double tol, double logscale0 = 0.0);

// W(f,g) = f·g¹ − f¹·g evaluated across the overlap of the two meshes.
WronskianValue wronskian(const Trajectory& f, const Trajectory& g);

// CSV rows: x, Re y, Im y, Re y¹, Im y¹, logscale
std::string to_csv(const Trajectory& t);

}  // namespace slz
