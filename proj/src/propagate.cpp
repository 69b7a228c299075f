#include "slz/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace slz {

traj_sample Trajectory::at(double x) const {
    if (mesh.empty()) throw validation_error("empty trajectory");
    double lo = mesh.front(), hi = mesh.back();
    double slack = 1e-12 * (1 + std::fabs(lo) + std::fabs(hi));
    if (x < lo - slack || x > hi + slack)
        throw validation_error("trajectory evaluated outside its range at x=" + fmt17(x));
    if (mesh.size() == 1) return {values[0][0], values[0][1], logscale[0]};
    x = std::clamp(x, lo, hi);
    auto it = std::upper_bound(mesh.begin(), mesh.end(), x);
    std::size_t k = (it == mesh.begin()) ? 0 : (it - mesh.begin() - 1);
    if (k + 1 >= mesh.size()) k = mesh.size() - 2;
    auto v = segs[k].eval(x);
    return {v[0], v[1], seg_logscale[k]};
}

Trajectory propagate(const Problem& prob, cplx z, double x0, cplx y0, cplx y1_0, double x1,
                     double tol, double logscale0) {
    if (!(tol > 0)) throw validation_error("propagate: tol must be positive");
    if (std::abs(y0) == 0 && std::abs(y1_0) == 0)
        throw validation_error("propagate: zero initial data");
    double lo = std::min(x0, x1), hi = std::max(x0, x1);
    if (!(lo >= prob.a && hi <= prob.b))
        throw validation_error("propagate: range [" + fmt17(lo) + "," + fmt17(hi) +
                               "] outside problem interval");

    Trajectory t;
    t.z = z;
    t.tol = tol;
    double sigma = logscale0;

    auto rhs = [&prob, z](double x, const std::array<cplx, 2>& y, std::array<cplx, 2>& dy) {
        double p = prob.p(x);
        if (!(p > 0)) throw numeric_error("propagate: p <= 0 at x=" + fmt17(x));
        dy[0] = y[1] / p;
        dy[1] = (prob.q(x) - z * prob.r(x)) * y[0];
    };

    std::array<cplx, 2> y{y0, y1_0};
    ode_options opt;
    // the controller bounds the per-step error estimate; global drift over an
    // O(10)-unit interval accumulates a couple of orders above that, so run
    // the integrator with margin to deliver tol-level accuracy on the result
    opt.tol = std::max(tol / 32.0, 1e-14);
    // cap the step so the order-4 continuous extension stays as accurate as
    // the nodes themselves on slowly-varying stretches
    opt.h_max = std::min((hi - lo) / 4, 1.0);
    opt.want_dense = true;
    // keep the smaller of (y, y¹) accurate relative to the state: when p is
    // tiny, y' = y¹/p amplifies any slack granted to y¹
    opt.atol_state_frac = 1e-2;

    integrate_ode(rhs, x0, x1, y, opt,
                  [&](double x, std::array<cplx, 2>& yy, std::array<cplx, 2>& dyy,
                      const dense_data<cplx, 2>* seg) {
                      if (seg) {
                          // segment data lives in the gauge the step started in
                          t.segs.push_back(*seg);
                          t.seg_logscale.push_back(sigma);
                      }
                      double m = std::max(std::abs(yy[0]), std::abs(yy[1]));
                      bool rescaled = false;
                      if (m > 0 && (m > 1e2 || m < 1e-2)) {
                          double f = 1.0 / m;
                          yy[0] *= f;
                          yy[1] *= f;
                          dyy[0] *= f;
                          dyy[1] *= f;
                          sigma += std::log(m);
                          rescaled = true;
                      }
                      t.mesh.push_back(x);
                      t.values.push_back(yy);
                      t.logscale.push_back(sigma);
                      return rescaled;
                  });

    if (x1 < x0) {
        std::reverse(t.mesh.begin(), t.mesh.end());
        std::reverse(t.values.begin(), t.values.end());
        std::reverse(t.logscale.begin(), t.logscale.end());
        std::reverse(t.segs.begin(), t.segs.end());
        std::reverse(t.seg_logscale.begin(), t.seg_logscale.end());
    }
    return t;
}

WronskianValue wronskian(const Trajectory& f, const Trajectory& g) {
    if (f.z != g.z) throw validation_error("wronskian: trajectories have different z");
    double lo = std::max(f.mesh.front(), g.mesh.front());
    double hi = std::min(f.mesh.back(), g.mesh.back());
    if (!(lo <= hi)) throw validation_error("wronskian: meshes do not overlap");

    std::vector<double> xs;
    for (double x : f.mesh)
        if (x >= lo && x <= hi) xs.push_back(x);
    for (double x : g.mesh)
        if (x >= lo && x <= hi) xs.push_back(x);
    xs.push_back(lo);
    xs.push_back(hi);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    auto eval = [&](double x, double& S) {
        traj_sample a = f.at(x), b = g.at(x);
        S = a.logscale + b.logscale;
        return a.y * b.y1 - a.y1 * b.y;
    };

    double S0;
    cplx h0 = eval(lo, S0);
    WronskianValue out;
    out.value = (std::abs(h0) == 0) ? cplx{0, 0} : h0 * std::exp(S0);
    out.drift = 0;
    for (double x : xs) {
        double S;
        cplx hx = eval(x, S);
        if (std::abs(h0) == 0) {
            if (std::abs(hx) != 0) out.drift = std::numeric_limits<double>::infinity();
            continue;
        }
        double dev = std::abs(hx * std::exp(S - S0) - h0) / std::abs(h0);
        out.drift = std::max(out.drift, dev);
    }
    return out;
}

std::string to_csv(const Trajectory& t) {
    std::ostringstream out;
    out << "x,re_y,im_y,re_y1,im_y1,logscale\n";
    for (std::size_t k = 0; k < t.mesh.size(); ++k)
        out << fmt17(t.mesh[k]) << ',' << fmt17(t.values[k][0].real()) << ','
            << fmt17(t.values[k][0].imag()) << ',' << fmt17(t.values[k][1].real()) << ','
            << fmt17(t.values[k][1].imag()) << ',' << fmt17(t.logscale[k]) << '\n';
    return out.str();
}

}  // namespace slz
