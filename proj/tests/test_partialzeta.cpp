#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "slz/partialzeta.hpp"

using namespace slz;

namespace {

constexpr double pi = 3.14159265358979323846;

// hand-built list for the exactly-known free spectrum (n pi / L)^2 with L = pi
EigenList free_list(int n) {
    EigenList l;
    l.c = 0;
    l.d = pi;
    l.tol = 0;
    l.weyl_length = pi;
    for (int j = 1; j <= n; ++j)
        l.entries.push_back({j, static_cast<double>(j) * j, j - 1, 0.0});
    return l;
}

double total_variation3(double a, double b, double c) {
    return std::fabs(b - a) + std::fabs(c - b);
}

}  // namespace

TEST_CASE("weyl tail against the trigamma series") {
    EigenList l = free_list(100);
    // sum_{n>100} n^-2 = psi'(101)
    CHECK(std::fabs(weyl_tail(l, 1) - 0.0099501666633335714) < 1e-12);

    double s4 = 0;  // explicit comparison sum for the quartic tail
    for (int n = 2000000; n > 100; --n) s4 += 1.0 / (static_cast<double>(n) * n * n * n);
    CHECK(std::fabs(weyl_tail(l, 2) - s4) < 1e-13);

    CHECK(weyl_tail(l, 30) == 0.0);
}

TEST_CASE("basel values by the direct route") {
    Problem prob = make_problem("free");
    EigenList l = dirichlet_eigs(prob, 0, pi, 120, 1e-10);
    CHECK(std::fabs(zeta_direct(l, 1) - pi * pi / 6) < 1e-8);
    CHECK(std::fabs(zeta_direct(l, 2) - pi * pi * pi * pi / 90) < 1e-10);
}

TEST_CASE("taylor chain closed forms on the free problem") {
    Problem prob = make_problem("free");
    PartialZetaTable t = zeta_recursive(prob, 0, {1.3, 2.0, pi}, 3);
    REQUIRE(t.xs.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        double x = t.xs[k];
        CHECK(std::fabs(t.value(1, k) - x * x / 6) < 1e-9);
        CHECK(std::fabs(t.value(2, k) - std::pow(x, 4) / 90) < 1e-9);
        CHECK(std::fabs(t.value(3, k) - std::pow(x, 6) / 945) < 1e-9);
        // all truncated eigenvalues exceed 1 here, so values decrease in ell
        CHECK(t.value(1, k) > t.value(2, k));
        CHECK(t.value(2, k) > t.value(3, k));
    }
    CHECK(t.method == zeta_method::recursive);
    CHECK(t.shift == 0.0);
}

TEST_CASE("shift covariance on the free problem") {
    Problem prob = make_problem("free");
    // sum_j (j^2 + 1)^-1 = (pi coth pi - 1)/2
    const double expect = 1.0766740474685812;
    PartialZetaTable t = zeta_recursive(prob, 0, {pi}, 1, -1.0);
    CHECK(std::fabs(t.value(1, 0) - expect) < 1e-8);

    // the same number from the unshifted eigenvalue list, shifted by hand;
    // the Weyl tail model does not see the shift, so agreement is limited by
    // the neglected sum of 1/(n^2 (n^2+1)) beyond the list, about 2e-7 here
    EigenList l = dirichlet_eigs(prob, 0, pi, 120, 1e-10);
    for (auto& e : l.entries) e.lambda += 1.0;
    CHECK(std::fabs(zeta_direct(l, 1) - expect) < 5e-7);
}

TEST_CASE("direct route follows the harmonic log law") {
    Problem prob = make_problem("harmonic_full");
    // the Weyl tail model needs lambda_N well past max q = x^2, hence the
    // deep lists on short boxes
    EigenList l5 = dirichlet_eigs(prob, 0, 5, 160, 1e-8);
    EigenList l10 = dirichlet_eigs(prob, 0, 10, 160, 1e-8);
    double diff = zeta_direct(l10, 1) - zeta_direct(l5, 1);
    CHECK(std::fabs(diff - 0.5 * std::log(2.0)) < 0.01);
}

TEST_CASE("harmonic truncation values against frozen references") {
    Problem prob = make_problem("harmonic_full");
    PartialZetaTable t = zeta_recursive(prob, 1.0, {10, 20, 40}, 2);
    const double z1[] = {1.008204707160702, 1.356681830304477, 1.703725920751625};
    const double z2[] = {0.049830732639919, 0.050792444991914, 0.051028296569603};
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(std::fabs(t.value(1, k) - z1[k]) < 1e-7);
        CHECK(std::fabs(t.value(2, k) - z2[k]) < 1e-7);
    }
    // zeta(1;(.,x)) - (1/2) ln x settles fast for the oscillator
    double d1 = t.value(1, 0) - 0.5 * std::log(10.0);
    double d2 = t.value(1, 1) - 0.5 * std::log(20.0);
    double d3 = t.value(1, 2) - 0.5 * std::log(40.0);
    CHECK(total_variation3(d1, d2, d3) < 0.05);

    PartialZetaTable h0 = zeta_recursive(prob, 0.0, {10}, 2);
    CHECK(std::fabs(h0.value(2, 0) - 0.15759169120870549) < 1e-8);
}

TEST_CASE("laguerre shifted values near and away from the endpoint") {
    Problem prob = make_problem("laguerre", {{"gamma", 1.0}});
    PartialZetaTable t = zeta_recursive(prob, 1.0, {10, 20, 40}, 2, -0.5);
    const double z1[] = {1.635218020776830, 2.391786564123812, 3.112686054880353};
    const double z2[] = {0.56901852865885039, 0.71846357603266026, 0.77771727133885351};
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(std::fabs(t.value(1, k) - z1[k]) < 1e-7);
        CHECK(std::fabs(t.value(2, k) - z2[k]) < 1e-7);
    }
    // zeta(1) - ln x is still drifting at x = 40; pin the measured variation
    // as a regression value (it converges like a power of 1/x further out)
    double d1 = t.value(1, 0) - std::log(10.0);
    double d2 = t.value(1, 1) - std::log(20.0);
    double d3 = t.value(1, 2) - std::log(40.0);
    CHECK(std::fabs(total_variation3(d1, d2, d3) - 0.091173673) < 5e-3);

    // launch at the limit-circle endpoint itself: principal-data seed
    PartialZetaTable t0 = zeta_recursive(prob, 0.0, {20}, 1, -0.5);
    CHECK(std::fabs(t0.value(1, 0) - 4.9056572549854426) < 1e-5);
}

TEST_CASE("integral route for the first zeta value") {
    Problem fr = make_problem("free");
    // regular box: the degenerate u,v pair gives the plain iterated integral
    // x^2/2, not the zeta value x^2/6 — the formula is asymptotic only at
    // singular endpoints
    double v0 = zeta1_integral(fr, 0.0, 0, 2.0);
    CHECK(std::fabs(v0 - 2.0) < 1e-9);
    CHECK(std::fabs(v0 - 4.0 / 6.0) > 0.5);

    Problem harm = make_problem("harmonic_full");
    // truncated-spectrum traces sum_j (lambda_j(1,x)+1)^-1; the integral runs
    // over the diagonal of the full-interval kernel, which exceeds the trace
    // by a boundary layer of size ~ 1/(4 s(x)^2) = 1/(4(x^2+1)) at the cut
    const double hv[] = {0.963388407378421, 1.310908444769710, 1.657716961785453};
    double got[3];
    const double xs[] = {10, 20, 40};
    for (int k = 0; k < 3; ++k) {
        got[k] = zeta1_integral(harm, -1.0, 1.0, xs[k]);
        double layer = got[k] - hv[k];
        CHECK(layer > 0.2 / (xs[k] * xs[k]));
        CHECK(layer < 0.35 / (xs[k] * xs[k]));
    }
    CHECK(total_variation3(got[0] - 0.5 * std::log(10.0), got[1] - 0.5 * std::log(20.0),
                           got[2] - 0.5 * std::log(40.0)) < 0.05);

    Problem lag = make_problem("laguerre", {{"gamma", 1.0}});
    double lv[3];
    for (int k = 0; k < 3; ++k) lv[k] = zeta1_integral(lag, -0.5, 1.0, xs[k]);
    double e1 = lv[0] - std::log(10.0), e2 = lv[1] - std::log(20.0),
           e3 = lv[2] - std::log(40.0);
    double spread = std::max({e1, e2, e3}) - std::min({e1, e2, e3});
    CHECK(spread < 0.15);
}

TEST_CASE("liouville-green surrogate closed forms") {
    Problem harm = make_problem("harmonic_full");
    CHECK(std::fabs(lg_xi(harm, 1, 1, 40) - 0.5 * std::log(40.0)) < 1e-10);

    Problem airy = make_problem("airy");
    CHECK(std::fabs(lg_xi(airy, 1, 1, 25) - 4.0) < 1e-10);
    CHECK(std::fabs(lg_xi(airy, 2, 1, 16) - 0.375) < 1e-10);

    Problem pw2 = make_problem("power", {{"d", 2.0}});
    CHECK(std::fabs(lg_xi(pw2, 2, 1, 10) - (1 - 0.01) / 8) < 1e-10);
}

TEST_CASE("liouville-green divergence classification") {
    // xi(ell) diverges in x exactly for ell <= floor((d+2)/(2d)); classify by
    // the increments over a geometric grid
    for (double d : {1.0, 2.0, 3.0}) {
        Problem prob = make_problem("power", {{"d", d}});
        int ell_div = static_cast<int>(std::floor((d + 2) / (2 * d)));
        for (int ell = 1; ell <= 2; ++ell) {
            double v[5];
            for (int k = 0; k <= 4; ++k) v[k] = lg_xi(prob, ell, 1.0, std::pow(4.0, k + 1));
            double first = v[1] - v[0], last = v[4] - v[3];
            if (ell <= ell_div)
                CHECK(last > 0.6 * first);  // increments persist: divergent
            else
                CHECK(last < 0.25 * first);  // increments die off: convergent
        }
    }
}

TEST_CASE("liouville-green tracks the recursive values") {
    // bounded difference for any choice of the two left endpoints
    Problem harm = make_problem("harmonic_full");
    PartialZetaTable hz = zeta_recursive(harm, 1.0, {10, 20, 40}, 1);
    double hd[3];
    const double xs[] = {10, 20, 40};
    for (int k = 0; k < 3; ++k) hd[k] = lg_xi(harm, 1, 1.0, xs[k]) - hz.value(1, k);
    CHECK(total_variation3(hd[0], hd[1], hd[2]) < 0.1);

    Problem airy = make_problem("airy");
    PartialZetaTable az = zeta_recursive(airy, 0.0, {10, 20, 40}, 1);
    const double az_ref[] = {2.407747088633377, 3.730535971749604, 5.589278654184541};
    double ad[3];
    for (int k = 0; k < 3; ++k) {
        CHECK(std::fabs(az.value(1, k) - az_ref[k]) < 1e-7);
        ad[k] = lg_xi(airy, 1, 1.0, xs[k]) - az.value(1, k);
    }
    CHECK(total_variation3(ad[0], ad[1], ad[2]) < 0.1);
}

TEST_CASE("csv and determinism") {
    Problem prob = make_problem("free");
    PartialZetaTable a = zeta_recursive(prob, 0, {1.0, 2.0}, 2);
    PartialZetaTable b = zeta_recursive(prob, 0, {1.0, 2.0}, 2);
    CHECK(a.to_csv() == b.to_csv());
    std::string csv = a.to_csv();
    CHECK(csv.substr(0, 25) == "x,ell,value,method,shift\n");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    CHECK(csv.find("recursive") != std::string::npos);
}

TEST_CASE("input validation and failure reporting") {
    Problem fr = make_problem("free");
    Problem lag = make_problem("laguerre", {{"gamma", 1.0}});

    CHECK_THROWS_AS(zeta_recursive(fr, 0, {1.0}, 0), validation_error);
    CHECK_THROWS_AS(zeta_recursive(fr, 0, {1.0}, 7), validation_error);
    CHECK_THROWS_AS(zeta_recursive(fr, 0, {}, 1), validation_error);
    CHECK_THROWS_AS(zeta_recursive(fr, 0, {2.0, 1.0}, 1), validation_error);
    CHECK_THROWS_AS(zeta_recursive(fr, 0, {4.0}, 1), validation_error);  // beyond b
    // shift above the lowest truncated eigenvalue: phi_0 crosses zero
    CHECK_THROWS_AS(zeta_recursive(fr, 0, {pi}, 1, 5.0), numeric_error);

    EigenList zl = free_list(3);
    zl.entries[0].lambda = 0.0;
    CHECK_THROWS_AS(zeta_direct(zl, 1), validation_error);
    CHECK_THROWS_AS(zeta_direct(free_list(3), 0), validation_error);

    CHECK_THROWS_AS(zeta1_integral(lag, -0.5, 0.0, 10.0), validation_error);  // singular c
    CHECK_THROWS_AS(lg_xi(lag, 1, 1, 10), validation_error);    // not Schrodinger form
    Problem harm = make_problem("harmonic_full");
    CHECK_THROWS_AS(lg_xi(harm, 1, 0, 10), numeric_error);      // q(0) = 0
}
