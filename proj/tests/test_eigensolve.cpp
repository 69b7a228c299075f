#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "slz/eigensolve.hpp"

using namespace slz;

namespace {

constexpr double pi = 3.14159265358979323846;

Problem free_problem() { return make_problem("free"); }

// Robin(pi/4)/Dirichlet on the free problem: y'(0) = -y(0), y(pi) = 0.  The
// attractive left condition binds one negative state, lambda_1 = -mu^2 with
// sinh(mu pi) = mu cosh(mu pi), i.e. tanh(mu pi) = mu; the positive spectrum
// is lambda_{j+1} = s_j^2 with tan(s pi) = s, i.e. s pi - atan(s) = j pi.
double robin_oracle_ground() {
    auto g = [](double mu) { return std::tanh(mu * pi) - mu; };
    double lo = 0.5, hi = 1.0;  // g(0.5) > 0, g(1) < 0
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (g(mid) < 0 ? hi : lo) = mid;
    }
    double mu = 0.5 * (lo + hi);
    return -mu * mu;
}

double robin_oracle_root(int j) {
    auto g = [j](double s) { return s * pi - std::atan(s) - j * pi; };
    double lo = 0.0, hi = j + 2.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (g(mid) > 0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("terminal angle on the free problem") {
    Problem prob = free_problem();
    auto bc = BoundaryCondition::dirichlet();
    CHECK(std::fabs(prufer_angle(prob, 1.0, 0, pi, bc) - pi) < 1e-9);
    CHECK(std::fabs(prufer_angle(prob, 4.0, 0, pi, bc) - 2 * pi) < 1e-9);
    CHECK(std::fabs(prufer_angle(prob, 2.25, 0, pi, bc) - 1.5 * pi) < 1e-9);
}

TEST_CASE("eigenvalue counting") {
    Problem prob = free_problem();
    auto d = BoundaryCondition::dirichlet();
    auto n = BoundaryCondition::neumann();
    CHECK(count_eigs_below(prob, 0, pi, d, d, 10.0) == 3);
    CHECK(count_eigs_below(prob, 0, pi, d, d, 1.0) == 0);  // strict at an eigenvalue
    CHECK(count_eigs_below(prob, 0, pi, d, d, 4.5) == 2);
    CHECK(count_eigs_below(prob, 0, pi, n, n, 10.0) == 4);  // 0, 1, 4, 9

    Problem harm = make_problem("harmonic_full");
    CHECK(count_eigs_below(harm, -6, 6, d, d, 10.0) == 5);  // 1, 3, 5, 7, 9
}

TEST_CASE("free problem dirichlet spectrum") {
    Problem prob = free_problem();
    EigenList list = dirichlet_eigs(prob, 0, pi, 3, 1e-10);
    REQUIRE(list.entries.size() == 3);
    const double expect[] = {1.0, 4.0, 9.0};
    for (int i = 0; i < 3; ++i) {
        CHECK(std::fabs(list.entries[i].lambda - expect[i]) < 1e-8);
        CHECK(list.entries[i].j == i + 1);
        CHECK(list.entries[i].n_zeros == i);
        CHECK(list.entries[i].residual < 1e-6);
    }
    CHECK(list.entries[0].lambda < list.entries[1].lambda);
    CHECK(list.entries[1].lambda < list.entries[2].lambda);
    CHECK(std::fabs(list.weyl_length - pi) < 1e-8);

    std::string csv = list.to_csv();
    CHECK(csv.substr(0, 30) == "j,lambda,n_zeros,residual\n1,1.");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("truncated harmonic oscillator spectrum") {
    Problem prob = make_problem("harmonic_full");
    EigenList list = dirichlet_eigs(prob, -6, 6, 8, 1e-10);
    REQUIRE(list.entries.size() == 8);
    for (int i = 0; i < 4; ++i)
        CHECK(std::fabs(list.entries[i].lambda - (2 * i + 1)) < 1e-6);
    // the eighth eigenvalue carries the first truncation offset visible at
    // this tolerance (the box at |x| = 6 raises it by 2.53e-6)
    CHECK(std::fabs(list.entries[7].lambda - 15.00000252739047) < 5e-9);
    for (const auto& e : list.entries) CHECK(e.n_zeros == e.j - 1);
}

TEST_CASE("laguerre truncations near and away from the singular endpoint") {
    Problem prob = make_problem("laguerre", {{"gamma", 1.0}});

    // near-singular truncation: converges to the principal-behavior spectrum
    EigenList near0 = dirichlet_eigs(prob, 1e-6, 40, 3, 1e-10);
    for (int i = 0; i < 3; ++i)
        CHECK(std::fabs(near0.entries[i].lambda - i) < 1e-4);

    // same launch, shorter box: the eighth eigenvalue feels the truncation
    EigenList d20 = dirichlet_eigs(prob, 1e-6, 20, 8, 1e-10);
    CHECK(std::fabs(d20.entries[7].lambda - 8.6508163214724602) < 1e-7);

    // interior truncation (1, 10): plain Dirichlet both ends
    const double expect[] = {1.53312898717, 3.28125204999, 5.92278427446, 9.61269814532,
                             14.3596104624, 20.1630633059, 27.0225876643, 34.9379304873,
                             43.9089562425, 53.9355888579, 65.0177834203, 77.155512172,
                             90.3487572626};
    EigenList mid = dirichlet_eigs(prob, 1, 10, 13, 1e-10);
    REQUIRE(mid.entries.size() == 13);
    for (int i = 0; i < 13; ++i) {
        double want = expect[i] - 0.5;  // table was computed with q shifted by r/2
        CHECK(std::fabs(mid.entries[i].lambda - want) <= 1e-6 * (1 + std::fabs(want)));
        CHECK(mid.entries[i].n_zeros == i);
    }
}

TEST_CASE("robin condition against the transcendental root equation") {
    Problem prob = free_problem();
    EigenList list = bc_eigs(prob, 0, pi, BoundaryCondition::robin(pi / 4),
                             BoundaryCondition::dirichlet(), 3, 1e-10);
    CHECK(std::fabs(list.entries[0].lambda - robin_oracle_ground()) < 1e-8);
    for (int j = 1; j <= 2; ++j) {
        double s = robin_oracle_root(j);
        CHECK(std::fabs(list.entries[j].lambda - s * s) < 1e-8);
    }
}

TEST_CASE("neumann and half-line chains") {
    Problem prob = free_problem();
    EigenList nn = bc_eigs(prob, 0, pi, BoundaryCondition::neumann(),
                           BoundaryCondition::neumann(), 3, 1e-10);
    const double expect_nn[] = {0.0, 1.0, 4.0};
    for (int i = 0; i < 3; ++i) {
        CHECK(std::fabs(nn.entries[i].lambda - expect_nn[i]) < 1e-8);
        CHECK(nn.entries[i].n_zeros == i);
    }

    Problem hh = make_problem("harmonic_half");
    EigenList dd = bc_eigs(hh, 0, 8, BoundaryCondition::dirichlet(),
                           BoundaryCondition::dirichlet(), 3, 1e-10);
    EigenList nd = bc_eigs(hh, 0, 8, BoundaryCondition::neumann(),
                           BoundaryCondition::dirichlet(), 3, 1e-10);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::fabs(dd.entries[i].lambda - (4 * i + 3)) < 1e-6);
        CHECK(std::fabs(nd.entries[i].lambda - (4 * i + 1)) < 1e-6);
    }
}

TEST_CASE("extrapolated principal launch at the singular endpoint") {
    // gamma = 1: principal solution tends to a constant; spectrum 0, 1, 2, ...
    Problem g1 = make_problem("laguerre", {{"gamma", 1.0}});
    EigenList l1 = bc_eigs(g1, 0, 40, BoundaryCondition::friedrichs(),
                           BoundaryCondition::dirichlet(), 3, 1e-10);
    for (int i = 0; i < 3; ++i) CHECK(std::fabs(l1.entries[i].lambda - i) < 1e-4);

    // gamma = 1/2: principal solution behaves like x^(1-gamma); substituting
    // u = x^(1-gamma) v maps onto the gamma' = 2 - gamma family and shifts the
    // spectrum up by 1 - gamma, so lambda_j = j - 1/2
    Problem g05 = make_problem("laguerre", {{"gamma", 0.5}});
    EigenList l05 = bc_eigs(g05, 0, 40, BoundaryCondition::friedrichs(),
                            BoundaryCondition::dirichlet(), 3, 1e-10);
    for (int i = 0; i < 3; ++i) CHECK(std::fabs(l05.entries[i].lambda - (i + 0.5)) < 1e-3);
    CHECK(reference_eigenvalue(g05, "default", 1) == 0.5);

    std::array<cplx, 2> s1 = principal_seed(g1, -0.5, 1e-3);
    CHECK(s1[0].real() == 1.0);
    CHECK(std::fabs(s1[1].real() - 0.5e-3) < 1e-18);
    std::array<cplx, 2> s05 = principal_seed(g05, -0.5, 1e-4);
    CHECK(std::fabs(s05[0].real() - 1e-2) < 1e-16);
    CHECK(s05[1].real() == 0.5);
}

TEST_CASE("weyl asymptotics of deep truncated spectra") {
    Problem prob = free_problem();
    EigenList fr = dirichlet_eigs(prob, 0, pi, 50, 1e-8);
    double ratio = fr.entries[49].lambda * std::pow(fr.weyl_length / (50 * pi), 2);
    CHECK(std::fabs(ratio - 1.0) < 0.05);

    Problem harm = make_problem("harmonic_full");
    EigenList hm = dirichlet_eigs(harm, -6, 6, 50, 1e-8);
    double ratio_h = hm.entries[49].lambda * std::pow(hm.weyl_length / (50 * pi), 2);
    CHECK(std::fabs(ratio_h - 1.0) < 0.15);
    for (int i = 1; i < 50; ++i)
        CHECK(hm.entries[i].lambda > hm.entries[i - 1].lambda);
}

TEST_CASE("domain monotonicity and interlacing") {
    Problem prob = free_problem();
    // lambda_1(0, d) = (pi/d)^2 decreases in d
    double l1a = dirichlet_eigs(prob, 0, 0.8 * pi, 1, 1e-10).entries[0].lambda;
    double l1b = dirichlet_eigs(prob, 0, pi, 1, 1e-10).entries[0].lambda;
    CHECK(std::fabs(l1a - std::pow(1 / 0.8, 2)) < 1e-8);
    CHECK(std::fabs(l1b - 1.0) < 1e-8);
    CHECK(l1b < l1a);

    // moving the left endpoint inward raises every eigenvalue
    double shifted = dirichlet_eigs(prob, 0.4, pi, 1, 1e-10).entries[0].lambda;
    CHECK(shifted > l1b);
    CHECK(std::fabs(shifted - std::pow(pi / (pi - 0.4), 2)) < 1e-8);

    Problem lag = make_problem("laguerre", {{"gamma", 1.0}});
    double prev = 1e300;
    for (double d : {8.0, 10.0, 12.0}) {
        double l1 = dirichlet_eigs(lag, 1.0, d, 1, 1e-10).entries[0].lambda;
        CHECK(l1 < prev);
        prev = l1;
    }

    // literal Dirichlet truncations approach the principal-behavior limit from
    // above as c moves toward the singular endpoint
    Problem g05 = make_problem("laguerre", {{"gamma", 0.5}});
    prev = 1e300;
    for (double c : {0.2, 0.1, 0.05}) {
        double l1 = dirichlet_eigs(g05, c, 30, 1, 1e-10).entries[0].lambda;
        CHECK(l1 < prev);
        CHECK(l1 > 0.5);
        prev = l1;
    }
}

TEST_CASE("input validation") {
    Problem prob = free_problem();
    Problem lag = make_problem("laguerre", {{"gamma", 1.0}});
    auto d = BoundaryCondition::dirichlet();
    CHECK_THROWS_AS(dirichlet_eigs(prob, 0, pi, 0, 1e-10), validation_error);
    CHECK_THROWS_AS(dirichlet_eigs(prob, 2, 1, 1, 1e-10), validation_error);
    CHECK_THROWS_AS(dirichlet_eigs(prob, 0, pi, 1, -1e-10), validation_error);
    CHECK_THROWS_AS(dirichlet_eigs(lag, 0, 10, 1, 1e-10), validation_error);  // singular c
    CHECK_THROWS_AS(bc_eigs(prob, 0, pi, d, BoundaryCondition::friedrichs(), 1, 1e-10),
                    validation_error);
    CHECK_THROWS_AS(bc_eigs(lag, 1.0, 10, BoundaryCondition::friedrichs(), d, 1, 1e-10),
                    validation_error);  // launch point too far from the endpoint
    CHECK_THROWS_AS(prufer_angle(prob, 1.0, 0, pi, BoundaryCondition::friedrichs()),
                    validation_error);  // no principal data for this family
}

TEST_CASE("reruns are bitwise deterministic") {
    Problem prob = make_problem("harmonic_full");
    EigenList one = dirichlet_eigs(prob, -6, 6, 3, 1e-10);
    EigenList two = dirichlet_eigs(prob, -6, 6, 3, 1e-10);
    for (int i = 0; i < 3; ++i)
        CHECK(one.entries[i].lambda == two.entries[i].lambda);
    CHECK(one.to_csv() == two.to_csv());
}
