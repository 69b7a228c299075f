#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>

#include "slz/common.hpp"
#include "slz/ode.hpp"
#include "slz/quadrature.hpp"

using namespace slz;

TEST_CASE("fmt17 round-trips doubles exactly") {
    for (double v : {1.0, -0.1, 3.141592653589793, 1e-300, 6.02e23}) {
        CHECK(std::stod(fmt17(v)) == v);
    }
}

TEST_CASE("linspace and logspace endpoints are exact") {
    auto g = linspace(1.5, 7.25, 11);
    CHECK(g.size() == 11);
    CHECK(g.front() == 1.5);
    CHECK(g.back() == 7.25);
    auto lg = logspace(20.0, 100.0, 10);
    CHECK(lg.front() == 20.0);
    CHECK(lg.back() == 100.0);
    for (std::size_t i = 1; i + 1 < lg.size(); ++i) {
        // geometric: constant ratio
        CHECK(lg[i + 1] / lg[i] == doctest::Approx(lg[1] / lg[0]).epsilon(1e-12));
    }
}

TEST_CASE("grid spec parser") {
    auto g = parse_grid_spec("20:100:log10");
    CHECK(g.logarithmic);
    CHECK(g.n == 10);
    CHECK(g.start == 20.0);
    auto h = parse_grid_spec("0:1:lin5");
    CHECK_FALSE(h.logarithmic);
    CHECK(make_grid(h).size() == 5);
    CHECK_THROWS_AS(parse_grid_spec("20:100"), validation_error);
    CHECK_THROWS_AS(parse_grid_spec("20:100:quux7"), validation_error);
    CHECK_THROWS_AS(parse_grid_spec("0:100:log5"), validation_error);  // log needs start > 0
}

TEST_CASE("fit_line recovers slope and intercept") {
    std::vector<double> x, y;
    for (int i = 0; i < 20; ++i) {
        x.push_back(0.3 * i);
        y.push_back(2.5 * 0.3 * i - 1.25);
    }
    auto f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(-1.25).epsilon(1e-12));
    CHECK(f.max_residual < 1e-12);
}

TEST_CASE("total_variation") {
    std::vector<double> v{0.0, 1.0, 0.5, 0.5};
    CHECK(total_variation(v) == doctest::Approx(1.5));
}

TEST_CASE("ode: exp decay against closed form") {
    std::array<double, 1> y{1.0};
    ode_options opt;
    opt.tol = 1e-12;
    integrate_ode(
        [](double, const std::array<double, 1>& y, std::array<double, 1>& dy) { dy[0] = -y[0]; },
        0.0, 5.0, y, opt, [](double, std::array<double, 1>&, std::array<double, 1>&, const dense_data<double, 1>*) { return false; });
    CHECK(y[0] == doctest::Approx(std::exp(-5.0)).epsilon(1e-10));
}

TEST_CASE("ode: harmonic oscillator both directions") {
    // y'' = -y  as first-order system; integrate 0 -> 10 and back
    auto rhs = [](double, const std::array<double, 2>& y, std::array<double, 2>& dy) {
        dy[0] = y[1];
        dy[1] = -y[0];
    };
    std::array<double, 2> y{0.0, 1.0};
    ode_options opt;
    opt.tol = 1e-12;
    auto nosink = [](double, std::array<double, 2>&, std::array<double, 2>&, const dense_data<double, 2>*) { return false; };
    integrate_ode(rhs, 0.0, 10.0, y, opt, nosink);
    CHECK(y[0] == doctest::Approx(std::sin(10.0)).epsilon(1e-9));
    CHECK(y[1] == doctest::Approx(std::cos(10.0)).epsilon(1e-9));
    integrate_ode(rhs, 10.0, 0.0, y, opt, nosink);
    CHECK(y[0] == doctest::Approx(0.0).scale(1).epsilon(1e-9));
    CHECK(y[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ode: complex coefficient") {
    using cd = std::complex<double>;
    std::array<cd, 1> y{cd(1.0, 0.0)};
    cd mu(0.3, 1.1);
    ode_options opt;
    opt.tol = 1e-12;
    integrate_ode(
        [mu](double, const std::array<cd, 1>& y, std::array<cd, 1>& dy) { dy[0] = mu * y[0]; },
        0.0, 2.0, y, opt, [](double, std::array<cd, 1>&, std::array<cd, 1>&, const dense_data<cd, 1>*) { return false; });
    cd want = std::exp(mu * 2.0);
    CHECK(std::abs(y[0] - want) < 1e-9 * std::abs(want));
}

TEST_CASE("ode: sink sees monotone nodes and can rescale") {
    // y' = y over [0, 20]; rescale whenever |y| > 1e3 and track the log-gauge.
    std::array<double, 1> y{1.0};
    double sigma = 0.0, xprev = -1.0;
    bool monotone = true;
    ode_options opt;
    opt.tol = 1e-10;
    integrate_ode(
        [](double, const std::array<double, 1>& y, std::array<double, 1>& dy) { dy[0] = y[0]; },
        0.0, 20.0, y, opt,
        [&](double x, std::array<double, 1>& y, std::array<double, 1>& dy, const dense_data<double, 1>*) {
            if (x <= xprev) monotone = false;
            xprev = x;
            if (std::fabs(y[0]) > 1e3) {
                double m = std::log(std::fabs(y[0]));
                sigma += m;
                y[0] *= std::exp(-m);
                dy[0] *= std::exp(-m);
                return true;
            }
            return false;
        });
    CHECK(monotone);
    double log_final = sigma + std::log(std::fabs(y[0]));
    CHECK(log_final == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("ode: tolerance scaling") {
    // halving tol should not increase the error (statistically: ~16x per 16x)
    auto run = [](double tol) {
        std::array<double, 2> y{0.0, 1.0};
        ode_options opt;
        opt.tol = tol;
        integrate_ode(
            [](double, const std::array<double, 2>& y, std::array<double, 2>& dy) {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0, 30.0, y, opt,
            [](double, std::array<double, 2>&, std::array<double, 2>&, const dense_data<double, 2>*) { return false; });
        return std::fabs(y[0] - std::sin(30.0));
    };
    double e6 = run(1e-6), e10 = run(1e-10);
    CHECK(e10 < e6);
    CHECK(e10 < 1e-7);
}

TEST_CASE("hermite dense output is 4th order on a segment") {
    // nodes from y = sin(x)
    ode_node<double, 1> a{1.0, {std::sin(1.0)}, {std::cos(1.0)}};
    ode_node<double, 1> b{1.1, {std::sin(1.1)}, {std::cos(1.1)}};
    double worst = 0;
    for (int i = 0; i <= 10; ++i) {
        double x = 1.0 + 0.01 * i;
        worst = std::max(worst, std::fabs(hermite_eval(x, a, b)[0] - std::sin(x)));
    }
    CHECK(worst < 1e-6);  // h^4/384 * max|y''''| ~ 2.6e-7 at h = 0.1
}

TEST_CASE("gk15 adaptive: smooth and peaked integrands") {
    auto v = integrate_adaptive<double>([](double x) { return std::exp(-x * x); }, -8.0, 8.0, 1e-12);
    CHECK(v == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
    // peaked: 1/(1e-4 + x^2) on [-1,1] = 2*atan(1e2)/1e-2
    auto p = integrate_adaptive<double>([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0, 1e-10);
    CHECK(p == doctest::Approx(2.0 * std::atan(100.0) * 100.0).epsilon(1e-9));
}

TEST_CASE("gk15 adaptive: complex integrand") {
    using cd = std::complex<double>;
    // ∫_0^1 e^{ix} dx = (e^{i} - 1)/i
    cd v = integrate_adaptive<cd>([](double x) { return std::exp(cd(0, x)); }, 0.0, 1.0, 1e-12);
    cd want = (std::exp(cd(0, 1)) - 1.0) / cd(0, 1);
    CHECK(std::abs(v - want) < 1e-12);
}

TEST_CASE("integrate_to_infinity") {
    double v = integrate_to_infinity<double>([](double t) { return std::exp(-t); }, 1.0, 1e-12);
    CHECK(v == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
    double w = integrate_to_infinity<double>([](double t) { return 1.0 / (t * t); }, 2.0, 1e-10);
    CHECK(w == doctest::Approx(0.5).epsilon(1e-8));
}
