#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace slz {

// Thrown for bad user input (unknown catalog name, malformed expressions,
// out-of-range parameters).  The CLI maps this to exit code 2.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when an algorithm fails to converge (bracket failure, step-size
// underflow, quadrature depth exhausted, ...).  The CLI maps this to exit 3.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 17 significant digits round-trips every IEEE double exactly.
inline std::string fmt17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::vector<double> linspace(double a, double b, int n) {
    if (n < 1) throw validation_error("linspace: need n >= 1");
    std::vector<double> out(static_cast<size_t>(n));
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (int i = 0; i < n; ++i)
        out[static_cast<size_t>(i)] = a + (b - a) * static_cast<double>(i) / (n - 1);
    return out;
}

// geometric grid from a to b inclusive (a, b > 0)
inline std::vector<double> logspace(double a, double b, int n) {
    if (n < 1) throw validation_error("logspace: need n >= 1");
    if (a <= 0 || b <= 0) throw validation_error("logspace: endpoints must be positive");
    std::vector<double> out(static_cast<size_t>(n));
    if (n == 1) {
        out[0] = a;
        return out;
    }
    double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < n; ++i)
        out[static_cast<size_t>(i)] = std::exp(la + (lb - la) * static_cast<double>(i) / (n - 1));
    out.front() = a;
    out.back() = b;
    return out;
}

struct line_fit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
};

inline line_fit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw validation_error("fit_line: need two equal-length samples");
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double den = n * sxx - sx * sx;
    if (den == 0) throw numeric_error("fit_line: degenerate abscissae");
    line_fit f;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    for (size_t i = 0; i < x.size(); ++i)
        f.max_residual = std::max(f.max_residual, std::fabs(y[i] - f.slope * x[i] - f.intercept));
    return f;
}

inline double total_variation(const std::vector<double>& v) {
    double tv = 0;
    for (size_t i = 1; i < v.size(); ++i) tv += std::fabs(v[i] - v[i - 1]);
    return tv;
}

// Grid specification "start:stop:lin7" or "start:stop:log10".
struct grid_spec {
    double start = 0, stop = 0;
    int n = 0;
    bool logarithmic = false;
};

inline grid_spec parse_grid_spec(const std::string& s) {
    grid_spec g;
    size_t p1 = s.find(':');
    size_t p2 = (p1 == std::string::npos) ? std::string::npos : s.find(':', p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos)
        throw validation_error("grid spec must look like start:stop:linN or start:stop:logN, got '" + s + "'");
    std::string kind = s.substr(p2 + 1);
    try {
        g.start = std::stod(s.substr(0, p1));
        g.stop = std::stod(s.substr(p1 + 1, p2 - p1 - 1));
        if (kind.rfind("lin", 0) == 0)
            g.logarithmic = false;
        else if (kind.rfind("log", 0) == 0)
            g.logarithmic = true;
        else
            throw validation_error("grid spec kind must be linN or logN, got '" + kind + "'");
        g.n = std::stoi(kind.substr(3));
    } catch (const validation_error&) {
        throw;
    } catch (const std::exception&) {
        throw validation_error("cannot parse grid spec '" + s + "'");
    }
    if (g.n < 1) throw validation_error("grid spec needs at least one point");
    if (g.logarithmic && !(g.start > 0 && g.stop > 0))
        throw validation_error("log grid endpoints must be positive");
    return g;
}

inline std::vector<double> make_grid(const grid_spec& g) {
    return g.logarithmic ? logspace(g.start, g.stop, g.n) : linspace(g.start, g.stop, g.n);
}

}  // namespace slz
