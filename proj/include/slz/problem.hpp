#pragma once

// Problem catalog and configuration ingestion.  A Problem bundles the three
// coefficient expressions p, q, r of  τf = (1/r)[-(pf')' + qf]  on (a, b),
// endpoint classifications, and optional reference spectra used by tests and
// the CLI validator.

#include <functional>
#include <limits>
#include <optional>

#include "slz/expr.hpp"

namespace slz {

// Flattened postfix program for fast repeated evaluation of a coefficient
// expression with all parameters bound to constants.
class compiled_expr {
  public:
    compiled_expr() = default;
    compiled_expr(const ExprNode& e, const std::map<std::string, double>& params);
    double operator()(double x) const;

  private:
    enum class opcode : unsigned char {
        push_const, push_x, neg, add, sub, mul, div, pow_op,
        exp_op, ln_op, sqrt_op, abs_op, sin_op, cos_op
    };
    struct op {
        opcode code;
        double value = 0;
    };
    std::vector<op> prog_;
};

enum class endpoint_class { regular, limit_circle, limit_point, unknown };

struct endpoint_info {
    endpoint_class classification = endpoint_class::unknown;
    int rank_hint = -1;  // -1: unknown
};

// Closed-form eigenvalue references keyed by boundary setup
// ("dirichlet", "neumann", "default").  Functions take a 1-based index and
// return NaN beyond tabulated data.
struct Reference {
    std::map<std::string, std::function<double(int)>> eigenvalues;
};

struct Problem {
    std::string name;  // catalog key or "custom"
    ExprNode p_expr, q_expr, r_expr;
    double a = 0, b = 0;  // interval ends; ±infinity allowed
    std::map<std::string, double> params;
    endpoint_info left, right;
    Reference reference;
    std::optional<int> genus_hint;     // smallest m with sum λ^-(m+1) finite
    std::optional<double> kappa_hint;  // convergence exponent of the spectrum
    double default_shift = 0.0;        // additive spectral shift making the operator positive

    double p(double x) const { return pc_(x); }
    double q(double x) const { return qc_(x); }
    double r(double x) const { return rc_(x); }

    // call after filling the expression/params fields
    void bind();

  private:
    compiled_expr pc_, qc_, rc_;
};

enum class bc_kind { dirichlet, neumann, robin, friedrichs_principal };

struct BoundaryCondition {
    bc_kind kind = bc_kind::dirichlet;
    double alpha = 0.0;  // robin angle, valid range [0, π)

    static BoundaryCondition dirichlet() { return {bc_kind::dirichlet, 0.0}; }
    static BoundaryCondition neumann() { return {bc_kind::neumann, 0.0}; }
    static BoundaryCondition robin(double alpha);
    static BoundaryCondition friedrichs() { return {bc_kind::friedrichs_principal, 0.0}; }
};

constexpr double infinite = std::numeric_limits<double>::infinity();

// Catalog names: free, harmonic_full, harmonic_half, airy, power (param d),
// laguerre (param gamma).  Unknown names or out-of-range parameters raise
// validation_error.
Problem make_problem(const std::string& name, const std::map<std::string, double>& params = {});

// Config document (JSON text): {"problem": name, "params": {...},
// "interval": [a, b]?, "expressions": {"p":..., "q":..., "r":...}? (custom),
// "endpoints": {"left":..., "right":...}? (custom)}.
// Interval entries may be numbers or the strings "inf" / "-inf".
Problem load_problem(const std::string& json_text);
Problem load_problem_file(const std::string& path);

// Reference eigenvalue lookup; NaN when the catalog has no such entry.
double reference_eigenvalue(const Problem& prob, const std::string& key, int j);

// Spot-check p > 0, r > 0, q finite on an n-point interior mesh (clipped to
// |x| <= 40 for infinite ends); throws validation_error on violation.
void check_positivity(const Problem& prob, int n = 1000);

}  // namespace slz
