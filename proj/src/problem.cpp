#include "slz/problem.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace slz {

using nlohmann::json;

compiled_expr::compiled_expr(const ExprNode& e, const std::map<std::string, double>& params) {
    int depth = 0, max_depth = 0;
    std::function<void(const ExprNode&)> walk = [&](const ExprNode& n) {
        switch (n.kind) {
            case expr_kind::constant:
                prog_.push_back({opcode::push_const, n.value});
                max_depth = std::max(max_depth, ++depth);
                return;
            case expr_kind::variable_x:
                prog_.push_back({opcode::push_x, 0});
                max_depth = std::max(max_depth, ++depth);
                return;
            case expr_kind::parameter_ref: {
                auto it = params.find(n.name);
                if (it == params.end())
                    throw validation_error("undeclared parameter '" + n.name + "'");
                prog_.push_back({opcode::push_const, it->second});
                max_depth = std::max(max_depth, ++depth);
                return;
            }
            case expr_kind::unary_op:
                walk(n.children[0]);
                prog_.push_back({opcode::neg, 0});
                return;
            case expr_kind::binary_op: {
                walk(n.children[0]);
                walk(n.children[1]);
                opcode c = n.name == "+"   ? opcode::add
                           : n.name == "-" ? opcode::sub
                           : n.name == "*" ? opcode::mul
                           : n.name == "/" ? opcode::div
                                           : opcode::pow_op;
                prog_.push_back({c, 0});
                --depth;
                return;
            }
            case expr_kind::function_call: {
                for (const auto& c : n.children) walk(c);
                opcode c;
                if (n.name == "pow") {
                    c = opcode::pow_op;
                    --depth;
                } else if (n.name == "exp")
                    c = opcode::exp_op;
                else if (n.name == "ln")
                    c = opcode::ln_op;
                else if (n.name == "sqrt")
                    c = opcode::sqrt_op;
                else if (n.name == "abs")
                    c = opcode::abs_op;
                else if (n.name == "sin")
                    c = opcode::sin_op;
                else if (n.name == "cos")
                    c = opcode::cos_op;
                else
                    throw validation_error("unknown function '" + n.name + "'");
                prog_.push_back({c, 0});
                return;
            }
        }
    };
    walk(e);
    if (max_depth > 64) throw validation_error("expression too deep to compile");
}

double compiled_expr::operator()(double x) const {
    double st[64];
    int top = -1;
    for (const op& o : prog_) {
        switch (o.code) {
            case opcode::push_const:
                st[++top] = o.value;
                break;
            case opcode::push_x:
                st[++top] = x;
                break;
            case opcode::neg:
                st[top] = -st[top];
                break;
            case opcode::add:
                --top;
                st[top] += st[top + 1];
                break;
            case opcode::sub:
                --top;
                st[top] -= st[top + 1];
                break;
            case opcode::mul:
                --top;
                st[top] *= st[top + 1];
                break;
            case opcode::div:
                --top;
                if (st[top + 1] == 0) throw numeric_error("division by zero");
                st[top] /= st[top + 1];
                break;
            case opcode::pow_op:
                --top;
                st[top] = std::pow(st[top], st[top + 1]);
                if (std::isnan(st[top])) throw numeric_error("domain error in pow");
                break;
            case opcode::exp_op:
                st[top] = std::exp(st[top]);
                break;
            case opcode::ln_op:
                if (st[top] <= 0) throw numeric_error("domain error: ln(" + fmt17(st[top]) + ")");
                st[top] = std::log(st[top]);
                break;
            case opcode::sqrt_op:
                if (st[top] < 0) throw numeric_error("domain error: sqrt(" + fmt17(st[top]) + ")");
                st[top] = std::sqrt(st[top]);
                break;
            case opcode::abs_op:
                st[top] = std::fabs(st[top]);
                break;
            case opcode::sin_op:
                st[top] = std::sin(st[top]);
                break;
            case opcode::cos_op:
                st[top] = std::cos(st[top]);
                break;
        }
        if (!std::isfinite(st[top])) throw numeric_error("overflow in coefficient expression");
    }
    return st[0];
}

void Problem::bind() {
    pc_ = compiled_expr(p_expr, params);
    qc_ = compiled_expr(q_expr, params);
    rc_ = compiled_expr(r_expr, params);
}

BoundaryCondition BoundaryCondition::robin(double alpha) {
    if (!(alpha >= 0 && alpha < M_PI))
        throw validation_error("robin angle must lie in [0, pi), got " + fmt17(alpha));
    return {bc_kind::robin, alpha};
}

namespace {

ExprNode parse_coeff(const std::string& src, const std::map<std::string, double>& params) {
    std::set<std::string> names;
    for (const auto& [k, v] : params) names.insert(k);
    return parse_expr(src, names);
}

std::function<double(int)> affine_ref(double slope, double offset) {
    return [slope, offset](int j) { return slope * j + offset; };
}

double require_param(const Problem& prob, const std::string& name) {
    auto it = prob.params.find(name);
    if (it == prob.params.end())
        throw validation_error(prob.name + " requires parameter '" + name + "'");
    return it->second;
}

}  // namespace

Problem make_problem(const std::string& name, const std::map<std::string, double>& params) {
    Problem prob;
    prob.name = name;
    prob.params = params;

    auto coeffs = [&prob](const char* p, const char* q, const char* r) {
        prob.p_expr = parse_coeff(p, prob.params);
        prob.q_expr = parse_coeff(q, prob.params);
        prob.r_expr = parse_coeff(r, prob.params);
    };

    if (name == "free") {
        coeffs("1", "0", "1");
        prob.a = 0;
        prob.b = M_PI;
        prob.left = {endpoint_class::regular, -1};
        prob.right = {endpoint_class::regular, -1};
        prob.reference.eigenvalues["dirichlet"] = [](int j) { return double(j) * j; };
        prob.kappa_hint = 0.5;
        prob.genus_hint = 0;
    } else if (name == "harmonic_full") {
        coeffs("1", "x*x", "1");
        prob.a = -infinite;
        prob.b = infinite;
        prob.left = {endpoint_class::limit_point, -1};
        prob.right = {endpoint_class::limit_point, -1};
        prob.reference.eigenvalues["default"] = affine_ref(2, -1);  // 2j - 1
        prob.kappa_hint = 1.0;
        prob.genus_hint = 1;
    } else if (name == "harmonic_half") {
        coeffs("1", "x*x", "1");
        prob.a = 0;
        prob.b = infinite;
        prob.left = {endpoint_class::regular, -1};
        prob.right = {endpoint_class::limit_point, -1};
        prob.reference.eigenvalues["dirichlet"] = affine_ref(4, -1);  // 4j - 1
        prob.reference.eigenvalues["neumann"] = affine_ref(4, -3);    // 4j - 3
        prob.kappa_hint = 1.0;
        prob.genus_hint = 1;
    } else if (name == "airy" || name == "power") {
        double d = 1.0;
        if (name == "power") {
            d = require_param(prob, "d");
            if (!(d > 0)) throw validation_error("power requires d > 0, got " + fmt17(d));
        }
        coeffs("1", d == 1.0 ? "x" : "x^d", "1");
        prob.a = 0;
        prob.b = infinite;
        prob.left = {endpoint_class::regular, -1};
        prob.right = {endpoint_class::limit_point, -1};
        double kappa = (d + 2) / (2 * d);
        prob.kappa_hint = kappa;
        prob.genus_hint = static_cast<int>(std::floor(kappa));
        if (name == "airy") {
            // negated zeros of Ai: Dirichlet spectrum on the half line
            static const std::vector<double> airy_eigs{
                2.3381074104597670, 4.0879494441309706, 5.5205598280955511,
                6.7867080900717590, 7.9441335871208531};
            prob.reference.eigenvalues["dirichlet"] = [](int j) {
                return (j >= 1 && j <= int(airy_eigs.size()))
                           ? airy_eigs[j - 1]
                           : std::numeric_limits<double>::quiet_NaN();
            };
        }
    } else if (name == "laguerre") {
        double gamma = require_param(prob, "gamma");
        if (!(gamma > 0)) throw validation_error("laguerre requires gamma > 0, got " + fmt17(gamma));
        coeffs("x^gamma * exp(-x)", "0", "x^(gamma - 1) * exp(-x)");
        prob.a = 0;
        prob.b = infinite;
        prob.left = {gamma < 2 ? endpoint_class::limit_circle : endpoint_class::limit_point, -1};
        prob.right = {endpoint_class::limit_point, -1};
        // principal-behavior (Friedrichs) spectrum: j - 1 for gamma >= 1; for
        // gamma < 1 the principal solution is x^(1-gamma) and substituting
        // u = x^(1-gamma) v maps the problem to the gamma' = 2-gamma family,
        // shifting every eigenvalue up by 1-gamma
        prob.reference.eigenvalues["default"] = affine_ref(1, gamma >= 1 ? -1.0 : -gamma);
        prob.kappa_hint = 1.0;
        prob.genus_hint = 1;
        prob.default_shift = -0.5;
    } else {
        throw validation_error("unknown catalog name '" + name + "'");
    }

    prob.bind();
    return prob;
}

namespace {

double parse_end(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s == "inf" || s == "+inf" || s == "infinity") return infinite;
        if (s == "-inf" || s == "-infinity") return -infinite;
    }
    throw validation_error("interval entries must be numbers or \"inf\"/\"-inf\"");
}

endpoint_class parse_class(const std::string& s) {
    if (s == "regular") return endpoint_class::regular;
    if (s == "limit-circle") return endpoint_class::limit_circle;
    if (s == "limit-point") return endpoint_class::limit_point;
    if (s == "unknown") return endpoint_class::unknown;
    throw validation_error("unknown endpoint classification '" + s + "'");
}

}  // namespace

Problem load_problem(const std::string& json_text) {
    json cfg;
    try {
        cfg = json::parse(json_text);
    } catch (const json::exception& e) {
        throw validation_error(std::string("bad config JSON: ") + e.what());
    }
    if (!cfg.contains("problem")) throw validation_error("config must name a \"problem\"");
    std::string name = cfg.at("problem").get<std::string>();

    std::map<std::string, double> params;
    if (cfg.contains("params"))
        for (const auto& [k, v] : cfg.at("params").items()) params[k] = v.get<double>();

    Problem prob;
    if (name == "custom") {
        if (!cfg.contains("expressions"))
            throw validation_error("custom problem needs \"expressions\" {p, q, r}");
        const json& ex = cfg.at("expressions");
        prob.name = "custom";
        prob.params = params;
        prob.p_expr = parse_coeff(ex.at("p").get<std::string>(), params);
        prob.q_expr = parse_coeff(ex.at("q").get<std::string>(), params);
        prob.r_expr = parse_coeff(ex.at("r").get<std::string>(), params);
        if (!cfg.contains("interval"))
            throw validation_error("custom problem needs an \"interval\"");
        if (cfg.contains("endpoints")) {
            const json& ep = cfg.at("endpoints");
            if (ep.contains("left"))
                prob.left.classification = parse_class(ep.at("left").get<std::string>());
            if (ep.contains("right"))
                prob.right.classification = parse_class(ep.at("right").get<std::string>());
        }
        prob.bind();
    } else {
        prob = make_problem(name, params);
    }

    if (cfg.contains("interval")) {
        const json& iv = cfg.at("interval");
        if (!iv.is_array() || iv.size() != 2)
            throw validation_error("\"interval\" must be a two-element array");
        double a = parse_end(iv[0]), b = parse_end(iv[1]);
        if (!(a < b)) throw validation_error("interval needs a < b");
        // an endpoint moved into the open interval is a regular point
        if (name != "custom") {
            if (a != prob.a) prob.left = {endpoint_class::regular, -1};
            if (b != prob.b) prob.right = {endpoint_class::regular, -1};
        }
        prob.a = a;
        prob.b = b;
    }

    check_positivity(prob, 50);
    return prob;
}

Problem load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_problem(ss.str());
}

double reference_eigenvalue(const Problem& prob, const std::string& key, int j) {
    auto it = prob.reference.eigenvalues.find(key);
    if (it == prob.reference.eigenvalues.end() || j < 1)
        return std::numeric_limits<double>::quiet_NaN();
    return it->second(j);
}

void check_positivity(const Problem& prob, int n) {
    double lo = std::max(prob.a, -40.0), hi = std::min(prob.b, 40.0);
    if (!(lo < hi)) return;
    for (int k = 1; k <= n; ++k) {
        double x = lo + (hi - lo) * k / (n + 1);
        try {
            if (!(prob.p(x) > 0))
                throw validation_error("p is not positive at x=" + fmt17(x));
            if (!(prob.r(x) > 0))
                throw validation_error("r is not positive at x=" + fmt17(x));
            if (!std::isfinite(prob.q(x)))
                throw validation_error("q is not finite at x=" + fmt17(x));
        } catch (const numeric_error& e) {
            throw validation_error("coefficient undefined at x=" + fmt17(x) + ": " + e.what());
        }
    }
}

}  // namespace slz
