#include "slz/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace slz {

namespace {

const std::set<std::string>& known_functions() {
    static const std::set<std::string> fns{"exp", "ln", "sqrt", "abs", "sin", "cos", "pow"};
    return fns;
}

struct parser {
    const std::string& s;
    const std::set<std::string>& params;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool consume(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what, std::size_t at) { throw parse_error(what, at); }

    ExprNode binary(const char* op, ExprNode lhs, ExprNode rhs) {
        ExprNode n;
        n.kind = expr_kind::binary_op;
        n.name = op;
        n.children = {std::move(lhs), std::move(rhs)};
        return n;
    }

    ExprNode parse_sum() {
        ExprNode lhs = parse_term();
        for (;;) {
            if (consume('+'))
                lhs = binary("+", std::move(lhs), parse_term());
            else if (consume('-'))
                lhs = binary("-", std::move(lhs), parse_term());
            else
                return lhs;
        }
    }

    ExprNode parse_term() {
        ExprNode lhs = parse_factor();
        for (;;) {
            if (consume('*'))
                lhs = binary("*", std::move(lhs), parse_factor());
            else if (consume('/'))
                lhs = binary("/", std::move(lhs), parse_factor());
            else
                return lhs;
        }
    }

    ExprNode parse_factor() {
        if (consume('-')) {
            ExprNode n;
            n.kind = expr_kind::unary_op;
            n.name = "-";
            n.children = {parse_power()};
            return n;
        }
        return parse_power();
    }

    ExprNode parse_power() {
        ExprNode base = parse_atom();
        if (consume('^')) return binary("^", std::move(base), parse_factor());
        return base;
    }

    ExprNode parse_atom() {
        skip_ws();
        std::size_t at = pos;
        if (pos >= s.size()) fail("unexpected end of expression", at);
        char c = s[pos];

        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            // strtod never sees a sign here, so it cannot overrun the token
            const char* begin = s.c_str() + pos;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin) fail("malformed number", at);
            if (!std::isfinite(v)) fail("number out of range", at);
            pos += static_cast<std::size_t>(end - begin);
            return expr_const(v);
        }

        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos;
            while (pos < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                ++pos;
            std::string name = s.substr(start, pos - start);
            if (name == "x") return expr_x();
            if (consume('(')) {
                if (!known_functions().count(name)) fail("unknown function '" + name + "'", start);
                ExprNode call;
                call.kind = expr_kind::function_call;
                call.name = name;
                call.children.push_back(parse_sum());
                while (consume(',')) call.children.push_back(parse_sum());
                if (!consume(')')) fail("expected ')'", pos);
                std::size_t want = (name == "pow") ? 2 : 1;
                if (call.children.size() != want)
                    fail("function '" + name + "' takes " + std::to_string(want) + " argument(s)",
                         start);
                return call;
            }
            if (!params.count(name)) fail("undeclared parameter '" + name + "'", start);
            ExprNode ref;
            ref.kind = expr_kind::parameter_ref;
            ref.name = name;
            return ref;
        }

        if (c == '(') {
            ++pos;
            ExprNode inner = parse_sum();
            if (!consume(')')) fail("expected ')'", pos);
            return inner;
        }

        fail("expected a number, 'x', a name, or '('", at);
    }
};

double apply_pow(double a, double b) {
    double v = std::pow(a, b);
    if (std::isnan(v)) throw numeric_error("domain error: pow(" + fmt17(a) + ", " + fmt17(b) + ")");
    if (!std::isfinite(v)) throw numeric_error("overflow in pow");
    return v;
}

// precedence levels used by the printer: + - = 1, * / = 2, unary - = 3, ^ = 4, atoms = 5
int prec(const ExprNode& e) {
    switch (e.kind) {
        case expr_kind::unary_op:
            return 3;
        case expr_kind::binary_op:
            if (e.name == "+" || e.name == "-") return 1;
            return e.name == "^" ? 4 : 2;
        default:
            return 5;
    }
}

void render(const ExprNode& e, std::string& out) {
    auto wrapped = [&out](const ExprNode& c, int min_prec) {
        if (prec(c) < min_prec) {
            out += '(';
            render(c, out);
            out += ')';
        } else {
            render(c, out);
        }
    };
    switch (e.kind) {
        case expr_kind::constant:
            if (e.value < 0) {
                out += '(' + fmt17(e.value) + ')';  // parser never produces these
            } else {
                out += fmt17(e.value);
            }
            return;
        case expr_kind::variable_x:
            out += 'x';
            return;
        case expr_kind::parameter_ref:
            out += e.name;
            return;
        case expr_kind::unary_op:
            out += '-';
            wrapped(e.children[0], 4);
            return;
        case expr_kind::binary_op:
            if (e.name == "^") {
                wrapped(e.children[0], 5);
                out += '^';
                wrapped(e.children[1], 3);
            } else {
                wrapped(e.children[0], prec(e));
                out += ' ';
                out += e.name;
                out += ' ';
                wrapped(e.children[1], prec(e) + 1);
            }
            return;
        case expr_kind::function_call:
            out += e.name;
            out += '(';
            for (std::size_t i = 0; i < e.children.size(); ++i) {
                if (i) out += ", ";
                render(e.children[i], out);
            }
            out += ')';
            return;
    }
}

}  // namespace

ExprNode parse_expr(const std::string& src, const std::set<std::string>& declared_params) {
    parser p{src, declared_params};
    ExprNode root = p.parse_sum();
    p.skip_ws();
    if (p.pos != src.size()) throw parse_error("unexpected trailing input", p.pos);
    return root;
}

double eval_expr(const ExprNode& e, double x, const std::map<std::string, double>& params) {
    switch (e.kind) {
        case expr_kind::constant:
            return e.value;
        case expr_kind::variable_x:
            return x;
        case expr_kind::parameter_ref: {
            auto it = params.find(e.name);
            if (it == params.end())
                throw validation_error("undeclared parameter '" + e.name + "'");
            return it->second;
        }
        case expr_kind::unary_op:
            return -eval_expr(e.children[0], x, params);
        case expr_kind::binary_op: {
            double a = eval_expr(e.children[0], x, params);
            double b = eval_expr(e.children[1], x, params);
            double v;
            if (e.name == "+")
                v = a + b;
            else if (e.name == "-")
                v = a - b;
            else if (e.name == "*")
                v = a * b;
            else if (e.name == "/") {
                if (b == 0) throw numeric_error("division by zero");
                v = a / b;
            } else {
                return apply_pow(a, b);
            }
            if (!std::isfinite(v)) throw numeric_error("overflow in '" + e.name + "'");
            return v;
        }
        case expr_kind::function_call: {
            double a = eval_expr(e.children[0], x, params);
            if (e.name == "pow") return apply_pow(a, eval_expr(e.children[1], x, params));
            double v;
            if (e.name == "exp")
                v = std::exp(a);
            else if (e.name == "ln") {
                if (a <= 0) throw numeric_error("domain error: ln(" + fmt17(a) + ")");
                v = std::log(a);
            } else if (e.name == "sqrt") {
                if (a < 0) throw numeric_error("domain error: sqrt(" + fmt17(a) + ")");
                v = std::sqrt(a);
            } else if (e.name == "abs")
                v = std::fabs(a);
            else if (e.name == "sin")
                v = std::sin(a);
            else if (e.name == "cos")
                v = std::cos(a);
            else
                throw validation_error("unknown function '" + e.name + "'");
            if (!std::isfinite(v)) throw numeric_error("overflow in " + e.name);
            return v;
        }
    }
    throw validation_error("corrupt expression node");
}

std::string to_string(const ExprNode& e) {
    std::string out;
    render(e, out);
    return out;
}

}  // namespace slz
