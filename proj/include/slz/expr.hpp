#pragma once

// Tiny elementary-expression language for SL coefficient functions:
//   expr := term (("+"|"-") term)* ; term := factor (("*"|"/") factor)* ;
//   factor := ("-")? power ; power := atom ("^" factor)? ;
//   atom := number | "x" | ident | ident "(" expr ["," expr] ")" | "(" expr ")"
// Functions: exp, ln, sqrt, abs, sin, cos, pow (two arguments).

#include <map>
#include <set>
#include <string>
#include <vector>

#include "slz/common.hpp"

namespace slz {

enum class expr_kind { constant, variable_x, parameter_ref, unary_op, binary_op, function_call };

struct ExprNode {
    expr_kind kind = expr_kind::constant;
    double value = 0.0;              // payload for constant
    std::string name;                // operator symbol / function name / parameter name
    std::vector<ExprNode> children;  // operands

    bool operator==(const ExprNode&) const = default;
};

struct parse_error : validation_error {
    std::size_t offset;
    parse_error(const std::string& msg, std::size_t off)
        : validation_error(msg + " at offset " + std::to_string(off)), offset(off) {}
};

ExprNode parse_expr(const std::string& src, const std::set<std::string>& declared_params);
double eval_expr(const ExprNode& e, double x, const std::map<std::string, double>& params);
std::string to_string(const ExprNode& e);

inline ExprNode expr_const(double v) { return {expr_kind::constant, v, "", {}}; }
inline ExprNode expr_x() { return {expr_kind::variable_x, 0, "", {}}; }

}  // namespace slz
