#pragma once

#include <cstdio>
#include <string>

#include "xnet/error.hpp"
#include "xnet/node_kind.hpp"
#include "xnet/tree.hpp"

namespace xnet {

// precision < 0 selects full-precision constants (%.17g round-trip form).
inline constexpr int kFullPrecision = -1;

namespace detail {

inline std::string format_constant(double v, int precision)
{
    char buf[64];
    if (precision < 0)
        std::snprintf(buf, sizeof(buf), "%.17g", v);
    else
        std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

inline std::string render_node(const Node* n, int precision);

// Core f(children) expression, before the affine wrap. Binary nodes carry
// their own parentheses so precedence never depends on context.
inline std::string render_core(const Node* n, int precision)
{
    switch (n->kind.op) {
    case Op::Var:
        return kind_name(n->kind);
    case Op::Add:
        return "(" + render_node(n->left.get(), precision) + " + " +
               render_node(n->right.get(), precision) + ")";
    case Op::Sub:
        return "(" + render_node(n->left.get(), precision) + " - " +
               render_node(n->right.get(), precision) + ")";
    case Op::Mul:
        return "(" + render_node(n->left.get(), precision) + "*" +
               render_node(n->right.get(), precision) + ")";
    case Op::Div:
        return "(" + render_node(n->left.get(), precision) + "/" +
               render_node(n->right.get(), precision) + ")";
    default:
        return std::string(kind_name(n->kind)) + "(" + render_node(n->left.get(), precision) + ")";
    }
}

// Affine wrap: w*core + b, with w == 1 eliding the factor and b == 0 eliding
// the addend (exact comparisons; the stored parameters are authoritative).
inline std::string render_affine(const Node* n, int precision)
{
    std::string s = render_core(n, precision);
    if (n->w != 1.0)
        s = format_constant(n->w, precision) + "*" + s;
    if (n->b != 0.0) {
        if (n->b < 0.0)
            s += " - " + format_constant(-n->b, precision);
        else
            s += " + " + format_constant(n->b, precision);
    }
    return s;
}

// Nodes whose affine wrap adds terms get parenthesized when embedded in a
// parent expression; the root stays bare.
inline std::string render_node(const Node* n, int precision)
{
    std::string s = render_affine(n, precision);
    if (n->w != 1.0 || n->b != 0.0)
        return "(" + s + ")";
    return s;
}

} // namespace detail

inline std::string to_formula(const ExprTree& tree, int precision = 2)
{
    if (!tree.root)
        throw ContractViolation("to_formula on an empty tree");
    return detail::render_affine(tree.root.get(), precision);
}

} // namespace xnet
