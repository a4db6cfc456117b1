#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "xnet/error.hpp"
#include "xnet/limits.hpp"
#include "xnet/node_kind.hpp"
#include "xnet/tree.hpp"

namespace xnet {

// Activation value f(left[, right]) of a function node, domain-guarded and
// clamped to [-v_max, v_max]. The affine wrap w*f+b is applied by the caller
// (forward); leaves have no activation and never reach here. When `guard` is
// given it is set (never cleared) if any rail engaged: denominator floor,
// domain floor, or a value-changing output clamp.
inline double eval_node(const NodeKind& kind, double left, std::optional<double> right,
                        const NumericLimits& lim = {}, bool* guard = nullptr)
{
    if (kind.op == Op::Var)
        throw ContractViolation("eval_node called on a variable node");
    if (is_binary(kind) != right.has_value())
        throw ContractViolation("eval_node: right operand present iff kind is binary");
    double r = right.value_or(0.0);
    double f = 0.0;
    switch (kind.op) {
    case Op::Add:
        f = left + r;
        break;
    case Op::Sub:
        f = left - r;
        break;
    case Op::Mul:
        f = left * r;
        break;
    case Op::Div:
        if (guard && std::fabs(r) < lim.div_eps)
            *guard = true;
        f = left / guard_denominator(r, lim);
        break;
    case Op::Sin:
        f = std::sin(left);
        break;
    case Op::Cos:
        f = std::cos(left);
        break;
    case Op::Log:
        if (guard && left < lim.domain_eps)
            *guard = true;
        f = std::log(guard_domain(left, lim));
        break;
    case Op::Sqrt:
        if (guard && left < lim.domain_eps)
            *guard = true;
        f = std::sqrt(guard_domain(left, lim));
        break;
    case Op::Exp:
        f = std::exp(left);
        break;
    case Op::Relu:
        f = left > 0.0 ? left : 0.0;
        break;
    case Op::Sigmoid:
        f = 1.0 / (1.0 + std::exp(-left));
        break;
    case Op::Var:
        break;
    }
    if (guard && (std::isnan(f) || std::fabs(f) >= lim.v_max))
        *guard = true; // NaN replacement or reaching the magnitude rail
    return clamp_output(f, lim);
}

namespace detail {

// f-value of a node given already-computed child outputs (feature value for
// leaves). Function-node results arrive clamped from eval_node; the raw
// feature passes through so the affine wrap sees it untouched.
inline double node_f_value(const Node& n, const std::vector<double>& x, double l, double r,
                           const NumericLimits& lim)
{
    if (n.kind.op == Op::Var)
        return x[static_cast<std::size_t>(n.kind.var)];
    if (is_binary(n.kind))
        return eval_node(n.kind, l, r, lim);
    return eval_node(n.kind, l, std::nullopt, lim);
}

inline double forward_node(Node* n, const std::vector<double>& x, const NumericLimits& lim)
{
    double l = 0.0, r = 0.0;
    if (n->left)
        l = forward_node(n->left.get(), x, lim);
    if (n->right)
        r = forward_node(n->right.get(), x, lim);
    double f = node_f_value(*n, x, l, r, lim);
    n->e_cached = clamp_output(n->w * f + n->b, lim);
    return n->e_cached;
}

// Same evaluation without touching e_cached; used for what-if scans on a
// tree whose caches must stay intact.
inline double eval_subtree_const(const Node* n, const std::vector<double>& x,
                                 const NumericLimits& lim)
{
    double l = 0.0, r = 0.0;
    if (n->left)
        l = eval_subtree_const(n->left.get(), x, lim);
    if (n->right)
        r = eval_subtree_const(n->right.get(), x, lim);
    double f = node_f_value(*n, x, l, r, lim);
    return clamp_output(n->w * f + n->b, lim);
}

inline double eval_subtree_checked(const Node* n, const std::vector<double>& x,
                                   const NumericLimits& lim, bool& guard)
{
    double l = 0.0, r = 0.0;
    if (n->left)
        l = eval_subtree_checked(n->left.get(), x, lim, guard);
    if (n->right)
        r = eval_subtree_checked(n->right.get(), x, lim, guard);
    double f;
    if (n->kind.op == Op::Var)
        f = x[static_cast<std::size_t>(n->kind.var)];
    else if (is_binary(n->kind))
        f = eval_node(n->kind, l, r, lim, &guard);
    else
        f = eval_node(n->kind, l, std::nullopt, lim, &guard);
    double e = n->w * f + n->b;
    if (std::isnan(e) || std::fabs(e) >= lim.v_max)
        guard = true;
    return clamp_output(e, lim);
}

} // namespace detail

// Evaluate the tree on one sample, caching every node's output.
inline double forward(ExprTree& tree, const std::vector<double>& x, const NumericLimits& lim = {})
{
    if (!tree.root)
        throw ContractViolation("forward on an empty tree");
    if (static_cast<int>(x.size()) < tree.input_dim)
        throw InvalidInput("sample has fewer features than the tree's input_dim");
    double y = detail::forward_node(tree.root.get(), x, lim);
    tree.cache_valid = true;
    return y;
}

// Evaluate without mutating caches.
inline double predict(const ExprTree& tree, const std::vector<double>& x,
                      const NumericLimits& lim = {})
{
    if (!tree.root)
        throw ContractViolation("predict on an empty tree");
    if (static_cast<int>(x.size()) < tree.input_dim)
        throw InvalidInput("sample has fewer features than the tree's input_dim");
    return detail::eval_subtree_const(tree.root.get(), x, lim);
}

// Evaluate without mutating caches, additionally reporting whether any
// numeric rail engaged anywhere in the tree for this sample. Guards exist to
// keep training alive through bad intermediate states; a model whose fit
// depends on them is an artifact of the guard constants, and callers use
// this to refuse such fits.
inline double predict_checked(const ExprTree& tree, const std::vector<double>& x, bool& guard,
                              const NumericLimits& lim = {})
{
    if (!tree.root)
        throw ContractViolation("predict on an empty tree");
    if (static_cast<int>(x.size()) < tree.input_dim)
        throw InvalidInput("sample has fewer features than the tree's input_dim");
    return detail::eval_subtree_checked(tree.root.get(), x, lim, guard);
}

inline std::vector<double> predict_all(const ExprTree& tree,
                                       const std::vector<std::vector<double>>& xs,
                                       const NumericLimits& lim = {})
{
    std::vector<double> out;
    out.reserve(xs.size());
    for (const auto& x : xs)
        out.push_back(predict(tree, x, lim));
    return out;
}

// Mean squared error (1/N) * sum (y - yhat)^2.
inline double mse_loss(const std::vector<double>& y, const std::vector<double>& yhat)
{
    if (y.size() != yhat.size())
        throw InvalidInput("mse_loss: length mismatch");
    if (y.empty())
        throw InvalidInput("mse_loss: empty input");
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double d = y[i] - yhat[i];
        s += d * d;
    }
    return s / static_cast<double>(y.size());
}

// Coefficient of determination, 1 - SS_res / SS_tot.
inline double r_squared(const std::vector<double>& y, const std::vector<double>& yhat)
{
    if (y.size() != yhat.size())
        throw InvalidInput("r_squared: length mismatch");
    if (y.empty())
        throw InvalidInput("r_squared: empty input");
    double mean = 0.0;
    for (double v : y)
        mean += v;
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double res = y[i] - yhat[i];
        double tot = y[i] - mean;
        ss_res += res * res;
        ss_tot += tot * tot;
    }
    if (ss_tot == 0.0)
        throw UndefinedDenominator("r_squared undefined for a constant target");
    return 1.0 - ss_res / ss_tot;
}

} // namespace xnet
