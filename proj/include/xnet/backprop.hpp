#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "xnet/error.hpp"
#include "xnet/eval.hpp"
#include "xnet/limits.hpp"
#include "xnet/node_kind.hpp"
#include "xnet/tree.hpp"

namespace xnet {

// Gradients of the per-sample loss 1/2 (y - yhat)^2, indexed in preorder.
// dE[i] is the gradient w.r.t. node i's output.
struct GradientSet {
    std::vector<double> dw;
    std::vector<double> db;
    std::vector<double> dE;
};

// Loss history and step-size settings for the adaptive step rule.
struct StepState {
    double loss_prev = 0.0; // older epoch loss
    double loss_curr = 0.0; // latest epoch loss
    double a = 10.0;        // step-range divisor
    double alpha_fixed = 0.01;
    bool ada_enabled = true;
};

// alpha = tanh(exp(-|loss_prev - loss_curr|)) / a. Falls back to the fixed
// step when adaptation is off or the history is unusable.
inline double ada_alpha(const StepState& state)
{
    if (state.a <= 0.0 || state.alpha_fixed <= 0.0)
        throw ContractViolation("ada_alpha: a and alpha_fixed must be positive");
    if (!state.ada_enabled)
        return state.alpha_fixed;
    if (!std::isfinite(state.loss_prev) || !std::isfinite(state.loss_curr))
        return state.alpha_fixed;
    double delta = std::fabs(state.loss_prev - state.loss_curr);
    return std::tanh(std::exp(-delta)) / state.a;
}

namespace detail {

// d f / d child at the cached child outputs, with the same guards the
// forward pass applied. Returns (df/dleft, df/dright).
inline void activation_partials(const Node& n, const NumericLimits& lim, double& dl, double& dr)
{
    double l = n.left ? n.left->e_cached : 0.0;
    double r = n.right ? n.right->e_cached : 0.0;
    dl = 0.0;
    dr = 0.0;
    switch (n.kind.op) {
    case Op::Add:
        dl = 1.0;
        dr = 1.0;
        break;
    case Op::Sub:
        dl = 1.0;
        dr = -1.0;
        break;
    case Op::Mul:
        dl = r;
        dr = l;
        break;
    case Op::Div: {
        double rg = guard_denominator(r, lim);
        dl = 1.0 / rg;
        dr = -l / (rg * rg);
        break;
    }
    case Op::Sin:
        dl = std::cos(l);
        break;
    case Op::Cos:
        dl = -std::sin(l);
        break;
    case Op::Log:
        dl = 1.0 / guard_domain(l, lim);
        break;
    case Op::Sqrt:
        dl = 0.5 / std::sqrt(guard_domain(l, lim));
        break;
    case Op::Exp:
        dl = clamp_output(std::exp(l), lim);
        break;
    case Op::Relu:
        dl = l > 0.0 ? 1.0 : 0.0;
        break;
    case Op::Sigmoid: {
        double s = 1.0 / (1.0 + std::exp(-l));
        dl = s * (1.0 - s);
        break;
    }
    case Op::Var:
        break;
    }
}

// f(children) recovered from caches; the value dw multiplies.
inline double cached_f_value(const Node& n, const std::vector<double>& x, const NumericLimits& lim)
{
    if (n.kind.op == Op::Var)
        return x[static_cast<std::size_t>(n.kind.var)];
    double l = n.left ? n.left->e_cached : 0.0;
    if (is_binary(n.kind))
        return eval_node(n.kind, l, n.right->e_cached, lim);
    return eval_node(n.kind, l, std::nullopt, lim);
}

inline void backward_node(const Node* n, double dE_raw, const std::vector<double>& x,
                          const NumericLimits& lim, std::size_t& idx, GradientSet& out)
{
    std::size_t i = idx++;
    double f = cached_f_value(*n, x, lim);
    // Raw chain-rule values propagate; only the stored per-quantity
    // gradients are clamped.
    out.dE[i] = clamp_gradient(dE_raw, lim);
    out.dw[i] = clamp_gradient(dE_raw * f, lim);
    out.db[i] = clamp_gradient(dE_raw, lim);
    if (n->kind.op == Op::Var)
        return;
    double dl = 0.0, dr = 0.0;
    activation_partials(*n, lim, dl, dr);
    backward_node(n->left.get(), dE_raw * n->w * dl, x, lim, idx, out);
    if (n->right)
        backward_node(n->right.get(), dE_raw * n->w * dr, x, lim, idx, out);
}

} // namespace detail

// Reverse-mode gradients for one sample. Requires e_cached from a forward
// pass on the same (tree, x); root dE = yhat - y.
inline GradientSet backward(const ExprTree& tree, const std::vector<double>& x, double y,
                            const NumericLimits& lim = {})
{
    if (!tree.root)
        throw ContractViolation("backward on an empty tree");
    if (!tree.cache_valid)
        throw ContractViolation("backward before forward: node outputs are stale");
    if (static_cast<int>(x.size()) < tree.input_dim)
        throw InvalidInput("sample has fewer features than the tree's input_dim");
    auto nodes = preorder_nodes(tree);
    GradientSet g;
    g.dw.resize(nodes.size());
    g.db.resize(nodes.size());
    g.dE.resize(nodes.size());
    double yhat = tree.root->e_cached;
    std::size_t idx = 0;
    detail::backward_node(tree.root.get(), yhat - y, x, lim, idx, g);
    return g;
}

// w <- w - alpha*dw, b <- b - alpha*db at every node; topology untouched.
inline void sgd_step_params(ExprTree& tree, const GradientSet& grads, double alpha)
{
    auto nodes = preorder_nodes(tree);
    if (nodes.size() != grads.dw.size())
        throw ContractViolation("sgd_step_params: gradient set does not match tree");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        nodes[i]->w -= alpha * grads.dw[i];
        nodes[i]->b -= alpha * grads.db[i];
    }
    tree.cache_valid = false;
}

// Descent targets for node outputs: E_new[i] = e_cached[i] - alpha*dE[i].
// Does not mutate the tree; the result drives activation selection.
inline std::vector<double> sgd_step_outputs(const ExprTree& tree, const GradientSet& grads,
                                            double alpha)
{
    auto nodes = preorder_nodes(tree);
    if (nodes.size() != grads.dE.size())
        throw ContractViolation("sgd_step_outputs: gradient set does not match tree");
    if (!tree.cache_valid)
        throw ContractViolation("sgd_step_outputs before forward: node outputs are stale");
    std::vector<double> e_new(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
        e_new[i] = nodes[i]->e_cached - alpha * grads.dE[i];
    return e_new;
}

} // namespace xnet
