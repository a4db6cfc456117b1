#pragma once

// Independent reference evaluation used only by tests: recomputes tree
// outputs with the same guard semantics as the library but structured
// differently (explicit recursion over a switch), and reports whether any
// guard or clamp fired along the way.

#include <cmath>
#include <vector>

#include "xnet/limits.hpp"
#include "xnet/tree.hpp"

namespace xnet_test {

struct RefResult {
    double value = 0.0;
    bool guard_hit = false;
};

inline RefResult ref_eval(const xnet::Node* n, const std::vector<double>& x,
                          const xnet::NumericLimits& lim)
{
    using xnet::Op;
    RefResult out;
    double f = 0.0;
    if (n->kind.op == Op::Var) {
        f = x[static_cast<std::size_t>(n->kind.var)];
    } else {
        RefResult l = ref_eval(n->left.get(), x, lim);
        RefResult r = n->right ? ref_eval(n->right.get(), x, lim) : RefResult{};
        out.guard_hit = l.guard_hit || r.guard_hit;
        switch (n->kind.op) {
        case Op::Add: f = l.value + r.value; break;
        case Op::Sub: f = l.value - r.value; break;
        case Op::Mul: f = l.value * r.value; break;
        case Op::Div:
            if (std::fabs(r.value) < lim.div_eps) {
                out.guard_hit = true;
                f = l.value / (r.value < 0.0 ? -lim.div_eps : lim.div_eps);
            } else {
                f = l.value / r.value;
            }
            break;
        case Op::Sin: f = std::sin(l.value); break;
        case Op::Cos: f = std::cos(l.value); break;
        case Op::Log:
            if (l.value < lim.domain_eps)
                out.guard_hit = true;
            f = std::log(std::max(l.value, lim.domain_eps));
            break;
        case Op::Sqrt:
            if (l.value < lim.domain_eps)
                out.guard_hit = true;
            f = std::sqrt(std::max(l.value, lim.domain_eps));
            break;
        case Op::Exp: f = std::exp(l.value); break;
        case Op::Relu: f = l.value > 0.0 ? l.value : 0.0; break;
        case Op::Sigmoid: f = 1.0 / (1.0 + std::exp(-l.value)); break;
        case Op::Var: break;
        }
    }
    if (std::isnan(f)) {
        out.guard_hit = true;
        f = lim.v_max;
    } else if (std::fabs(f) >= lim.v_max) {
        out.guard_hit = true;
        f = std::copysign(lim.v_max, f);
    }
    double e = n->w * f + n->b;
    if (std::isnan(e)) {
        out.guard_hit = true;
        e = lim.v_max;
    } else if (std::fabs(e) >= lim.v_max) {
        out.guard_hit = true;
        e = std::copysign(lim.v_max, e);
    }
    out.value = e;
    return out;
}

inline RefResult ref_eval(const xnet::ExprTree& tree, const std::vector<double>& x,
                          const xnet::NumericLimits& lim = {})
{
    return ref_eval(tree.root.get(), x, lim);
}

} // namespace xnet_test
