#pragma once

#include <cstddef>
#include <vector>

#include "xnet/error.hpp"
#include "xnet/eval.hpp"
#include "xnet/limits.hpp"
#include "xnet/tree.hpp"

namespace xnet {

// Per-node parameter-gradient estimates, indexed in preorder.
struct FiniteDiffGrads {
    std::vector<double> dw;
    std::vector<double> db;
};

namespace detail {

// Dataset loss (1/N) * sum_i 1/2 (y_i - yhat_i)^2, matching the per-sample
// half-squared training loss averaged over the batch.
inline double half_squared_mean_loss(const ExprTree& tree,
                                     const std::vector<std::vector<double>>& xs,
                                     const std::vector<double>& ys, const NumericLimits& lim)
{
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double d = ys[i] - predict(tree, xs[i], lim);
        s += 0.5 * d * d;
    }
    return s / static_cast<double>(xs.size());
}

} // namespace detail

// Central-difference gradient oracle: (L(p+h) - L(p-h)) / (2h) for every w
// and b. Unclamped by design — this is the reference the clamped analytic
// gradients are checked against away from guard boundaries.
inline FiniteDiffGrads finite_diff_grads(ExprTree& tree,
                                         const std::vector<std::vector<double>>& xs,
                                         const std::vector<double>& ys, double h = 1e-5,
                                         const NumericLimits& lim = {})
{
    if (h < 1e-7 || h > 1e-4)
        throw InvalidInput("finite_diff_grads: h outside [1e-7, 1e-4]");
    if (xs.size() != ys.size() || xs.empty())
        throw InvalidInput("finite_diff_grads: dataset shape mismatch");
    auto nodes = preorder_nodes(tree);
    FiniteDiffGrads g;
    g.dw.resize(nodes.size());
    g.db.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        double* params[2] = {&nodes[i]->w, &nodes[i]->b};
        double* slots[2] = {&g.dw[i], &g.db[i]};
        for (int p = 0; p < 2; ++p) {
            double saved = *params[p];
            *params[p] = saved + h;
            double lp = detail::half_squared_mean_loss(tree, xs, ys, lim);
            *params[p] = saved - h;
            double lm = detail::half_squared_mean_loss(tree, xs, ys, lim);
            *params[p] = saved;
            *slots[p] = (lp - lm) / (2.0 * h);
        }
    }
    return g;
}

} // namespace xnet
