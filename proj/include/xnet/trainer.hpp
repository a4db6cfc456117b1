#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "xnet/backprop.hpp"
#include "xnet/dataset.hpp"
#include "xnet/error.hpp"
#include "xnet/eval.hpp"
#include "xnet/evolve.hpp"
#include "xnet/formula.hpp"
#include "xnet/limits.hpp"
#include "xnet/tree.hpp"

namespace xnet {

struct TrainConfig {
    int max_epochs = 2000;
    double target_r2 = 0.99;
    int restarts = 10;
    bool no_parameter_mode = false;
    int micro_iterations = 1; // parameter/output updates per sample visit
    SelectionConfig selection;
    StepState step;
    NumericLimits limits;
    unsigned long long seed = 0;

    void validate() const
    {
        if (max_epochs < 1 || restarts < 1 || micro_iterations < 1)
            throw ConfigError("max_epochs, restarts, micro_iterations must be >= 1");
        if (!(target_r2 > 0.0 && target_r2 <= 1.0))
            throw ConfigError("target_r2 must be in (0, 1]");
        if (step.a <= 0.0 || step.alpha_fixed <= 0.0)
            throw ConfigError("step sizes must be positive");
        selection.validate();
        limits.validate();
    }
};

struct RunReport {
    double r2_train = -std::numeric_limits<double>::infinity();
    std::optional<double> r2_test;
    double mse_train = std::numeric_limits<double>::infinity();
    int operator_nodes = 0;
    int parameters = 0;
    int epochs_used = 0;
    std::string formula;
    ExprTree best_tree;
    unsigned long long seed = 0;
    double wall_time_seconds = 0.0;
    bool no_parameter_mode = false;
    int restarts_used = 0;
};

// Keep the better of (current, best) by R-squared; ties go to current, so an
// equally good newer structure wins. The stored tree is a deep copy.
struct ScoredTree {
    ExprTree tree;
    double r2 = -std::numeric_limits<double>::infinity();
};

inline ScoredTree save_best(const ExprTree& current, double current_r2, const ScoredTree& best)
{
    if (!best.tree.root || current_r2 >= best.r2)
        return {current.clone(), current_r2};
    return {best.tree.clone(), best.r2};
}

namespace detail {

inline void assert_identity_params(const ExprTree& tree)
{
    for (const Node* n : preorder_nodes(tree))
        if (n->w != 1.0 || n->b != 0.0)
            throw ContractViolation("parameter-free mode: found a node with w != 1 or b != 0");
}

// Training-set R-squared, or nothing when any sample's evaluation engaged a
// numeric rail. Guard-assisted interpolants can thread every training point
// while being artifacts of the clamp constants, so they may keep training
// but are never crowned as the best model.
inline std::optional<double> clean_r2(const ExprTree& tree, const Dataset& ds,
                                      const NumericLimits& lim)
{
    bool guard = false;
    std::vector<double> yhat;
    yhat.reserve(ds.n());
    for (const auto& x : ds.x)
        yhat.push_back(predict_checked(tree, x, guard, lim));
    if (guard)
        return std::nullopt;
    return r_squared(ds.y, yhat);
}

struct EpochOutcome {
    double mean_loss = 0.0;
    double r2 = 0.0;
};

// Parameter-only pass: per-sample SGD on (w, b), no reselection. Returns the
// epoch-mean loss. Used by the polish tail, where structure is already fixed.
inline double polish_epoch(ExprTree& tree, const Dataset& ds, const TrainConfig& cfg, double alpha,
                           std::vector<std::size_t>& order, std::mt19937_64& rng)
{
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t i : order) {
        double yhat = forward(tree, ds.x[i], cfg.limits);
        double d = yhat - ds.y[i];
        loss_sum += 0.5 * d * d;
        GradientSet grads = backward(tree, ds.x[i], ds.y[i], cfg.limits);
        sgd_step_params(tree, grads, alpha);
    }
    return loss_sum / static_cast<double>(ds.n());
}

// One pass over the samples: per-sample forward/backward, parameter steps on
// ordinary iterations, an output step plus kind reselection on every ite-th
// step. step_counter is global across epochs.
inline double run_epoch(ExprTree& tree, const Dataset& ds, const TrainConfig& cfg, double alpha,
                        long long& step_counter, std::vector<std::size_t>& order,
                        std::mt19937_64& rng)
{
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    long long visits = 0;
    for (std::size_t i : order) {
        for (int k = 0; k < cfg.micro_iterations; ++k) {
            double yhat = forward(tree, ds.x[i], cfg.limits);
            double d = yhat - ds.y[i];
            loss_sum += 0.5 * d * d;
            ++visits;
            GradientSet grads = backward(tree, ds.x[i], ds.y[i], cfg.limits);
            if (step_counter % cfg.selection.ite != 0) {
                if (!cfg.no_parameter_mode)
                    sgd_step_params(tree, grads, alpha);
            } else {
                // Output steps exist only to drive reselection: the descent
                // targets are never written back, so they take the full
                // first-order correction (at the root that is y itself)
                // rather than the parameter step size, which would keep
                // every target inside the keep-current band.
                auto e_new = sgd_step_outputs(tree, grads, 1.0);
                update_all_kinds(tree, e_new, ds.x[i], cfg.selection, cfg.limits, &ds.x);
            }
            if (cfg.no_parameter_mode)
                assert_identity_params(tree);
            ++step_counter;
        }
    }
    return loss_sum / static_cast<double>(visits);
}

inline RunReport run_single(const Dataset& ds, const TrainConfig& cfg, unsigned long long seed,
                            bool random_init)
{
    std::mt19937_64 rng(seed);
    int dim = static_cast<int>(ds.d());
    ExprTree tree = random_init
                        ? random_init_tree(rng, std::min(3, cfg.selection.max_depth), dim)
                        : init_default_tree(dim);
    ScoredTree best;
    // Seed unconditionally so the restore point always exists; any clean
    // epoch later replaces an initial tree that happened to touch a rail.
    best = save_best(tree, r_squared(ds.y, predict_all(tree, ds.x, cfg.limits)), best);

    std::vector<std::size_t> order(ds.n());
    std::iota(order.begin(), order.end(), 0);

    StepState step = cfg.step;
    double alpha = step.alpha_fixed;
    int losses_seen = 0;
    double best_epoch_loss = std::numeric_limits<double>::infinity();
    int stagnation = 0;
    int kick_escalation = 0;
    long long step_counter = 1;
    int grace = 0; // epochs a kicked lineage may run before elitism resumes

    RunReport rep;
    rep.seed = seed;
    rep.no_parameter_mode = cfg.no_parameter_mode;

    // The tail tenth of the epoch budget is reserved for a parameter-only
    // polish of the best structure: the plateau-seeking step schedule is good
    // at escaping basins but never anneals, so winning structures tend to
    // park a hair below their attainable fit. Parameter-free mode has no
    // constants to polish and keeps the whole budget for structure search.
    int polish_budget = cfg.no_parameter_mode ? 0 : cfg.max_epochs / 10;
    int search_epochs = cfg.max_epochs - polish_budget;

    for (int epoch = 1; epoch <= search_epochs; ++epoch) {
        // Each epoch refines the best structure found so far, except inside
        // the grace window after a stagnation kick, when the perturbed
        // lineage may develop before elitism resumes.
        if (grace > 0)
            --grace;
        else
            tree = best.tree.clone();

        double epoch_loss = run_epoch(tree, ds, cfg, alpha, step_counter, order, rng);
        if (auto r2 = clean_r2(tree, ds, cfg.limits))
            best = save_best(tree, *r2, best);
        rep.epochs_used = epoch;

        // Step-size adaptation from the epoch-mean loss history.
        step.loss_prev = step.loss_curr;
        step.loss_curr = epoch_loss;
        ++losses_seen;
        alpha = losses_seen >= 2 ? ada_alpha(step) : step.alpha_fixed;

        // Stagnation: no relative improvement over the best epoch loss yet.
        if (epoch_loss < best_epoch_loss - 1e-9 * std::max(best_epoch_loss, 1e-12)) {
            best_epoch_loss = epoch_loss;
            stagnation = 0;
            kick_escalation = 0;
        } else {
            ++stagnation;
        }

        if (best.r2 >= cfg.target_r2)
            break;

        if (stagnation >= cfg.selection.stagnation_limit) {
            // Consecutive fruitless kicks escalate: each episode perturbs one
            // more node (up to three), since a basin that survived a one-node
            // kick usually needs a coordinated change to escape.
            int kicks = 1 + std::min(kick_escalation, 2);
            for (int k = 0; k < kicks; ++k)
                perturb_on_stagnation(tree, cfg.selection.stagnation_limit, cfg.selection, rng);
            stagnation = 0;
            ++kick_escalation;
            grace = 3;
            if (cfg.no_parameter_mode)
                assert_identity_params(tree);
        }
    }

    if (polish_budget > 0 && best.r2 < cfg.target_r2) {
        tree = best.tree.clone();
        double ap = step.alpha_fixed;
        double best_loss = std::numeric_limits<double>::infinity();
        int bad = 0; // SGD epoch losses are noisy; give the step some patience
        for (int t = 0; t < polish_budget; ++t) {
            double l = polish_epoch(tree, ds, cfg, ap, order, rng);
            if (auto r2 = clean_r2(tree, ds, cfg.limits))
                best = save_best(tree, *r2, best);
            ++rep.epochs_used;
            if (best.r2 >= cfg.target_r2)
                break;
            if (l < best_loss) {
                best_loss = l;
                bad = 0;
            } else if (++bad >= 3) {
                // Backtrack: restore the best tree and halve the step.
                bad = 0;
                ap *= 0.5;
                tree = best.tree.clone();
                if (ap < 1e-7)
                    break;
            }
        }
    }

    rep.best_tree = best.tree.clone();
    rep.r2_train = best.r2;
    rep.mse_train = mse_loss(ds.y, predict_all(rep.best_tree, ds.x, cfg.limits));
    NodeCounts counts = count_nodes(rep.best_tree);
    rep.operator_nodes = counts.operator_count;
    rep.parameters = counts.parameter_count;
    rep.formula = to_formula(rep.best_tree);
    return rep;
}

} // namespace detail

// Full training: up to cfg.restarts independent runs seeded seed, seed+1, ...
// Returns the best run by training R-squared; stops early once a restart
// reaches the target.
inline RunReport train(const Dataset& ds, const TrainConfig& cfg)
{
    cfg.validate();
    ds.validate();
    bool constant_y = std::all_of(ds.y.begin(), ds.y.end(),
                                  [&](double v) { return v == ds.y.front(); });
    if (constant_y)
        throw ConfigError("target column is constant; R-squared is undefined");

    auto t0 = std::chrono::steady_clock::now();

    // Fit against the standardized target so gradient magnitudes, the loss
    // fed to the step-size schedule, and the descent targets the reselection
    // matches against are all scale-free. The affine is folded back into the
    // root's (w, b) afterwards, which is exact: predictions, the reported
    // formula, and R-squared are in raw units. R-squared itself is invariant
    // under a common affine map of target and prediction, so the in-loop
    // target check is unaffected. Parameter-free mode fits raw targets, as
    // folding would break the all-(1,0) invariant.
    double y_mean = 0.0, y_sd = 1.0;
    Dataset fit_ds = ds;
    if (!cfg.no_parameter_mode) {
        y_mean = std::accumulate(ds.y.begin(), ds.y.end(), 0.0) / static_cast<double>(ds.n());
        double ss = 0.0;
        for (double v : ds.y)
            ss += (v - y_mean) * (v - y_mean);
        y_sd = std::sqrt(ss / static_cast<double>(ds.n()));
        for (double& v : fit_ds.y)
            v = (v - y_mean) / y_sd;
    }

    RunReport best;
    int used = 0;
    for (int r = 0; r < cfg.restarts; ++r) {
        // The first restart starts from the canonical square-plus-sine tree;
        // the rest draw random structure so they explore independent basins.
        RunReport rep = detail::run_single(fit_ds, cfg, cfg.seed + static_cast<unsigned long long>(r),
                                           r > 0);
        ++used;
        if (!best.best_tree.root || rep.r2_train > best.r2_train)
            best = std::move(rep);
        if (best.r2_train >= cfg.target_r2)
            break;
    }
    if (!cfg.no_parameter_mode) {
        Node* root = best.best_tree.root.get();
        root->w *= y_sd;
        root->b = y_sd * root->b + y_mean;
        best.best_tree.cache_valid = false;
        best.r2_train = r_squared(ds.y, predict_all(best.best_tree, ds.x, cfg.limits));
        best.mse_train = mse_loss(ds.y, predict_all(best.best_tree, ds.x, cfg.limits));
        best.formula = to_formula(best.best_tree);
    }
    best.restarts_used = used;
    best.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return best;
}

// Training with (w, b) pinned at (1, 0): only output steps, reselection, and
// stagnation kicks drive the fit.
inline RunReport train_no_parameter(const Dataset& ds, TrainConfig cfg)
{
    cfg.no_parameter_mode = true;
    return train(ds, cfg);
}

struct ClassifierReport {
    double accuracy = 0.0;
    int n_classes = 0;
    std::vector<RunReport> per_class;
    int operator_nodes_total = 0;
    int parameters_total = 0;
    double wall_time_seconds = 0.0;
};

// One tree per class trained against one-hot targets; prediction is the
// argmax over class-tree outputs (ties to the lower class index). Accuracy
// is measured on the held-out side of a seeded random split.
inline ClassifierReport train_classifier(const Dataset& ds, int n_classes, const TrainConfig& cfg,
                                         double train_fraction = 0.75)
{
    cfg.validate();
    ds.validate();
    if (n_classes < 2)
        throw ConfigError("classification needs at least 2 classes");
    for (double v : ds.y) {
        double r = std::round(v);
        if (std::fabs(v - r) > 1e-9 || r < 0 || r >= n_classes)
            throw ConfigError("labels must be integers in [0, n_classes)");
    }
    bool single = std::all_of(ds.y.begin(), ds.y.end(),
                              [&](double v) { return v == ds.y.front(); });
    if (single)
        throw ConfigError("dataset holds a single class");

    auto t0 = std::chrono::steady_clock::now();
    auto [train_ds, test_ds] = split(ds, train_fraction, SplitMode::Random, cfg.seed);

    ClassifierReport rep;
    rep.n_classes = n_classes;
    for (int c = 0; c < n_classes; ++c) {
        Dataset one_hot = train_ds;
        for (std::size_t i = 0; i < one_hot.y.size(); ++i)
            one_hot.y[i] = one_hot.y[i] == static_cast<double>(c) ? 1.0 : 0.0;
        TrainConfig class_cfg = cfg;
        class_cfg.seed = cfg.seed + static_cast<unsigned long long>(c) * 1000003ULL;
        RunReport r = train(one_hot, class_cfg);
        rep.operator_nodes_total += r.operator_nodes;
        rep.parameters_total += r.parameters;
        rep.per_class.push_back(std::move(r));
    }

    std::size_t correct = 0;
    for (std::size_t i = 0; i < test_ds.n(); ++i) {
        int arg = 0;
        double top = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < n_classes; ++c) {
            double v = predict(rep.per_class[static_cast<std::size_t>(c)].best_tree, test_ds.x[i],
                               cfg.limits);
            if (v > top) {
                top = v;
                arg = c;
            }
        }
        if (arg == static_cast<int>(std::llround(test_ds.y[i])))
            ++correct;
    }
    rep.accuracy = static_cast<double>(correct) / static_cast<double>(test_ds.n());
    rep.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

} // namespace xnet
