#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <random>
#include <vector>

#include "xnet/error.hpp"
#include "xnet/eval.hpp"
#include "xnet/limits.hpp"
#include "xnet/node_kind.hpp"
#include "xnet/tree.hpp"

namespace xnet {

struct SelectionConfig {
    double accept_threshold = 0.01; // residual must be strictly below this
    int ite = 50;                   // selection runs every ite-th step
    int stagnation_limit = 20;      // epochs without improvement before a random kick
    int max_depth = 10;
    unsigned long long rng_seed = 0;

    void validate() const
    {
        if (accept_threshold <= 0.0 || ite < 1 || stagnation_limit < 1 || max_depth < 1)
            throw ConfigError("selection config out of range");
    }
};

// Which child a unary rewrite of a binary node keeps.
enum class Side { None, Left, Right };

struct CandidateScore {
    NodeKind kind;
    double value = 0.0;
    double residual = 0.0;
    bool admissible = true;
};

// Candidate outputs in canonical library order, evaluated at the given child
// outputs. Binary candidates appear only when e_right is present. Log and
// sqrt evaluate guarded but are flagged inadmissible on a non-positive input.
inline std::vector<CandidateScore> candidate_outputs(double e_left, std::optional<double> e_right,
                                                     const std::vector<double>& x,
                                                     const NumericLimits& lim = {})
{
    std::vector<CandidateScore> out;
    if (e_right) {
        out.push_back({NodeKind::add(), eval_node(NodeKind::add(), e_left, e_right, lim), 0.0, true});
        out.push_back({NodeKind::sub(), eval_node(NodeKind::sub(), e_left, e_right, lim), 0.0, true});
        out.push_back({NodeKind::mul(), eval_node(NodeKind::mul(), e_left, e_right, lim), 0.0, true});
        out.push_back({NodeKind::div(), eval_node(NodeKind::div(), e_left, e_right, lim), 0.0, true});
    }
    out.push_back({NodeKind::sin(), eval_node(NodeKind::sin(), e_left, std::nullopt, lim), 0.0, true});
    out.push_back({NodeKind::cos(), eval_node(NodeKind::cos(), e_left, std::nullopt, lim), 0.0, true});
    out.push_back({NodeKind::log(), eval_node(NodeKind::log(), e_left, std::nullopt, lim), 0.0,
                   e_left > 0.0});
    out.push_back({NodeKind::sqrt(), eval_node(NodeKind::sqrt(), e_left, std::nullopt, lim), 0.0,
                   e_left > 0.0});
    out.push_back({NodeKind::exp(), eval_node(NodeKind::exp(), e_left, std::nullopt, lim), 0.0, true});
    out.push_back({NodeKind::relu(), eval_node(NodeKind::relu(), e_left, std::nullopt, lim), 0.0, true});
    out.push_back({NodeKind::sigmoid(), eval_node(NodeKind::sigmoid(), e_left, std::nullopt, lim),
                   0.0, true});
    for (std::size_t j = 0; j < x.size(); ++j)
        out.push_back({NodeKind::variable(static_cast<int>(j)), x[j], 0.0, true});
    return out;
}

// Variable whose sample value sits closest to the descent target; used both
// as the stand-in operand for arity-growing candidates and as the index of
// any fresh leaf a substitution creates.
inline int best_variable(const std::vector<double>& x, double e_new)
{
    if (x.empty())
        throw InvalidInput("best_variable: empty sample");
    int best = 0;
    double best_r = std::fabs(x[0] - e_new);
    for (std::size_t j = 1; j < x.size(); ++j) {
        double r = std::fabs(x[j] - e_new);
        if (r < best_r) {
            best_r = r;
            best = static_cast<int>(j);
        }
    }
    return best;
}

// One fully-resolved selection candidate: the kind, its residual against the
// node's descent target, which child a binary->unary rewrite would keep, and
// the variable any fresh leaf would use.
struct RankedChoice {
    NodeKind kind;
    double value = 0.0;
    double residual = 0.0;
    Side side = Side::None;
    int fresh_var = 0;
};

namespace detail {

struct NodeContext {
    bool is_binary_node = false; // e_right_new is a real child, not a stand-in
    double e_left = 0.0;
    std::optional<double> e_right;
    int fresh_var = 0;
};

// All admissible candidates ranked by residual, ties broken by canonical
// library order then by preferring the left side. At binary nodes the unary
// candidates consume either child; the better side wins and is recorded.
inline std::vector<RankedChoice> ranked_candidates(const NodeContext& ctx, double e_new,
                                                   const std::vector<double>& x,
                                                   const NumericLimits& lim)
{
    std::vector<RankedChoice> out;
    auto push = [&](const CandidateScore& c, Side side) {
        if (!c.admissible)
            return;
        out.push_back({c.kind, c.value, std::fabs(c.value - e_new), side, ctx.fresh_var});
    };
    auto left_list = candidate_outputs(ctx.e_left, ctx.e_right, x, lim);
    for (const CandidateScore& c : left_list)
        push(c, ctx.is_binary_node && is_unary(c.kind) ? Side::Left : Side::None);
    if (ctx.is_binary_node) {
        // Unary candidates over the right child.
        for (const CandidateScore& c : candidate_outputs(*ctx.e_right, std::nullopt, x, lim))
            if (is_unary(c.kind))
                push(c, Side::Right);
    }
    std::stable_sort(out.begin(), out.end(), [](const RankedChoice& a, const RankedChoice& b) {
        if (a.residual != b.residual)
            return a.residual < b.residual;
        int ra = canonical_rank(a.kind), rb = canonical_rank(b.kind);
        if (ra != rb)
            return ra < rb;
        return static_cast<int>(a.side) < static_cast<int>(b.side);
    });
    // Keep only the best entry per kind (a unary kind can appear for both
    // sides; the sort already placed the better one first).
    std::vector<RankedChoice> dedup;
    for (const RankedChoice& c : out) {
        bool seen = false;
        for (const RankedChoice& d : dedup)
            if (d.kind == c.kind)
                seen = true;
        if (!seen)
            dedup.push_back(c);
    }
    return dedup;
}

inline NodeContext make_context(const NodeKind& kind, double e_left_new,
                                std::optional<double> e_right_new)
{
    NodeContext ctx;
    ctx.is_binary_node = is_binary(kind) && e_right_new.has_value();
    ctx.e_left = e_left_new;
    ctx.e_right = e_right_new;
    return ctx;
}

} // namespace detail

// Best replacement kind for a node whose descent target is e_new, or nothing
// when no admissible candidate lands strictly inside the acceptance band.
// e_left_new / e_right_new are the children's targets from the same output
// step (stand-in values for absent children).
inline std::optional<NodeKind> select_kind(const Node& node, double e_new, double e_left_new,
                                           std::optional<double> e_right_new,
                                           const std::vector<double>& x,
                                           const SelectionConfig& cfg,
                                           const NumericLimits& lim = {})
{
    auto ctx = detail::make_context(node.kind, e_left_new, e_right_new);
    ctx.fresh_var = best_variable(x, e_new);
    auto ranked = detail::ranked_candidates(ctx, e_new, x, lim);
    if (ranked.empty() || ranked.front().residual >= cfg.accept_threshold)
        return std::nullopt;
    return ranked.front().kind;
}

namespace detail {

inline Node* node_at_preorder(ExprTree& tree, int position)
{
    auto nodes = preorder_nodes(tree);
    if (position < 0 || position >= static_cast<int>(nodes.size()))
        throw InvalidInput("node position out of range");
    return nodes[position];
}

inline int depth_from_root(const Node* root, const Node* target, int d = 1)
{
    if (!root)
        return 0;
    if (root == target)
        return d;
    if (int dl = depth_from_root(root->left.get(), target, d + 1))
        return dl;
    return depth_from_root(root->right.get(), target, d + 1);
}

inline int subtree_height(const Node* n) { return depth(n); }

// In-place kind rewrite following the fixed substitution rules. Surviving
// nodes keep their (w, b); fresh leaves get w=1, b=0. Returns false when the
// rewrite would push a leaf below max_depth (caller picks the next choice).
inline bool substitute_node(ExprTree& tree, Node* node, const NodeKind& new_kind, Side side_hint,
                            int max_depth, int fresh_var)
{
    if (node->kind == new_kind)
        throw ContractViolation("substitute: new kind equals current kind");
    if (fresh_var < 0 || fresh_var >= tree.input_dim)
        fresh_var = 0;
    int old_a = arity(node->kind);
    int new_a = arity(new_kind);
    if (new_a > old_a) {
        // A fresh leaf lands one level below this node.
        int d = depth_from_root(tree.root.get(), node);
        if (d + 1 > max_depth)
            return false;
    }
    if (new_a == 0) {
        // Prune to a leaf; the whole subtree below disappears.
        node->left.reset();
        node->right.reset();
    } else if (old_a == 0) {
        node->left = make_leaf(fresh_var);
        if (new_a == 2)
            node->right = make_leaf(fresh_var);
    } else if (old_a == 1 && new_a == 2) {
        node->right = make_leaf(fresh_var);
    } else if (old_a == 2 && new_a == 1) {
        if (side_hint == Side::Right)
            node->left = std::move(node->right);
        node->right.reset();
    }
    node->kind = new_kind;
    tree.cache_valid = false;
    return true;
}

} // namespace detail

// Rewrite the node at a preorder position to a different kind, restructuring
// children per the substitution rules. side_hint picks the kept child for
// binary->unary; fresh_var names the variable of any leaf added. Returns
// false if the depth cap rejects the mutation.
inline bool substitute(ExprTree& tree, int node_position, const NodeKind& new_kind,
                       Side side_hint = Side::Left, int max_depth = 10, int fresh_var = 0)
{
    Node* node = detail::node_at_preorder(tree, node_position);
    return detail::substitute_node(tree, node, new_kind, side_hint, max_depth, fresh_var);
}

namespace detail {

inline void subtree_sizes(const Node* n, std::vector<int>& out)
{
    // Preorder-aligned subtree sizes via a second pass.
    if (!n)
        return;
    out.push_back(0);
    std::size_t mine = out.size() - 1;
    subtree_sizes(n->left.get(), out);
    subtree_sizes(n->right.get(), out);
    int size = 1;
    if (n->left)
        size += out[mine + 1];
    if (n->right)
        size += out[mine + 1 + (n->left ? out[mine + 1] : 0)];
    out[mine] = size;
}

// True when every training sample keeps the subtree's output non-negative;
// log/sqrt rewrites must pass this before they stick.
inline bool domain_scan_ok(const Node* child, const std::vector<std::vector<double>>* xs,
                           const NumericLimits& lim)
{
    if (!xs)
        return true;
    for (const auto& x : *xs)
        if (eval_subtree_const(child, x, lim) < 0.0)
            return false;
    return true;
}

inline bool domain_scan_var_ok(int var, const std::vector<std::vector<double>>* xs)
{
    if (!xs)
        return true;
    for (const auto& x : *xs)
        if (x[static_cast<std::size_t>(var)] < 0.0)
            return false;
    return true;
}

} // namespace detail

// One selection sweep: visit nodes in preorder, rank candidates against each
// node's descent target, and apply the best admissible rewrite whose
// structural checks pass. Descendants destroyed by a rewrite are skipped for
// the rest of the sweep. xs_scan, when given, is the training input set used
// to vet log/sqrt rewrites against negative inputs. Returns the number of
// accepted mutations.
inline int update_all_kinds(ExprTree& tree, const std::vector<double>& e_new,
                            const std::vector<double>& x, const SelectionConfig& cfg,
                            const NumericLimits& lim = {},
                            const std::vector<std::vector<double>>* xs_scan = nullptr)
{
    auto nodes = preorder_nodes(tree);
    if (nodes.size() != e_new.size())
        throw ContractViolation("update_all_kinds: E_new vector does not match tree");
    std::vector<int> sizes;
    detail::subtree_sizes(tree.root.get(), sizes);
    std::vector<bool> skip(nodes.size(), false);
    int mutations = 0;

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (skip[i])
            continue;
        Node* node = nodes[i];
        int a = arity(node->kind);
        std::size_t left_idx = i + 1;
        std::size_t right_idx = a == 2 ? i + 1 + static_cast<std::size_t>(sizes[i + 1]) : 0;

        int fresh = best_variable(x, e_new[i]);
        detail::NodeContext ctx;
        ctx.fresh_var = fresh;
        if (a == 2) {
            ctx.is_binary_node = true;
            ctx.e_left = e_new[left_idx];
            ctx.e_right = e_new[right_idx];
        } else if (a == 1) {
            ctx.e_left = e_new[left_idx];
            ctx.e_right = x[static_cast<std::size_t>(fresh)];
        } else {
            ctx.e_left = x[static_cast<std::size_t>(fresh)];
            ctx.e_right = x[static_cast<std::size_t>(fresh)];
        }

        auto ranked = detail::ranked_candidates(ctx, e_new[i], x, lim);
        for (const RankedChoice& choice : ranked) {
            if (choice.residual >= cfg.accept_threshold)
                break;
            if (choice.kind == node->kind)
                break; // keeping the current kind outranks the rest
            // Vet log/sqrt against the whole training set: the incoming
            // child must stay non-negative everywhere.
            if (choice.kind.op == Op::Log || choice.kind.op == Op::Sqrt) {
                bool ok;
                if (a == 2)
                    ok = detail::domain_scan_ok(choice.side == Side::Right ? node->right.get()
                                                                           : node->left.get(),
                                                xs_scan, lim);
                else if (a == 1)
                    ok = detail::domain_scan_ok(node->left.get(), xs_scan, lim);
                else
                    ok = detail::domain_scan_var_ok(fresh, xs_scan);
                if (!ok)
                    continue;
            }
            if (!detail::substitute_node(tree, node, choice.kind, choice.side, cfg.max_depth,
                                         choice.fresh_var))
                continue; // depth cap; next-best candidate
            ++mutations;
            // Skip descendants the rewrite destroyed.
            int new_a = arity(choice.kind);
            if (new_a == 0 && a >= 1) {
                for (std::size_t k = i + 1; k < i + static_cast<std::size_t>(sizes[i]); ++k)
                    skip[k] = true;
            } else if (a == 2 && new_a == 1) {
                std::size_t drop_begin, drop_end;
                if (choice.side == Side::Right) {
                    drop_begin = left_idx;
                    drop_end = right_idx;
                } else {
                    drop_begin = right_idx;
                    drop_end = i + static_cast<std::size_t>(sizes[i]);
                }
                for (std::size_t k = drop_begin; k < drop_end; ++k)
                    skip[k] = true;
            }
            break;
        }
    }
    if (mutations > 0)
        tree.cache_valid = false;
    return mutations;
}

// Random single-node kind change once the stagnation counter reaches its
// limit. Returns the updated counter (0 after a kick).
inline int perturb_on_stagnation(ExprTree& tree, int stagnation_count, const SelectionConfig& cfg,
                                 std::mt19937_64& rng)
{
    if (stagnation_count < cfg.stagnation_limit)
        return stagnation_count;
    auto nodes = preorder_nodes(tree);
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::uniform_int_distribution<std::size_t> pick_node(0, nodes.size() - 1);
        Node* node = nodes[pick_node(rng)];
        // All kinds in canonical order except the current one.
        std::vector<NodeKind> options;
        for (int k = 0; k < kFunctionKindCount; ++k) {
            NodeKind cand{static_cast<Op>(k), 0};
            if (!(cand == node->kind))
                options.push_back(cand);
        }
        for (int j = 0; j < tree.input_dim; ++j) {
            NodeKind cand = NodeKind::variable(j);
            if (!(cand == node->kind))
                options.push_back(cand);
        }
        std::uniform_int_distribution<std::size_t> pick_kind(0, options.size() - 1);
        NodeKind new_kind = options[pick_kind(rng)];
        Side side = Side::Left;
        if (arity(node->kind) == 2 && arity(new_kind) == 1)
            side = (rng() & 1) ? Side::Right : Side::Left;
        int fresh = 0;
        if (tree.input_dim > 1) {
            std::uniform_int_distribution<int> pick_var(0, tree.input_dim - 1);
            fresh = pick_var(rng);
        }
        if (detail::substitute_node(tree, node, new_kind, side, cfg.max_depth, fresh))
            return 0;
        nodes = preorder_nodes(tree);
    }
    return 0;
}

namespace detail {

inline std::unique_ptr<Node> random_init_subtree(std::mt19937_64& rng, int levels_left,
                                                 int input_dim)
{
    std::uniform_int_distribution<int> pick_var(0, input_dim - 1);
    // 0 = leaf, 1 = unary, 2-3 = binary: interior draws lean binary so
    // product/sum structure is reachable without first growing arity.
    int shape = levels_left <= 1 ? 0 : std::uniform_int_distribution<int>(0, 3)(rng);
    if (shape == 0)
        return make_leaf(pick_var(rng));
    if (shape == 1) {
        auto k = static_cast<Op>(std::uniform_int_distribution<int>(
            static_cast<int>(Op::Sin), static_cast<int>(Op::Sigmoid))(rng));
        return make_unary(NodeKind{k, 0}, random_init_subtree(rng, levels_left - 1, input_dim));
    }
    auto k = static_cast<Op>(std::uniform_int_distribution<int>(
        static_cast<int>(Op::Add), static_cast<int>(Op::Div))(rng));
    return make_binary(NodeKind{k, 0}, random_init_subtree(rng, levels_left - 1, input_dim),
                       random_init_subtree(rng, levels_left - 1, input_dim));
}

} // namespace detail

// Random identity-parameter tree of depth <= max_depth (a lone leaf counts
// as depth 1). Restarts after the first draw their starting structure here
// so independent runs explore independent basins.
inline ExprTree random_init_tree(std::mt19937_64& rng, int max_depth, int input_dim)
{
    if (max_depth < 1 || input_dim < 1)
        throw InvalidInput("random_init_tree: max_depth and input_dim must be >= 1");
    return ExprTree(detail::random_init_subtree(rng, max_depth, input_dim), input_dim);
}

} // namespace xnet
