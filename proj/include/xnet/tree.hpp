#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "xnet/error.hpp"
#include "xnet/node_kind.hpp"

namespace xnet {

// One network node. Every node, leaves included, carries the affine pair
// (w, b); its output is w * f(children) + b. e_cached holds the output of
// the most recent forward pass.
struct Node {
    NodeKind kind;
    double w = 1.0;
    double b = 0.0;
    double e_cached = 0.0;
    std::unique_ptr<Node> left;
    std::unique_ptr<Node> right;

    Node() = default;
    explicit Node(NodeKind k) : kind(k) {}
    Node(NodeKind k, std::unique_ptr<Node> l, std::unique_ptr<Node> r = nullptr)
        : kind(k), left(std::move(l)), right(std::move(r))
    {
    }

    std::unique_ptr<Node> clone() const
    {
        auto n = std::make_unique<Node>(kind);
        n->w = w;
        n->b = b;
        n->e_cached = e_cached;
        if (left)
            n->left = left->clone();
        if (right)
            n->right = right->clone();
        return n;
    }
};

inline std::unique_ptr<Node> make_leaf(int var, double w = 1.0, double b = 0.0)
{
    auto n = std::make_unique<Node>(NodeKind::variable(var));
    n->w = w;
    n->b = b;
    return n;
}

inline std::unique_ptr<Node> make_unary(NodeKind k, std::unique_ptr<Node> child)
{
    return std::make_unique<Node>(k, std::move(child));
}

inline std::unique_ptr<Node> make_binary(NodeKind k, std::unique_ptr<Node> l, std::unique_ptr<Node> r)
{
    return std::make_unique<Node>(k, std::move(l), std::move(r));
}

// One (kind, w, b) entry of a preorder serialization.
struct SerialNode {
    NodeKind kind;
    double w = 1.0;
    double b = 0.0;
};

// The network: a binary expression tree plus the input dimensionality it is
// evaluated against. Node counts are recomputed on demand so they can never
// go stale across mutations.
struct ExprTree {
    std::unique_ptr<Node> root;
    int input_dim = 1;
    // Set by forward(); cleared by any parameter or structure change. Guards
    // backward() against reading stale e_cached values.
    bool cache_valid = false;

    ExprTree() = default;
    ExprTree(std::unique_ptr<Node> r, int dim) : root(std::move(r)), input_dim(dim) {}

    ExprTree clone() const
    {
        ExprTree t;
        t.root = root ? root->clone() : nullptr;
        t.input_dim = input_dim;
        t.cache_valid = cache_valid;
        return t;
    }
};

namespace detail {

inline void collect_preorder(Node* n, std::vector<Node*>& out)
{
    if (!n)
        return;
    out.push_back(n);
    collect_preorder(n->left.get(), out);
    collect_preorder(n->right.get(), out);
}

inline void collect_preorder_const(const Node* n, std::vector<const Node*>& out)
{
    if (!n)
        return;
    out.push_back(n);
    collect_preorder_const(n->left.get(), out);
    collect_preorder_const(n->right.get(), out);
}

} // namespace detail

// Nodes in preorder; index i in this vector is the node's preorder position.
inline std::vector<Node*> preorder_nodes(ExprTree& tree)
{
    std::vector<Node*> out;
    detail::collect_preorder(tree.root.get(), out);
    return out;
}

inline std::vector<const Node*> preorder_nodes(const ExprTree& tree)
{
    std::vector<const Node*> out;
    detail::collect_preorder_const(tree.root.get(), out);
    return out;
}

struct NodeCounts {
    int operator_count = 0; // non-leaf nodes (the paper's "Nod")
    int total_count = 0;    // all nodes including leaves
    int parameter_count = 0; // 2 * total_count, one (w, b) per node
};

inline NodeCounts count_nodes(const ExprTree& tree)
{
    NodeCounts c;
    auto nodes = preorder_nodes(tree);
    c.total_count = static_cast<int>(nodes.size());
    for (const Node* n : nodes)
        if (!is_leaf(n->kind))
            ++c.operator_count;
    c.parameter_count = 2 * c.total_count;
    return c;
}

// Depth with a single leaf counting as 1.
inline int depth(const Node* n)
{
    if (!n)
        return 0;
    return 1 + std::max(depth(n->left.get()), depth(n->right.get()));
}

inline int depth(const ExprTree& tree) { return depth(tree.root.get()); }

// Children present exactly matching each kind's arity, and every Var index
// within the tree's input dimension.
inline bool arity_audit(const Node* n, int input_dim)
{
    if (!n)
        return false;
    int a = arity(n->kind);
    if (a == 0 && (n->left || n->right))
        return false;
    if (a == 1 && (!n->left || n->right))
        return false;
    if (a == 2 && (!n->left || !n->right))
        return false;
    if (n->kind.op == Op::Var && (n->kind.var < 0 || n->kind.var >= input_dim))
        return false;
    if (n->left && !arity_audit(n->left.get(), input_dim))
        return false;
    if (n->right && !arity_audit(n->right.get(), input_dim))
        return false;
    return true;
}

inline bool arity_audit(const ExprTree& tree)
{
    return tree.root && tree.input_dim >= 1 && arity_audit(tree.root.get(), tree.input_dim);
}

// The fixed starting network x^2 + sin(x): Add(Mul(x1, x1), Sin(x1)) with
// all w = 1 and b = 0. Multivariate tasks still start from Var(0); other
// variables enter through evolution.
inline ExprTree init_default_tree(int input_dim)
{
    if (input_dim < 1)
        throw InvalidInput("input_dim must be >= 1");
    auto square = make_binary(NodeKind::mul(), make_leaf(0), make_leaf(0));
    auto sine = make_unary(NodeKind::sin(), make_leaf(0));
    auto root = make_binary(NodeKind::add(), std::move(square), std::move(sine));
    return ExprTree(std::move(root), input_dim);
}

inline std::vector<SerialNode> serialize_preorder(const ExprTree& tree)
{
    std::vector<SerialNode> out;
    for (const Node* n : preorder_nodes(tree))
        out.push_back({n->kind, n->w, n->b});
    return out;
}

namespace detail {

inline std::unique_ptr<Node> deserialize_from(const std::vector<SerialNode>& seq, std::size_t& pos)
{
    if (pos >= seq.size())
        throw MalformedEncoding("preorder sequence ends before the tree is complete");
    const SerialNode& s = seq[pos++];
    auto n = std::make_unique<Node>(s.kind);
    n->w = s.w;
    n->b = s.b;
    int a = arity(s.kind);
    if (a >= 1)
        n->left = deserialize_from(seq, pos);
    if (a == 2)
        n->right = deserialize_from(seq, pos);
    return n;
}

} // namespace detail

inline ExprTree deserialize_preorder(const std::vector<SerialNode>& seq, int input_dim)
{
    if (input_dim < 1)
        throw InvalidInput("input_dim must be >= 1");
    if (seq.empty())
        throw MalformedEncoding("empty preorder sequence");
    std::size_t pos = 0;
    auto root = detail::deserialize_from(seq, pos);
    if (pos != seq.size())
        throw MalformedEncoding("preorder sequence has trailing nodes");
    for (std::size_t i = 0; i < seq.size(); ++i)
        if (seq[i].kind.op == Op::Var && seq[i].kind.var >= input_dim)
            throw MalformedEncoding("variable ordinal exceeds input_dim");
    return ExprTree(std::move(root), input_dim);
}

} // namespace xnet
