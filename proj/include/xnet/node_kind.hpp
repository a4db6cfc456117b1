#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "xnet/error.hpp"

namespace xnet {

// Operator part of a node kind. The enumerator order is the canonical
// library order and is used as the tie-break order everywhere; do not
// reorder.
enum class Op : std::uint8_t {
    Add,
    Sub,
    Mul,
    Div,
    Sin,
    Cos,
    Log,
    Sqrt,
    Exp,
    Relu,
    Sigmoid,
    Var,
};

inline constexpr int kFunctionKindCount = 11; // all non-Var ops

// A node's activation: one of the 11 library functions or a variable leaf.
// Var carries the 0-based input dimension ordinal.
struct NodeKind {
    Op op = Op::Var;
    int var = 0; // meaningful only when op == Op::Var

    static NodeKind add() { return {Op::Add}; }
    static NodeKind sub() { return {Op::Sub}; }
    static NodeKind mul() { return {Op::Mul}; }
    static NodeKind div() { return {Op::Div}; }
    static NodeKind sin() { return {Op::Sin}; }
    static NodeKind cos() { return {Op::Cos}; }
    static NodeKind log() { return {Op::Log}; }
    static NodeKind sqrt() { return {Op::Sqrt}; }
    static NodeKind exp() { return {Op::Exp}; }
    static NodeKind relu() { return {Op::Relu}; }
    static NodeKind sigmoid() { return {Op::Sigmoid}; }
    static NodeKind variable(int index)
    {
        if (index < 0)
            throw InvalidInput("variable index must be >= 0");
        return {Op::Var, index};
    }

    friend bool operator==(const NodeKind& a, const NodeKind& b)
    {
        return a.op == b.op && (a.op != Op::Var || a.var == b.var);
    }
    friend bool operator!=(const NodeKind& a, const NodeKind& b) { return !(a == b); }
};

// Arity is a total function of the kind: binary -> 2, unary -> 1, Var -> 0.
inline int arity(Op op)
{
    switch (op) {
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
        return 2;
    case Op::Sin:
    case Op::Cos:
    case Op::Log:
    case Op::Sqrt:
    case Op::Exp:
    case Op::Relu:
    case Op::Sigmoid:
        return 1;
    case Op::Var:
        return 0;
    }
    return 0;
}

inline int arity(const NodeKind& k) { return arity(k.op); }
inline bool is_binary(const NodeKind& k) { return arity(k) == 2; }
inline bool is_unary(const NodeKind& k) { return arity(k) == 1; }
inline bool is_leaf(const NodeKind& k) { return arity(k) == 0; }

// Position in the canonical library order
// [Add, Sub, Mul, Div, Sin, Cos, Log, Sqrt, Exp, Relu, Sigmoid, Var(0), Var(1), ...].
inline int canonical_rank(const NodeKind& k)
{
    if (k.op == Op::Var)
        return kFunctionKindCount + k.var;
    return static_cast<int>(k.op);
}

// Spelling used by the .xnet model format: add sub mul div sin cos log sqrt
// exp relu sigmoid x<i>, with variables written 1-based (x1 = Var(0)).
inline std::string kind_name(const NodeKind& k)
{
    switch (k.op) {
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    case Op::Exp: return "exp";
    case Op::Relu: return "relu";
    case Op::Sigmoid: return "sigmoid";
    case Op::Var: return "x" + std::to_string(k.var + 1);
    }
    return "?";
}

inline NodeKind kind_from_name(const std::string& name)
{
    if (name == "add") return NodeKind::add();
    if (name == "sub") return NodeKind::sub();
    if (name == "mul") return NodeKind::mul();
    if (name == "div") return NodeKind::div();
    if (name == "sin") return NodeKind::sin();
    if (name == "cos") return NodeKind::cos();
    if (name == "log") return NodeKind::log();
    if (name == "sqrt") return NodeKind::sqrt();
    if (name == "exp") return NodeKind::exp();
    if (name == "relu") return NodeKind::relu();
    if (name == "sigmoid") return NodeKind::sigmoid();
    if (name.size() > 1 && name[0] == 'x') {
        int idx = 0;
        for (std::size_t i = 1; i < name.size(); ++i) {
            char c = name[i];
            if (c < '0' || c > '9')
                throw MalformedEncoding("bad kind name: " + name);
            idx = idx * 10 + (c - '0');
        }
        if (idx < 1)
            throw MalformedEncoding("variable ordinals are 1-based: " + name);
        return NodeKind::variable(idx - 1);
    }
    throw MalformedEncoding("bad kind name: " + name);
}

} // namespace xnet
