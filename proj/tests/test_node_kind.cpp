#include <catch2/catch_amalgamated.hpp>

#include "xnet/node_kind.hpp"

using namespace xnet;

TEST_CASE("canonical rank follows the library order")
{
    CHECK(canonical_rank(NodeKind::add()) == 0);
    CHECK(canonical_rank(NodeKind::sub()) == 1);
    CHECK(canonical_rank(NodeKind::mul()) == 2);
    CHECK(canonical_rank(NodeKind::div()) == 3);
    CHECK(canonical_rank(NodeKind::sin()) == 4);
    CHECK(canonical_rank(NodeKind::cos()) == 5);
    CHECK(canonical_rank(NodeKind::log()) == 6);
    CHECK(canonical_rank(NodeKind::sqrt()) == 7);
    CHECK(canonical_rank(NodeKind::exp()) == 8);
    CHECK(canonical_rank(NodeKind::relu()) == 9);
    CHECK(canonical_rank(NodeKind::sigmoid()) == 10);
    CHECK(canonical_rank(NodeKind::variable(0)) == 11);
    CHECK(canonical_rank(NodeKind::variable(3)) == 14);
}

TEST_CASE("arity per kind")
{
    CHECK(arity(NodeKind::add()) == 2);
    CHECK(arity(NodeKind::sub()) == 2);
    CHECK(arity(NodeKind::mul()) == 2);
    CHECK(arity(NodeKind::div()) == 2);
    CHECK(arity(NodeKind::sin()) == 1);
    CHECK(arity(NodeKind::cos()) == 1);
    CHECK(arity(NodeKind::log()) == 1);
    CHECK(arity(NodeKind::sqrt()) == 1);
    CHECK(arity(NodeKind::exp()) == 1);
    CHECK(arity(NodeKind::relu()) == 1);
    CHECK(arity(NodeKind::sigmoid()) == 1);
    CHECK(arity(NodeKind::variable(0)) == 0);
    CHECK(is_binary(NodeKind::div()));
    CHECK(is_unary(NodeKind::sigmoid()));
    CHECK(is_leaf(NodeKind::variable(2)));
}

TEST_CASE("kind equality distinguishes variable ordinals only for variables")
{
    CHECK(NodeKind::variable(0) != NodeKind::variable(1));
    CHECK(NodeKind::variable(1) == NodeKind::variable(1));
    CHECK(NodeKind::add() == NodeKind::add());
    CHECK(NodeKind::add() != NodeKind::sub());
    NodeKind a{Op::Sin, 0}, b{Op::Sin, 7}; // var field ignored off-leaf
    CHECK(a == b);
}

TEST_CASE("kind names round-trip, variables spelled 1-based")
{
    const char* names[] = {"add", "sub", "mul", "div", "sin", "cos",
                           "log", "sqrt", "exp", "relu", "sigmoid"};
    for (int k = 0; k < kFunctionKindCount; ++k) {
        NodeKind kind{static_cast<Op>(k), 0};
        CHECK(kind_name(kind) == names[k]);
        CHECK(kind_from_name(names[k]) == kind);
    }
    CHECK(kind_name(NodeKind::variable(0)) == "x1");
    CHECK(kind_name(NodeKind::variable(11)) == "x12");
    CHECK(kind_from_name("x1") == NodeKind::variable(0));
    CHECK(kind_from_name("x12") == NodeKind::variable(11));
}

TEST_CASE("bad kind names are rejected")
{
    CHECK_THROWS_AS(kind_from_name("pow"), MalformedEncoding);
    CHECK_THROWS_AS(kind_from_name("x0"), MalformedEncoding);
    CHECK_THROWS_AS(kind_from_name("x"), MalformedEncoding);
    CHECK_THROWS_AS(kind_from_name("x1a"), MalformedEncoding);
    CHECK_THROWS_AS(kind_from_name(""), MalformedEncoding);
    CHECK_THROWS_AS(NodeKind::variable(-1), InvalidInput);
}
