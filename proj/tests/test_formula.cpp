#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "support/formula_parser.hpp"
#include "support/random_tree.hpp"
#include "xnet/eval.hpp"
#include "xnet/formula.hpp"
#include "xnet/tree.hpp"

using namespace xnet;

TEST_CASE("formula rendering matches the documented grammar")
{
    SECTION("default tree, identity parameters")
    {
        ExprTree t = init_default_tree(1);
        CHECK(to_formula(t) == "((x1*x1) + sin(x1))");
    }
    SECTION("affine leaf")
    {
        auto leaf = make_leaf(0);
        leaf->w = 9.10;
        leaf->b = -34.67;
        ExprTree t(std::move(leaf), 1);
        CHECK(to_formula(t) == "9.10*x1 - 34.67");
    }
    SECTION("scaled unary")
    {
        auto n = make_unary(NodeKind::sin(), make_leaf(0));
        n->w = 2.0;
        ExprTree t(std::move(n), 1);
        CHECK(to_formula(t) == "2.00*sin(x1)");
    }
}

TEST_CASE("affine wraps only appear for non-identity parameters")
{
    auto n = make_unary(NodeKind::cos(), make_leaf(0));
    ExprTree t(std::move(n), 1);
    CHECK(to_formula(t) == "cos(x1)");

    t.root->b = 0.5;
    CHECK(to_formula(t) == "cos(x1) + 0.50");

    t.root->b = -0.5;
    CHECK(to_formula(t) == "cos(x1) - 0.50");

    t.root->w = 3.0;
    CHECK(to_formula(t) == "3.00*cos(x1) - 0.50");
}

TEST_CASE("wrapped children are parenthesized inside operators")
{
    auto left = make_leaf(0);
    left->w = 2.0;
    auto node = make_binary(NodeKind::add(), std::move(left), make_leaf(0));
    ExprTree t(std::move(node), 1);
    CHECK(to_formula(t) == "((2.00*x1) + x1)");
}

TEST_CASE("precision is adjustable and full precision round-trips digits")
{
    auto leaf = make_leaf(0);
    leaf->w = 1.0 / 3.0;
    ExprTree t(std::move(leaf), 1);
    CHECK(to_formula(t, 4) == "0.3333*x1");
    std::string full = to_formula(t, kFullPrecision);
    CHECK(full.find("0.3333333333333333") != std::string::npos);
}

TEST_CASE("rendered formulas evaluate to the tree output")
{
    NumericLimits lim;
    std::mt19937_64 rng(555);
    int checked = 0;
    while (checked < 300) {
        auto fixture = xnet_test::smooth_fixture(rng, 5, 2);
        double direct = forward(fixture.tree, fixture.x, lim);
        if (std::abs(direct) >= lim.v_max)
            continue;
        std::string text = to_formula(fixture.tree, kFullPrecision);
        double parsed = xnet_test::eval_formula(text, fixture.x);
        if (!std::isfinite(parsed))
            continue;
        REQUIRE(std::abs(parsed - direct) <= 1e-9 * std::max(1.0, std::abs(direct)));
        ++checked;
    }
}
