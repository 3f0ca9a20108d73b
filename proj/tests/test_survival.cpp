#include "doctest.h"

#include "k4f/errors.hpp"
#include "k4f/survival.hpp"
#include "k4f/trajectory.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

using namespace k4f;

namespace {

void check_curve_shape(const SurvivalCurve& c)
{
    const auto p = c.p_values();
    const auto P = c.P_values();
    const double h = c.step();
    CHECK(p[0] == 1.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double t = h * double(k);
        REQUIRE(p[k] >= 0.0);
        REQUIRE(p[k] <= 1.0);
        if (k > 0) {
            REQUIRE(p[k] <= p[k - 1] + 1e-15);
            REQUIRE(P[k] >= P[k - 1]);
            REQUIRE(P[k] - P[k - 1] <= h * (1 + 1e-12));
        }
        REQUIRE(P[k] <= t + 10 * h * h);
    }
}

} // namespace

TEST_CASE("leaf root survives surely")
{
    const TreeSpec leaf;
    const auto c = survival_dp(leaf, 1e-3);
    for (double v : c.p_values())
        CHECK(v == 1.0);
    CHECK(c.P(1.0) == doctest::Approx(1.0));
    const auto mc = survival_mc(leaf, 0.7, 1000, 1);
    CHECK(mc.mean == 1.0);
    CHECK(mc.standard_error == 0.0);
}

TEST_CASE("star tree closed form")
{
    for (int k : {1, 2, 3, 7}) {
        const auto c = survival_dp(TreeSpec::star(k), 1e-3);
        check_curve_shape(c);
        for (double t : {0.0, 0.1, 0.5, 0.9, 1.0})
            CHECK(std::abs(c.p(t) - std::pow(1 - t, k)) < 1e-6);
    }
    const auto mc = survival_mc(TreeSpec::star(3), 0.5, 100000, 4);
    CHECK(std::abs(mc.mean - 0.125) < 3 * mc.standard_error);
}

TEST_CASE("curve invariants on random trees")
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto tree = random_tree(seed);
        CHECK_NOTHROW(tree.validate());
        CHECK(tree.size() <= 40);
        CHECK(tree.depth() <= 6);
        check_curve_shape(survival_dp(tree, 1e-3));
    }
}

TEST_CASE("path-like tree: dp against mc")
{
    TreeSpec t;
    int even = 0;
    for (int d = 0; d < 5; ++d)
        even = t.add_even(t.add_odd(even));
    const auto c = survival_dp(t, 1e-3);
    for (double x : {0.3, 0.8}) {
        const auto mc = survival_mc(t, x, 200000, 9);
        CHECK(std::abs(mc.mean - c.p(x)) < 4 * mc.standard_error + 1e-5);
    }
}

TEST_CASE("dp step halving")
{
    const auto tree = random_tree(3);
    const auto a = survival_dp(tree, 2e-3), b = survival_dp(tree, 1e-3);
    for (double t : {0.2, 0.6, 1.0})
        CHECK(std::abs(a.p(t) - b.p(t)) < 1e-5);
}

TEST_CASE("mc preconditions")
{
    CHECK_THROWS_AS(survival_mc(TreeSpec::star(2), 0.5, 0, 1), ConfigError);
    CHECK_THROWS_AS(survival_mc(TreeSpec::star(2), 1.5, 10, 1), DomainError);
    CHECK_THROWS_AS(survival_mc(TreeSpec::star(2), -0.1, 10, 1), DomainError);
    const auto a = survival_mc(TreeSpec::star(2), 0.4, 5000, 3);
    const auto b = survival_mc(TreeSpec::star(2), 0.4, 5000, 3);
    CHECK(a.mean == b.mean);
}

TEST_CASE("tree structure validation")
{
    TreeSpec t;
    t.add_odd(0);
    CHECK_THROWS_AS(t.validate(), StructuralError);
    CHECK_THROWS_AS(survival_dp(t, 1e-3), StructuralError);
    TreeSpec u;
    CHECK_THROWS_AS(u.add_even(0), StructuralError);
    const int o = u.add_odd(0);
    CHECK_THROWS_AS(u.add_odd(o), StructuralError);
    CHECK_THROWS_AS(TreeSpec::regular(0, 5, 2), StructuralError);
}

TEST_CASE("tree file round trip and errors")
{
    const auto tree = random_tree(17);
    std::stringstream ss;
    tree.write(ss);
    const auto back = TreeSpec::parse(ss);
    REQUIRE(back.size() == tree.size());
    for (int i = 0; i < int(tree.size()); ++i) {
        CHECK(back.node(i).parent == tree.node(i).parent);
        CHECK(back.node(i).kind == tree.node(i).kind);
        CHECK(back.node(i).children == tree.node(i).children);
    }

    auto fails = [](const std::string& text) {
        std::stringstream s(text);
        CHECK_THROWS_AS(TreeSpec::parse(s), StructuralError);
    };
    fails("");
    fails("node 0 parent root kind odd arity 0\n");
    fails("node 0 parent root kind even arity 1\nnode 1 parent 0 kind odd arity 0\n");
    fails("node 0 parent root kind even arity 1\nnode 1 parent 0 kind odd arity 2\nnode 2 parent 1 kind even arity 0\n");
    fails("node 0 parent root kind even arity 0\nnode 0 parent root kind even arity 0\n");
    fails("node 0 parent root kind even arity 1\nnode 1 parent 7 kind odd arity 0\n");
    fails("node 0 parent root kind even arity 1\nnode 1 parent 0 kind even arity 0\n");
    fails("node zero parent\n");

    std::stringstream ok("# comment\nnode a parent root kind even arity 1\nnode b parent a kind odd arity 1\n"
                         "node c parent b kind even arity 0\n");
    const auto named = TreeSpec::parse(ok);
    CHECK(named.size() == 3);
    CHECK(survival_dp(named, 1e-3).p(0.5) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("regular tree recursion matches the explicit tree")
{
    const auto explicit_tree = TreeSpec::regular(2, 2, 2);
    const auto a = survival_dp(explicit_tree, 1e-3);
    const auto b = regular_tree_dp(2, 2, 2, 1.0, 1e-3);
    for (double t : {0.1, 0.5, 1.0})
        CHECK(a.p(t) == doctest::Approx(b.p(t)).epsilon(1e-12));
    CHECK_THROWS_AS(regular_tree_dp(0.5, 2, 2, 1.0, 1e-3), ConfigError);
}

TEST_CASE("t4 fixed point approaches Phi")
{
    const auto table = solve_ode(3.0, 1e-4);
    double prev = 1e9;
    for (double k : {1e2, 1e4, 1e6}) {
        const auto curve = t4_fixed_point(k, 3.0, 1e-4);
        double sup = 0;
        const auto P = curve.P_hat_values();
        for (std::size_t q = 0; q < P.size(); ++q)
            sup = std::max(sup, std::abs(P[q] - table.Phi_values()[q]));
        CHECK(sup < prev);
        prev = sup;
    }
    CHECK(prev <= 1e-3);
    const auto c = t4_fixed_point(1e6, 3.0, 1e-4);
    CHECK(c.p_hat(1.0) == doctest::Approx(table.phi(1.0)).epsilon(1e-4));
    CHECK_THROWS_AS(t4_fixed_point(0.5, 3.0, 1e-4), ConfigError);
}

TEST_CASE("truncated regular trees bracket the limit")
{
    // Even depths overshoot, odd depths undershoot; each parity class
    // closes in monotonically until quadrature error takes over.
    const double k = 1e3;
    std::vector<int> depths(13);
    std::iota(depths.begin(), depths.end(), 0);
    depths.push_back(20);
    for (double x : {0.5, 1.0, 2.0, 3.0}) {
        const auto rows = truncation_study(k, depths, x, 1e-3);
        REQUIRE(rows.size() == depths.size());
        CHECK(rows[0].error == doctest::Approx(std::abs(1 - rows[0].p_limit)));
        for (std::size_t r = 0; r + 1 < rows.size(); ++r) {
            if (rows[r].error < 1e-6)
                break;
            CHECK((rows[r].c % 2 == 0 ? rows[r].signed_error > 0 : rows[r].signed_error < 0));
            if (r >= 2)
                CHECK(rows[r].error <= rows[r - 2].error + 1e-12);
        }
        CHECK(rows.back().error < 1e-6);
    }
    CHECK_THROWS_AS(truncation_study(1, depths, 3.0, 1e-3), DomainError);
}
