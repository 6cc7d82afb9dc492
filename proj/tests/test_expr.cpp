#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "varcond/simplify.hpp"

using namespace varcond;
using vtest::approx_equal;

namespace {

Expr u(int dep, std::vector<int> exps) {
    return Expr::jet_of(JetCoordinate(dep, MultiIndex(std::move(exps))));
}

}  // namespace

TEST_CASE("eval basics") {
    const JetLayout lay(1, 1, 1);
    const Expr e = sqrt(1.0 + pow(u(1, {1}), 2));
    PointAssignment p(lay, {0.3}, {2.0, 0.0});
    CHECK(eval(e, p) == 1.0);
    p.jets[1] = 1.0;
    CHECK(approx_equal(eval(e, p), std::sqrt(2.0)));
}

TEST_CASE("eval of products and domain errors") {
    const JetLayout lay(1, 2, 0);
    const Expr prod = u(1, {0}) * u(2, {0});
    CHECK(eval(prod, PointAssignment(lay, {0.0}, {3.0, -2.0})) == -6.0);

    const Expr bad = log(u(1, {0}));
    CHECK_THROWS_AS(eval(bad, PointAssignment(lay, {0.0}, {0.0, 1.0})), EvalError);
    CHECK_THROWS_AS(eval(Expr::div(Expr::number_of(1.0), u(1, {0})),
                         PointAssignment(lay, {0.0}, {0.0, 1.0})),
                    EvalError);
    CHECK_THROWS_AS(eval(sqrt(u(1, {0})), PointAssignment(lay, {0.0}, {-1.0, 1.0})),
                    EvalError);
}

TEST_CASE("eval rejects coordinates outside the layout") {
    const JetLayout lay(1, 1, 1);
    const Expr too_deep = u(1, {2});
    CHECK_THROWS_AS(eval(too_deep, PointAssignment(lay, {0.0}, {1.0, 1.0})), EvalError);
}

TEST_CASE("point assignments must match the layout sizes") {
    const JetLayout lay(2, 1, 1);
    CHECK_THROWS_AS(PointAssignment(lay, {0.0}, {1.0, 1.0, 1.0}), ShapeError);
    CHECK_THROWS_AS(PointAssignment(lay, {0.0, 0.0}, {1.0}), ShapeError);
    CHECK_NOTHROW(PointAssignment(lay, {0.0, 0.0}, {1.0, 2.0, 3.0}));
}

TEST_CASE("free_jets returns the exact set") {
    CHECK(free_jets(sqrt(1.0 + pow(u(1, {1}), 2))) ==
          std::set<JetCoordinate>{JetCoordinate(1, MultiIndex({1}))});
    CHECK(free_jets(Expr::indep(1) + Expr::indep(2)).empty());
    const auto jets = free_jets(u(1, {0, 0}) * u(2, {1, 1}));
    CHECK(jets == std::set<JetCoordinate>{JetCoordinate(1, MultiIndex({0, 0})),
                                          JetCoordinate(2, MultiIndex({1, 1}))});
}

TEST_CASE("simplify folds the stated examples") {
    SECTION("u1 + 0") {
        const Expr e = simplify(u(1, {0}) + 0.0);
        CHECK(structurally_equal(e, u(1, {0})));
    }
    SECTION("u1_x1 * u1_x1") {
        const Expr e = simplify(u(1, {1}) * u(1, {1}));
        REQUIRE(e.kind() == ExprKind::Pow);
        CHECK(e.exponent() == Rational(2));
        CHECK(structurally_equal(e.base(), u(1, {1})));
    }
    SECTION("2*u1 - u1 - u1") {
        const Expr e = simplify(2.0 * u(1, {0}) - u(1, {0}) - u(1, {0}));
        REQUIRE(e.kind() == ExprKind::Number);
        CHECK(e.number() == 0.0);
    }
    SECTION("x^0 and zero annihilation") {
        CHECK(simplify(pow(u(1, {0}), 0)).number() == 1.0);
        CHECK(simplify(0.0 * u(1, {0})).number() == 0.0);
    }
}

TEST_CASE("simplify preserves value on random expressions") {
    std::mt19937_64 rng(20240811);
    for (int trial = 0; trial < 60; ++trial) {
        const JetLayout lay(1 + trial % 3, 1 + (trial / 3) % 3, trial % 3);
        vtest::ExprGen gen(lay, rng);
        const Expr e = gen.gen(3);
        const Expr s = simplify(e);
        for (int pt = 0; pt < 20; ++pt) {
            PointAssignment p;
            double a;
            try {
                a = vtest::eval_resampled(e, lay, rng, &p);
            } catch (const std::runtime_error&) {
                break;  // expression essentially nowhere evaluable; skip
            }
            const double b = eval(s, p);
            INFO(to_string(e) << "  vs  " << to_string(s));
            CHECK(approx_equal(a, b, 1e-9));
        }
    }
}

TEST_CASE("compare is a strict total order on distinct trees") {
    const Expr a = u(1, {0});
    const Expr b = u(1, {1});
    CHECK(compare(a, a) == 0);
    CHECK(compare(a, b) == -compare(b, a));
    CHECK(compare(a, b) != 0);
    CHECK(compare(Expr::number_of(1.0), a) < 0);  // numbers sort first
}

TEST_CASE("piecewise bump leaves evaluate and differentiate") {
    const Expr bump = Expr::psi_piece(2, 0, 1, 0.5, 0.25);
    auto at = [&](double x) { return eval(bump, PointAssignment::x_only({x})); };
    CHECK(at(0.5) == 1.0);                       // center: 1 - 0^2
    CHECK(approx_equal(at(0.625), 1.0 - 0.25));  // y = 0.5
    CHECK(at(0.75) == 0.0);
    CHECK(at(0.9) == 0.0);

    const Expr ind = Expr::indicator(1, 0.25, 0.75);
    CHECK(eval(ind, PointAssignment::x_only({0.3})) == 1.0);
    CHECK(eval(ind, PointAssignment::x_only({0.8})) == 0.0);
}

TEST_CASE("printing stays inside the grammar for grammar-built trees") {
    CHECK(to_string(simplify(u(1, {1}) / sqrt(1.0 + pow(u(1, {1}), 2)))) ==
          "u1_x1/sqrt(u1_x1^2 + 1)");
    CHECK(to_string(simplify(2.0 * u(1, {0}) - 0.5 * u(2, {0}))) == "2*u1 - 0.5*u2");
    CHECK(to_string(Expr::number_of(0.5)) == "0.5");
    CHECK(to_string(Expr::number_of(-3.0)) == "-3");
}
