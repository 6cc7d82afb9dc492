#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "varcond/parser.hpp"

using namespace varcond;
using vtest::approx_equal;

TEST_CASE("parse builds the arclength lagrangian") {
    const JetLayout lay(1, 1, 1);
    const Expr e = parse("sqrt(1 + u1_x1^2)", lay);
    REQUIRE(e.kind() == ExprKind::Pow);
    CHECK(e.exponent() == Rational(1, 2));
    REQUIRE(e.base().kind() == ExprKind::Add);
    CHECK(eval(e, PointAssignment(lay, {0.0}, {0.0, 1.0})) ==
          Catch::Approx(std::sqrt(2.0)));
}

TEST_CASE("parse atoms and identifiers") {
    const JetLayout lay(2, 2, 1);
    CHECK(parse("u1", lay).kind() == ExprKind::JetVar);
    CHECK(parse("u2_x2", lay).jet() == JetCoordinate(2, MultiIndex({0, 1})));
    CHECK(parse("x2", lay).axis() == 2);
    CHECK(parse("3.5", lay).number() == 3.5);
    CHECK(parse("1e-3", lay).number() == 1e-3);
}

TEST_CASE("parse errors carry positions and hints") {
    const JetLayout lay(1, 1, 1);
    CHECK_THROWS_AS(parse("u1_x2", lay), ParseError);
    CHECK_THROWS_AS(parse("u2", lay), ParseError);
    CHECK_THROWS_AS(parse("v1", lay), ParseError);
    CHECK_THROWS_AS(parse("u1 +", lay), ParseError);
    CHECK_THROWS_AS(parse("(u1", lay), ParseError);
    CHECK_THROWS_AS(parse("u1_x1x1", lay), ParseError);  // order 2 > s = 1
    CHECK_THROWS_WITH(parse("u1_x2", lay),
                      Catch::Matchers::ContainsSubstring("unknown identifier"));
}

TEST_CASE("derivative suffixes must be nondecreasing") {
    const JetLayout lay(2, 1, 2);
    CHECK_THROWS_WITH(parse("u1_x2x1", lay),
                      Catch::Matchers::ContainsSubstring("u1_x1x2"));
    CHECK(parse("u1_x1x2", lay).jet() == JetCoordinate(1, MultiIndex({1, 1})));
}

TEST_CASE("exponent grammar") {
    const JetLayout lay(1, 1, 1);
    CHECK(parse("u1^2", lay).exponent() == Rational(2));
    CHECK(parse("u1^(3/2)", lay).exponent() == Rational(3, 2));
    CHECK(parse("u1^(2/4)", lay).exponent() == Rational(1, 2));
    CHECK(parse("u1^-2", lay).exponent() == Rational(-2));
    CHECK_THROWS_AS(parse("u1^(1/3)", lay), ParseError);
    CHECK_THROWS_AS(parse("u1^u1", lay), ParseError);
}

TEST_CASE("unary minus binds to the atom, exactly as the grammar says") {
    const JetLayout lay(1, 1, 0);
    // -u1^2 is (-u1)^2 under the grammar.
    const Expr e = parse("-u1^2", lay);
    CHECK(eval(e, PointAssignment(lay, {0.0}, {2.0})) == 4.0);
    // Binary minus applies to the whole factor.
    const Expr f = parse("0 - u1^2", lay);
    CHECK(eval(f, PointAssignment(lay, {0.0}, {2.0})) == -4.0);
}

TEST_CASE("precedence and associativity") {
    const JetLayout lay(1, 2, 0);
    const PointAssignment p(lay, {3.0}, {5.0, 7.0});
    CHECK(eval(parse("u1 + u2 * 2", lay), p) == 19.0);
    CHECK(eval(parse("(u1 + u2) * 2", lay), p) == 24.0);
    CHECK(eval(parse("12 / 2 / 3", lay), p) == 2.0);
    CHECK(eval(parse("12 - 2 - 3", lay), p) == 7.0);
    CHECK(eval(parse("2 * x1^2", lay), p) == 18.0);
}

TEST_CASE("derivative output stays printable and parseable") {
    // Differentiation produces the negative and half-integer exponents the
    // printer has to keep inside the grammar.
    std::mt19937_64 rng(910);
    for (int trial = 0; trial < 40; ++trial) {
        const JetLayout lay(1 + trial % 2, 1 + trial % 2, 1);
        vtest::ExprGen gen(lay, rng);
        const Expr e = gen.gen(3);
        std::uniform_int_distribution<int> pick(1, lay.size());
        const Expr d = diff_jet(e, lay.coordinate_at(pick(rng)));
        const std::string text = to_string(d);
        INFO(text);
        Expr back;
        REQUIRE_NOTHROW(back = parse(text, lay));
        for (int pt = 0; pt < 5; ++pt) {
            PointAssignment p;
            double a;
            try {
                a = vtest::eval_resampled(d, lay, rng, &p);
            } catch (const std::runtime_error&) {
                break;
            }
            CHECK(approx_equal(a, eval(back, p), 1e-9));
        }
    }
}

TEST_CASE("print-parse round trip evaluates equal on random expressions") {
    std::mt19937_64 rng(909);
    for (int trial = 0; trial < 80; ++trial) {
        const JetLayout lay(1 + trial % 3, 1 + (trial / 2) % 3, trial % 3);
        vtest::ExprGen gen(lay, rng);
        const Expr e = simplify(gen.gen(3));
        const std::string text = to_string(e);
        INFO(text);
        Expr back;
        REQUIRE_NOTHROW(back = parse(text, JetLayout(lay.n(), lay.m(),
                                                     std::max(lay.order(), max_jet_order(e)))));
        for (int pt = 0; pt < 5; ++pt) {
            PointAssignment p;
            double a;
            try {
                a = vtest::eval_resampled(e, lay, rng, &p);
            } catch (const std::runtime_error&) {
                break;
            }
            CHECK(approx_equal(a, eval(back, p), 1e-9));
        }
    }
}
