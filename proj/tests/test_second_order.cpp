#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "test_problems.hpp"
#include "varcond/second_order.hpp"

using namespace varcond;
using vtest::approx_equal;

namespace {

[[maybe_unused]] JetCoordinate jc(int dep, std::vector<int> exps) {
    return JetCoordinate(dep, MultiIndex(std::move(exps)));
}

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c)
            m.at(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    return m;
}

// Independent definiteness oracle: random quadratic-form sampling decides
// whether positive/negative directions exist; exact closed-form
// eigenvalues (quadratic formula, trigonometric 3x3 form) settle the
// definite/semidefinite boundary for small matrices.
std::vector<double> closed_form_eigenvalues(const Matrix& m) {
    if (m.rows == 1) return {m.at(0, 0)};
    if (m.rows == 2) {
        const double tr = m.at(0, 0) + m.at(1, 1);
        const double det = m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0);
        const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
        return {tr / 2.0 - disc, tr / 2.0 + disc};
    }
    REQUIRE(m.rows == 3);
    const double p1 = m.at(0, 1) * m.at(0, 1) + m.at(0, 2) * m.at(0, 2) +
                      m.at(1, 2) * m.at(1, 2);
    const double q = (m.at(0, 0) + m.at(1, 1) + m.at(2, 2)) / 3.0;
    if (p1 == 0.0) return {m.at(0, 0), m.at(1, 1), m.at(2, 2)};
    const double p2 = (m.at(0, 0) - q) * (m.at(0, 0) - q) +
                      (m.at(1, 1) - q) * (m.at(1, 1) - q) +
                      (m.at(2, 2) - q) * (m.at(2, 2) - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    Matrix b(3, 3);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) b.at(r, c) = (m.at(r, c) - (r == c ? q : 0.0)) / p;
    const double detb =
        b.at(0, 0) * (b.at(1, 1) * b.at(2, 2) - b.at(1, 2) * b.at(2, 1)) -
        b.at(0, 1) * (b.at(1, 0) * b.at(2, 2) - b.at(1, 2) * b.at(2, 0)) +
        b.at(0, 2) * (b.at(1, 0) * b.at(2, 1) - b.at(1, 1) * b.at(2, 0));
    const double r = std::clamp(detb / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double pi = std::acos(-1.0);
    const double e1 = q + 2.0 * p * std::cos(phi);
    const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * pi / 3.0);
    return {e3, 3.0 * q - e1 - e3, e1};
}

Definiteness brute_force_definiteness(const Matrix& m, std::mt19937_64& rng,
                                      double tol = 1e-9) {
    const double sigma = std::max(1.0, m.frobenius());
    std::normal_distribution<double> gauss(0.0, 1.0);
    bool has_pos = false, has_neg = false;
    for (int trial = 0; trial < 10000; ++trial) {
        std::vector<double> v(static_cast<std::size_t>(m.rows));
        double norm = 0.0;
        for (double& c : v) {
            c = gauss(rng);
            norm += c * c;
        }
        norm = std::sqrt(norm);
        double quad = 0.0;
        for (int r = 0; r < m.rows; ++r)
            for (int c = 0; c < m.cols; ++c)
                quad += (v[static_cast<std::size_t>(r)] / norm) * m.at(r, c) *
                        (v[static_cast<std::size_t>(c)] / norm);
        if (quad > tol * sigma) has_pos = true;
        if (quad < -tol * sigma) has_neg = true;
    }
    if (has_pos && has_neg) return Definiteness::Indefinite;
    if (!has_pos && !has_neg) return Definiteness::Zero;
    // Settle the definite/semidefinite boundary with exact eigenvalues.
    REQUIRE(m.rows <= 3);
    const auto eig = closed_form_eigenvalues(m);
    bool any_zero = false;
    for (double e : eig)
        if (std::abs(e) <= tol * sigma) any_zero = true;
    if (has_pos)
        return any_zero ? Definiteness::PositiveSemidefinite
                        : Definiteness::PositiveDefinite;
    return any_zero ? Definiteness::NegativeSemidefinite : Definiteness::NegativeDefinite;
}

}  // namespace

TEST_CASE("assemble_A for the arclength problem") {
    const JetLayout lay(1, 1, 1);
    const auto a = assemble_A(parse("sqrt(1 + u1_x1^2)", lay), lay);
    REQUIRE(a.dim() == 2);
    CHECK(a.entry(1, 1).number() == 0.0);
    CHECK(a.entry(1, 2).number() == 0.0);
    CHECK(a.entry(2, 1).number() == 0.0);
    const Expr printed = parse("1/(1 + u1_x1^2)^(3/2)", lay);
    std::mt19937_64 rng(21);
    for (int i = 0; i < 10; ++i) {
        const PointAssignment p = vtest::random_point(lay, rng);
        CHECK(approx_equal(eval(a.entry(2, 2), p), eval(printed, p), 1e-9));
    }
}

TEST_CASE("assemble_A for the fourth-order problem matches the printed blocks") {
    const JetLayout lay(2, 1, 2);
    const auto a = assemble_A(parse(vtest::fourth_order_plate_lagrangian(), lay), lay);
    REQUIRE(a.dim() == 6);
    const std::vector<std::vector<double>> printed = {
        {2, 0, 0, 0, 0, 0},           {0, 2, -0.5, 0, 0, 0},
        {0, -0.5, 2, 0, 0, 0},        {0, 0, 0, 2, -0.5, -0.5},
        {0, 0, 0, -0.5, 2, -0.5},     {0, 0, 0, -0.5, -0.5, 2}};
    for (int r = 1; r <= 6; ++r)
        for (int c = 1; c <= 6; ++c) {
            const Expr& e = a.entry(r, c);
            REQUIRE(e.kind() == ExprKind::Number);
            CHECK(e.number() ==
                  printed[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(c - 1)]);
        }
    // Block addressing: the order-2 diagonal block.
    CHECK(a.block_entry(1, 1, 2, 2, 1, 1).number() == 2.0);
    CHECK(a.block_entry(1, 1, 2, 2, 1, 2).number() == -0.5);
    CHECK(a.block_entry(1, 1, 1, 2, 1, 1).number() == 0.0);
}

TEST_CASE("assemble_A for the coupled problem is the corrected symmetric matrix") {
    const JetLayout lay(2, 2, 1);
    const auto a = assemble_A(parse(vtest::coupled_membrane_lagrangian(), lay), lay);
    REQUIRE(a.dim() == 6);
    // Order-0 cross entry is 1/2; every cross-order entry vanishes.
    CHECK(a.block_entry(1, 2, 0, 0, 1, 1).number() == 0.5);
    CHECK(a.block_entry(2, 1, 0, 0, 1, 1).number() == 0.5);
    CHECK(a.block_entry(1, 2, 1, 1, 1, 1).number() == 0.0);
    CHECK(a.block_entry(1, 1, 0, 1, 1, 1).number() == 0.0);
    CHECK(a.block_entry(1, 1, 1, 1, 1, 2).number() == -0.5);
    for (int r = 1; r <= 6; ++r)
        for (int c = 1; c <= 6; ++c)
            CHECK(a.entry(r, c).number() == a.entry(c, r).number());
}

TEST_CASE("linear lagrangians have a vanishing second variation matrix") {
    const JetLayout lay(1, 1, 1);
    const auto a = assemble_A(parse("x1*u1", lay), lay);
    for (int r = 1; r <= 2; ++r)
        for (int c = 1; c <= 2; ++c) CHECK(a.entry(r, c).number() == 0.0);
}

TEST_CASE("assemble_A is numerically symmetric on random lagrangians") {
    std::mt19937_64 rng(20240816);
    for (int trial = 0; trial < 30; ++trial) {
        const JetLayout lay(1 + trial % 2, 1 + trial % 3, trial % 2 + (trial % 2 == 0));
        vtest::ExprGen gen(lay, rng);
        const Expr L = gen.gen(2);
        const auto a = assemble_A(L, lay);
        for (int pt = 0; pt < 10; ++pt) {
            PointAssignment p;
            try {
                vtest::eval_resampled(L, lay, rng, &p);
            } catch (const std::runtime_error&) {
                break;
            }
            for (int r = 1; r <= a.dim(); ++r)
                for (int c = r + 1; c <= a.dim(); ++c) {
                    double vrc, vcr;
                    try {
                        vrc = eval(a.entry(r, c), p);
                        vcr = eval(a.entry(c, r), p);
                    } catch (const EvalError&) {
                        continue;
                    }
                    INFO(to_string(L));
                    CHECK(approx_equal(vrc, vcr, 1e-9));
                }
        }
    }
}

TEST_CASE("evaluate_A at specific points") {
    SECTION("arclength at zero slope") {
        const JetLayout lay(1, 1, 1);
        const auto a = assemble_A(parse("sqrt(1 + u1_x1^2)", lay), lay);
        const Matrix m = evaluate_A(a, PointAssignment(lay, {0.0}, {0.7, 0.0}));
        CHECK(m.at(0, 0) == 0.0);
        CHECK(m.at(0, 1) == 0.0);
        CHECK(m.at(1, 1) == 1.0);
    }
    SECTION("weighted arclength at u = 1, slope 1") {
        const JetLayout lay(1, 1, 1);
        const auto a = assemble_A(parse("u1*sqrt(1 + u1_x1^2)", lay), lay);
        const Matrix m = evaluate_A(a, PointAssignment(lay, {0.0}, {1.0, 1.0}));
        CHECK(approx_equal(m.at(0, 1), 1.0 / std::sqrt(2.0), 1e-12));
        CHECK(approx_equal(m.at(1, 0), 1.0 / std::sqrt(2.0), 1e-12));
        CHECK(approx_equal(m.at(1, 1), std::pow(2.0, -1.5), 1e-12));
        CHECK(m.at(0, 0) == 0.0);
        // det < 0 forces mixed signs.
        CHECK(m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0) < 0.0);
    }
    SECTION("constant matrices evaluate identically everywhere") {
        const JetLayout lay(2, 1, 2);
        const auto a = assemble_A(parse(vtest::fourth_order_plate_lagrangian(), lay), lay);
        std::mt19937_64 rng(31);
        const Matrix m1 = evaluate_A(a, vtest::random_point(lay, rng));
        const Matrix m2 = evaluate_A(a, vtest::random_point(lay, rng));
        for (int r = 0; r < 6; ++r)
            for (int c = 0; c < 6; ++c) CHECK(m1.at(r, c) == m2.at(r, c));
    }
}

TEST_CASE("jacobi eigenvalues on known matrices") {
    SECTION("2x2 with known spectrum") {
        const auto eig = symmetric_eigenvalues(from_rows({{2, -0.5}, {-0.5, 2}}));
        REQUIRE(eig.size() == 2);
        CHECK(approx_equal(eig[0], 1.5, 1e-12));
        CHECK(approx_equal(eig[1], 2.5, 1e-12));
    }
    SECTION("order-2 block of the fourth-order problem: {1, 2.5, 2.5}") {
        const auto eig = symmetric_eigenvalues(
            from_rows({{2, -0.5, -0.5}, {-0.5, 2, -0.5}, {-0.5, -0.5, 2}}));
        REQUIRE(eig.size() == 3);
        CHECK(std::abs(eig[0] - 1.0) <= 1e-9);
        CHECK(std::abs(eig[1] - 2.5) <= 1e-9);
        CHECK(std::abs(eig[2] - 2.5) <= 1e-9);
    }
    SECTION("trace and Frobenius identities on random symmetric matrices") {
        std::mt19937_64 rng(77);
        std::uniform_real_distribution<double> dist(-2.0, 2.0);
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 2 + trial % 5;
            Matrix m(n, n);
            double trace = 0.0, frob2 = 0.0;
            for (int r = 0; r < n; ++r)
                for (int c = r; c < n; ++c) {
                    const double v = dist(rng);
                    m.at(r, c) = v;
                    m.at(c, r) = v;
                }
            for (int r = 0; r < n; ++r) trace += m.at(r, r);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) frob2 += m.at(r, c) * m.at(r, c);
            const auto eig = symmetric_eigenvalues(m);
            double sum = 0.0, sum2 = 0.0;
            for (double e : eig) {
                sum += e;
                sum2 += e * e;
            }
            CHECK(approx_equal(sum, trace, 1e-10));
            CHECK(approx_equal(sum2, frob2, 1e-10));
        }
    }
}

TEST_CASE("definiteness classification") {
    std::mt19937_64 rng(20240817);
    SECTION("stated examples") {
        CHECK(definiteness(from_rows({{2, -0.5}, {-0.5, 2}})) ==
              Definiteness::PositiveDefinite);
        CHECK(definiteness(from_rows({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}})) ==
              Definiteness::Zero);
        const double c = 1.0 / std::sqrt(2.0);
        CHECK(definiteness(from_rows({{0, c}, {c, std::pow(2.0, -1.5)}})) ==
              Definiteness::Indefinite);
        CHECK(definiteness(from_rows({{0, 0}, {0, 1}})) ==
              Definiteness::PositiveSemidefinite);
        CHECK(definiteness(from_rows({{-2, 0}, {0, -1}})) ==
              Definiteness::NegativeDefinite);
        CHECK(definiteness(from_rows({{0, 0}, {0, -1}})) ==
              Definiteness::NegativeSemidefinite);
    }
    SECTION("agrees with the brute-force oracle on the worked matrices") {
        const std::vector<Matrix> mats = {
            from_rows({{0, 0}, {0, 1}}),
            from_rows({{2, -0.5}, {-0.5, 2}}),
            from_rows({{2, 0.5}, {0.5, 2}}),
            from_rows({{2, -0.5, -0.5}, {-0.5, 2, -0.5}, {-0.5, -0.5, 2}}),
            from_rows({{0, 1.0 / std::sqrt(2.0)},
                       {1.0 / std::sqrt(2.0), std::pow(2.0, -1.5)}}),
            from_rows({{0, 0}, {0, -1}}),
        };
        for (const Matrix& m : mats)
            CHECK(definiteness(m) == brute_force_definiteness(m, rng));
    }
    SECTION("non-symmetric input is rejected") {
        CHECK_THROWS_AS(definiteness(from_rows({{1, 2}, {0, 1}})), ShapeError);
    }
}

TEST_CASE("legendre_matrix condenses same-order blocks") {
    SECTION("fourth-order problem") {
        const JetLayout lay(2, 1, 2);
        const auto a = assemble_A(parse(vtest::fourth_order_plate_lagrangian(), lay), lay);
        CHECK(legendre_matrix(a, 0)[0][0].number() == 2.0);
        CHECK(legendre_matrix(a, 1)[0][0].number() == 3.0);  // 2 - 1/2 - 1/2 + 2
        CHECK(legendre_matrix(a, 2)[0][0].number() == 3.0);  // 3*2 + 6*(-1/2)
    }
    SECTION("coupled problem at order 0") {
        const JetLayout lay(2, 2, 1);
        const auto a = assemble_A(parse(vtest::coupled_membrane_lagrangian(), lay), lay);
        const auto m0 = legendre_matrix(a, 0);
        CHECK(m0[0][0].number() == 2.0);
        CHECK(m0[0][1].number() == 0.5);
        CHECK(m0[1][0].number() == 0.5);
        CHECK(m0[1][1].number() == 2.0);
    }
    SECTION("always symmetric") {
        std::mt19937_64 rng(55);
        const JetLayout lay(2, 2, 1);
        vtest::ExprGen gen(lay, rng);
        for (int trial = 0; trial < 10; ++trial) {
            const Expr L = gen.gen(2);
            const auto a = assemble_A(L, lay);
            for (int l = 0; l <= 1; ++l) {
                const auto ml = legendre_matrix(a, l);
                for (int pt = 0; pt < 3; ++pt) {
                    PointAssignment p;
                    try {
                        vtest::eval_resampled(L, lay, rng, &p);
                    } catch (const std::runtime_error&) {
                        break;
                    }
                    for (std::size_t j = 0; j < ml.size(); ++j)
                        for (std::size_t jp = j + 1; jp < ml.size(); ++jp) {
                            double a1, a2;
                            try {
                                a1 = eval(ml[j][jp], p);
                                a2 = eval(ml[jp][j], p);
                            } catch (const EvalError&) {
                                continue;
                            }
                            CHECK(approx_equal(a1, a2, 1e-9));
                        }
                }
            }
        }
    }
}

TEST_CASE("legendre_check along candidates") {
    SECTION("arclength: order-0 condensed matrix is zero, order-1 is definite") {
        const Problem prob = vtest::arclength_problem(21);
        const auto a = assemble_A(effective_lagrangian(prob), prob.layout);
        const auto rep = legendre_check(prob, vtest::arclength_line(), a);
        REQUIRE(rep.condensed.size() == 2);
        CHECK(rep.condensed[0] == Definiteness::Zero);
        CHECK(rep.condensed[1] == Definiteness::PositiveDefinite);
    }
    SECTION("fourth-order problem: all diagonal blocks positive definite") {
        const Problem prob = vtest::fourth_order_plate_problem(5);
        const auto a = assemble_A(effective_lagrangian(prob), prob.layout);
        const auto rep =
            legendre_check(prob, vtest::fourth_order_plate_candidate(), a);
        REQUIRE(rep.diagonal_blocks.size() == 3);
        for (const auto& b : rep.diagonal_blocks)
            CHECK(b.status == Definiteness::PositiveDefinite);
    }
    SECTION("zero lagrangian: everything zero") {
        const JetLayout lay(1, 1, 1);
        Problem prob(lay, parse("0", lay), {{0.0, 1.0}}, {5});
        const auto a = assemble_A(effective_lagrangian(prob), prob.layout);
        const auto rep = legendre_check(prob, vtest::arclength_line(), a);
        for (Definiteness d : rep.condensed) CHECK(d == Definiteness::Zero);
        for (const auto& b : rep.diagonal_blocks) CHECK(b.status == Definiteness::Zero);
    }
}

TEST_CASE("decomposition of the second variation") {
    SECTION("single dependent variable, block-diagonal A: cross parts vanish") {
        const Problem prob = vtest::fourth_order_plate_problem(5);
        const JetLayout& lay = prob.layout;
        const auto a = assemble_A(effective_lagrangian(prob), lay);
        const std::vector<Expr> phi{parse("x1*x2*(1 - x1)*(1 - x2)", lay)};
        const auto parts = decompose_J1_J2_I2(prob, vtest::fourth_order_plate_candidate(),
                                              a, phi, 12);
        CHECK(parts.j2 == 0.0);
        CHECK(parts.i2 == 0.0);
        CHECK(approx_equal(parts.full, parts.j1, 1e-10));
    }
    SECTION("zero direction gives zeros") {
        const Problem prob = vtest::arclength_problem(5);
        const auto a = assemble_A(effective_lagrangian(prob), prob.layout);
        const std::vector<Expr> phi{parse("0", prob.layout)};
        const auto parts = decompose_J1_J2_I2(prob, vtest::arclength_line(), a, phi, 8);
        CHECK(parts.j1 == 0.0);
        CHECK(parts.j2 == 0.0);
        CHECK(parts.i2 == 0.0);
    }
    SECTION("the identity full == j1 + 2*(j2 + i2)") {
        const Problem prob = vtest::coupled_membrane_problem(5);
        const JetLayout& lay = prob.layout;
        const auto a = assemble_A(effective_lagrangian(prob), lay);
        const std::vector<Expr> phi{parse("x1*x2*(1 - x1)*(1 - x2)", lay),
                                    parse("x1^2*x2*(1 - x1)*(1 - x2)", lay)};
        const auto parts = decompose_J1_J2_I2(prob, vtest::coupled_membrane_candidate(),
                                              a, phi, 12);
        CHECK(approx_equal(parts.full, parts.j1 + 2.0 * (parts.j2 + parts.i2), 1e-9));
        CHECK(parts.j2 != 0.0);  // the order-0 cross block is 1/2
    }
}

TEST_CASE("classify on the worked problems") {
    SECTION("straight line: weak minimum (A is semidefinite, not definite)") {
        const auto rep = classify(vtest::arclength_problem(41), vtest::arclength_line());
        CHECK(rep.verdict == Verdict::WeakMin);
        CHECK(rep.el_residual <= 1e-10);
        CHECK(rep.tally.at(Definiteness::PositiveSemidefinite) == rep.nodes);
    }
    SECTION("catenary: saddle") {
        const auto rep =
            classify(vtest::hanging_surface_problem(21), vtest::catenary_candidate());
        CHECK(rep.verdict == Verdict::Saddle);
        CHECK(rep.tally.at(Definiteness::Indefinite) > 0);
    }
    SECTION("coupled problem: strict weak minimum") {
        const auto rep = classify(vtest::coupled_membrane_problem(11),
                                  vtest::coupled_membrane_candidate());
        CHECK(rep.verdict == Verdict::StrictWeakMin);
        CHECK(rep.tally.at(Definiteness::PositiveDefinite) == rep.nodes);
    }
    SECTION("fourth-order problem: strict weak minimum") {
        const auto rep = classify(vtest::fourth_order_plate_problem(11),
                                  vtest::fourth_order_plate_candidate());
        CHECK(rep.verdict == Verdict::StrictWeakMin);
    }
    SECTION("residual gate rejects non-solutions") {
        const JetLayout lay(1, 1, 1);
        const auto rep = classify(vtest::arclength_problem(21),
                                  Candidate{{parse("x1^2", lay)}});
        CHECK(rep.verdict == Verdict::Inconclusive);
        REQUIRE(!rep.notes.empty());
        CHECK(rep.notes[0].find("fails Euler-Lagrange residual") != std::string::npos);
    }
}

TEST_CASE("verdict table edge cases") {
    SECTION("a mix of definite and semidefinite nodes is a weak minimum") {
        // A = diag(2, 2*x1) on [0, 1]: semidefinite at x1 = 0, definite
        // elsewhere; u = 0 is extremal.
        const JetLayout lay(1, 1, 1);
        Problem prob(lay, parse("u1^2 + x1*u1_x1^2", lay), {{0.0, 1.0}}, {11});
        const auto rep = classify(prob, Candidate{{parse("0", lay)}});
        CHECK(rep.verdict == Verdict::WeakMin);
        CHECK(rep.tally.at(Definiteness::PositiveDefinite) == 10);
        CHECK(rep.tally.at(Definiteness::PositiveSemidefinite) == 1);
    }
    SECTION("definite with both signs across nodes but never indefinite") {
        // A = [2*(x1 - 1/2)]: negative on the left half, positive on the
        // right, zero at the midpoint; no single node is indefinite.
        const JetLayout lay(1, 1, 0);
        Problem prob(lay, parse("(x1 - 0.5)*u1^2", lay), {{0.0, 1.0}}, {11});
        const auto rep = classify(prob, Candidate{{parse("0", lay)}});
        CHECK(rep.verdict == Verdict::Inconclusive);
        CHECK(rep.tally.count(Definiteness::Indefinite) == 0);
        CHECK(rep.tally.at(Definiteness::PositiveDefinite) > 0);
        CHECK(rep.tally.at(Definiteness::NegativeDefinite) > 0);
    }
    SECTION("an everywhere-zero matrix counts as a weak minimum") {
        const JetLayout lay(1, 1, 0);
        Problem prob(lay, parse("0*u1", lay), {{0.0, 1.0}}, {5});
        const auto rep = classify(prob, Candidate{{parse("0", lay)}});
        CHECK(rep.verdict == Verdict::WeakMin);
        CHECK(rep.tally.at(Definiteness::Zero) == 5);
    }
}

TEST_CASE("negating the lagrangian swaps minimum and maximum verdicts") {
    auto negated = [](const Problem& prob) {
        Problem out = prob;
        out.lagrangian = simplify(Expr::neg(prob.lagrangian));
        return out;
    };
    CHECK(classify(negated(vtest::arclength_problem(21)), vtest::arclength_line()).verdict ==
          Verdict::WeakMax);
    CHECK(classify(negated(vtest::coupled_membrane_problem(7)),
                   vtest::coupled_membrane_candidate())
              .verdict == Verdict::StrictWeakMax);
    CHECK(classify(negated(vtest::fourth_order_plate_problem(7)),
                   vtest::fourth_order_plate_candidate())
              .verdict == Verdict::StrictWeakMax);
    CHECK(classify(negated(vtest::hanging_surface_problem(15)),
                   vtest::catenary_candidate())
              .verdict == Verdict::Saddle);
}
