#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "varcond/second_order.hpp"

// Independent numeric ground truth: quadrature evaluation of the
// functional, finite-difference first and second derivatives of
// t -> F(u + t*phi), the piecewise bump family of test directions, and
// the cross-checks that gate every symbolic result.

namespace varcond {

// The piecewise bump factor: 1 for l = 0; on [-1, 1] it is 1 - y^l*sign(y)
// for odd l and 1 - y^l for even l; 0 outside.
inline double psi(int l, double y) {
    if (l < 0) throw AddressError("psi order must be >= 0");
    return detail::psi_piece_value(l, 0, y);
}

// k-th derivative of psi_l, taken piecewise (the kink values follow the
// right-hand piece).
inline double psi_derivative(int l, int k, double y) {
    if (l < 0 || k < 0) throw AddressError("psi order and derivative must be >= 0");
    return detail::psi_piece_value(l, k, y);
}

// A compactly supported test direction: order parameter l, center, radius
// (the scaling epsilon) and one weight per dependent variable.
struct BumpDirection {
    int l = 0;
    std::vector<double> center;
    double radius = 0.0;
    std::vector<double> weights;
};

namespace detail {

inline void check_bump(const BumpDirection& b, const Problem& problem) {
    const int n = problem.layout.n();
    if (static_cast<int>(b.center.size()) != n)
        throw ArityError("bump center needs " + std::to_string(n) + " coordinates");
    if (static_cast<int>(b.weights.size()) != problem.layout.m())
        throw ArityError("bump needs " + std::to_string(problem.layout.m()) + " weights");
    if (!(b.radius > 0.0)) throw PlacementError("bump radius must be positive");
    if (b.l < 0 || b.l > problem.layout.order())
        throw PlacementError("bump order parameter out of [0, s]");
    const double ball = b.radius * std::sqrt(static_cast<double>(n));
    for (int i = 0; i < n; ++i) {
        const auto& iv = problem.domain[static_cast<std::size_t>(i)];
        const double c = b.center[static_cast<std::size_t>(i)];
        if (c - ball < iv[0] - 1e-12 || c + ball > iv[1] + 1e-12)
            throw PlacementError("bump support ball of radius " + format_double(ball) +
                                 " around x" + std::to_string(i + 1) + " = " +
                                 format_double(c) + " sticks out of the domain");
    }
}

inline std::vector<Expr> support_indicators(const BumpDirection& b, int n) {
    std::vector<Expr> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i)
        out.push_back(Expr::indicator(i, b.center[static_cast<std::size_t>(i - 1)] - b.radius,
                                      b.center[static_cast<std::size_t>(i - 1)] + b.radius));
    return out;
}

}  // namespace detail

// The piecewise family: phi^j = xi^j * eps^l * sum_i psi_l((x^i - c^i)/eps),
// cut to the support box.  Derivatives of order >= 1 exist off the kinks
// and are what the evaluator returns there.
inline std::vector<Expr> bump_direction(const BumpDirection& b, const Problem& problem) {
    detail::check_bump(b, problem);
    const int n = problem.layout.n();
    std::vector<Expr> psi_terms;
    for (int i = 1; i <= n; ++i)
        psi_terms.push_back(Expr::psi_piece(b.l, 0, i,
                                            b.center[static_cast<std::size_t>(i - 1)],
                                            b.radius));
    const Expr shape = Expr::add(std::move(psi_terms));
    const std::vector<Expr> cut = detail::support_indicators(b, n);
    const double scale = std::pow(b.radius, b.l);

    std::vector<Expr> out;
    for (double xi : b.weights) {
        if (xi == 0.0) {
            out.push_back(Expr::number_of(0.0));
            continue;
        }
        std::vector<Expr> factors{Expr::number_of(xi * scale), shape};
        for (const Expr& c : cut) factors.push_back(c);
        out.push_back(simplify(Expr::mul(std::move(factors))));
    }
    return out;
}

// Smooth alternative with the same support box: one factor
// (1 - ((x^i - c^i)/eps)^2)^(s+1) per axis, which is C^s across the box
// boundary and polynomial inside.
inline std::vector<Expr> smooth_bump_direction(const BumpDirection& b, const Problem& problem) {
    detail::check_bump(b, problem);
    const int n = problem.layout.n();
    const int power = problem.layout.order() + 1;
    std::vector<Expr> factors;
    for (int i = 1; i <= n; ++i) {
        const double c = b.center[static_cast<std::size_t>(i - 1)];
        const Expr y = Expr::mul({Expr::add({Expr::indep(i), Expr::number_of(-c)}),
                                  Expr::number_of(1.0 / b.radius)});
        factors.push_back(Expr::pow_of(
            Expr::add({Expr::number_of(1.0), Expr::neg(Expr::pow_of(y, Rational(2)))}),
            Rational(power)));
    }
    for (const Expr& c : detail::support_indicators(b, n)) factors.push_back(c);
    const Expr shape = Expr::mul(std::move(factors));

    std::vector<Expr> out;
    for (double xi : b.weights) {
        if (xi == 0.0) {
            out.push_back(Expr::number_of(0.0));
            continue;
        }
        out.push_back(simplify(Expr::mul({Expr::number_of(xi), shape})));
    }
    return out;
}

// Seeded bump with support comfortably inside the domain.
inline BumpDirection random_bump(const Problem& problem, std::mt19937_64& rng,
                                 int min_l = 0) {
    const int n = problem.layout.n();
    const int s = problem.layout.order();
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    BumpDirection b;
    std::uniform_int_distribution<int> l_dist(std::min(min_l, s), s);
    b.l = l_dist(rng);

    double min_len = problem.domain[0][1] - problem.domain[0][0];
    for (const auto& iv : problem.domain) min_len = std::min(min_len, iv[1] - iv[0]);
    b.radius = (0.08 + 0.10 * u01(rng)) * min_len;
    const double ball = b.radius * std::sqrt(static_cast<double>(n));
    for (const auto& iv : problem.domain) {
        const double lo = iv[0] + ball;
        const double hi = iv[1] - ball;
        b.center.push_back(lo + (hi - lo) * u01(rng));
    }
    b.weights.resize(static_cast<std::size_t>(problem.layout.m()));
    double max_abs = 0.0;
    for (double& w : b.weights) {
        w = 2.0 * u01(rng) - 1.0;
        max_abs = std::max(max_abs, std::abs(w));
    }
    if (max_abs < 0.2) b.weights[0] = 1.0;
    return b;
}

namespace detail {

[[noreturn]] inline void rethrow_at_node(const EvalError& err, std::span<const double> x) {
    std::string loc = "(";
    for (std::size_t i = 0; i < x.size(); ++i) loc += (i ? ", " : "") + format_double(x[i]);
    loc += ")";
    throw EvalError(EvalError::preformatted{},
                    std::string(err.what()) + " at quadrature node " + loc, err.where);
}

}  // namespace detail

// Quadrature of an expression over x and jets along prolonged components.
inline double integrate_along(const Problem& problem, const Expr& integrand,
                              const std::vector<Expr>& components, int quad_nodes = 32) {
    int needed = std::max(problem.layout.order(), max_jet_order(integrand));
    const JetLayout full(problem.layout.n(), problem.layout.m(), needed);
    const std::vector<Expr> prolonged = prolong(components, full);

    std::vector<std::vector<double>> breakpoints(static_cast<std::size_t>(full.n()));
    collect_breakpoints(integrand, breakpoints);
    for (const Expr& c : components) collect_breakpoints(c, breakpoints);

    std::vector<double> lo, hi;
    for (const auto& iv : problem.domain) {
        lo.push_back(iv[0]);
        hi.push_back(iv[1]);
    }
    return integrate_box(
        [&](std::span<const double> x) {
            try {
                const PointAssignment p =
                    assignment_at(full, std::vector<double>(x.begin(), x.end()), prolonged);
                return eval(integrand, p);
            } catch (const EvalError& err) {
                detail::rethrow_at_node(err, x);
            }
        },
        lo, hi, breakpoints, quad_nodes);
}

// F(u) by tensor Gauss-Legendre quadrature of the (effective) Lagrangian
// over the domain box.
inline double functional_value(const Problem& problem, const std::vector<Expr>& components,
                               int quad_nodes = 32) {
    return integrate_along(problem, effective_lagrangian(problem), components, quad_nodes);
}

struct FdVariations {
    double d1 = 0.0;    // central difference of Phi at 0
    double d2 = 0.0;    // central second difference
    double phi0 = 0.0;  // Phi(0) = F(u)
};

// Finite differences of Phi(t) = F(u + t*phi).
inline FdVariations fd_first_second(const Problem& problem, const Candidate& cand,
                                    const std::vector<Expr>& phi, double h = 1e-4,
                                    int quad_nodes = 32) {
    if (!(h > 0.0)) throw ArityError("finite-difference step must be positive");
    if (phi.size() != cand.components.size())
        throw ArityError("test direction component count mismatch");
    auto shifted = [&](double t) {
        std::vector<Expr> comps;
        comps.reserve(cand.components.size());
        for (std::size_t j = 0; j < cand.components.size(); ++j)
            comps.push_back(Expr::add(
                {cand.components[j], Expr::mul({Expr::number_of(t), phi[j]})}));
        return functional_value(problem, comps, quad_nodes);
    };
    const double plus = shifted(h);
    const double minus = shifted(-h);
    const double zero = functional_value(problem, cand.components, quad_nodes);
    FdVariations out;
    out.d1 = (plus - minus) / (2.0 * h);
    out.d2 = (plus - 2.0 * zero + minus) / (h * h);
    out.phi0 = zero;
    return out;
}

struct CrossCheckOptions {
    double h = 1e-4;
    int quad_nodes = 32;
    double first_tol = 1e-5;   // relative to 1 + |fd|
    double second_tol = 1e-4;  // relative to 1 + |fd|
};

struct CrossCheckResult {
    double symbolic_first = 0.0;
    double fd_first = 0.0;
    double quadrature_second = 0.0;
    double fd_second = 0.0;
    bool first_ok = false;
    bool second_ok = false;
    bool ok() const { return first_ok && second_ok; }
};

// Compares the symbolic first variation and the second-variation quadratic
// form against their finite-difference counterparts.
inline CrossCheckResult cross_check(const Problem& problem, const Candidate& cand,
                                    const std::vector<Expr>& phi,
                                    const CrossCheckOptions& opts = {}) {
    const Expr L = effective_lagrangian(problem);
    const Expr integrand = first_variation_integrand(L, problem.layout, phi);
    CrossCheckResult res;
    res.symbolic_first = integrate_along(problem, integrand, cand.components, opts.quad_nodes);

    const SecondVariationMatrix a = assemble_A(L, problem.layout);
    res.quadrature_second =
        quadratic_form_parts(problem, cand, a, phi, opts.quad_nodes).full;

    const FdVariations fd = fd_first_second(problem, cand, phi, opts.h, opts.quad_nodes);
    res.fd_first = fd.d1;
    res.fd_second = fd.d2;
    res.first_ok =
        std::abs(res.symbolic_first - fd.d1) <= opts.first_tol * (1.0 + std::abs(fd.d1));
    res.second_ok =
        std::abs(res.quadrature_second - fd.d2) <= opts.second_tol * (1.0 + std::abs(fd.d2));
    return res;
}

struct FalsifierOutcome {
    bool counterexample = false;
    int tried = 0;
    double value = 0.0;  // J2 + I2 at the witness
    BumpDirection witness;
};

// Random search for a violation of the cross-term condition J2 + I2 >= 0.
// A clean sweep is reported as no-counterexample; it is a search outcome,
// not a proof.
inline FalsifierOutcome sufficient_thmmm_falsifier(const Problem& problem,
                                                   const Candidate& cand,
                                                   const SecondVariationMatrix& a, int count,
                                                   std::uint64_t seed = 0,
                                                   int quad_nodes = 32) {
    if (count < 1) throw ArityError("falsifier needs count >= 1");
    std::mt19937_64 rng(seed);
    FalsifierOutcome out;
    for (int i = 0; i < count; ++i) {
        const BumpDirection b = random_bump(problem, rng);
        const std::vector<Expr> phi = bump_direction(b, problem);
        const QuadraticFormParts parts = quadratic_form_parts(problem, cand, a, phi, quad_nodes);
        ++out.tried;
        const double cross = parts.j2 + parts.i2;
        const double scale = 1.0 + std::abs(parts.j1) + std::abs(parts.full);
        if (cross < -1e-9 * scale) {
            out.counterexample = true;
            out.value = cross;
            out.witness = b;
            return out;
        }
        out.value = cross;
    }
    return out;
}

}  // namespace varcond
