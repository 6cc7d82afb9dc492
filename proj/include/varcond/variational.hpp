#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "varcond/calculus.hpp"
#include "varcond/expr.hpp"
#include "varcond/parser.hpp"
#include "varcond/simplify.hpp"

// First variations, Euler-Lagrange systems (with and without constraints),
// and numeric residual checks of candidate extremals on tensor grids.

namespace varcond {

// One pointwise constraint F(x, u^(s2)) = 0 with its user-supplied
// multiplier lambda(x).
struct Constraint {
    Expr f;
    Expr multiplier;  // expression in x only
};

// A complete variational problem over a box domain.
struct Problem {
    Problem(JetLayout lay, Expr lagrangian_expr,
            std::vector<std::array<double, 2>> domain_box, std::vector<int> grid_res)
        : layout(std::move(lay)),
          lagrangian(std::move(lagrangian_expr)),
          domain(std::move(domain_box)),
          grid(std::move(grid_res)),
          plain_count(layout.m()) {
        validate();
    }

    JetLayout layout;
    Expr lagrangian;
    std::vector<Constraint> constraints;
    // Extra multipliers for the underdetermined split; they enter every
    // constraint through the combined scalar (lambda^l + sum of these).
    std::vector<Expr> tilde_multipliers;
    std::vector<std::array<double, 2>> domain;  // n closed intervals
    std::vector<int> grid;                      // n resolutions, each >= 2
    // Components 1..plain_count are the u block; the rest are the tilde
    // block of the underdetermined formulation.  Equal to m by default.
    int plain_count;

    void validate() const {
        if (static_cast<int>(domain.size()) != layout.n())
            throw ArityError("domain needs " + std::to_string(layout.n()) + " intervals");
        if (static_cast<int>(grid.size()) != layout.n())
            throw ArityError("grid needs " + std::to_string(layout.n()) + " resolutions");
        for (const auto& iv : domain)
            if (!(iv[0] < iv[1])) throw ArityError("domain interval is empty");
        for (int r : grid)
            if (r < 2) throw ArityError("grid resolution must be >= 2");
        if (max_jet_order(lagrangian) > layout.order())
            throw ArityError("lagrangian derivative order exceeds the layout order");
        for (const Constraint& c : constraints) {
            if (max_jet_order(c.f) > layout.order())
                throw ArityError("constraint derivative order exceeds the layout order");
            if (contains_jets(c.multiplier))
                throw ArityError("multipliers must be expressions in x only");
        }
        for (const Expr& t : tilde_multipliers)
            if (contains_jets(t))
                throw ArityError("multipliers must be expressions in x only");
        if (plain_count < 1 || plain_count > layout.m())
            throw ArityError("component split out of range");
    }
};

// Candidate extremal: m closed-form components u^j(x).
struct Candidate {
    std::vector<Expr> components;
};

// Euler-Lagrange residual expressions, one per dependent variable, over
// the order-2s jet layout.
struct ELSystem {
    std::vector<Expr> residuals;
};

namespace detail {

// The alternating-sign operator shared by the EL equations and every
// multiplier system: sum over orders k and slots h of
// (-1)^k D_(k)[h] ( d(expr)/d u^j_(k)[h] ), for the given dependent index.
inline Expr el_operator(const Expr& expr, const JetLayout& lay, int dep, int max_order) {
    std::vector<Expr> terms;
    for (int k = 0; k <= max_order; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        for (const MultiIndex& mi : lay.slots(k)) {
            const Expr partial = diff_jet(expr, JetCoordinate(dep, mi));
            if (detail::is_number(partial, 0.0)) continue;
            terms.push_back(
                Expr::mul({Expr::number_of(sign), total_derivative_multi(partial, mi)}));
        }
    }
    return simplify(Expr::add(std::move(terms)));
}

}  // namespace detail

// Euler-Lagrange system of a Lagrangian of order <= layout.order().
inline ELSystem euler_lagrange(const Expr& lagrangian, const JetLayout& lay) {
    if (max_jet_order(lagrangian) > lay.order())
        throw ArityError("lagrangian derivative order exceeds the layout order");
    ELSystem sys;
    sys.residuals.reserve(static_cast<std::size_t>(lay.m()));
    for (int j = 1; j <= lay.m(); ++j)
        sys.residuals.push_back(detail::el_operator(lagrangian, lay, j, lay.order()));
    return sys;
}

// Integrand of the first variation for test directions phi (one x-only
// expression per dependent variable): sum over (j, k, h) of the prolonged
// phi^j_(k)[h] times dL/du^j_(k)[h].
inline Expr first_variation_integrand(const Expr& lagrangian, const JetLayout& lay,
                                      const std::vector<Expr>& phi) {
    if (static_cast<int>(phi.size()) != lay.m())
        throw ArityError("need " + std::to_string(lay.m()) + " test components");
    for (const Expr& p : phi)
        if (contains_jets(p)) throw ArityError("test directions must be x-only");
    std::vector<Expr> terms;
    for (int j = 1; j <= lay.m(); ++j) {
        for (int k = 0; k <= lay.order(); ++k) {
            for (const MultiIndex& mi : lay.slots(k)) {
                const Expr partial = diff_jet(lagrangian, JetCoordinate(j, mi));
                if (detail::is_number(partial, 0.0)) continue;
                terms.push_back(Expr::mul(
                    {partial_indep_multi(phi[static_cast<std::size_t>(j - 1)], mi), partial}));
            }
        }
    }
    return simplify(Expr::add(std::move(terms)));
}

// Augmented Lagrangian G = L + sum_l lambda^l F_l (determined case: one
// constraint and one multiplier per dependent variable).
inline Expr augment(const Expr& lagrangian, std::span<const Constraint> constraints,
                    int expected_count) {
    if (static_cast<int>(constraints.size()) != expected_count)
        throw ArityError("expected " + std::to_string(expected_count) +
                         " constraints with multipliers, got " +
                         std::to_string(constraints.size()));
    std::vector<Expr> terms{lagrangian};
    for (const Constraint& c : constraints)
        terms.push_back(Expr::mul({c.multiplier, c.f}));
    return simplify(Expr::add(std::move(terms)));
}

// Residuals of the multiplier system: the EL-shaped operator applied to
// sum_l lambda^l F_l, one residual per dependent variable.
inline std::vector<Expr> multiplier_system(std::span<const Constraint> constraints,
                                           const JetLayout& lay) {
    std::vector<Expr> weighted;
    int s2 = 0;
    for (const Constraint& c : constraints) {
        weighted.push_back(Expr::mul({c.multiplier, c.f}));
        s2 = std::max(s2, max_jet_order(c.f));
    }
    const Expr total = simplify(Expr::add(std::move(weighted)));
    std::vector<Expr> out;
    if (constraints.empty()) return out;
    out.reserve(static_cast<std::size_t>(lay.m()));
    for (int j = 1; j <= lay.m(); ++j)
        out.push_back(detail::el_operator(total, lay, j, s2));
    return out;
}

namespace detail {

// Combined scalar sum_l (lambda^l + sum_lt tilde^lt) F_l of the
// underdetermined formulation.
inline Expr combined_constraint_scalar(std::span<const Constraint> constraints,
                                       std::span<const Expr> tilde) {
    std::vector<Expr> tilde_sum_terms;
    for (const Expr& t : tilde) tilde_sum_terms.push_back(t);
    const Expr tilde_sum = Expr::add(std::move(tilde_sum_terms));
    std::vector<Expr> terms;
    for (const Constraint& c : constraints)
        terms.push_back(Expr::mul({Expr::add({c.multiplier, tilde_sum}), c.f}));
    return simplify(Expr::add(std::move(terms)));
}

}  // namespace detail

// Underdetermined case (fewer constraints than dependent variables): the
// dependent variables split into a u block of `plain_count` components and
// a tilde block; there is one constraint and one lambda per u component
// plus one extra multiplier per tilde component, all entering through a
// single combined scalar.
inline Expr augment_underdetermined(const Expr& lagrangian,
                                    std::span<const Constraint> constraints,
                                    std::span<const Expr> tilde_multipliers,
                                    int plain_count, int total_count) {
    if (static_cast<int>(constraints.size()) != plain_count)
        throw ArityError("underdetermined case needs one constraint per plain component (" +
                         std::to_string(plain_count) + "), got " +
                         std::to_string(constraints.size()));
    if (static_cast<int>(tilde_multipliers.size()) != total_count - plain_count)
        throw ArityError("underdetermined case needs one extra multiplier per tilde "
                         "component (" +
                         std::to_string(total_count - plain_count) + "), got " +
                         std::to_string(tilde_multipliers.size()));
    return simplify(Expr::add(
        {lagrangian, detail::combined_constraint_scalar(constraints, tilde_multipliers)}));
}

// Multiplier system for the underdetermined split: EL-shaped residuals of
// the combined scalar with respect to every u^j and every tilde component.
inline std::vector<Expr> multiplier_system_underdetermined(
    std::span<const Constraint> constraints, std::span<const Expr> tilde_multipliers,
    const JetLayout& lay, int plain_count) {
    if (static_cast<int>(constraints.size()) != plain_count)
        throw ArityError("underdetermined case needs one constraint per plain component");
    if (static_cast<int>(tilde_multipliers.size()) != lay.m() - plain_count)
        throw ArityError("underdetermined case needs one extra multiplier per tilde "
                         "component");
    const Expr total = detail::combined_constraint_scalar(constraints, tilde_multipliers);
    const int s2 = std::min(max_jet_order(total), lay.order());
    std::vector<Expr> out;
    out.reserve(static_cast<std::size_t>(lay.m()));
    for (int j = 1; j <= lay.m(); ++j)
        out.push_back(detail::el_operator(total, lay, j, s2));
    return out;
}

// Effective Lagrangian of a problem: plain, augmented, or underdetermined
// depending on its constraint block.
inline Expr effective_lagrangian(const Problem& problem) {
    if (problem.constraints.empty()) return simplify(problem.lagrangian);
    if (problem.plain_count == problem.layout.m())
        return augment(problem.lagrangian, problem.constraints, problem.layout.m());
    return augment_underdetermined(problem.lagrangian, problem.constraints,
                                   problem.tilde_multipliers, problem.plain_count,
                                   problem.layout.m());
}

// Visits every tensor-grid node of the problem domain.
inline void for_each_grid_node(const Problem& problem,
                               const std::function<void(std::span<const double>)>& fn) {
    const int n = problem.layout.n();
    std::vector<int> counter(static_cast<std::size_t>(n), 0);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (;;) {
        for (int i = 0; i < n; ++i) {
            const auto& iv = problem.domain[static_cast<std::size_t>(i)];
            const int r = problem.grid[static_cast<std::size_t>(i)];
            x[static_cast<std::size_t>(i)] =
                iv[0] + (iv[1] - iv[0]) * counter[static_cast<std::size_t>(i)] / (r - 1);
        }
        fn(x);
        int i = 0;
        while (i < n &&
               ++counter[static_cast<std::size_t>(i)] == problem.grid[static_cast<std::size_t>(i)]) {
            counter[static_cast<std::size_t>(i)] = 0;
            ++i;
        }
        if (i == n) break;
    }
}

struct ResidualReport {
    double max_abs = 0.0;
    std::vector<double> per_equation;
};

// Substitutes the candidate's prolongation into every EL residual and
// evaluates on the tensor grid.  Uses the effective (augmented) Lagrangian
// when constraints are present.
inline ResidualReport el_residual_on_grid(const Problem& problem, const Candidate& cand) {
    if (static_cast<int>(cand.components.size()) != problem.layout.m())
        throw ArityError("candidate has " + std::to_string(cand.components.size()) +
                         " components, m=" + std::to_string(problem.layout.m()));
    const Expr L = effective_lagrangian(problem);
    const ELSystem sys = euler_lagrange(L, problem.layout);

    int needed = problem.layout.order();
    for (const Expr& r : sys.residuals) needed = std::max(needed, max_jet_order(r));
    const JetLayout full(problem.layout.n(), problem.layout.m(), needed);
    const std::vector<Expr> prolonged = prolong(cand.components, full);

    ResidualReport report;
    report.per_equation.assign(sys.residuals.size(), 0.0);
    for_each_grid_node(problem, [&](std::span<const double> x) {
        PointAssignment p;
        try {
            p = assignment_at(full, std::vector<double>(x.begin(), x.end()), prolonged);
            for (std::size_t j = 0; j < sys.residuals.size(); ++j) {
                const double v = std::abs(eval(sys.residuals[j], p));
                report.per_equation[j] = std::max(report.per_equation[j], v);
                report.max_abs = std::max(report.max_abs, v);
            }
        } catch (const EvalError& err) {
            std::string loc = "(";
            for (std::size_t i = 0; i < x.size(); ++i)
                loc += (i ? ", " : "") + format_double(x[i]);
            loc += ")";
            throw EvalError(EvalError::preformatted{},
                            std::string(err.what()) + " at grid node " + loc, err.where);
        }
    });
    return report;
}

}  // namespace varcond
