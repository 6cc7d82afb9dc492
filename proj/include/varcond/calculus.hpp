#pragma once

#include <map>
#include <vector>

#include "varcond/expr.hpp"
#include "varcond/simplify.hpp"

// Differentiation: partials with respect to jet coordinates, explicit
// partials with respect to independent variables, and total derivatives
// (which raise the derivative order of the jets involved).

namespace varcond {

namespace detail {

// Leaf derivative selector: exactly one of `jet` / `axis` is active.
struct DiffTarget {
    const JetCoordinate* jet = nullptr;
    int axis = 0;
};

inline Expr diff_raw(const Expr& e, const DiffTarget& t) {
    switch (e.kind()) {
        case ExprKind::Number:
        case ExprKind::Indicator:
            return Expr::number_of(0.0);
        case ExprKind::IndepVar:
            return Expr::number_of(!t.jet && e.axis() == t.axis ? 1.0 : 0.0);
        case ExprKind::JetVar:
            return Expr::number_of(t.jet && e.jet() == *t.jet ? 1.0 : 0.0);
        case ExprKind::PsiPiece: {
            const auto& p = std::get<PsiPieceNode>(e.node().data);
            if (t.jet || p.axis != t.axis) return Expr::number_of(0.0);
            return Expr::mul({Expr::number_of(1.0 / p.halfwidth),
                              Expr::psi_piece(p.order, p.deriv + 1, p.axis, p.center,
                                              p.halfwidth)});
        }
        case ExprKind::Call: {
            const Expr da = diff_raw(e.arg(), t);
            Expr outer;
            switch (e.func()) {
                case FuncKind::Exp: outer = Expr::call(FuncKind::Exp, e.arg()); break;
                case FuncKind::Log: outer = Expr::pow_of(e.arg(), Rational(-1)); break;
                case FuncKind::Sin: outer = Expr::call(FuncKind::Cos, e.arg()); break;
                case FuncKind::Cos:
                    outer = Expr::neg(Expr::call(FuncKind::Sin, e.arg()));
                    break;
                case FuncKind::Sinh: outer = Expr::call(FuncKind::Cosh, e.arg()); break;
                case FuncKind::Cosh: outer = Expr::call(FuncKind::Sinh, e.arg()); break;
                case FuncKind::Tanh:
                    outer = Expr::add(
                        {Expr::number_of(1.0),
                         Expr::neg(Expr::pow_of(Expr::call(FuncKind::Tanh, e.arg()),
                                                Rational(2)))});
                    break;
            }
            return Expr::mul({outer, da});
        }
        case ExprKind::Pow: {
            const Rational r = e.exponent();
            const Expr db = diff_raw(e.base(), t);
            return Expr::mul({Expr::number_of(r.value()),
                              Expr::pow_of(e.base(), r - Rational(1)), db});
        }
        case ExprKind::Neg:
            return Expr::neg(diff_raw(e.arg(), t));
        case ExprKind::Div: {
            const Expr& a = e.numerator();
            const Expr& b = e.denominator();
            return Expr::div(Expr::add({Expr::mul({diff_raw(a, t), b}),
                                        Expr::neg(Expr::mul({a, diff_raw(b, t)}))}),
                             Expr::pow_of(b, Rational(2)));
        }
        case ExprKind::Mul: {
            std::vector<Expr> terms;
            const auto& fs = e.factors();
            for (std::size_t i = 0; i < fs.size(); ++i) {
                std::vector<Expr> prod;
                prod.reserve(fs.size());
                for (std::size_t j = 0; j < fs.size(); ++j)
                    prod.push_back(i == j ? diff_raw(fs[j], t) : fs[j]);
                terms.push_back(Expr::mul(std::move(prod)));
            }
            return Expr::add(std::move(terms));
        }
        case ExprKind::Add: {
            std::vector<Expr> terms;
            terms.reserve(e.terms().size());
            for (const Expr& u : e.terms()) terms.push_back(diff_raw(u, t));
            return Expr::add(std::move(terms));
        }
    }
    return Expr::number_of(0.0);
}

}  // namespace detail

// Partial derivative treating every jet coordinate as an independent symbol.
inline Expr diff_jet(const Expr& e, const JetCoordinate& c) {
    detail::DiffTarget t;
    t.jet = &c;
    return simplify(detail::diff_raw(e, t));
}

// Explicit partial with respect to x^axis; jet coordinates held fixed.
inline Expr partial_indep(const Expr& e, int axis) {
    detail::DiffTarget t;
    t.axis = axis;
    return simplify(detail::diff_raw(e, t));
}

// Total derivative D_axis: explicit partial plus the chain-rule sweep over
// every jet coordinate, each contributing its raised coordinate.
inline Expr total_derivative(const Expr& e, int axis) {
    detail::DiffTarget xs;
    xs.axis = axis;
    std::vector<Expr> terms;
    terms.push_back(detail::diff_raw(e, xs));
    for (const JetCoordinate& c : free_jets(e)) {
        detail::DiffTarget t;
        t.jet = &c;
        terms.push_back(Expr::mul({detail::diff_raw(e, t),
                                   Expr::jet_of(JetCoordinate(c.dep(), c.index().raised(axis)))}));
    }
    return simplify(Expr::add(std::move(terms)));
}

// Iterated total derivative, one application per multi-index exponent.
// The application order of axes is immaterial (total derivatives commute).
inline Expr total_derivative_multi(const Expr& e, const MultiIndex& mi) {
    Expr out = e;
    for (int axis = 1; axis <= mi.size(); ++axis)
        for (int r = 0; r < mi.exponent(axis); ++r) out = total_derivative(out, axis);
    return out;
}

// Partial_multi for x-only expressions (candidates, test directions).
inline Expr partial_indep_multi(const Expr& e, const MultiIndex& mi) {
    Expr out = e;
    for (int axis = 1; axis <= mi.size(); ++axis)
        for (int r = 0; r < mi.exponent(axis); ++r) out = partial_indep(out, axis);
    return out;
}

// Symbolic prolongation of m closed-form components u^j(x) to every
// coordinate of `target`: entry i-1 is the derivative named by
// target.coordinate_at(i).  Components must not reference jet coordinates.
inline std::vector<Expr> prolong(const std::vector<Expr>& components,
                                 const JetLayout& target) {
    if (static_cast<int>(components.size()) != target.m())
        throw ArityError("prolongation needs " + std::to_string(target.m()) +
                         " components, got " + std::to_string(components.size()));
    for (const Expr& c : components)
        if (contains_jets(c))
            throw ArityError("candidate component `" + to_string(c) +
                             "` references jet coordinates");

    std::vector<Expr> out(static_cast<std::size_t>(target.size()));
    for (int j = 1; j <= target.m(); ++j) {
        // Derivatives of order k are obtained from order k-1 by one more
        // explicit partial; keyed by exponent vector.
        std::map<std::vector<int>, Expr> table;
        const MultiIndex zero = MultiIndex::zero(target.n());
        table[zero.exponents()] = simplify(components[static_cast<std::size_t>(j - 1)]);
        for (int k = 0; k <= target.order(); ++k) {
            for (const MultiIndex& mi : target.slots(k)) {
                if (k > 0) {
                    int axis = 1;
                    while (mi.exponent(axis) == 0) ++axis;
                    const MultiIndex parent = mi.lowered(axis);
                    table[mi.exponents()] = partial_indep(table.at(parent.exponents()), axis);
                }
                const int idx = target.index_of(JetCoordinate(j, mi));
                out[static_cast<std::size_t>(idx - 1)] = table.at(mi.exponents());
            }
        }
    }
    return out;
}

// Numeric point along a prolonged candidate: evaluates every prolonged
// component at x and packs the result with the layout.
inline PointAssignment assignment_at(const JetLayout& lay, std::vector<double> x,
                                     const std::vector<Expr>& prolonged) {
    PointAssignment base = PointAssignment::x_only(x);
    std::vector<double> jets(prolonged.size());
    for (std::size_t i = 0; i < prolonged.size(); ++i) jets[i] = eval(prolonged[i], base);
    return PointAssignment(lay, std::move(x), std::move(jets));
}

}  // namespace varcond
