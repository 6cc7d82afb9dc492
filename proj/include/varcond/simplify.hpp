#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "varcond/expr.hpp"

// Light-weight canonicalization: constant folding, flattened sums and
// products, collected like terms and like factors, x^0 -> 1 and zero
// annihilation.  Simplification preserves value (checked numerically in the
// tests); it does not attempt canonical forms for radicals.

namespace varcond {

inline Expr simplify(const Expr& e);

namespace detail {

inline bool is_number(const Expr& e, double v) {
    return e.kind() == ExprKind::Number && e.number() == v;
}

inline double clean_zero(double v) { return v == 0.0 ? 0.0 : v; }

// coefficient * product(rest); rest is already canonically sorted.
inline Expr make_product(double coef, std::vector<Expr> rest) {
    coef = clean_zero(coef);
    if (coef == 0.0 || rest.empty()) {
        if (coef == 0.0) return Expr::number_of(0.0);
        return Expr::number_of(coef);
    }
    if (coef == 1.0) {
        if (rest.size() == 1) return rest[0];
        return Expr::mul(std::move(rest));
    }
    std::vector<Expr> all;
    all.reserve(rest.size() + 1);
    all.push_back(Expr::number_of(coef));
    for (Expr& r : rest) all.push_back(std::move(r));
    return Expr::mul(std::move(all));
}

// Splits a simplified term into (coefficient, sorted non-numeric factors).
inline std::pair<double, std::vector<Expr>> split_term(const Expr& term) {
    if (term.kind() == ExprKind::Number) return {term.number(), {}};
    if (term.kind() == ExprKind::Mul) {
        double coef = 1.0;
        std::vector<Expr> rest;
        for (const Expr& f : term.factors()) {
            if (f.kind() == ExprKind::Number)
                coef *= f.number();
            else
                rest.push_back(f);
        }
        return {coef, std::move(rest)};
    }
    return {1.0, {term}};
}

inline Expr simplify_pow(Expr base, Rational r);

// Rebuilds base^r after exponent collection, folding trivial cases.
inline Expr make_power(const Expr& base, Rational r) {
    if (r == Rational(0)) return Expr::number_of(1.0);
    if (r == Rational(1)) return base;
    if (base.kind() == ExprKind::Number) {
        const double b = base.number();
        if (r.is_integer() && !(b == 0.0 && r < Rational(0)))
            return Expr::number_of(clean_zero(eval_int_pow(b, r.num, base)));
        if (b > 0.0) return Expr::number_of(std::pow(b, r.value()));
        if (b == 0.0 && r < Rational(0)) return Expr::pow_of(base, r);  // eval will report
        if (b == 0.0) return Expr::number_of(0.0);
        return Expr::pow_of(base, r);  // negative base, fractional exponent
    }
    return Expr::pow_of(base, r);
}

inline Expr simplify_mul(std::vector<Expr> factors) {
    // Children are already simplified; flatten nested products.
    std::vector<Expr> flat;
    for (Expr& f : factors) {
        if (f.kind() == ExprKind::Mul) {
            for (const Expr& g : f.factors()) flat.push_back(g);
        } else {
            flat.push_back(std::move(f));
        }
    }
    double coef = 1.0;
    std::vector<std::pair<Expr, Rational>> powers;  // base -> summed exponent
    for (const Expr& f : flat) {
        if (f.kind() == ExprKind::Number) {
            coef *= f.number();
            continue;
        }
        Expr base = f;
        Rational r(1);
        if (f.kind() == ExprKind::Pow) {
            base = f.base();
            r = f.exponent();
        }
        bool merged = false;
        for (auto& [b, sum] : powers) {
            if (structurally_equal(b, base)) {
                sum = sum + r;
                merged = true;
                break;
            }
        }
        if (!merged) powers.emplace_back(std::move(base), r);
    }
    if (coef == 0.0) return Expr::number_of(0.0);
    std::vector<Expr> rebuilt;
    rebuilt.reserve(powers.size());
    for (auto& [base, r] : powers) {
        Expr p = make_power(base, r);
        if (p.kind() == ExprKind::Number)
            coef *= p.number();
        else
            rebuilt.push_back(std::move(p));
    }
    if (coef == 0.0) return Expr::number_of(0.0);
    std::sort(rebuilt.begin(), rebuilt.end(),
              [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
    return make_product(coef, std::move(rebuilt));
}

inline Expr simplify_add(std::vector<Expr> terms) {
    std::vector<Expr> flat;
    for (Expr& t : terms) {
        if (t.kind() == ExprKind::Add) {
            for (const Expr& u : t.terms()) flat.push_back(u);
        } else {
            flat.push_back(std::move(t));
        }
    }
    double constant = 0.0;
    std::vector<std::pair<std::vector<Expr>, double>> collected;  // key -> coefficient
    for (const Expr& t : flat) {
        auto [coef, rest] = split_term(t);
        if (rest.empty()) {
            constant += coef;
            continue;
        }
        bool merged = false;
        for (auto& [key, sum] : collected) {
            if (key.size() == rest.size() && compare_lists(key, rest) == 0) {
                sum += coef;
                merged = true;
                break;
            }
        }
        if (!merged) collected.emplace_back(std::move(rest), coef);
    }
    // Deterministic order by the symbolic part, so coefficients do not
    // shuffle terms around.
    std::sort(collected.begin(), collected.end(), [](const auto& a, const auto& b) {
        return compare_lists(a.first, b.first) < 0;
    });
    std::vector<Expr> rebuilt;
    for (auto& [key, coef] : collected) {
        if (clean_zero(coef) == 0.0) continue;
        rebuilt.push_back(make_product(coef, std::move(key)));
    }
    constant = clean_zero(constant);
    if (constant != 0.0) rebuilt.push_back(Expr::number_of(constant));
    if (rebuilt.empty()) return Expr::number_of(0.0);
    if (rebuilt.size() == 1) return rebuilt[0];
    return Expr::add(std::move(rebuilt));
}

inline Expr simplify_pow(Expr base, Rational r) {
    if (r == Rational(0)) return Expr::number_of(1.0);
    if (r == Rational(1)) return base;
    if (base.kind() == ExprKind::Pow) {
        // (b^r1)^r only merges when it is domain-safe: a half-integer inner
        // exponent pins the base to non-negative values, and an integer
        // outer exponent never introduces |.|.
        const Rational r1 = base.exponent();
        const Rational merged = r1 * r;
        if ((r1.den == 2 || r.is_integer()) && merged.is_half_integer())
            return simplify_pow(base.base(), merged);
    }
    if (base.kind() == ExprKind::Mul && r.is_integer()) {
        std::vector<Expr> factors;
        factors.reserve(base.factors().size());
        for (const Expr& f : base.factors()) factors.push_back(make_power(f, r));
        return simplify_mul(std::move(factors));
    }
    return make_power(base, r);
}

inline Expr simplify_call(FuncKind f, Expr arg) {
    if (arg.kind() == ExprKind::Number) {
        const double a = arg.number();
        switch (f) {
            case FuncKind::Exp: return Expr::number_of(std::exp(a));
            case FuncKind::Log:
                if (a > 0.0) return Expr::number_of(std::log(a));
                break;  // keep; eval reports the domain error
            case FuncKind::Sin: return Expr::number_of(clean_zero(std::sin(a)));
            case FuncKind::Cos: return Expr::number_of(std::cos(a));
            case FuncKind::Sinh: return Expr::number_of(clean_zero(std::sinh(a)));
            case FuncKind::Cosh: return Expr::number_of(std::cosh(a));
            case FuncKind::Tanh: return Expr::number_of(clean_zero(std::tanh(a)));
        }
    }
    return Expr::call(f, std::move(arg));
}

}  // namespace detail

inline Expr simplify(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Number:
            return Expr::number_of(detail::clean_zero(e.number()));
        case ExprKind::IndepVar:
        case ExprKind::JetVar:
        case ExprKind::PsiPiece:
        case ExprKind::Indicator:
            return e;
        case ExprKind::Call:
            return detail::simplify_call(e.func(), simplify(e.arg()));
        case ExprKind::Pow:
            return detail::simplify_pow(simplify(e.base()), e.exponent());
        case ExprKind::Neg:
            return detail::simplify_mul({Expr::number_of(-1.0), simplify(e.arg())});
        case ExprKind::Div:
            return detail::simplify_mul(
                {simplify(e.numerator()),
                 detail::simplify_pow(simplify(e.denominator()), Rational(-1))});
        case ExprKind::Mul: {
            std::vector<Expr> kids;
            kids.reserve(e.factors().size());
            for (const Expr& f : e.factors()) kids.push_back(simplify(f));
            return detail::simplify_mul(std::move(kids));
        }
        case ExprKind::Add: {
            std::vector<Expr> kids;
            kids.reserve(e.terms().size());
            for (const Expr& t : e.terms()) kids.push_back(simplify(t));
            return detail::simplify_add(std::move(kids));
        }
    }
    return e;
}

}  // namespace varcond
