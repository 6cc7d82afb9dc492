#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "varcond/calculus.hpp"
#include "varcond/expr.hpp"
#include "varcond/jetspace.hpp"
#include "varcond/simplify.hpp"

// Shared test utilities: tolerant comparison, random points, a tame random
// expression generator, and a finite-difference oracle for jet partials.

namespace vtest {

using namespace varcond;

inline bool approx_equal(double a, double b, double tol = 1e-9) {
    return std::abs(a - b) <= tol + tol * std::max(std::abs(a), std::abs(b));
}

// Uniform point with every coordinate in [-2, 2].
inline PointAssignment random_point(const JetLayout& lay, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    std::vector<double> x(static_cast<std::size_t>(lay.n()));
    std::vector<double> jets(static_cast<std::size_t>(lay.size()));
    for (double& v : x) v = dist(rng);
    for (double& v : jets) v = dist(rng);
    return PointAssignment(lay, std::move(x), std::move(jets));
}

// Evaluates at random points, resampling the ones that hit domain errors.
inline double eval_resampled(const Expr& e, const JetLayout& lay, std::mt19937_64& rng,
                             PointAssignment* used = nullptr) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        PointAssignment p = random_point(lay, rng);
        try {
            const double v = eval(e, p);
            if (std::isfinite(v)) {
                if (used) *used = p;
                return v;
            }
        } catch (const EvalError&) {
        }
    }
    throw std::runtime_error("could not find an evaluable point for: " + to_string(e));
}

// Random expression trees kept tame enough for finite-difference checks:
// function arguments stay bounded and radicands stay positive.
class ExprGen {
public:
    ExprGen(const JetLayout& lay, std::mt19937_64& rng) : lay_(lay), rng_(rng) {}

    Expr gen(int depth = 3) {
        if (depth <= 0) return leaf();
        switch (pick(8)) {
            case 0:
            case 1:
                return Expr::add({gen(depth - 1), gen(depth - 1)});
            case 2:
            case 3:
                return Expr::mul({gen(depth - 1), gen(depth - 1)});
            case 4:
                return Expr::pow_of(gen(depth - 1), Rational(2 + pick(2)));
            case 5:
                // sqrt of something strictly positive
                return Expr::pow_of(
                    Expr::add({Expr::number_of(1.0), Expr::pow_of(gen(depth - 1), Rational(2))}),
                    Rational(1, 2));
            case 6: {
                const Expr damped = Expr::mul({Expr::number_of(0.3), gen(depth - 1)});
                switch (pick(4)) {
                    case 0: return Expr::call(FuncKind::Sin, damped);
                    case 1: return Expr::call(FuncKind::Cos, damped);
                    case 2: return Expr::call(FuncKind::Tanh, damped);
                    default: return Expr::call(FuncKind::Exp, damped);
                }
            }
            default:
                return Expr::call(
                    FuncKind::Log,
                    Expr::add({Expr::number_of(1.5),
                               Expr::pow_of(gen(depth - 1), Rational(2))}));
        }
    }

    Expr leaf() {
        switch (pick(3)) {
            case 0: {
                std::uniform_real_distribution<double> dist(-2.0, 2.0);
                return Expr::number_of(std::round(dist(rng_) * 100.0) / 100.0);
            }
            case 1:
                return Expr::indep(1 + pick(lay_.n()));
            default:
                return Expr::jet_of(lay_.coordinate_at(1 + pick(lay_.size())));
        }
    }

private:
    int pick(int k) {
        std::uniform_int_distribution<int> dist(0, k - 1);
        return dist(rng_);
    }

    const JetLayout& lay_;
    std::mt19937_64& rng_;
};

// Central finite difference of `e` with respect to one jet coordinate.
inline double fd_jet_partial(const Expr& e, const JetCoordinate& c, const PointAssignment& p,
                             double h = 1e-5) {
    PointAssignment plus = p, minus = p;
    const std::size_t idx = static_cast<std::size_t>(p.layout->index_of(c) - 1);
    plus.jets[idx] += h;
    minus.jets[idx] -= h;
    return (eval(e, plus) - eval(e, minus)) / (2.0 * h);
}

}  // namespace vtest
