#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "varcond/errors.hpp"

// Tensor-product Gauss-Legendre quadrature over an axis-aligned box, with
// optional per-axis breakpoints so that piecewise-smooth integrands are
// integrated panel by panel.  Reductions use pairwise summation so the
// result does not depend on traversal order refactorings.

namespace varcond {

// Deterministic pairwise sum.
inline double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

// Nodes and weights on [-1, 1]; exact for polynomials of degree 2*count-1.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit QuadratureRule(int count) {
        if (count < 1) throw NumericError("quadrature rule needs at least one node");
        nodes.resize(static_cast<std::size_t>(count));
        weights.resize(static_cast<std::size_t>(count));
        const double pi = std::acos(-1.0);
        for (int i = 0; i < count; ++i) {
            // Newton iteration from the Chebyshev initial guess.
            double x = std::cos(pi * (i + 0.75) / (count + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                if (count == 1) {
                    p1 = x;
                }
                for (int k = 2; k <= count; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double pn = (count == 1) ? x : p1;
                const double pm = (count == 1) ? 1.0 : p0;
                dp = count * (x * pn - pm) / (x * x - 1.0);
                const double dx = pn / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            nodes[static_cast<std::size_t>(count - 1 - i)] = x;
            weights[static_cast<std::size_t>(count - 1 - i)] =
                2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

namespace detail {

// Sorted panel edges for one axis: domain ends plus any interior breakpoints.
inline std::vector<double> panel_edges(double lo, double hi,
                                       std::span<const double> breakpoints) {
    std::vector<double> edges{lo, hi};
    for (double b : breakpoints)
        if (b > lo && b < hi) edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    std::vector<double> out;
    for (double e : edges)
        if (out.empty() || e - out.back() > 1e-14 * (1.0 + std::abs(e))) out.push_back(e);
    if (out.size() < 2) out = {lo, hi};
    return out;
}

}  // namespace detail

// Integrates a vector-valued integrand over the box given by lo/hi (one
// entry per axis) using `nodes_per_axis` Gauss-Legendre nodes on every
// panel of every axis.  f fills `out` (size dim) at each point.
inline std::vector<double> integrate_box_multi(
    const std::function<void(std::span<const double>, std::span<double>)>& f, int dim,
    std::span<const double> lo, std::span<const double> hi,
    const std::vector<std::vector<double>>& breakpoints, int nodes_per_axis) {
    const std::size_t n = lo.size();
    if (hi.size() != n) throw ShapeError("integration box bounds disagree");
    if (dim < 1) throw ShapeError("integrand dimension must be >= 1");
    const QuadratureRule rule(nodes_per_axis);

    std::vector<std::vector<double>> edges(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::span<const double> axis_breaks =
            i < breakpoints.size() ? std::span<const double>(breakpoints[i])
                                   : std::span<const double>();
        edges[i] = detail::panel_edges(lo[i], hi[i], axis_breaks);
    }

    const std::size_t d = static_cast<std::size_t>(dim);
    std::vector<std::vector<double>> contributions(d);
    std::vector<std::size_t> panel(n, 0);
    std::vector<double> x(n), half(n), mid(n), point(d);
    std::vector<std::vector<double>> point_values(d);

    for (;;) {
        double jacobian = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double a = edges[i][panel[i]];
            const double b = edges[i][panel[i] + 1];
            half[i] = 0.5 * (b - a);
            mid[i] = 0.5 * (b + a);
            jacobian *= half[i];
        }

        for (auto& pv : point_values) pv.clear();
        std::vector<std::size_t> node(n, 0);
        for (;;) {
            double w = jacobian;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] = mid[i] + half[i] * rule.nodes[node[i]];
                w *= rule.weights[node[i]];
            }
            f(x, point);
            for (std::size_t c = 0; c < d; ++c) point_values[c].push_back(w * point[c]);
            std::size_t i = 0;
            while (i < n && ++node[i] == rule.nodes.size()) {
                node[i] = 0;
                ++i;
            }
            if (i == n) break;
        }
        for (std::size_t c = 0; c < d; ++c)
            contributions[c].push_back(pairwise_sum(point_values[c]));

        std::size_t i = 0;
        while (i < n && ++panel[i] == edges[i].size() - 1) {
            panel[i] = 0;
            ++i;
        }
        if (i == n) break;
    }
    std::vector<double> out(d);
    for (std::size_t c = 0; c < d; ++c) out[c] = pairwise_sum(contributions[c]);
    return out;
}

// Scalar convenience wrapper.
inline double integrate_box(const std::function<double(std::span<const double>)>& f,
                            std::span<const double> lo, std::span<const double> hi,
                            const std::vector<std::vector<double>>& breakpoints,
                            int nodes_per_axis) {
    auto vec = integrate_box_multi(
        [&](std::span<const double> x, std::span<double> out) { out[0] = f(x); }, 1, lo,
        hi, breakpoints, nodes_per_axis);
    return vec[0];
}

}  // namespace varcond
