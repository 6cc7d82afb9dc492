#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "varcond/quadrature.hpp"
#include "varcond/variational.hpp"

// Second-variation machinery: the block matrix A of all second partials of
// the Lagrangian with respect to jet coordinates, pointwise definiteness
// classification, Legendre condensed matrices, the same-order/cross-order
// decomposition of the second variation, and the extremal classifier.

namespace varcond {

enum class Definiteness {
    Zero,
    PositiveDefinite,
    PositiveSemidefinite,
    NegativeDefinite,
    NegativeSemidefinite,
    Indefinite,
};

inline const char* to_string(Definiteness d) {
    switch (d) {
        case Definiteness::Zero: return "ZERO";
        case Definiteness::PositiveDefinite: return "POSITIVE_DEFINITE";
        case Definiteness::PositiveSemidefinite: return "POSITIVE_SEMIDEFINITE";
        case Definiteness::NegativeDefinite: return "NEGATIVE_DEFINITE";
        case Definiteness::NegativeSemidefinite: return "NEGATIVE_SEMIDEFINITE";
        case Definiteness::Indefinite: return "INDEFINITE";
    }
    return "?";
}

enum class Verdict {
    StrictWeakMin,
    WeakMin,
    StrictWeakMax,
    WeakMax,
    Saddle,
    Inconclusive,
};

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::StrictWeakMin: return "STRICT_WEAK_MIN";
        case Verdict::WeakMin: return "WEAK_MIN";
        case Verdict::StrictWeakMax: return "STRICT_WEAK_MAX";
        case Verdict::WeakMax: return "WEAK_MAX";
        case Verdict::Saddle: return "SADDLE";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

// Small dense matrix, row-major, 0-based access.
struct Matrix {
    int rows = 0, cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

    double frobenius() const {
        double s = 0.0;
        for (double v : data) s += v * v;
        return std::sqrt(s);
    }
};

// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
// Converges when the off-diagonal Frobenius norm drops below
// rel_threshold * ||M||_F; throws NumericError after max_sweeps.
inline std::vector<double> symmetric_eigenvalues(Matrix m, double rel_threshold = 1e-12,
                                                 int max_sweeps = 100) {
    if (m.rows != m.cols) throw ShapeError("eigenvalue solver needs a square matrix");
    const int n = m.rows;
    const double frob = m.frobenius();
    if (frob == 0.0) return std::vector<double>(static_cast<std::size_t>(n), 0.0);

    auto off_norm = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += 2.0 * m.at(i, j) * m.at(i, j);
        return std::sqrt(s);
    };

    bool converged = off_norm() <= rel_threshold * frob;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = m.at(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (m.at(q, q) - m.at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double mkp = m.at(k, p);
                    const double mkq = m.at(k, q);
                    m.at(k, p) = c * mkp - s * mkq;
                    m.at(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = m.at(p, k);
                    const double mqk = m.at(q, k);
                    m.at(p, k) = c * mpk - s * mqk;
                    m.at(q, k) = s * mpk + c * mqk;
                }
            }
        }
        converged = off_norm() <= rel_threshold * frob;
    }
    if (!converged) throw NumericError("Jacobi eigenvalue iteration did not converge");

    std::vector<double> eig(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = m.at(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

// Eigenvalue-sign classification under a tolerance relative to
// max(1, ||M||_F).
inline Definiteness definiteness(const Matrix& m, double tol = 1e-9) {
    if (m.rows != m.cols) throw ShapeError("definiteness needs a square matrix");
    const double sigma = std::max(1.0, m.frobenius());
    for (int i = 0; i < m.rows; ++i)
        for (int j = i + 1; j < m.cols; ++j)
            if (std::abs(m.at(i, j) - m.at(j, i)) > tol * sigma)
                throw ShapeError("matrix is not symmetric within tolerance");

    Matrix sym(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) sym.at(i, j) = 0.5 * (m.at(i, j) + m.at(j, i));
    const std::vector<double> eig = symmetric_eigenvalues(sym);

    const double cut = tol * sigma;
    bool all_zero = true, all_pos = true, all_neg = true, all_nonneg = true,
         all_nonpos = true;
    for (double v : eig) {
        if (std::abs(v) > cut) all_zero = false;
        if (!(v > cut)) all_pos = false;
        if (!(v < -cut)) all_neg = false;
        if (v < -cut) all_nonneg = false;
        if (v > cut) all_nonpos = false;
    }
    if (all_zero) return Definiteness::Zero;
    if (all_pos) return Definiteness::PositiveDefinite;
    if (all_neg) return Definiteness::NegativeDefinite;
    if (all_nonneg) return Definiteness::PositiveSemidefinite;
    if (all_nonpos) return Definiteness::NegativeSemidefinite;
    return Definiteness::Indefinite;
}

// q_s x q_s symmetric matrix of second partials of the Lagrangian,
// addressable flat or by (dep, dep', order, order', slot, slot') block.
class SecondVariationMatrix {
public:
    SecondVariationMatrix(JetLayout lay, std::vector<Expr> entries)
        : layout_(std::move(lay)), entries_(std::move(entries)) {
        if (entries_.size() !=
            static_cast<std::size_t>(layout_.size()) * static_cast<std::size_t>(layout_.size()))
            throw ShapeError("second variation matrix entry count mismatch");
    }

    const JetLayout& layout() const { return layout_; }
    int dim() const { return layout_.size(); }

    // 1-based row/column in the layout ordering.
    const Expr& entry(int r, int c) const {
        if (r < 1 || c < 1 || r > dim() || c > dim())
            throw AddressError("second variation entry (" + std::to_string(r) + ", " +
                               std::to_string(c) + ") out of range");
        return entries_[static_cast<std::size_t>(r - 1) * dim() + (c - 1)];
    }

    const Expr& block_entry(int j, int jp, int k, int kp, int h, int hp) const {
        const JetCoordinate row(j, layout_.slots(k)[check_slot(h, k)]);
        const JetCoordinate col(jp, layout_.slots(kp)[check_slot(hp, kp)]);
        return entry(layout_.index_of(row), layout_.index_of(col));
    }

private:
    std::size_t check_slot(int h, int k) const {
        if (h < 1 || h > static_cast<int>(layout_.slots(k).size()))
            throw AddressError("slot " + std::to_string(h) + " out of range for order " +
                               std::to_string(k));
        return static_cast<std::size_t>(h - 1);
    }

    JetLayout layout_;
    std::vector<Expr> entries_;  // row-major
};

// Assembles A entrywise as d^2 L / (du_row du_col), both triangles computed
// independently (their numeric agreement is a test of the differentiator).
inline SecondVariationMatrix assemble_A(const Expr& lagrangian, const JetLayout& lay) {
    if (max_jet_order(lagrangian) > lay.order())
        throw ArityError("lagrangian derivative order exceeds the layout order");
    const int q = lay.size();
    std::vector<Expr> first;
    first.reserve(static_cast<std::size_t>(q));
    for (int r = 1; r <= q; ++r)
        first.push_back(diff_jet(lagrangian, lay.coordinate_at(r)));
    std::vector<Expr> entries;
    entries.reserve(static_cast<std::size_t>(q) * q);
    for (int r = 1; r <= q; ++r)
        for (int c = 1; c <= q; ++c)
            entries.push_back(diff_jet(first[static_cast<std::size_t>(r - 1)],
                                       lay.coordinate_at(c)));
    return SecondVariationMatrix(lay, std::move(entries));
}

// Numeric A at a point, symmetrized as (M + M^T)/2 to absorb roundoff.
inline Matrix evaluate_A(const SecondVariationMatrix& a, const PointAssignment& p) {
    const int q = a.dim();
    Matrix m(q, q);
    for (int r = 1; r <= q; ++r)
        for (int c = 1; c <= q; ++c) m.at(r - 1, c - 1) = eval(a.entry(r, c), p);
    for (int r = 0; r < q; ++r)
        for (int c = r + 1; c < q; ++c) {
            const double v = 0.5 * (m.at(r, c) + m.at(c, r));
            m.at(r, c) = v;
            m.at(c, r) = v;
        }
    return m;
}

// Condensed m x m Legendre matrix for one derivative order l:
// entry (j, j') = sum over slots h, h' of the same-order block A^{jj'}_{ll}.
inline std::vector<std::vector<Expr>> legendre_matrix(const SecondVariationMatrix& a, int l) {
    const JetLayout& lay = a.layout();
    if (l < 0 || l > lay.order())
        throw AddressError("Legendre order " + std::to_string(l) + " out of range");
    const int p_l = static_cast<int>(lay.slots(l).size());
    std::vector<std::vector<Expr>> out(static_cast<std::size_t>(lay.m()));
    for (int j = 1; j <= lay.m(); ++j) {
        out[static_cast<std::size_t>(j - 1)].reserve(static_cast<std::size_t>(lay.m()));
        for (int jp = 1; jp <= lay.m(); ++jp) {
            std::vector<Expr> terms;
            for (int h = 1; h <= p_l; ++h)
                for (int hp = 1; hp <= p_l; ++hp)
                    terms.push_back(a.block_entry(j, jp, l, l, h, hp));
            out[static_cast<std::size_t>(j - 1)].push_back(
                simplify(Expr::add(std::move(terms))));
        }
    }
    return out;
}

namespace detail {

// Reduces per-node statuses to the strongest property holding at every node.
inline Definiteness combine_statuses(const std::map<Definiteness, int>& tally, int nodes) {
    auto count = [&](Definiteness d) {
        auto it = tally.find(d);
        return it == tally.end() ? 0 : it->second;
    };
    const int zero = count(Definiteness::Zero);
    const int pd = count(Definiteness::PositiveDefinite);
    const int psd = count(Definiteness::PositiveSemidefinite);
    const int nd = count(Definiteness::NegativeDefinite);
    const int nsd = count(Definiteness::NegativeSemidefinite);
    if (nodes == 0) return Definiteness::Indefinite;
    if (zero == nodes) return Definiteness::Zero;
    if (pd == nodes) return Definiteness::PositiveDefinite;
    if (pd + psd + zero == nodes) return Definiteness::PositiveSemidefinite;
    if (nd == nodes) return Definiteness::NegativeDefinite;
    if (nd + nsd + zero == nodes) return Definiteness::NegativeSemidefinite;
    return Definiteness::Indefinite;
}

inline bool is_psd_like(Definiteness d) {
    return d == Definiteness::Zero || d == Definiteness::PositiveDefinite ||
           d == Definiteness::PositiveSemidefinite;
}

struct GridScan {
    std::map<Definiteness, int> full_tally;
    int nodes = 0;
    std::vector<Definiteness> condensed;  // per order l, combined over nodes
    struct Block {
        int dep;
        int order;
        Definiteness status;
    };
    std::vector<Block> diagonal_blocks;  // per (j, k), combined over nodes
};

inline GridScan scan_grid(const Problem& problem, const Candidate& cand,
                          const SecondVariationMatrix& a, double tol) {
    const JetLayout& lay = a.layout();
    const std::vector<Expr> prolonged = prolong(cand.components, lay);

    GridScan scan;
    std::vector<std::map<Definiteness, int>> cond_tally(
        static_cast<std::size_t>(lay.order() + 1));
    std::map<std::pair<int, int>, std::map<Definiteness, int>> block_tally;

    for_each_grid_node(problem, [&](std::span<const double> x) {
        const PointAssignment p =
            assignment_at(lay, std::vector<double>(x.begin(), x.end()), prolonged);
        const Matrix m = evaluate_A(a, p);
        ++scan.full_tally[definiteness(m, tol)];
        ++scan.nodes;

        for (int l = 0; l <= lay.order(); ++l) {
            Matrix cond(lay.m(), lay.m());
            const auto& slots = lay.slots(l);
            for (int j = 1; j <= lay.m(); ++j)
                for (int jp = 1; jp <= lay.m(); ++jp) {
                    double s = 0.0;
                    for (const MultiIndex& mi : slots)
                        for (const MultiIndex& mip : slots)
                            s += m.at(lay.index_of(JetCoordinate(j, mi)) - 1,
                                      lay.index_of(JetCoordinate(jp, mip)) - 1);
                    cond.at(j - 1, jp - 1) = s;
                }
            ++cond_tally[static_cast<std::size_t>(l)][definiteness(cond, tol)];
        }

        for (int j = 1; j <= lay.m(); ++j) {
            for (int k = 0; k <= lay.order(); ++k) {
                const auto& slots = lay.slots(k);
                const int pk = static_cast<int>(slots.size());
                Matrix block(pk, pk);
                for (int h = 0; h < pk; ++h)
                    for (int hp = 0; hp < pk; ++hp)
                        block.at(h, hp) =
                            m.at(lay.index_of(JetCoordinate(j, slots[static_cast<std::size_t>(h)])) - 1,
                                 lay.index_of(JetCoordinate(j, slots[static_cast<std::size_t>(hp)])) - 1);
                ++block_tally[{j, k}][definiteness(block, tol)];
            }
        }
    });

    for (int l = 0; l <= lay.order(); ++l)
        scan.condensed.push_back(
            combine_statuses(cond_tally[static_cast<std::size_t>(l)], scan.nodes));
    for (const auto& [jk, tally] : block_tally)
        scan.diagonal_blocks.push_back(
            {jk.first, jk.second, combine_statuses(tally, scan.nodes)});
    return scan;
}

}  // namespace detail

struct LegendreReport {
    // Combined status of the condensed m x m matrix for each order l.
    std::vector<Definiteness> condensed;
    struct Block {
        int dep;
        int order;
        Definiteness status;
    };
    // Combined status of every diagonal block A^{jj}_{kk}.
    std::vector<Block> diagonal_blocks;
};

// Evaluates the condensed Legendre matrices and every diagonal block along
// the candidate at each grid node; reports the weakest status over the grid.
inline LegendreReport legendre_check(const Problem& problem, const Candidate& cand,
                                     const SecondVariationMatrix& a, double tol = 1e-9) {
    const detail::GridScan scan = detail::scan_grid(problem, cand, a, tol);
    LegendreReport rep;
    rep.condensed = scan.condensed;
    for (const auto& b : scan.diagonal_blocks)
        rep.diagonal_blocks.push_back({b.dep, b.order, b.status});
    return rep;
}

// Pieces of the second variation: full quadratic form plus its same-order
// diagonal (j1), same-order cross-dependent (j2) and cross-order (i2)
// parts.  Unordered pairs are counted once, so full == j1 + 2*(j2 + i2).
struct QuadraticFormParts {
    double full = 0.0;
    double j1 = 0.0;
    double j2 = 0.0;
    double i2 = 0.0;
};

inline QuadraticFormParts quadratic_form_parts(const Problem& problem, const Candidate& cand,
                                               const SecondVariationMatrix& a,
                                               const std::vector<Expr>& phi,
                                               int quad_nodes = 32) {
    const JetLayout& lay = a.layout();
    if (static_cast<int>(phi.size()) != lay.m())
        throw ArityError("need " + std::to_string(lay.m()) + " test components");
    const std::vector<Expr> cand_prolonged = prolong(cand.components, lay);
    const std::vector<Expr> phi_prolonged = prolong(phi, lay);

    std::vector<std::vector<double>> breakpoints(static_cast<std::size_t>(lay.n()));
    for (const Expr& p : phi) collect_breakpoints(p, breakpoints);

    const int q = lay.size();
    std::vector<int> dep_of(static_cast<std::size_t>(q)), order_of(static_cast<std::size_t>(q));
    for (int i = 1; i <= q; ++i) {
        dep_of[static_cast<std::size_t>(i - 1)] = lay.coordinate_at(i).dep();
        order_of[static_cast<std::size_t>(i - 1)] = lay.coordinate_at(i).order();
    }

    std::vector<double> lo, hi;
    for (const auto& iv : problem.domain) {
        lo.push_back(iv[0]);
        hi.push_back(iv[1]);
    }

    // Per point: the full form v A v^T plus the same-order diagonal,
    // same-order cross-dependent (pairs once) and cross-order (pairs once)
    // parts, so that full == j1 + 2*(j2 + i2) holds entrywise.
    std::vector<double> v(static_cast<std::size_t>(q));
    auto integrand = [&](std::span<const double> x, std::span<double> out) {
        const PointAssignment p =
            assignment_at(lay, std::vector<double>(x.begin(), x.end()), cand_prolonged);
        const Matrix m = evaluate_A(a, p);
        const PointAssignment x_only =
            PointAssignment::x_only(std::vector<double>(x.begin(), x.end()));
        for (int i = 0; i < q; ++i)
            v[static_cast<std::size_t>(i)] =
                eval(phi_prolonged[static_cast<std::size_t>(i)], x_only);
        double full = 0.0, j1 = 0.0, j2 = 0.0, i2 = 0.0;
        for (int r = 0; r < q; ++r) {
            for (int c = 0; c < q; ++c) {
                const double term =
                    v[static_cast<std::size_t>(r)] * m.at(r, c) * v[static_cast<std::size_t>(c)];
                full += term;
                const int dr = dep_of[static_cast<std::size_t>(r)];
                const int dc = dep_of[static_cast<std::size_t>(c)];
                const int kr = order_of[static_cast<std::size_t>(r)];
                const int kc = order_of[static_cast<std::size_t>(c)];
                if (kr == kc && dr == dc) j1 += term;
                if (kr == kc && dr < dc) j2 += term;
                if (kr < kc) i2 += term;
            }
        }
        out[0] = full;
        out[1] = j1;
        out[2] = j2;
        out[3] = i2;
    };

    const std::vector<double> vals =
        integrate_box_multi(integrand, 4, lo, hi, breakpoints, quad_nodes);
    QuadraticFormParts parts;
    parts.full = vals[0];
    parts.j1 = vals[1];
    parts.j2 = vals[2];
    parts.i2 = vals[3];
    return parts;
}

// The (J1, J2, I2) decomposition of the second variation along a candidate.
inline QuadraticFormParts decompose_J1_J2_I2(const Problem& problem, const Candidate& cand,
                                             const SecondVariationMatrix& a,
                                             const std::vector<Expr>& phi,
                                             int quad_nodes = 32) {
    return quadratic_form_parts(problem, cand, a, phi, quad_nodes);
}

struct ClassifyOptions {
    double tol = 1e-9;            // definiteness tolerance
    double residual_gate = 1e-6;  // Euler-Lagrange residual gate
};

struct ClassificationReport {
    Verdict verdict = Verdict::Inconclusive;
    double el_residual = 0.0;
    std::vector<double> el_residual_per_equation;
    std::map<Definiteness, int> tally;  // per-grid-node definiteness of A
    int nodes = 0;
    std::vector<Definiteness> legendre;  // condensed status per order l
    struct BlockStatus {
        int dep;
        int order;
        Definiteness status;
    };
    std::vector<BlockStatus> diagonal_blocks;
    std::vector<std::string> notes;
};

namespace detail {

inline Verdict verdict_from_tally(const std::map<Definiteness, int>& tally, int nodes) {
    auto count = [&](Definiteness d) {
        auto it = tally.find(d);
        return it == tally.end() ? 0 : it->second;
    };
    if (nodes == 0) return Verdict::Inconclusive;
    const int zero = count(Definiteness::Zero);
    const int pd = count(Definiteness::PositiveDefinite);
    const int psd = count(Definiteness::PositiveSemidefinite);
    const int nd = count(Definiteness::NegativeDefinite);
    const int nsd = count(Definiteness::NegativeSemidefinite);
    const int indef = count(Definiteness::Indefinite);
    if (pd == nodes) return Verdict::StrictWeakMin;
    if (pd + psd + zero == nodes) return Verdict::WeakMin;
    if (nd == nodes) return Verdict::StrictWeakMax;
    if (nd + nsd + zero == nodes) return Verdict::WeakMax;
    if (indef > 0) return Verdict::Saddle;
    return Verdict::Inconclusive;
}

}  // namespace detail

// Full classification pipeline: Euler-Lagrange residual gate, pointwise
// definiteness of A over the grid, Legendre diagnostics, verdict.
inline ClassificationReport classify(const Problem& problem, const Candidate& cand,
                                     const ClassifyOptions& opts = {}) {
    ClassificationReport rep;
    const ResidualReport rr = el_residual_on_grid(problem, cand);
    rep.el_residual = rr.max_abs;
    rep.el_residual_per_equation = rr.per_equation;
    if (!(rr.max_abs <= opts.residual_gate)) {
        rep.verdict = Verdict::Inconclusive;
        rep.notes.push_back("candidate fails Euler-Lagrange residual (max " +
                            format_double(rr.max_abs) + " > gate " +
                            format_double(opts.residual_gate) + ")");
        return rep;
    }

    const Expr L = effective_lagrangian(problem);
    const SecondVariationMatrix a = assemble_A(L, problem.layout);
    const detail::GridScan scan = detail::scan_grid(problem, cand, a, opts.tol);
    rep.tally = scan.full_tally;
    rep.nodes = scan.nodes;
    rep.legendre = scan.condensed;
    for (const auto& b : scan.diagonal_blocks)
        rep.diagonal_blocks.push_back({b.dep, b.order, b.status});

    rep.verdict = detail::verdict_from_tally(rep.tally, rep.nodes);

    bool legendre_ok = true;
    for (Definiteness d : rep.legendre)
        if (!detail::is_psd_like(d)) legendre_ok = false;
    if (!legendre_ok &&
        (rep.verdict == Verdict::WeakMin || rep.verdict == Verdict::StrictWeakMin)) {
        rep.verdict = Verdict::Inconclusive;
        rep.notes.push_back(
            "a condensed Legendre matrix fails positive semi-definiteness at some grid "
            "node; the necessary condition for a weak minimum does not hold");
    }
    if (!legendre_ok && rep.verdict != Verdict::WeakMin &&
        rep.verdict != Verdict::StrictWeakMin) {
        rep.notes.push_back(
            "Legendre necessary conditions for a minimum fail at some grid node");
    }

    if (rep.verdict == Verdict::StrictWeakMax || rep.verdict == Verdict::WeakMax) {
        rep.notes.push_back(
            "maximum verdicts apply the minimum tests to the negated matrix "
            "(F has a maximum at u exactly when -F has a minimum)");
    }
    std::string grid_note = "definiteness certified at the ";
    for (std::size_t i = 0; i < problem.grid.size(); ++i)
        grid_note += (i ? " x " : "") + std::to_string(problem.grid[i]);
    grid_note += " sampled grid nodes only";
    rep.notes.push_back(grid_note);
    return rep;
}

}  // namespace varcond
