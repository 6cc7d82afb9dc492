#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "varcond/errors.hpp"

// Jet-space bookkeeping: every distinct partial derivative u^j_(k)[h] of a
// dependent variable gets one named coordinate, and a JetLayout fixes the
// global ordering of all coordinates up to a given derivative order.

namespace varcond {

inline std::int64_t binomial(int a, int b) {
    if (b < 0 || b > a) return 0;
    b = std::min(b, a - b);
    std::int64_t r = 1;
    for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
}

// Number of distinct k-th order partial derivatives in n variables.
inline int p_count(int n, int k) {
    if (n < 1) throw AddressError("p_count: need n >= 1");
    if (k < 0) throw AddressError("p_count: need k >= 0");
    return static_cast<int>(binomial(n + k - 1, k));
}

// Total number of jet coordinates for m dependent variables up to order s.
inline int q_count(int n, int m, int s) {
    if (n < 1 || m < 1) throw AddressError("q_count: need n >= 1, m >= 1");
    if (s < 0) throw AddressError("q_count: need s >= 0");
    return static_cast<int>(m * binomial(n + s, s));
}

// Exponent vector over the independent variables; names one mixed partial
// derivative operator.  The exponent vector is the canonical form; the
// nondecreasing variable-index sequence (x1 x1 x2 ...) is derived from it
// for ordering and display.
class MultiIndex {
public:
    explicit MultiIndex(std::vector<int> exponents) : exps_(std::move(exponents)) {
        if (exps_.empty()) throw AddressError("multi-index needs at least one axis");
        for (int e : exps_)
            if (e < 0) throw AddressError("multi-index exponents must be non-negative");
    }

    static MultiIndex zero(int n) { return MultiIndex(std::vector<int>(n, 0)); }

    int size() const { return static_cast<int>(exps_.size()); }
    int order() const { return std::accumulate(exps_.begin(), exps_.end(), 0); }

    // 1-based axis access.
    int exponent(int axis) const {
        check_axis(axis);
        return exps_[axis - 1];
    }

    const std::vector<int>& exponents() const { return exps_; }

    MultiIndex raised(int axis) const {
        check_axis(axis);
        std::vector<int> e = exps_;
        ++e[axis - 1];
        return MultiIndex(std::move(e));
    }

    MultiIndex lowered(int axis) const {
        check_axis(axis);
        if (exps_[axis - 1] == 0)
            throw AddressError("cannot lower axis " + std::to_string(axis) +
                               " with zero exponent");
        std::vector<int> e = exps_;
        --e[axis - 1];
        return MultiIndex(std::move(e));
    }

    // Nondecreasing list of axis indices, one entry per derivative taken.
    std::vector<int> variable_sequence() const {
        std::vector<int> seq;
        seq.reserve(order());
        for (int i = 0; i < size(); ++i)
            for (int r = 0; r < exps_[i]; ++r) seq.push_back(i + 1);
        return seq;
    }

    // Derivative suffix in the canonical spelling, e.g. "x1x1x2".
    std::string suffix() const {
        std::string s;
        for (int axis : variable_sequence()) s += "x" + std::to_string(axis);
        return s;
    }

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
        return a.exps_ == b.exps_;
    }
    friend bool operator!=(const MultiIndex& a, const MultiIndex& b) { return !(a == b); }

    // Order used inside a slot table: lexicographic over the variable
    // sequences, which for equal derivative order reduces to comparing
    // exponent vectors with earlier axes weighted heavier.
    friend bool operator<(const MultiIndex& a, const MultiIndex& b) {
        if (a.order() != b.order()) return a.order() < b.order();
        return a.variable_sequence() < b.variable_sequence();
    }

private:
    void check_axis(int axis) const {
        if (axis < 1 || axis > size())
            throw AddressError("axis " + std::to_string(axis) + " out of range for " +
                               std::to_string(size()) + " independent variables");
    }

    std::vector<int> exps_;
};

inline MultiIndex raise(const MultiIndex& mi, int axis) { return mi.raised(axis); }

// All order-k multi-indices over n variables, in slot order: lexicographic
// over the nondecreasing variable-index sequences.
inline std::vector<MultiIndex> enumerate_slots(int n, int k) {
    if (n < 1) throw AddressError("enumerate_slots: need n >= 1");
    if (k < 0) throw AddressError("enumerate_slots: need k >= 0");
    std::vector<MultiIndex> out;
    out.reserve(static_cast<std::size_t>(p_count(n, k)));
    std::vector<int> exps(n, 0);
    auto rec = [&](auto&& self, int axis, int remaining) -> void {
        if (axis == n) {
            exps[n - 1] = remaining;
            out.emplace_back(exps);
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            exps[axis - 1] = e;
            self(self, axis + 1, remaining - e);
        }
        exps[axis - 1] = 0;
    };
    rec(rec, 1, k);
    return out;
}

// 1-based rank of `mi` within enumerate_slots(mi.size(), mi.order()).
inline int slot_of(const MultiIndex& mi) {
    const auto table = enumerate_slots(mi.size(), mi.order());
    for (std::size_t h = 0; h < table.size(); ++h)
        if (table[h] == mi) return static_cast<int>(h) + 1;
    throw AddressError("multi-index not found in its slot table");  // unreachable
}

// One jet coordinate u^j_(k)[h].  Stores the dependent index and the
// multi-index; derivative order and slot are derived.
class JetCoordinate {
public:
    JetCoordinate(int dep, MultiIndex index) : dep_(dep), index_(std::move(index)) {
        if (dep_ < 1) throw AddressError("dependent index must be >= 1");
    }

    int dep() const { return dep_; }
    int order() const { return index_.order(); }
    int slot() const { return slot_of(index_); }
    const MultiIndex& index() const { return index_; }

    // Canonical textual name: u<j> or u<j>_x..x.. with axes nondecreasing.
    std::string name() const {
        std::string s = "u" + std::to_string(dep_);
        if (order() > 0) s += "_" + index_.suffix();
        return s;
    }

    friend bool operator==(const JetCoordinate& a, const JetCoordinate& b) {
        return a.dep_ == b.dep_ && a.index_ == b.index_;
    }
    friend bool operator!=(const JetCoordinate& a, const JetCoordinate& b) {
        return !(a == b);
    }
    friend bool operator<(const JetCoordinate& a, const JetCoordinate& b) {
        if (a.dep_ != b.dep_) return a.dep_ < b.dep_;
        return a.index_ < b.index_;
    }

private:
    int dep_;
    MultiIndex index_;
};

// The full ordered coordinate list for (n, m, s): grouped by dependent
// variable, within a group by ascending order, within an order by slot.
class JetLayout {
public:
    JetLayout(int n, int m, int s) : n_(n), m_(m), s_(s) {
        if (n < 1 || m < 1 || s < 0)
            throw AddressError("layout needs n >= 1, m >= 1, s >= 0");
        slot_tables_.reserve(static_cast<std::size_t>(s + 1));
        prefix_.assign(static_cast<std::size_t>(s + 2), 0);
        for (int k = 0; k <= s; ++k) {
            slot_tables_.push_back(enumerate_slots(n, k));
            prefix_[static_cast<std::size_t>(k + 1)] =
                prefix_[static_cast<std::size_t>(k)] +
                static_cast<int>(slot_tables_.back().size());
        }
        per_dep_ = prefix_[static_cast<std::size_t>(s + 1)];
        coords_.reserve(static_cast<std::size_t>(m) * per_dep_);
        for (int j = 1; j <= m; ++j)
            for (int k = 0; k <= s; ++k)
                for (const MultiIndex& mi : slot_tables_[static_cast<std::size_t>(k)])
                    coords_.emplace_back(j, mi);
    }

    int n() const { return n_; }
    int m() const { return m_; }
    int order() const { return s_; }
    int size() const { return static_cast<int>(coords_.size()); }

    const std::vector<JetCoordinate>& coordinates() const { return coords_; }
    const std::vector<MultiIndex>& slots(int k) const {
        if (k < 0 || k > s_)
            throw AddressError("no slot table for order " + std::to_string(k));
        return slot_tables_[static_cast<std::size_t>(k)];
    }

    bool contains(const JetCoordinate& c) const {
        return c.dep() >= 1 && c.dep() <= m_ && c.index().size() == n_ &&
               c.order() <= s_;
    }

    // 1-based position of `c` in the coordinate list.
    int index_of(const JetCoordinate& c) const {
        if (!contains(c))
            throw AddressError("coordinate " + c.name() + " is not in this layout");
        return (c.dep() - 1) * per_dep_ + prefix_[static_cast<std::size_t>(c.order())] +
               c.slot();
    }

    // Inverse of index_of; `i` is 1-based.
    const JetCoordinate& coordinate_at(int i) const {
        if (i < 1 || i > size())
            throw AddressError("coordinate index " + std::to_string(i) +
                               " out of range [1, " + std::to_string(size()) + "]");
        return coords_[static_cast<std::size_t>(i - 1)];
    }

    JetLayout raised(int extra) const { return JetLayout(n_, m_, s_ + extra); }

    friend bool operator==(const JetLayout& a, const JetLayout& b) {
        return a.n_ == b.n_ && a.m_ == b.m_ && a.s_ == b.s_;
    }

private:
    int n_, m_, s_;
    int per_dep_ = 0;
    std::vector<JetCoordinate> coords_;
    std::vector<std::vector<MultiIndex>> slot_tables_;
    std::vector<int> prefix_;  // prefix_[k] = number of slots of order < k
};

inline JetLayout layout(int n, int m, int s) { return JetLayout(n, m, s); }

}  // namespace varcond
