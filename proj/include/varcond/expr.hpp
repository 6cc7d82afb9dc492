#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "varcond/errors.hpp"
#include "varcond/jetspace.hpp"

// Immutable symbolic expression trees over independent variables and jet
// coordinates.  Construction never simplifies; see simplify.hpp.

namespace varcond {

// Exact rational, used for Pow exponents.  Exponents are restricted to
// half-integers by the parser and by simplify; the type itself is general.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n) : num(n), den(1) {}
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw Error("rational with zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    bool is_integer() const { return den == 1; }
    bool is_half_integer() const { return den == 1 || den == 2; }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend Rational operator+(Rational a, Rational b) {
        return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
    }
    friend Rational operator-(Rational a) { return Rational(-a.num, a.den); }
    friend Rational operator-(Rational a, Rational b) { return a + (-b); }
    friend Rational operator*(Rational a, Rational b) {
        return Rational(a.num * b.num, a.den * b.den);
    }
    friend bool operator==(Rational a, Rational b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator!=(Rational a, Rational b) { return !(a == b); }
    friend bool operator<(Rational a, Rational b) {
        return a.num * b.den < b.num * a.den;
    }

    std::string str() const {
        if (is_integer()) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }
};

enum class FuncKind : std::uint8_t { Exp, Log, Sin, Cos, Sinh, Cosh, Tanh };

inline const char* func_name(FuncKind f) {
    switch (f) {
        case FuncKind::Exp: return "exp";
        case FuncKind::Log: return "log";
        case FuncKind::Sin: return "sin";
        case FuncKind::Cos: return "cos";
        case FuncKind::Sinh: return "sinh";
        case FuncKind::Cosh: return "cosh";
        case FuncKind::Tanh: return "tanh";
    }
    return "?";
}

enum class ExprKind : std::uint8_t {
    Number,
    IndepVar,
    JetVar,
    PsiPiece,
    Indicator,
    Call,
    Pow,
    Neg,
    Div,
    Mul,
    Add,
};

struct ExprNode;

namespace detail {
struct ExprAccess;
}

// Value-semantic handle to an immutable node.  Cheap to copy and safe to
// share between threads.
class Expr {
public:
    Expr() = default;  // empty handle; using it is a logic error

    bool empty() const { return !p_; }
    ExprKind kind() const;
    const ExprNode& node() const { return *p_; }

    // Leaf payload accessors (valid only for the matching kind).
    double number() const;
    int axis() const;
    const JetCoordinate& jet() const;
    FuncKind func() const;
    Rational exponent() const;
    const std::vector<Expr>& terms() const;    // Add
    const std::vector<Expr>& factors() const;  // Mul
    const Expr& arg() const;                   // Neg / Call
    const Expr& base() const;                  // Pow
    const Expr& numerator() const;             // Div
    const Expr& denominator() const;           // Div

    // Factories.
    static Expr number_of(double v);
    static Expr indep(int axis);
    static Expr jet_of(JetCoordinate c);
    static Expr add(std::vector<Expr> terms);
    static Expr mul(std::vector<Expr> factors);
    static Expr neg(Expr e);
    static Expr div(Expr num, Expr den);
    static Expr pow_of(Expr base, Rational exponent);
    static Expr call(FuncKind f, Expr arg);
    static Expr psi_piece(int order, int deriv, int axis, double center, double halfwidth);
    static Expr indicator(int axis, double lo, double hi);

private:
    friend struct detail::ExprAccess;
    explicit Expr(std::shared_ptr<const ExprNode> p) : p_(std::move(p)) {}
    std::shared_ptr<const ExprNode> p_;
};

struct NumberNode {
    double value;
};
struct IndepVarNode {
    int axis;  // 1-based
};
struct JetVarNode {
    JetCoordinate coord;
};
// deriv-th derivative of the piecewise bump factor psi_order evaluated at
// (x_axis - center)/halfwidth.  Zero outside [-1, 1] in the scaled variable.
struct PsiPieceNode {
    int order;
    int deriv;
    int axis;
    double center;
    double halfwidth;
};
// Characteristic function of [lo, hi] on one axis; derivative taken as 0.
struct IndicatorNode {
    int axis;
    double lo;
    double hi;
};
struct CallNode {
    FuncKind func;
    Expr arg;
};
struct PowNode {
    Expr base;
    Rational exponent;
};
struct NegNode {
    Expr arg;
};
struct DivNode {
    Expr num;
    Expr den;
};
struct MulNode {
    std::vector<Expr> factors;
};
struct AddNode {
    std::vector<Expr> terms;
};

struct ExprNode {
    std::variant<NumberNode, IndepVarNode, JetVarNode, PsiPieceNode, IndicatorNode,
                 CallNode, PowNode, NegNode, DivNode, MulNode, AddNode>
        data;
};

inline ExprKind Expr::kind() const {
    return static_cast<ExprKind>(p_->data.index());
}
inline double Expr::number() const { return std::get<NumberNode>(p_->data).value; }
inline int Expr::axis() const {
    if (kind() == ExprKind::IndepVar) return std::get<IndepVarNode>(p_->data).axis;
    if (kind() == ExprKind::PsiPiece) return std::get<PsiPieceNode>(p_->data).axis;
    return std::get<IndicatorNode>(p_->data).axis;
}
inline const JetCoordinate& Expr::jet() const {
    return std::get<JetVarNode>(p_->data).coord;
}
inline FuncKind Expr::func() const { return std::get<CallNode>(p_->data).func; }
inline Rational Expr::exponent() const { return std::get<PowNode>(p_->data).exponent; }
inline const std::vector<Expr>& Expr::terms() const {
    return std::get<AddNode>(p_->data).terms;
}
inline const std::vector<Expr>& Expr::factors() const {
    return std::get<MulNode>(p_->data).factors;
}
inline const Expr& Expr::arg() const {
    if (kind() == ExprKind::Neg) return std::get<NegNode>(p_->data).arg;
    return std::get<CallNode>(p_->data).arg;
}
inline const Expr& Expr::base() const { return std::get<PowNode>(p_->data).base; }
inline const Expr& Expr::numerator() const { return std::get<DivNode>(p_->data).num; }
inline const Expr& Expr::denominator() const { return std::get<DivNode>(p_->data).den; }

namespace detail {
template <class T>
Expr make_node(T&& payload);
}

inline Expr Expr::number_of(double v) { return detail::make_node(NumberNode{v}); }
inline Expr Expr::indep(int axis) {
    if (axis < 1) throw AddressError("independent variable axis must be >= 1");
    return detail::make_node(IndepVarNode{axis});
}
inline Expr Expr::jet_of(JetCoordinate c) { return detail::make_node(JetVarNode{std::move(c)}); }
inline Expr Expr::add(std::vector<Expr> terms) { return detail::make_node(AddNode{std::move(terms)}); }
inline Expr Expr::mul(std::vector<Expr> factors) { return detail::make_node(MulNode{std::move(factors)}); }
inline Expr Expr::neg(Expr e) { return detail::make_node(NegNode{std::move(e)}); }
inline Expr Expr::div(Expr num, Expr den) {
    return detail::make_node(DivNode{std::move(num), std::move(den)});
}
inline Expr Expr::pow_of(Expr base, Rational exponent) {
    return detail::make_node(PowNode{std::move(base), exponent});
}
inline Expr Expr::call(FuncKind f, Expr arg) {
    return detail::make_node(CallNode{f, std::move(arg)});
}
inline Expr Expr::psi_piece(int order, int deriv, int axis, double center, double halfwidth) {
    if (order < 0 || deriv < 0) throw AddressError("psi piece needs order, deriv >= 0");
    if (halfwidth <= 0) throw AddressError("psi piece needs a positive halfwidth");
    return detail::make_node(PsiPieceNode{order, deriv, axis, center, halfwidth});
}
inline Expr Expr::indicator(int axis, double lo, double hi) {
    if (!(lo <= hi)) throw AddressError("indicator interval is empty");
    return detail::make_node(IndicatorNode{axis, lo, hi});
}

namespace detail {

struct ExprAccess {
    static Expr wrap(std::shared_ptr<const ExprNode> p);
};

template <class T>
Expr make_node(T&& payload) {
    auto node = std::make_shared<ExprNode>();
    node->data = std::forward<T>(payload);
    return ExprAccess::wrap(std::move(node));
}

}  // namespace detail

// Arithmetic sugar; produces raw (unsimplified) trees.
inline Expr operator+(Expr a, Expr b) { return Expr::add({std::move(a), std::move(b)}); }
inline Expr operator-(Expr a, Expr b) {
    return Expr::add({std::move(a), Expr::neg(std::move(b))});
}
inline Expr operator*(Expr a, Expr b) { return Expr::mul({std::move(a), std::move(b)}); }
inline Expr operator/(Expr a, Expr b) { return Expr::div(std::move(a), std::move(b)); }
inline Expr operator-(Expr a) { return Expr::neg(std::move(a)); }
inline Expr operator+(double a, Expr b) { return Expr::number_of(a) + std::move(b); }
inline Expr operator+(Expr a, double b) { return std::move(a) + Expr::number_of(b); }
inline Expr operator-(double a, Expr b) { return Expr::number_of(a) - std::move(b); }
inline Expr operator-(Expr a, double b) { return std::move(a) - Expr::number_of(b); }
inline Expr operator*(double a, Expr b) { return Expr::number_of(a) * std::move(b); }
inline Expr operator*(Expr a, double b) { return std::move(a) * Expr::number_of(b); }
inline Expr operator/(double a, Expr b) { return Expr::number_of(a) / std::move(b); }
inline Expr operator/(Expr a, double b) { return std::move(a) / Expr::number_of(b); }
inline Expr pow(Expr base, int k) { return Expr::pow_of(std::move(base), Rational(k)); }
inline Expr pow(Expr base, Rational r) { return Expr::pow_of(std::move(base), r); }
inline Expr sqrt(Expr e) { return Expr::pow_of(std::move(e), Rational(1, 2)); }
inline Expr exp(Expr e) { return Expr::call(FuncKind::Exp, std::move(e)); }
inline Expr log(Expr e) { return Expr::call(FuncKind::Log, std::move(e)); }
inline Expr sin(Expr e) { return Expr::call(FuncKind::Sin, std::move(e)); }
inline Expr cos(Expr e) { return Expr::call(FuncKind::Cos, std::move(e)); }
inline Expr sinh(Expr e) { return Expr::call(FuncKind::Sinh, std::move(e)); }
inline Expr cosh(Expr e) { return Expr::call(FuncKind::Cosh, std::move(e)); }
inline Expr tanh(Expr e) { return Expr::call(FuncKind::Tanh, std::move(e)); }

// ---------------------------------------------------------------------------
// Structural total order.  Used for canonical sorting; compare(a, b) == 0
// means structural equality (semantic equality is always checked
// numerically instead).

inline int compare(const Expr& a, const Expr& b);

namespace detail {

inline int cmp3(double a, double b) { return a < b ? -1 : (b < a ? 1 : 0); }
inline int cmp3(int a, int b) { return a < b ? -1 : (b < a ? 1 : 0); }

inline int compare_lists(const std::vector<Expr>& a, const std::vector<Expr>& b) {
    const std::size_t k = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < k; ++i)
        if (int c = compare(a[i], b[i]); c != 0) return c;
    return cmp3(static_cast<int>(a.size()), static_cast<int>(b.size()));
}

}  // namespace detail

inline int compare(const Expr& a, const Expr& b) {
    if (a.kind() != b.kind())
        return detail::cmp3(static_cast<int>(a.kind()), static_cast<int>(b.kind()));
    switch (a.kind()) {
        case ExprKind::Number:
            return detail::cmp3(a.number(), b.number());
        case ExprKind::IndepVar:
            return detail::cmp3(a.axis(), b.axis());
        case ExprKind::JetVar: {
            if (a.jet() == b.jet()) return 0;
            return a.jet() < b.jet() ? -1 : 1;
        }
        case ExprKind::PsiPiece: {
            const auto& x = std::get<PsiPieceNode>(a.node().data);
            const auto& y = std::get<PsiPieceNode>(b.node().data);
            if (int c = detail::cmp3(x.order, y.order); c != 0) return c;
            if (int c = detail::cmp3(x.deriv, y.deriv); c != 0) return c;
            if (int c = detail::cmp3(x.axis, y.axis); c != 0) return c;
            if (int c = detail::cmp3(x.center, y.center); c != 0) return c;
            return detail::cmp3(x.halfwidth, y.halfwidth);
        }
        case ExprKind::Indicator: {
            const auto& x = std::get<IndicatorNode>(a.node().data);
            const auto& y = std::get<IndicatorNode>(b.node().data);
            if (int c = detail::cmp3(x.axis, y.axis); c != 0) return c;
            if (int c = detail::cmp3(x.lo, y.lo); c != 0) return c;
            return detail::cmp3(x.hi, y.hi);
        }
        case ExprKind::Call: {
            if (int c = detail::cmp3(static_cast<int>(a.func()), static_cast<int>(b.func()));
                c != 0)
                return c;
            return compare(a.arg(), b.arg());
        }
        case ExprKind::Pow: {
            if (int c = compare(a.base(), b.base()); c != 0) return c;
            if (a.exponent() == b.exponent()) return 0;
            return a.exponent() < b.exponent() ? -1 : 1;
        }
        case ExprKind::Neg:
            return compare(a.arg(), b.arg());
        case ExprKind::Div: {
            if (int c = compare(a.numerator(), b.numerator()); c != 0) return c;
            return compare(a.denominator(), b.denominator());
        }
        case ExprKind::Mul:
            return detail::compare_lists(a.factors(), b.factors());
        case ExprKind::Add:
            return detail::compare_lists(a.terms(), b.terms());
    }
    return 0;
}

inline bool structurally_equal(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

// ---------------------------------------------------------------------------
// Queries.

inline void collect_jets(const Expr& e, std::set<JetCoordinate>& out) {
    switch (e.kind()) {
        case ExprKind::JetVar:
            out.insert(e.jet());
            return;
        case ExprKind::Add:
            for (const Expr& t : e.terms()) collect_jets(t, out);
            return;
        case ExprKind::Mul:
            for (const Expr& f : e.factors()) collect_jets(f, out);
            return;
        case ExprKind::Pow:
            collect_jets(e.base(), out);
            return;
        case ExprKind::Neg:
        case ExprKind::Call:
            collect_jets(e.arg(), out);
            return;
        case ExprKind::Div:
            collect_jets(e.numerator(), out);
            collect_jets(e.denominator(), out);
            return;
        default:
            return;
    }
}

// Exact set of jet coordinates appearing in `e`.
inline std::set<JetCoordinate> free_jets(const Expr& e) {
    std::set<JetCoordinate> out;
    collect_jets(e, out);
    return out;
}

// Collects per-axis kink locations of the piecewise leaves (bump edges and
// centers, indicator edges) for panel-aligned quadrature.  `per_axis` must
// be pre-sized to the number of independent variables.
inline void collect_breakpoints(const Expr& e, std::vector<std::vector<double>>& per_axis) {
    switch (e.kind()) {
        case ExprKind::PsiPiece: {
            const auto& p = std::get<PsiPieceNode>(e.node().data);
            if (p.axis >= 1 && p.axis <= static_cast<int>(per_axis.size())) {
                auto& b = per_axis[static_cast<std::size_t>(p.axis - 1)];
                b.push_back(p.center - p.halfwidth);
                b.push_back(p.center);
                b.push_back(p.center + p.halfwidth);
            }
            return;
        }
        case ExprKind::Indicator: {
            const auto& p = std::get<IndicatorNode>(e.node().data);
            if (p.axis >= 1 && p.axis <= static_cast<int>(per_axis.size())) {
                auto& b = per_axis[static_cast<std::size_t>(p.axis - 1)];
                b.push_back(p.lo);
                b.push_back(p.hi);
            }
            return;
        }
        case ExprKind::Add:
            for (const Expr& t : e.terms()) collect_breakpoints(t, per_axis);
            return;
        case ExprKind::Mul:
            for (const Expr& f : e.factors()) collect_breakpoints(f, per_axis);
            return;
        case ExprKind::Pow:
            collect_breakpoints(e.base(), per_axis);
            return;
        case ExprKind::Neg:
        case ExprKind::Call:
            collect_breakpoints(e.arg(), per_axis);
            return;
        case ExprKind::Div:
            collect_breakpoints(e.numerator(), per_axis);
            collect_breakpoints(e.denominator(), per_axis);
            return;
        default:
            return;
    }
}

// Highest derivative order among the jets of `e`; 0 if none.
inline int max_jet_order(const Expr& e) {
    int k = 0;
    for (const JetCoordinate& c : free_jets(e)) k = std::max(k, c.order());
    return k;
}

inline bool contains_jets(const Expr& e) { return !free_jets(e).empty(); }

// ---------------------------------------------------------------------------
// Printing.  Output of grammar-expressible trees re-parses to an
// equivalent expression; psi/indicator leaves print in a debug-only form.

inline std::string format_double(double v) {
    std::array<char, 40> buf;
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), p);
}

inline std::string to_string(const Expr& e);

namespace detail {

// Pseudo-precedence for parenthesization: Add and negative leaves lowest,
// Mul/Div next, Pow next, atoms highest.
inline int print_prec(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Add:
        case ExprKind::Neg:
            return 1;
        case ExprKind::Mul:
        case ExprKind::Div:
            return 2;
        case ExprKind::Pow:
            return 3;
        case ExprKind::Number:
            return e.number() < 0 ? 1 : 4;
        default:
            return 4;
    }
}

inline std::string print_wrapped(const Expr& e, int min_prec) {
    std::string s = to_string(e);
    if (print_prec(e) < min_prec) return "(" + s + ")";
    return s;
}

inline std::string print_pow(const Expr& base, const Rational& r) {
    if (r == Rational(1, 2)) return "sqrt(" + to_string(base) + ")";
    const std::string b = print_wrapped(base, 4);
    if (r.is_integer()) return b + "^" + std::to_string(r.num);
    return b + "^(" + r.str() + ")";
}

// Splits a factor list into numerator and denominator parts so that
// negative exponents print as divisions.
inline std::string print_product(const std::vector<Expr>& factors) {
    std::vector<std::string> nums, dens;
    for (const Expr& f : factors) {
        if (f.kind() == ExprKind::Pow && f.exponent() < Rational(0)) {
            dens.push_back(print_pow(f.base(), -f.exponent()));
        } else if (f.kind() == ExprKind::Pow) {
            nums.push_back(print_pow(f.base(), f.exponent()));
        } else if (nums.empty() && f.kind() == ExprKind::Number) {
            // A leading coefficient may carry its sign bare: the following
            // '*' keeps the parse unambiguous.
            nums.push_back(format_double(f.number()));
        } else {
            nums.push_back(print_wrapped(f, 3));
        }
    }
    std::string out;
    if (nums.empty()) {
        out = "1";
    } else {
        for (std::size_t i = 0; i < nums.size(); ++i) {
            if (i) out += "*";
            out += nums[i];
        }
    }
    if (!dens.empty()) {
        if (dens.size() == 1) {
            out += "/" + dens[0];
        } else {
            out += "/(";
            for (std::size_t i = 0; i < dens.size(); ++i) {
                if (i) out += "*";
                out += dens[i];
            }
            out += ")";
        }
    }
    return out;
}

}  // namespace detail

inline std::string to_string(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Number:
            return format_double(e.number());
        case ExprKind::IndepVar:
            return "x" + std::to_string(e.axis());
        case ExprKind::JetVar:
            return e.jet().name();
        case ExprKind::PsiPiece: {
            const auto& p = std::get<PsiPieceNode>(e.node().data);
            std::string s = "psi" + std::to_string(p.order);
            s.append(static_cast<std::size_t>(p.deriv), '\'');
            s += "((x" + std::to_string(p.axis) + " - " + format_double(p.center) + ")/" +
                 format_double(p.halfwidth) + ")";
            return s;
        }
        case ExprKind::Indicator: {
            const auto& p = std::get<IndicatorNode>(e.node().data);
            return "ind(x" + std::to_string(p.axis) + "; " + format_double(p.lo) + ", " +
                   format_double(p.hi) + ")";
        }
        case ExprKind::Call:
            return std::string(func_name(e.func())) + "(" + to_string(e.arg()) + ")";
        case ExprKind::Pow:
            if (e.exponent() < Rational(0))
                return "1/" + detail::print_pow(e.base(), -e.exponent());
            return detail::print_pow(e.base(), e.exponent());
        case ExprKind::Neg:
            return "-" + detail::print_wrapped(e.arg(), 4);
        case ExprKind::Div:
            return detail::print_wrapped(e.numerator(), 2) + "/" +
                   detail::print_wrapped(e.denominator(), 3);
        case ExprKind::Mul:
            return detail::print_product(e.factors());
        case ExprKind::Add: {
            const auto& ts = e.terms();
            if (ts.empty()) return "0";
            std::string out = detail::print_wrapped(ts[0], 1);
            for (std::size_t i = 1; i < ts.size(); ++i) {
                const Expr& t = ts[i];
                if (t.kind() == ExprKind::Neg) {
                    out += " - " + detail::print_wrapped(t.arg(), 2);
                } else if (t.kind() == ExprKind::Mul && !t.factors().empty() &&
                           t.factors()[0].kind() == ExprKind::Number &&
                           t.factors()[0].number() < 0) {
                    std::vector<Expr> rest = t.factors();
                    const double c = -rest[0].number();
                    if (c == 1.0)
                        rest.erase(rest.begin());
                    else
                        rest[0] = Expr::number_of(c);
                    out += " - " + detail::print_wrapped(Expr::mul(std::move(rest)), 2);
                } else if (t.kind() == ExprKind::Number && t.number() < 0) {
                    out += " - " + format_double(-t.number());
                } else {
                    out += " + " + detail::print_wrapped(t, 2);
                }
            }
            return out;
        }
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Evaluation.

// A full numeric point (x, u^(s)); jet values are ordered by the layout.
struct PointAssignment {
    PointAssignment() = default;
    PointAssignment(const JetLayout& lay, std::vector<double> x_values,
                    std::vector<double> jet_values)
        : layout(&lay), x(std::move(x_values)), jets(std::move(jet_values)) {
        if (static_cast<int>(x.size()) != lay.n() ||
            static_cast<int>(jets.size()) != lay.size())
            throw ShapeError("point assignment sized " + std::to_string(x.size()) + "+" +
                             std::to_string(jets.size()) + " does not match layout (" +
                             std::to_string(lay.n()) + ", " + std::to_string(lay.size()) +
                             ")");
    }

    static PointAssignment x_only(std::vector<double> x_values) {
        PointAssignment p;
        p.x = std::move(x_values);
        return p;
    }

    const JetLayout* layout = nullptr;
    std::vector<double> x;
    std::vector<double> jets;
};

inline double eval(const Expr& e, const PointAssignment& p);

namespace detail {

inline double eval_int_pow(double base, std::int64_t k, const Expr& where) {
    if (k < 0) {
        if (base == 0.0) throw EvalError("division by zero", to_string(where));
        return 1.0 / eval_int_pow(base, -k, where);
    }
    double r = 1.0, b = base;
    while (k > 0) {
        if (k & 1) r *= b;
        b *= b;
        k >>= 1;
    }
    return r;
}

// Value of the deriv-th derivative (in the scaled variable) of the bump
// factor: order 0 is the constant 1; odd orders are 1 - y^l*sign(y) on
// [-1, 1]; even orders are 1 - y^l on [-1, 1]; all are 0 outside.
inline double psi_piece_value(int l, int deriv, double y) {
    if (l == 0) return deriv == 0 ? 1.0 : 0.0;  // constant bump factor
    if (y <= -1.0 || y >= 1.0) return 0.0;
    if (deriv > l) return 0.0;
    // sign of the y^l piece: -1 on (0,1] always; on [-1,0) it is -1 for
    // even l and +1 for odd l.
    const double piece_sign = (y >= 0.0 || l % 2 == 0) ? -1.0 : 1.0;
    if (deriv == 0) return 1.0 + piece_sign * std::pow(y, l);
    double coef = 1.0;
    for (int i = 0; i < deriv; ++i) coef *= static_cast<double>(l - i);
    return piece_sign * coef * std::pow(y, l - deriv);
}

}  // namespace detail

inline double eval(const Expr& e, const PointAssignment& p) {
    switch (e.kind()) {
        case ExprKind::Number:
            return e.number();
        case ExprKind::IndepVar: {
            const int a = e.axis();
            if (a < 1 || a > static_cast<int>(p.x.size()))
                throw EvalError("independent variable not covered by the point",
                                to_string(e));
            return p.x[static_cast<std::size_t>(a - 1)];
        }
        case ExprKind::JetVar: {
            if (!p.layout || !p.layout->contains(e.jet()))
                throw EvalError("jet coordinate not covered by the point", to_string(e));
            return p.jets[static_cast<std::size_t>(p.layout->index_of(e.jet()) - 1)];
        }
        case ExprKind::PsiPiece: {
            const auto& q = std::get<PsiPieceNode>(e.node().data);
            if (q.axis < 1 || q.axis > static_cast<int>(p.x.size()))
                throw EvalError("independent variable not covered by the point",
                                to_string(e));
            const double y = (p.x[static_cast<std::size_t>(q.axis - 1)] - q.center) / q.halfwidth;
            return detail::psi_piece_value(q.order, q.deriv, y);
        }
        case ExprKind::Indicator: {
            const auto& q = std::get<IndicatorNode>(e.node().data);
            if (q.axis < 1 || q.axis > static_cast<int>(p.x.size()))
                throw EvalError("independent variable not covered by the point",
                                to_string(e));
            const double v = p.x[static_cast<std::size_t>(q.axis - 1)];
            return (v >= q.lo && v <= q.hi) ? 1.0 : 0.0;
        }
        case ExprKind::Call: {
            const double a = eval(e.arg(), p);
            switch (e.func()) {
                case FuncKind::Exp: return std::exp(a);
                case FuncKind::Log:
                    if (a <= 0.0) throw EvalError("log of a non-positive value", to_string(e));
                    return std::log(a);
                case FuncKind::Sin: return std::sin(a);
                case FuncKind::Cos: return std::cos(a);
                case FuncKind::Sinh: return std::sinh(a);
                case FuncKind::Cosh: return std::cosh(a);
                case FuncKind::Tanh: return std::tanh(a);
            }
            throw EvalError("unknown function", to_string(e));
        }
        case ExprKind::Pow: {
            const double b = eval(e.base(), p);
            const Rational r = e.exponent();
            if (r.is_integer()) return detail::eval_int_pow(b, r.num, e);
            if (b < 0.0) throw EvalError("fractional power of a negative value", to_string(e));
            if (b == 0.0 && r < Rational(0))
                throw EvalError("division by zero", to_string(e));
            return std::pow(b, r.value());
        }
        case ExprKind::Neg:
            return -eval(e.arg(), p);
        case ExprKind::Div: {
            const double d = eval(e.denominator(), p);
            if (d == 0.0) throw EvalError("division by zero", to_string(e));
            return eval(e.numerator(), p) / d;
        }
        case ExprKind::Mul: {
            double r = 1.0;
            for (const Expr& f : e.factors()) r *= eval(f, p);
            return r;
        }
        case ExprKind::Add: {
            double r = 0.0;
            for (const Expr& t : e.terms()) r += eval(t, p);
            return r;
        }
    }
    throw EvalError("unknown node", to_string(e));
}

namespace detail {
inline Expr ExprAccess::wrap(std::shared_ptr<const ExprNode> p) { return Expr(std::move(p)); }
}  // namespace detail

}  // namespace varcond
