#pragma once

#include <cctype>
#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "varcond/expr.hpp"
#include "varcond/jetspace.hpp"

// Recursive-descent parser for the expression grammar:
//
//   expr     := term (('+'|'-') term)*
//   term     := factor (('*'|'/') factor)*
//   factor   := unary ('^' exponent)?
//   unary    := '-'? atom
//   atom     := number | ident | func '(' expr ')' | '(' expr ')'
//   exponent := integer | '(' integer '/' integer ')'
//   ident    := 'x'<digits> | 'u'<digits> ( '_' ('x'<digits>)+ )?
//   func     := sqrt|exp|log|sin|cos|sinh|cosh|tanh
//
// Derivative suffixes must list axes in nondecreasing order; exponents are
// limited to half-integers.  Every identifier is validated against the
// ambient layout.

namespace varcond {

namespace detail {

class Parser {
public:
    Parser(std::string_view text, const JetLayout& lay) : text_(text), layout_(lay) {}

    Expr run() {
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError("parse error at position " + std::to_string(pos_) + ": " + message,
                         pos_);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool peek_is(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool accept(char c) {
        if (peek_is(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!accept(c)) fail(std::string("expected '") + c + "' " + what);
    }

    Expr parse_expr() {
        Expr e = parse_term();
        for (;;) {
            if (accept('+'))
                e = Expr::add({e, parse_term()});
            else if (accept('-'))
                e = Expr::add({e, Expr::neg(parse_term())});
            else
                return e;
        }
    }

    Expr parse_term() {
        Expr e = parse_factor();
        for (;;) {
            if (accept('*'))
                e = Expr::mul({e, parse_factor()});
            else if (accept('/'))
                e = Expr::div(e, parse_factor());
            else
                return e;
        }
    }

    Expr parse_factor() {
        Expr e = parse_unary();
        if (accept('^')) e = Expr::pow_of(e, parse_exponent());
        return e;
    }

    Expr parse_unary() {
        if (accept('-')) return Expr::neg(parse_atom());
        return parse_atom();
    }

    Rational parse_exponent() {
        skip_ws();
        if (accept('(')) {
            const std::int64_t num = parse_integer();
            expect('/', "in rational exponent");
            const std::int64_t den = parse_integer();
            expect(')', "after rational exponent");
            if (den == 0) fail("zero denominator in exponent");
            Rational r(num, den);
            if (!r.is_half_integer())
                fail("exponent " + r.str() + " is not an integer or half-integer");
            return r;
        }
        return Rational(parse_integer());
    }

    std::int64_t parse_integer() {
        skip_ws();
        const std::size_t start = pos_;
        if (pos_ < text_.size() && text_[pos_] == '-') ++pos_;
        std::size_t digits = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (pos_ == digits) {
            pos_ = start;
            fail("expected an integer");
        }
        std::int64_t v = 0;
        std::from_chars(text_.data() + start, text_.data() + pos_, v);
        return v;
    }

    Expr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (accept('(')) {
            Expr e = parse_expr();
            expect(')', "to close the group");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_word();
        fail(std::string("unexpected character '") + c + "'");
    }

    Expr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark;  // the 'e' belongs to something else
            }
        }
        double v = 0.0;
        const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != text_.data() + pos_) {
            pos_ = start;
            fail("malformed number");
        }
        return Expr::number_of(v);
    }

    Expr parse_word() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string_view word = text_.substr(start, pos_ - start);

        static constexpr std::string_view kFuncs[] = {"sqrt", "exp",  "log",  "sin",
                                                      "cos",  "sinh", "cosh", "tanh"};
        for (const std::string_view f : kFuncs) {
            if (word == f) {
                expect('(', "after function name");
                Expr arg = parse_expr();
                expect(')', "to close the function call");
                if (f == "sqrt") return Expr::pow_of(arg, Rational(1, 2));
                if (f == "exp") return Expr::call(FuncKind::Exp, arg);
                if (f == "log") return Expr::call(FuncKind::Log, arg);
                if (f == "sin") return Expr::call(FuncKind::Sin, arg);
                if (f == "cos") return Expr::call(FuncKind::Cos, arg);
                if (f == "sinh") return Expr::call(FuncKind::Sinh, arg);
                if (f == "cosh") return Expr::call(FuncKind::Cosh, arg);
                return Expr::call(FuncKind::Tanh, arg);
            }
        }

        const std::size_t word_pos = start;
        if (word.size() >= 2 && word[0] == 'x') {
            const int axis = parse_index(word.substr(1), word_pos);
            if (axis < 1 || axis > layout_.n())
                unknown(word, word_pos,
                        "layout has " + std::to_string(layout_.n()) +
                            " independent variable(s)");
            return Expr::indep(axis);
        }
        if (word.size() >= 2 && word[0] == 'u') return parse_jet(word, word_pos);
        unknown(word, word_pos, "");
    }

    int parse_index(std::string_view digits, std::size_t where) {
        if (digits.empty()) unknown(text_.substr(where, 1), where, "missing index");
        int v = 0;
        const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (res.ec != std::errc() || res.ptr != digits.data() + digits.size()) return -1;
        return v;
    }

    Expr parse_jet(std::string_view word, std::size_t where) {
        const std::size_t underscore = word.find('_');
        const std::string_view dep_digits =
            underscore == std::string_view::npos ? word.substr(1)
                                                 : word.substr(1, underscore - 1);
        const int dep = parse_index(dep_digits, where);
        if (dep < 1 || dep > layout_.m())
            unknown(word, where,
                    "layout has " + std::to_string(layout_.m()) + " dependent variable(s)");

        std::vector<int> exponents(static_cast<std::size_t>(layout_.n()), 0);
        int previous_axis = 0;
        int order = 0;
        if (underscore != std::string_view::npos) {
            std::string_view rest = word.substr(underscore + 1);
            if (rest.empty()) unknown(word, where, "empty derivative suffix");
            while (!rest.empty()) {
                if (rest[0] != 'x') unknown(word, where, "malformed derivative suffix");
                std::size_t len = 1;
                while (len < rest.size() && std::isdigit(static_cast<unsigned char>(rest[len])))
                    ++len;
                const int axis = parse_index(rest.substr(1, len - 1), where);
                if (axis < 1 || axis > layout_.n())
                    unknown(word, where,
                            "layout has " + std::to_string(layout_.n()) +
                                " independent variable(s)");
                if (axis < previous_axis) {
                    // Reconstruct the canonical spelling for the message.
                    MultiIndex mi(canonical_exponents(word, underscore));
                    throw ParseError("parse error at position " + std::to_string(where) +
                                         ": derivative axes must be nondecreasing; write " +
                                         JetCoordinate(dep, mi).name(),
                                     where);
                }
                previous_axis = axis;
                ++exponents[static_cast<std::size_t>(axis - 1)];
                ++order;
                rest = rest.substr(len);
            }
        }
        if (order > layout_.order())
            throw ParseError("parse error at position " + std::to_string(where) + ": " +
                                 std::string(word) + " has derivative order " +
                                 std::to_string(order) + ", layout order is " +
                                 std::to_string(layout_.order()),
                             where);
        return Expr::jet_of(JetCoordinate(dep, MultiIndex(std::move(exponents))));
    }

    std::vector<int> canonical_exponents(std::string_view word, std::size_t underscore) {
        std::vector<int> exponents(static_cast<std::size_t>(layout_.n()), 0);
        std::string_view rest = word.substr(underscore + 1);
        while (!rest.empty() && rest[0] == 'x') {
            std::size_t len = 1;
            while (len < rest.size() && std::isdigit(static_cast<unsigned char>(rest[len])))
                ++len;
            int axis = 0;
            std::from_chars(rest.data() + 1, rest.data() + len, axis);
            if (axis >= 1 && axis <= layout_.n())
                ++exponents[static_cast<std::size_t>(axis - 1)];
            rest = rest.substr(len);
        }
        return exponents;
    }

    [[noreturn]] void unknown(std::string_view word, std::size_t where,
                              const std::string& hint) {
        std::string msg = "unknown identifier '" + std::string(word) + "'";
        if (!hint.empty()) msg += " (" + hint + ")";
        throw ParseError("parse error at position " + std::to_string(where) + ": " + msg,
                         where);
    }

    std::string_view text_;
    const JetLayout& layout_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse(std::string_view text, const JetLayout& layout) {
    return detail::Parser(text, layout).run();
}

}  // namespace varcond
