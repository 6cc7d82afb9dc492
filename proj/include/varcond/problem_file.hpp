#pragma once

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "varcond/parser.hpp"
#include "varcond/variational.hpp"

// Line-oriented problem files: sections [problem], [domain], [candidate],
// repeatable [constraint], and [options], each holding `key = value` pairs.
// Expressions are single-line strings in the expression grammar.

namespace varcond {

struct RunOptions {
    double tol = 1e-9;
    double fd_step = 1e-4;
    int quad_nodes = 32;
    int bumps = 5;
    std::uint64_t seed = 0;
    double residual_gate = 1e-6;
};

struct ProblemFile {
    Problem problem;
    std::optional<Candidate> candidate;
    RunOptions options;

    // Input echoes for reporting.
    std::string path;
    std::string lagrangian_text;
    std::vector<std::string> candidate_texts;
    std::vector<std::pair<std::string, std::string>> constraint_texts;
    std::vector<std::string> tilde_texts;
};

namespace detail {

struct RawLine {
    std::string key;
    std::string value;
    int line = 0;
};

struct RawConstraint {
    std::optional<RawLine> f;
    std::optional<RawLine> multiplier;
};

struct RawFile {
    std::optional<RawLine> n, m, order, lagrangian, split;
    std::vector<std::optional<RawLine>> domain_axes;  // grown on demand
    std::optional<RawLine> grid;
    std::vector<std::optional<RawLine>> candidates;
    std::vector<RawConstraint> constraints;
    std::vector<RawLine> tilde_multipliers;
    std::vector<RawLine> option_lines;
    bool saw_problem = false;
    bool saw_candidate = false;
};

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline int to_int(const RawLine& rl, const char* what) {
    int v = 0;
    const auto res = std::from_chars(rl.value.data(), rl.value.data() + rl.value.size(), v);
    if (res.ec != std::errc() || res.ptr != rl.value.data() + rl.value.size())
        throw FileError(std::string(what) + " expects an integer, got '" + rl.value + "'",
                        rl.line);
    return v;
}

inline double to_double(const std::string& text, int line, const char* what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw FileError(std::string(what) + " expects a number, got '" + text + "'", line);
    }
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline Expr parse_checked(const std::string& text, const JetLayout& lay, int line,
                          const std::string& what) {
    try {
        return parse(text, lay);
    } catch (const ParseError& err) {
        throw FileError(what + ": " + err.what(), line);
    }
}

inline RawFile scan_file(std::istream& in) {
    RawFile raw;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw FileError("malformed section header '" + t + "'", lineno);
            section = t.substr(1, t.size() - 2);
            if (section == "problem") {
                raw.saw_problem = true;
            } else if (section == "constraint") {
                raw.constraints.emplace_back();
            } else if (section == "candidate") {
                raw.saw_candidate = true;
            } else if (section != "domain" && section != "options") {
                throw FileError("unknown section [" + section + "]", lineno);
            }
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw FileError("expected 'key = value', got '" + t + "'", lineno);
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw FileError("missing key before '='", lineno);
        if (section.empty()) throw FileError("'" + key + "' appears before any section", lineno);
        const RawLine rl{key, value, lineno};

        auto set_once = [&](std::optional<RawLine>& slot) {
            if (slot) throw FileError("duplicate key '" + key + "'", lineno);
            slot = rl;
        };

        if (section == "problem") {
            if (key == "n") set_once(raw.n);
            else if (key == "m") set_once(raw.m);
            else if (key == "order") set_once(raw.order);
            else if (key == "lagrangian") set_once(raw.lagrangian);
            else if (key == "split") set_once(raw.split);
            else throw FileError("unknown key '" + key + "' in [problem]", lineno);
        } else if (section == "domain") {
            if (key == "grid") {
                set_once(raw.grid);
            } else if (key.size() >= 2 && key[0] == 'x') {
                int axis = 0;
                const auto res =
                    std::from_chars(key.data() + 1, key.data() + key.size(), axis);
                if (res.ec != std::errc() || res.ptr != key.data() + key.size() || axis < 1)
                    throw FileError("unknown key '" + key + "' in [domain]", lineno);
                if (static_cast<int>(raw.domain_axes.size()) < axis)
                    raw.domain_axes.resize(static_cast<std::size_t>(axis));
                set_once(raw.domain_axes[static_cast<std::size_t>(axis - 1)]);
            } else {
                throw FileError("unknown key '" + key + "' in [domain]", lineno);
            }
        } else if (section == "candidate") {
            if (key.size() >= 2 && key[0] == 'u') {
                int dep = 0;
                const auto res =
                    std::from_chars(key.data() + 1, key.data() + key.size(), dep);
                if (res.ec != std::errc() || res.ptr != key.data() + key.size() || dep < 1)
                    throw FileError("unknown key '" + key + "' in [candidate]", lineno);
                if (static_cast<int>(raw.candidates.size()) < dep)
                    raw.candidates.resize(static_cast<std::size_t>(dep));
                set_once(raw.candidates[static_cast<std::size_t>(dep - 1)]);
            } else {
                throw FileError("unknown key '" + key + "' in [candidate]", lineno);
            }
        } else if (section == "constraint") {
            RawConstraint& c = raw.constraints.back();
            if (key == "f") {
                if (c.f) throw FileError("duplicate key 'f' in [constraint]", lineno);
                c.f = rl;
            } else if (key == "multiplier") {
                if (c.multiplier)
                    throw FileError("duplicate key 'multiplier' in [constraint]", lineno);
                c.multiplier = rl;
            } else if (key == "multiplier_tilde") {
                raw.tilde_multipliers.push_back(rl);
            } else {
                throw FileError("unknown key '" + key + "' in [constraint]", lineno);
            }
        } else if (section == "options") {
            if (key != "tol" && key != "fd_step" && key != "quad_nodes" && key != "bumps" &&
                key != "seed" && key != "residual_gate")
                throw FileError("unknown key '" + key + "' in [options]", lineno);
            raw.option_lines.push_back(rl);
        }
    }
    return raw;
}

}  // namespace detail

inline ProblemFile load_from_stream(std::istream& in, const std::string& path) {
    const detail::RawFile raw = detail::scan_file(in);
    if (!raw.saw_problem) throw FileError("missing [problem] section");
    if (!raw.n) throw FileError("missing 'n' in [problem]");
    if (!raw.m) throw FileError("missing 'm' in [problem]");
    if (!raw.order) throw FileError("missing 'order' in [problem]");
    if (!raw.lagrangian) throw FileError("missing 'lagrangian' in [problem]");

    const int n = detail::to_int(*raw.n, "n");
    const int m = detail::to_int(*raw.m, "m");
    const int s = detail::to_int(*raw.order, "order");
    if (n < 1) throw FileError("n must be >= 1", raw.n->line);
    if (m < 1) throw FileError("m must be >= 1", raw.m->line);
    if (s < 0) throw FileError("order must be >= 0", raw.order->line);
    const JetLayout lay(n, m, s);

    // Domain and grid.
    if (static_cast<int>(raw.domain_axes.size()) != n)
        throw FileError("domain must define x1..x" + std::to_string(n) + ", got " +
                        std::to_string(raw.domain_axes.size()) + " axes");
    std::vector<std::array<double, 2>> domain;
    for (int i = 0; i < n; ++i) {
        const auto& slot = raw.domain_axes[static_cast<std::size_t>(i)];
        if (!slot)
            throw FileError("missing domain interval for x" + std::to_string(i + 1));
        const auto toks = detail::split_ws(slot->value);
        if (toks.size() != 2)
            throw FileError("domain interval needs two numbers 'a b'", slot->line);
        const double a = detail::to_double(toks[0], slot->line, "domain bound");
        const double b = detail::to_double(toks[1], slot->line, "domain bound");
        if (!(a < b)) throw FileError("domain interval is empty", slot->line);
        domain.push_back({a, b});
    }
    if (!raw.grid) throw FileError("missing 'grid' in [domain]");
    std::vector<int> grid;
    for (const std::string& tok : detail::split_ws(raw.grid->value)) {
        int r = 0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), r);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
            throw FileError("grid expects integers", raw.grid->line);
        grid.push_back(r);
    }
    if (static_cast<int>(grid.size()) != n)
        throw FileError("grid needs " + std::to_string(n) + " resolutions, got " +
                            std::to_string(grid.size()),
                        raw.grid->line);
    for (int r : grid)
        if (r < 2) throw FileError("grid resolutions must be >= 2", raw.grid->line);

    Problem problem(lay, detail::parse_checked(raw.lagrangian->value, lay,
                                               raw.lagrangian->line, "lagrangian"),
                    std::move(domain), std::move(grid));

    // Optional component split for the underdetermined formulation.
    if (raw.split) {
        const std::string& v = raw.split->value;
        const std::size_t colon = v.find(':');
        if (colon == std::string::npos)
            throw FileError("split expects 'plain:tilde'", raw.split->line);
        const int plain = detail::to_int({"split", detail::trim(v.substr(0, colon)),
                                          raw.split->line},
                                         "split");
        const int tilde = detail::to_int({"split", detail::trim(v.substr(colon + 1)),
                                          raw.split->line},
                                         "split");
        if (plain < 1 || tilde < 0 || plain + tilde != m)
            throw FileError("split must partition the " + std::to_string(m) +
                                " dependent variables",
                            raw.split->line);
        problem.plain_count = plain;
    }

    ProblemFile pf{std::move(problem), std::nullopt, RunOptions{}, path,
                   raw.lagrangian->value, {},           {},        {}};

    // Constraints.
    for (const auto& c : raw.constraints) {
        if (!c.f) throw FileError("constraint without 'f'");
        if (!c.multiplier) throw FileError("constraint without 'multiplier'", c.f->line);
        Constraint built{detail::parse_checked(c.f->value, lay, c.f->line, "constraint f"),
                         detail::parse_checked(c.multiplier->value, lay,
                                               c.multiplier->line, "multiplier")};
        if (contains_jets(built.multiplier))
            throw FileError("multiplier must be an expression in x only",
                            c.multiplier->line);
        pf.problem.constraints.push_back(std::move(built));
        pf.constraint_texts.emplace_back(c.f->value, c.multiplier->value);
    }
    for (const auto& rl : raw.tilde_multipliers) {
        Expr t = detail::parse_checked(rl.value, lay, rl.line, "multiplier_tilde");
        if (contains_jets(t))
            throw FileError("multiplier_tilde must be an expression in x only", rl.line);
        pf.problem.tilde_multipliers.push_back(std::move(t));
        pf.tilde_texts.push_back(rl.value);
    }
    if (!pf.problem.tilde_multipliers.empty() && !raw.split)
        throw FileError("multiplier_tilde requires a component split in [problem]");
    if (raw.split) {
        if (static_cast<int>(pf.problem.constraints.size()) != pf.problem.plain_count)
            throw FileError("split problems need one constraint per plain component");
        if (static_cast<int>(pf.problem.tilde_multipliers.size()) !=
            lay.m() - pf.problem.plain_count)
            throw FileError("split problems need one multiplier_tilde per tilde component");
    } else if (!pf.problem.constraints.empty() &&
               static_cast<int>(pf.problem.constraints.size()) != m) {
        throw FileError("expected " + std::to_string(m) + " constraints (one per dependent "
                        "variable), got " +
                        std::to_string(pf.problem.constraints.size()) +
                        "; declare a split for the underdetermined case");
    }
    pf.problem.validate();

    // Candidate.
    if (raw.saw_candidate) {
        int given = 0;
        for (const auto& slot : raw.candidates)
            if (slot) ++given;
        if (given != m || static_cast<int>(raw.candidates.size()) != m)
            throw FileError("candidate has " + std::to_string(given) + " components, m=" +
                            std::to_string(m));
        Candidate cand;
        for (int j = 0; j < m; ++j) {
            const auto& slot = raw.candidates[static_cast<std::size_t>(j)];
            Expr comp = detail::parse_checked(slot->value, lay, slot->line, "candidate");
            if (contains_jets(comp))
                throw FileError("candidate components must be expressions in x only",
                                slot->line);
            cand.components.push_back(std::move(comp));
            pf.candidate_texts.push_back(slot->value);
        }
        pf.candidate = std::move(cand);
    }

    // Options.
    for (const auto& rl : raw.option_lines) {
        if (rl.key == "tol") pf.options.tol = detail::to_double(rl.value, rl.line, "tol");
        else if (rl.key == "fd_step")
            pf.options.fd_step = detail::to_double(rl.value, rl.line, "fd_step");
        else if (rl.key == "quad_nodes") pf.options.quad_nodes = detail::to_int(rl, "quad_nodes");
        else if (rl.key == "bumps") pf.options.bumps = detail::to_int(rl, "bumps");
        else if (rl.key == "seed")
            pf.options.seed = static_cast<std::uint64_t>(detail::to_int(rl, "seed"));
        else if (rl.key == "residual_gate")
            pf.options.residual_gate = detail::to_double(rl.value, rl.line, "residual_gate");
    }
    if (pf.options.quad_nodes < 1) throw FileError("quad_nodes must be >= 1");
    if (pf.options.bumps < 1) throw FileError("bumps must be >= 1");
    if (!(pf.options.fd_step > 0)) throw FileError("fd_step must be positive");
    return pf;
}

inline ProblemFile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open '" + path + "'");
    return load_from_stream(in, path);
}

inline ProblemFile load_from_string(const std::string& content,
                                    const std::string& name = "<memory>") {
    std::istringstream in(content);
    return load_from_stream(in, name);
}

}  // namespace varcond
