#pragma once

#include <ctime>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "varcond/oracle.hpp"
#include "varcond/problem_file.hpp"
#include "varcond/second_order.hpp"

// Report assembly and rendering.  One Report per CLI invocation; sections
// are filled according to the subcommand and rendered either as plain text
// or as a stable machine-readable JSON document (schema "varcond-report/1").

namespace varcond {

inline constexpr const char* kReportVersion = "varcond-report/1";

struct HessianEntry {
    int row = 0, col = 0;          // 1-based flat position
    int dep = 0, dep2 = 0;         // block address (j, j')
    int order = 0, order2 = 0;     // block address (k, k')
    int slot = 0, slot2 = 0;       // block address (h, h')
    std::string row_name, col_name;
    std::string expr;
};

struct VerifyRow {
    BumpDirection bump;
    std::string family;  // "piecewise" or "smooth"
    CrossCheckResult result;
};

struct Report {
    std::string command;
    std::string path;
    std::optional<std::string> generated_at;

    // Input echo.
    int n = 0, m = 0, order = 0;
    std::string lagrangian;
    std::vector<std::array<double, 2>> domain;
    std::vector<int> grid;
    std::vector<std::string> candidate;
    std::vector<std::pair<std::string, std::string>> constraints;
    std::vector<std::string> tilde_multipliers;
    int plain_count = 0;
    RunOptions options;

    // Sections.
    std::vector<std::string> jet_coordinates;
    std::vector<std::string> el_residuals;
    std::optional<std::string> augmented_lagrangian;
    std::vector<std::string> multiplier_system;
    std::optional<ResidualReport> el_residual;
    std::vector<HessianEntry> hessian;
    int hessian_dim = 0;
    std::optional<ClassificationReport> classification;
    std::vector<VerifyRow> verify_rows;
    std::optional<FalsifierOutcome> falsifier;
    std::vector<std::string> notes;
};

namespace detail {

inline std::string iso8601_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

inline nlohmann::ordered_json bump_json(const BumpDirection& b) {
    nlohmann::ordered_json j;
    j["l"] = b.l;
    j["center"] = b.center;
    j["radius"] = b.radius;
    j["weights"] = b.weights;
    return j;
}

inline std::string bump_text(const BumpDirection& b) {
    std::string s = "l=" + std::to_string(b.l) + " center=(";
    for (std::size_t i = 0; i < b.center.size(); ++i)
        s += (i ? ", " : "") + format_double(b.center[i]);
    s += ") radius=" + format_double(b.radius) + " weights=(";
    for (std::size_t i = 0; i < b.weights.size(); ++i)
        s += (i ? ", " : "") + format_double(b.weights[i]);
    s += ")";
    return s;
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const Report& rep) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["version"] = kReportVersion;
    j["command"] = rep.command;
    if (rep.generated_at) j["generated_at"] = *rep.generated_at;
    j["input"] = rep.path;

    ordered_json prob;
    prob["n"] = rep.n;
    prob["m"] = rep.m;
    prob["order"] = rep.order;
    prob["lagrangian"] = rep.lagrangian;
    prob["domain"] = rep.domain;
    prob["grid"] = rep.grid;
    if (!rep.candidate.empty()) prob["candidate"] = rep.candidate;
    if (!rep.constraints.empty()) {
        ordered_json cs = ordered_json::array();
        for (const auto& [f, mult] : rep.constraints)
            cs.push_back({{"f", f}, {"multiplier", mult}});
        prob["constraints"] = cs;
    }
    if (!rep.tilde_multipliers.empty()) {
        prob["tilde_multipliers"] = rep.tilde_multipliers;
        prob["split"] = {rep.plain_count, rep.m - rep.plain_count};
    }
    ordered_json opts;
    opts["tol"] = rep.options.tol;
    opts["fd_step"] = rep.options.fd_step;
    opts["quad_nodes"] = rep.options.quad_nodes;
    opts["bumps"] = rep.options.bumps;
    opts["seed"] = rep.options.seed;
    opts["residual_gate"] = rep.options.residual_gate;
    prob["options"] = opts;
    j["problem"] = prob;

    if (!rep.jet_coordinates.empty()) {
        j["jet"] = {{"q", rep.jet_coordinates.size()},
                    {"coordinates", rep.jet_coordinates}};
    }
    if (!rep.el_residuals.empty() || rep.el_residual) {
        ordered_json el;
        if (!rep.el_residuals.empty()) el["residuals"] = rep.el_residuals;
        if (rep.augmented_lagrangian)
            el["augmented_lagrangian"] = *rep.augmented_lagrangian;
        if (!rep.multiplier_system.empty())
            el["multiplier_system"] = rep.multiplier_system;
        if (rep.el_residual) {
            el["residual_max"] = rep.el_residual->max_abs;
            el["residual_per_equation"] = rep.el_residual->per_equation;
        }
        j["el"] = el;
    }
    if (!rep.hessian.empty()) {
        ordered_json h;
        h["dim"] = rep.hessian_dim;
        ordered_json entries = ordered_json::array();
        for (const auto& e : rep.hessian) {
            entries.push_back({{"row", e.row},
                               {"col", e.col},
                               {"block", {e.dep, e.dep2, e.order, e.order2, e.slot, e.slot2}},
                               {"wrt", {e.row_name, e.col_name}},
                               {"expr", e.expr}});
        }
        h["entries"] = entries;
        j["hessian"] = h;
    }
    if (rep.classification) {
        const ClassificationReport& c = *rep.classification;
        ordered_json cl;
        cl["verdict"] = to_string(c.verdict);
        cl["el_residual"] = c.el_residual;
        cl["el_residual_per_equation"] = c.el_residual_per_equation;
        cl["nodes"] = c.nodes;
        ordered_json tally;
        for (const auto& [d, count] : c.tally) tally[to_string(d)] = count;
        cl["tally"] = tally;
        ordered_json legendre = ordered_json::array();
        for (std::size_t l = 0; l < c.legendre.size(); ++l)
            legendre.push_back({{"order", l}, {"status", to_string(c.legendre[l])}});
        cl["legendre"] = legendre;
        ordered_json blocks = ordered_json::array();
        for (const auto& b : c.diagonal_blocks)
            blocks.push_back(
                {{"dep", b.dep}, {"order", b.order}, {"status", to_string(b.status)}});
        cl["diagonal_blocks"] = blocks;
        cl["notes"] = c.notes;
        j["classification"] = cl;
    }
    if (!rep.verify_rows.empty() || rep.falsifier) {
        ordered_json v;
        ordered_json checks = ordered_json::array();
        bool all_ok = true;
        for (const auto& row : rep.verify_rows) {
            all_ok = all_ok && row.result.ok();
            checks.push_back({{"bump", detail::bump_json(row.bump)},
                              {"family", row.family},
                              {"symbolic_first", row.result.symbolic_first},
                              {"fd_first", row.result.fd_first},
                              {"quadrature_second", row.result.quadrature_second},
                              {"fd_second", row.result.fd_second},
                              {"first_ok", row.result.first_ok},
                              {"second_ok", row.result.second_ok}});
        }
        v["checks"] = checks;
        if (rep.falsifier) {
            ordered_json f;
            f["counterexample"] = rep.falsifier->counterexample;
            f["tried"] = rep.falsifier->tried;
            f["cross_terms_value"] = rep.falsifier->value;
            if (rep.falsifier->counterexample)
                f["witness"] = detail::bump_json(rep.falsifier->witness);
            v["falsifier"] = f;
        }
        v["all_ok"] = all_ok;
        j["verify"] = v;
    }
    if (!rep.notes.empty()) j["notes"] = rep.notes;
    return j;
}

inline std::string to_text(const Report& rep) {
    std::string out;
    auto line = [&](const std::string& s = "") { out += s + "\n"; };

    line("varcond " + rep.command + " — " + rep.path);
    if (rep.generated_at) line("generated: " + *rep.generated_at);
    line("problem: n=" + std::to_string(rep.n) + " m=" + std::to_string(rep.m) +
         " order=" + std::to_string(rep.order));
    line("lagrangian: " + rep.lagrangian);
    std::string dom = "domain:";
    for (std::size_t i = 0; i < rep.domain.size(); ++i)
        dom += " x" + std::to_string(i + 1) + " in [" + format_double(rep.domain[i][0]) +
               ", " + format_double(rep.domain[i][1]) + "]";
    std::string grid = "  grid:";
    for (int r : rep.grid) grid += " " + std::to_string(r);
    line(dom + grid);
    for (std::size_t i = 0; i < rep.candidate.size(); ++i)
        line("candidate u" + std::to_string(i + 1) + " = " + rep.candidate[i]);
    for (const auto& [f, mult] : rep.constraints)
        line("constraint: f = " + f + "   multiplier = " + mult);
    for (const auto& t : rep.tilde_multipliers) line("multiplier_tilde = " + t);
    line("options: tol=" + format_double(rep.options.tol) +
         " fd_step=" + format_double(rep.options.fd_step) +
         " quad_nodes=" + std::to_string(rep.options.quad_nodes) +
         " bumps=" + std::to_string(rep.options.bumps) +
         " seed=" + std::to_string(rep.options.seed) +
         " residual_gate=" + format_double(rep.options.residual_gate));

    if (!rep.jet_coordinates.empty()) {
        line();
        line("jet coordinates (q = " + std::to_string(rep.jet_coordinates.size()) + "):");
        for (std::size_t i = 0; i < rep.jet_coordinates.size(); ++i)
            line("  " + std::to_string(i + 1) + ": " + rep.jet_coordinates[i]);
    }
    if (!rep.el_residuals.empty()) {
        line();
        line("Euler-Lagrange residuals (= 0 along extremals):");
        for (std::size_t i = 0; i < rep.el_residuals.size(); ++i)
            line("  [" + std::to_string(i + 1) + "] " + rep.el_residuals[i]);
        if (rep.augmented_lagrangian) {
            line("augmented lagrangian: " + *rep.augmented_lagrangian);
        }
        if (!rep.multiplier_system.empty()) {
            line("multiplier system residuals:");
            for (std::size_t i = 0; i < rep.multiplier_system.size(); ++i)
                line("  [" + std::to_string(i + 1) + "] " + rep.multiplier_system[i]);
        }
    }
    if (rep.el_residual) {
        std::string per;
        for (std::size_t i = 0; i < rep.el_residual->per_equation.size(); ++i)
            per += (i ? ", " : "") + format_double(rep.el_residual->per_equation[i]);
        line("EL residual on grid: max " + format_double(rep.el_residual->max_abs) +
             " (per equation: " + per + ")");
    }
    if (!rep.hessian.empty()) {
        line();
        line("second-variation matrix A (" + std::to_string(rep.hessian_dim) + " x " +
             std::to_string(rep.hessian_dim) + "):");
        for (const auto& e : rep.hessian) {
            line("  A[" + std::to_string(e.row) + "," + std::to_string(e.col) + "]  j=" +
                 std::to_string(e.dep) + " j'=" + std::to_string(e.dep2) + " k=" +
                 std::to_string(e.order) + " k'=" + std::to_string(e.order2) + " h=" +
                 std::to_string(e.slot) + " h'=" + std::to_string(e.slot2) + "  d2L/d(" +
                 e.row_name + ")d(" + e.col_name + ") = " + e.expr);
        }
    }
    if (rep.classification) {
        const ClassificationReport& c = *rep.classification;
        line();
        std::string per;
        for (std::size_t i = 0; i < c.el_residual_per_equation.size(); ++i)
            per += (i ? ", " : "") + format_double(c.el_residual_per_equation[i]);
        line("EL residual on grid: max " + format_double(c.el_residual) +
             " (per equation: " + per + ")");
        line("definiteness over " + std::to_string(c.nodes) + " grid nodes:");
        for (const auto& [d, count] : c.tally)
            line("  " + std::string(to_string(d)) + ": " + std::to_string(count));
        if (!c.legendre.empty()) {
            line("Legendre condensed matrices:");
            for (std::size_t l = 0; l < c.legendre.size(); ++l)
                line("  order " + std::to_string(l) + ": " +
                     to_string(c.legendre[l]));
            line("diagonal blocks A^jj_kk:");
            for (const auto& b : c.diagonal_blocks)
                line("  j=" + std::to_string(b.dep) + " k=" + std::to_string(b.order) +
                     ": " + to_string(b.status));
        }
        for (const auto& note : c.notes) line("note: " + note);
        line("verdict: " + std::string(to_string(c.verdict)));
    }
    if (!rep.verify_rows.empty()) {
        line();
        line("oracle cross-checks:");
        for (const auto& row : rep.verify_rows) {
            const auto& r = row.result;
            line("  bump " + detail::bump_text(row.bump) + " [" + row.family + "]");
            line(std::string("    first variation: symbolic ") +
                 format_double(r.symbolic_first) + " vs fd " + format_double(r.fd_first) +
                 (r.first_ok ? "  PASS" : "  FAIL"));
            line(std::string("    second variation: quadrature ") +
                 format_double(r.quadrature_second) + " vs fd " +
                 format_double(r.fd_second) + (r.second_ok ? "  PASS" : "  FAIL"));
        }
    }
    if (rep.falsifier) {
        if (rep.falsifier->counterexample) {
            line("cross-term falsifier: counterexample found, J2+I2 = " +
                 format_double(rep.falsifier->value) + " at bump " +
                 detail::bump_text(rep.falsifier->witness));
        } else {
            line("cross-term falsifier: no counterexample in " +
                 std::to_string(rep.falsifier->tried) +
                 " trials (search only, not a proof); last J2+I2 = " +
                 format_double(rep.falsifier->value));
        }
    }
    for (const auto& note : rep.notes) line("note: " + note);
    return out;
}

}  // namespace varcond
