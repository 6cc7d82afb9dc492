#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "varcond/report.hpp"

// Subcommand orchestration shared by the CLI binary and the tests.

namespace varcond {

enum class Command { Jet, El, Hessian, Classify, Verify };

inline const char* to_string(Command c) {
    switch (c) {
        case Command::Jet: return "jet";
        case Command::El: return "el";
        case Command::Hessian: return "hessian";
        case Command::Classify: return "classify";
        case Command::Verify: return "verify";
    }
    return "?";
}

struct DriverOptions {
    bool machine = false;
    bool no_timestamp = false;
    bool allow_inconclusive = false;
    double grid_scale = 1.0;
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
};

struct RunResult {
    int exit_code = 0;
    std::string output;
};

// Exit codes: 0 success, 2 usage/parse, 3 numeric failure, 4 verdict gate.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitVerdictGate = 4;

namespace detail {

inline Candidate require_candidate(const ProblemFile& pf, Command cmd) {
    if (!pf.candidate)
        throw FileError(std::string("'") + to_string(cmd) +
                        "' needs a [candidate] section");
    return *pf.candidate;
}

inline void apply_overrides(ProblemFile& pf, const DriverOptions& opts) {
    if (opts.tol) pf.options.tol = *opts.tol;
    if (opts.seed) pf.options.seed = *opts.seed;
    if (opts.grid_scale != 1.0) {
        if (!(opts.grid_scale > 0)) throw FileError("--grid-scale must be positive");
        for (int& r : pf.problem.grid)
            r = std::max(2, static_cast<int>(std::lround(r * opts.grid_scale)));
    }
}

inline Report base_report(const ProblemFile& pf, Command cmd, const DriverOptions& opts) {
    Report rep;
    rep.command = to_string(cmd);
    rep.path = pf.path;
    if (!opts.no_timestamp) rep.generated_at = iso8601_now();
    rep.n = pf.problem.layout.n();
    rep.m = pf.problem.layout.m();
    rep.order = pf.problem.layout.order();
    rep.lagrangian = pf.lagrangian_text;
    rep.domain = pf.problem.domain;
    rep.grid = pf.problem.grid;
    rep.candidate = pf.candidate_texts;
    rep.constraints = pf.constraint_texts;
    rep.tilde_multipliers = pf.tilde_texts;
    rep.plain_count = pf.problem.plain_count;
    rep.options = pf.options;
    return rep;
}

inline void fill_jet(Report& rep, const ProblemFile& pf) {
    for (const JetCoordinate& c : pf.problem.layout.coordinates())
        rep.jet_coordinates.push_back(c.name());
}

inline void fill_el(Report& rep, const ProblemFile& pf) {
    const Problem& prob = pf.problem;
    const Expr L = effective_lagrangian(prob);
    const ELSystem sys = euler_lagrange(L, prob.layout);
    for (const Expr& r : sys.residuals) rep.el_residuals.push_back(to_string(r));
    if (!prob.constraints.empty()) {
        rep.augmented_lagrangian = to_string(L);
        const std::vector<Expr> ms =
            prob.plain_count == prob.layout.m()
                ? multiplier_system(prob.constraints, prob.layout)
                : multiplier_system_underdetermined(prob.constraints,
                                                    prob.tilde_multipliers, prob.layout,
                                                    prob.plain_count);
        for (const Expr& r : ms) rep.multiplier_system.push_back(to_string(r));
        if (!prob.tilde_multipliers.empty())
            rep.notes.push_back(
                "split formulation: the extra multipliers enter every constraint "
                "only through the shared sum (lambda^l + sum of multiplier_tilde), "
                "so they are not separately identifiable");
    }
}

inline void fill_hessian(Report& rep, const ProblemFile& pf) {
    const Problem& prob = pf.problem;
    const JetLayout& lay = prob.layout;
    const SecondVariationMatrix a = assemble_A(effective_lagrangian(prob), lay);
    rep.hessian_dim = a.dim();
    for (int r = 1; r <= a.dim(); ++r) {
        for (int c = 1; c <= a.dim(); ++c) {
            const JetCoordinate& rc = lay.coordinate_at(r);
            const JetCoordinate& cc = lay.coordinate_at(c);
            HessianEntry e;
            e.row = r;
            e.col = c;
            e.dep = rc.dep();
            e.dep2 = cc.dep();
            e.order = rc.order();
            e.order2 = cc.order();
            e.slot = rc.slot();
            e.slot2 = cc.slot();
            e.row_name = rc.name();
            e.col_name = cc.name();
            e.expr = to_string(a.entry(r, c));
            rep.hessian.push_back(std::move(e));
        }
    }
}

inline void fill_classify(Report& rep, const ProblemFile& pf, Command cmd) {
    ClassifyOptions copts;
    copts.tol = pf.options.tol;
    copts.residual_gate = pf.options.residual_gate;
    rep.classification = classify(pf.problem, require_candidate(pf, cmd), copts);
}

inline void fill_verify(Report& rep, const ProblemFile& pf) {
    const Problem& prob = pf.problem;
    const Candidate cand = require_candidate(pf, Command::Verify);
    CrossCheckOptions copts;
    copts.h = pf.options.fd_step;
    copts.quad_nodes = pf.options.quad_nodes;

    std::mt19937_64 rng(pf.options.seed);
    for (int i = 0; i < pf.options.bumps; ++i) {
        const BumpDirection b = random_bump(prob, rng);
        VerifyRow row;
        row.bump = b;
        row.family = (i % 2 == 0) ? "piecewise" : "smooth";
        const std::vector<Expr> phi = row.family == "piecewise"
                                          ? bump_direction(b, prob)
                                          : smooth_bump_direction(b, prob);
        row.result = cross_check(prob, cand, phi, copts);
        rep.verify_rows.push_back(std::move(row));
    }
    const SecondVariationMatrix a = assemble_A(effective_lagrangian(prob), prob.layout);
    rep.falsifier = sufficient_thmmm_falsifier(prob, cand, a, pf.options.bumps,
                                               pf.options.seed, pf.options.quad_nodes);
}

}  // namespace detail

inline RunResult run(Command cmd, ProblemFile pf, const DriverOptions& opts = {}) {
    detail::apply_overrides(pf, opts);
    Report rep = detail::base_report(pf, cmd, opts);

    switch (cmd) {
        case Command::Jet:
            detail::fill_jet(rep, pf);
            break;
        case Command::El:
            detail::fill_el(rep, pf);
            break;
        case Command::Hessian:
            detail::fill_hessian(rep, pf);
            break;
        case Command::Classify:
            detail::fill_classify(rep, pf, cmd);
            break;
        case Command::Verify:
            detail::fill_verify(rep, pf);
            break;
    }

    RunResult result;
    result.output = opts.machine ? to_json(rep).dump(2) + "\n" : to_text(rep);

    if (cmd == Command::Classify && rep.classification &&
        rep.classification->verdict == Verdict::Inconclusive && !opts.allow_inconclusive)
        result.exit_code = kExitVerdictGate;
    if (cmd == Command::Verify) {
        bool all_ok = true;
        for (const auto& row : rep.verify_rows) all_ok = all_ok && row.result.ok();
        if (!all_ok) result.exit_code = kExitNumeric;
    }
    return result;
}

}  // namespace varcond
