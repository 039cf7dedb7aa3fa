#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cycleguard/conditions.hpp"

namespace cycleguard {

struct TheoremEntry {
    enum class Status { Proved, Sampled, NotApplicable };
    std::string id;
    std::string title;
    std::string claim;  // granted only when status != NotApplicable
    Status status = Status::NotApplicable;
    std::vector<std::string> requires_keys;  // hypothesis keys consulted
    std::vector<std::string> failed_keys;    // subset that did not pass

    bool applicable() const { return status != Status::NotApplicable; }
};

/// Everything cmd_check reports: hypothesis verdicts keyed by name, the theorem
/// table with per-theorem applicability, and the granted claims.
struct HypothesisReport {
    std::string kind;  // "structured" | "general"
    bool linear_g = false;
    bool whole_plane = false;
    std::optional<double> epsilon;  // chosen for the eventual-positivity checks
    std::map<std::string, SignVerdict> hypotheses;
    std::optional<BoundednessConstruction> construction;
    std::optional<std::string> construction_failure;
    std::vector<TheoremEntry> theorems;
    std::vector<std::string> claims;       // distinct claims of applicable theorems
    std::string strongest_claim;           // empty when nothing applies
    std::vector<std::string> notes;

    const TheoremEntry* theorem(const std::string& id) const {
        for (const auto& t : theorems)
            if (t.id == id) return &t;
        return nullptr;
    }
    const SignVerdict* hypothesis(const std::string& key) const {
        auto it = hypotheses.find(key);
        return it == hypotheses.end() ? nullptr : &it->second;
    }
};

namespace detail {

inline int claim_rank(const std::string& claim) {
    if (claim == "exactly-one-attracting-hyperbolic") return 5;
    if (claim == "exactly-one-attracting") return 4;
    if (claim == "at-most-one-hyperbolic") return 3;
    if (claim == "at-most-one-hyperbolic-in-strip") return 2;
    if (claim == "solutions-eventually-trapped") return 1;
    return 0;
}

struct TheoremBuilder {
    HypothesisReport& report;

    void add(const std::string& id, const std::string& title, const std::string& claim,
             const std::vector<std::string>& keys, bool extra_gate = true,
             const std::string& gate_note = "") {
        TheoremEntry t;
        t.id = id;
        t.title = title;
        t.claim = claim;
        t.requires_keys = keys;
        bool all_passed = extra_gate;
        bool any_sampled = false;
        if (!extra_gate && !gate_note.empty()) t.failed_keys.push_back(gate_note);
        for (const auto& key : keys) {
            const SignVerdict* v = report.hypothesis(key);
            if (!v || !v->passed()) {
                all_passed = false;
                t.failed_keys.push_back(key);
            } else if (v->kind == SignVerdict::Kind::SampledPass) {
                any_sampled = true;
            }
        }
        t.status = !all_passed ? TheoremEntry::Status::NotApplicable
                   : any_sampled ? TheoremEntry::Status::Sampled
                                 : TheoremEntry::Status::Proved;
        report.theorems.push_back(std::move(t));
    }

    // A theorem whose hypotheses are those of an already-evaluated route.
    void add_via(const std::string& id, const std::string& title, const std::string& claim,
                 const std::vector<std::string>& route_ids,
                 const std::vector<std::string>& extra_keys = {}) {
        TheoremEntry t;
        t.id = id;
        t.title = title;
        t.claim = claim;
        bool any_route = false, route_sampled = false;
        for (const auto& rid : route_ids) {
            const TheoremEntry* r = report.theorem(rid);
            t.requires_keys.push_back(rid);
            if (r && r->applicable()) {
                any_route = true;
                route_sampled |= r->status == TheoremEntry::Status::Sampled;
            }
        }
        bool all_passed = any_route;
        if (!any_route)
            t.failed_keys.insert(t.failed_keys.end(), route_ids.begin(), route_ids.end());
        bool any_sampled = route_sampled;
        for (const auto& key : extra_keys) {
            t.requires_keys.push_back(key);
            const SignVerdict* v = report.hypothesis(key);
            if (!v || !v->passed()) {
                all_passed = false;
                t.failed_keys.push_back(key);
            } else if (v->kind == SignVerdict::Kind::SampledPass) {
                any_sampled = true;
            }
        }
        t.status = !all_passed ? TheoremEntry::Status::NotApplicable
                   : any_sampled ? TheoremEntry::Status::Sampled
                                 : TheoremEntry::Status::Proved;
        report.theorems.push_back(std::move(t));
    }
};

inline SignVerdict fold_all(const std::vector<SignVerdict>& vs) {
    if (vs.empty()) return SignVerdict::proved_v();
    bool sampled = false;
    for (const auto& v : vs) {
        if (v.kind == SignVerdict::Kind::Refuted || v.kind == SignVerdict::Kind::Inconclusive)
            return v;
        sampled |= v.kind == SignVerdict::Kind::SampledPass;
    }
    if (sampled) {
        long n = 0;
        for (const auto& v : vs) n += v.samples;
        return SignVerdict::sampled_v(n);
    }
    return SignVerdict::proved_v();
}

inline SignVerdict point_sign_negative(double value, const char* what) {
    if (value < -1e-12) return SignVerdict::proved_v();
    return SignVerdict::refuted_v(Rat(0), value, std::string(what) + " is not negative");
}

} // namespace detail

/// Evaluate every certifiable hypothesis and assemble the theorem table.
/// `user_eps` pins the eventual-positivity scale; otherwise {2^-6 .. 2^6} is searched.
inline HypothesisReport full_report(const PlanarSystem& sys,
                                    std::optional<double> user_eps = std::nullopt) {
    HypothesisReport report;
    if (std::holds_alternative<GeneralSystem>(sys)) {
        report.kind = "general";
        report.notes.push_back(
            "general (P, Q) systems carry no damping structure to certify; "
            "use the numeric probes instead");
        return report;
    }

    const StructuredSystem& s = std::get<StructuredSystem>(sys);
    report.kind = "structured";
    report.linear_g = s.linear_g();
    report.whole_plane =
        !std::isfinite(s.domain_lo()) && !std::isfinite(s.domain_hi());
    RatInterval window = detail::domain_interval(s);

    // --- independent hypothesis verdicts ---------------------------------
    double phi00 = s.phi(0.0, 0.0);
    report.hypotheses["phi00_negative"] = detail::point_sign_negative(phi00, "phi(0,0)");

    std::optional<TrinomialDecomposition> pieces;
    try {
        pieces = decomposition_or_default(s);
    } catch (const DecompositionRequiredError& e) {
        report.notes.push_back(e.what());
    }
    if (pieces) {
        auto tplus = check_Tplus(*pieces, window);
        auto tminus = check_Tminus(*pieces, window);
        for (std::size_t i = 0; i < pieces->size(); ++i) {
            report.hypotheses["Tplus_piece_" + std::to_string(i)] = tplus[i];
            report.hypotheses["Tminus_piece_" + std::to_string(i)] = tminus[i];
        }
        report.hypotheses["Tplus"] = detail::fold_all(tplus);
        report.hypotheses["Tminus"] = detail::fold_all(tminus);
        report.hypotheses["star_shaped"] =
            report.hypotheses["Tplus"].passed() ? report.hypotheses["Tplus"]
                                                : report.hypotheses["Tminus"];
    } else {
        report.hypotheses["Tplus"] =
            SignVerdict::inconclusive_v("no trinomial decomposition available");
        report.hypotheses["Tminus"] = report.hypotheses["Tplus"];
        report.hypotheses["star_shaped"] = report.hypotheses["Tplus"];
    }

    OddRouteReport odd = check_corollary_odd(s);
    report.hypotheses["evenness"] = odd.evenness;
    std::vector<SignVerdict> hs;
    for (const auto& [j, v] : odd.h_nonneg) {
        report.hypotheses["h_" + std::to_string(j)] = v;
        hs.push_back(v);
    }
    report.hypotheses["h_all"] = detail::fold_all(hs);
    report.hypotheses["Seq"] = odd.seq;

    // --- eventual positivity / trapping region ---------------------------
    std::vector<double> eps_grid;
    if (user_eps) eps_grid.push_back(*user_eps);
    else
        for (int i = -6; i <= 6; ++i) eps_grid.push_back(std::ldexp(1.0, i));
    for (double eps : eps_grid) {
        try {
            BoundednessConstruction c = boundedness_construction(s, eps);
            report.construction = c;
            report.epsilon = eps;
            break;
        } catch (const ConstructionFailsError& e) {
            report.construction_failure = e.what();
        } catch (const Error& e) {
            report.construction_failure = e.what();
        }
    }
    if (report.construction && pieces) {
        auto tpp = check_Tplusplus(*pieces, report.construction->epsilon);
        for (std::size_t i = 0; i < pieces->size(); ++i)
            report.hypotheses["Tplusplus_piece_" + std::to_string(i)] = tpp[i];
        report.hypotheses["Tplusplus"] = detail::fold_all(tpp);
    } else {
        report.hypotheses["Tplusplus"] = SignVerdict::inconclusive_v(
            report.construction_failure.value_or("no eventual-positivity scale found"));
    }
    report.hypotheses["trapping_region"] =
        report.construction
            ? (report.construction->route == "trinomial" && pieces && pieces->empty()
                   ? SignVerdict::inconclusive_v("no damping pieces: phi is identically zero")
                   : SignVerdict::proved_v())
            : SignVerdict::inconclusive_v(
                  report.construction_failure.value_or("construction failed"));

    // f_1 strictly positive off the core interval (existence routes)
    if (report.construction) {
        double eps = report.construction->epsilon;
        Rat reps = rat_from_double(eps);
        const Coefficient& f1 = s.f_at(1);
        if (f1.is_polynomial()) {
            SignVerdict above = sign_on_interval(f1.poly(), RatInterval::above(reps),
                                                 SignRequirement::StrictlyPositive);
            SignVerdict below = sign_on_interval(f1.poly(), RatInterval::below(-reps),
                                                 SignRequirement::StrictlyPositive);
            report.hypotheses["f1_positive_off_core"] = above.proved() ? below : above;
        } else {
            report.hypotheses["f1_positive_off_core"] = detail::sampled_check(
                [&](double t) {
                    double mag = eps * std::exp(std::log(1e6) * std::fabs(2 * t - 1));
                    double x = t < 0.5 ? -mag : mag;
                    return 1e-15 - f1.eval(x);
                },
                0.0, 1.0, 10000, "f_1 > 0 off the core interval");
        }
    } else {
        report.hypotheses["f1_positive_off_core"] =
            SignVerdict::inconclusive_v("no eventual-positivity scale found");
    }

    // --- nonlinear g: transformed conditions ------------------------------
    bool admissible = true;
    std::optional<ContiFilippov> cf;
    try {
        cf.emplace(s.g(), s.domain_lo(), s.domain_hi());
    } catch (const GNotAdmissibleError& e) {
        admissible = false;
        report.notes.push_back(std::string("g not admissible: ") + e.what());
    }
    if (admissible && odd.evenness.passed()) {
        std::vector<SignVerdict> hg_all;
        std::vector<SignVerdict> hg_strict;
        for (const auto& [j, c] : s.f()) {
            if (j % 2 == 0) continue;
            HgVerdict v = check_Hg(c, s.g(), j, window);
            report.hypotheses["Hg_" + std::to_string(j)] = v.nonneg;
            hg_all.push_back(v.nonneg);
            hg_strict.push_back(v.strict_seq);
        }
        report.hypotheses["Hg_all"] = detail::fold_all(hg_all);
        SignVerdict strict = SignVerdict::inconclusive_v("no strictly nonvanishing form");
        for (const auto& v : hg_strict)
            if (v.passed()) strict = v;
        report.hypotheses["Hg_seq"] = strict;
        report.hypotheses["g_integral_diverges"] =
            (cf->u_plus() == std::numeric_limits<double>::infinity() &&
             cf->u_minus() == -std::numeric_limits<double>::infinity())
                ? SignVerdict::proved_v()
                : SignVerdict::refuted_v(Rat(0), 0.0,
                                         "the transform image is a bounded u-interval");
    }

    // --- theorem table -----------------------------------------------------
    detail::TheoremBuilder build{report};
    build.add("corollary_1", "uniqueness via trinomial star-shapedness",
              "at-most-one-hyperbolic", {"star_shaped", "Seq"}, report.linear_g,
              "g is not linear");
    build.add("corollary_2", "uniqueness via odd damping coefficients",
              "at-most-one-hyperbolic", {"evenness", "h_all", "Seq"}, report.linear_g,
              "g is not linear");
    build.add_via("theorem_1", "at most one limit cycle, hyperbolic",
                  "at-most-one-hyperbolic", {"corollary_1", "corollary_2"});
    build.add("corollary_3", "trapping disk via trinomial eventual positivity",
              "solutions-eventually-trapped", {"Tplusplus", "trapping_region"},
              report.whole_plane && report.construction &&
                  report.construction->route == "trinomial",
              "construction did not take the trinomial route on the whole plane");
    build.add("corollary_4", "trapping disk via odd damping coefficients",
              "solutions-eventually-trapped", {"evenness", "h_all", "trapping_region"},
              report.whole_plane && report.construction &&
                  report.construction->route == "odd",
              "construction did not take the odd route on the whole plane");
    build.add_via("theorem_3", "existence and uniqueness",
                  "exactly-one-attracting-hyperbolic", {"corollary_1", "corollary_2"},
                  {"trapping_region", "phi00_negative"});
    build.add("corollary_5", "odd-coefficient existence and uniqueness",
              "exactly-one-attracting-hyperbolic",
              {"evenness", "h_all", "Seq", "phi00_negative", "f1_positive_off_core",
               "trapping_region"},
              report.linear_g && report.whole_plane &&
                  report.construction && report.construction->route == "odd",
              "odd trapping route unavailable");
    build.add("corollary_6", "trinomial existence and uniqueness",
              "exactly-one-attracting-hyperbolic",
              {"star_shaped", "Seq", "Tplusplus", "phi00_negative", "trapping_region"},
              report.linear_g && report.whole_plane &&
                  report.construction && report.construction->route == "trinomial",
              "trinomial trapping route unavailable");
    if (report.hypotheses.count("Hg_all")) {
        build.add("corollary_7", "uniqueness in the strip after the change of variables",
                  "at-most-one-hyperbolic-in-strip", {"evenness", "Hg_all", "Hg_seq"});
        build.add_via("theorem_4", "at most one limit cycle in the strip, hyperbolic",
                      "at-most-one-hyperbolic-in-strip", {"corollary_7"});
        build.add("corollary_8", "existence and uniqueness in the strip",
                  "exactly-one-attracting",
                  {"evenness", "Hg_all", "Hg_seq", "g_integral_diverges", "phi00_negative",
                   "f1_positive_off_core", "trapping_region"});
    }

    // --- claims -------------------------------------------------------------
    for (const auto& t : report.theorems) {
        if (!t.applicable()) continue;
        std::string tagged =
            t.claim + (t.status == TheoremEntry::Status::Sampled ? " (sampled)" : "");
        if (std::find(report.claims.begin(), report.claims.end(), tagged) ==
            report.claims.end())
            report.claims.push_back(tagged);
        if (detail::claim_rank(t.claim) > detail::claim_rank(report.strongest_claim))
            report.strongest_claim = t.claim;
    }
    return report;
}

} // namespace cycleguard
