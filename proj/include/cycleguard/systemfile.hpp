#pragma once

#include <nlohmann/json.hpp>

#include <limits>
#include <string>

#include "cycleguard/system.hpp"

namespace cycleguard {

using json = nlohmann::json;

/// Raised when a syntactically valid document does not describe a usable system.
class InvalidSystemError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline double parse_endpoint(const json& v, bool is_lo) {
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
        throw InvalidSystemError("domain endpoint must be a number, \"-inf\" or \"inf\"");
    }
    if (v.is_number()) return v.get<double>();
    throw InvalidSystemError(std::string("bad ") + (is_lo ? "lower" : "upper") +
                             " domain endpoint");
}

/// Parse an expression string, then translate x -> x + shift.
inline Expression parse_shifted(const std::string& src, double shift) {
    Expression e = Expression::parse(src);
    if (shift == 0.0) return e;
    Expression repl =
        Expression::variable(Var::X) + Expression::constant(rat_from_double(shift));
    return e.substitute(Var::X, repl);
}

} // namespace detail

/// Parse the system-definition JSON document:
///   {"kind": "structured"|"general",
///    "g": "expr", "f": {"1": "expr", ...},            (structured)
///    "P": "expr", "Q": "expr",                        (general)
///    "domain": [a|"-inf", b|"inf"], "shift": real,
///    "trinomials": [{"kappa","tau","eta","h","r"}]}
/// The shift translates the critical point at x = shift to the origin.
inline PlanarSystem parse_system(const json& doc) {
    if (!doc.is_object()) throw InvalidSystemError("system document must be a JSON object");
    std::string kind = doc.value("kind", "structured");
    double shift = doc.value("shift", 0.0);

    if (kind == "general") {
        if (!doc.contains("P") || !doc.contains("Q"))
            throw InvalidSystemError("general system needs P and Q");
        return GeneralSystem(detail::parse_shifted(doc["P"].get<std::string>(), shift),
                             detail::parse_shifted(doc["Q"].get<std::string>(), shift));
    }
    if (kind != "structured") throw InvalidSystemError("kind must be structured or general");

    if (!doc.contains("g")) throw InvalidSystemError("structured system needs g");
    Coefficient g(detail::parse_shifted(doc["g"].get<std::string>(), shift));

    std::map<int, Coefficient> f;
    if (doc.contains("f")) {
        if (!doc["f"].is_object()) throw InvalidSystemError("f must map powers to expressions");
        for (const auto& [key, val] : doc["f"].items()) {
            int j = 0;
            try {
                j = std::stoi(key);
            } catch (...) {
                throw InvalidSystemError("bad damping power '" + key + "'");
            }
            if (j < 1) throw InvalidSystemError("damping powers start at 1");
            f.emplace(j, Coefficient(detail::parse_shifted(val.get<std::string>(), shift)));
        }
    }

    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    if (doc.contains("domain")) {
        const json& d = doc["domain"];
        if (!d.is_array() || d.size() != 2)
            throw InvalidSystemError("domain must be a two-element array");
        lo = detail::parse_endpoint(d[0], true) - shift;
        hi = detail::parse_endpoint(d[1], false) - shift;
    }

    std::optional<TrinomialDecomposition> trinomials;
    if (doc.contains("trinomials")) {
        TrinomialDecomposition d;
        for (const auto& piece : doc["trinomials"]) {
            TrinomialPiece p;
            p.kappa = Coefficient(detail::parse_shifted(piece.value("kappa", "0"), shift));
            p.tau = Coefficient(detail::parse_shifted(piece.value("tau", "0"), shift));
            p.eta = Coefficient(detail::parse_shifted(piece.value("eta", "0"), shift));
            p.h = piece.value("h", 1);
            p.r = piece.value("r", 0);
            if (p.h < 1 || p.r < 0)
                throw InvalidSystemError("trinomial needs h >= 1 and r >= 0");
            d.push_back(std::move(p));
        }
        trinomials = std::move(d);
    }

    try {
        StructuredSystem s(std::move(g), std::move(f), lo, hi, std::move(trinomials));
        if (s.trinomials()) {
            DecompositionCheck check = verify_decomposition(s, *s.trinomials());
            if (!check.ok)
                throw InvalidSystemError("trinomials do not sum to phi: " + check.detail);
        }
        return s;
    } catch (const InvalidSystemError&) {
        throw;
    } catch (const Error& e) {
        throw InvalidSystemError(e.what());
    }
}

inline PlanarSystem parse_system_text(const std::string& text) {
    return parse_system(json::parse(text));
}

} // namespace cycleguard
