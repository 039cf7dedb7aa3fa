#pragma once

#include <gmpxx.h>

#include <cstdlib>
#include <string>

#include "cycleguard/errors.hpp"

namespace cycleguard {

/// Exact rational number. Certification code never leaves this type;
/// doubles appear only on the dynamics side.
using Rat = mpq_class;

inline double to_double(const Rat& q) { return q.get_d(); }

inline int sign_of(const Rat& q) { return sgn(q); }

/// Exact conversion; every finite double is a rational.
inline Rat rat_from_double(double x) { return Rat(x); }

/// Parse a decimal literal ("2", "3.25", "1e-3", "4.1e2") into an exact rational.
/// Returns false on malformed input instead of throwing; the caller owns diagnostics.
inline bool rat_from_decimal(const std::string& text, Rat& out) {
    std::size_t i = 0;
    std::string digits;
    long frac_digits = 0;
    bool any = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        digits += text[i++];
        any = true;
    }
    if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            digits += text[i++];
            ++frac_digits;
            any = true;
        }
    }
    if (!any) return false;
    long exp10 = 0;
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        bool neg = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) neg = (text[i++] == '-');
        if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) return false;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
            exp10 = exp10 * 10 + (text[i++] - '0');
        if (neg) exp10 = -exp10;
    }
    if (i != text.size()) return false;

    mpz_class mantissa(digits.empty() ? "0" : digits, 10);
    long net = exp10 - frac_digits;
    mpz_class pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(net < 0 ? -net : net));
    Rat q;
    if (net >= 0)
        q = Rat(mantissa * pow10);
    else
        q = Rat(mantissa, pow10);
    q.canonicalize();
    out = q;
    return true;
}

/// q^n for integer n (n < 0 requires q != 0).
inline Rat rat_pow(const Rat& q, long n) {
    if (n == 0) return Rat(1);
    bool invert = n < 0;
    unsigned long e = static_cast<unsigned long>(invert ? -n : n);
    if (invert && q == 0) throw EvalDomainError("0 raised to a negative power");
    Rat base = q, acc(1);
    while (e) {
        if (e & 1) acc *= base;
        base *= base;
        e >>= 1;
    }
    if (invert) acc = 1 / acc;
    return acc;
}

/// Renders "p" for integers, "p/q" otherwise; re-parseable by the expression grammar.
inline std::string rat_to_string(const Rat& q) { return q.get_str(); }

} // namespace cycleguard
