#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cycleguard/errors.hpp"
#include "cycleguard/expr.hpp"
#include "cycleguard/interval.hpp"
#include "cycleguard/rational.hpp"

namespace cycleguard {

/// Exact univariate polynomial over the rationals, dense ascending coefficients.
/// The zero polynomial has an empty coefficient vector and degree -1.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Rat> coeffs) : c_(std::move(coeffs)) { normalize(); }

    static Polynomial zero() { return Polynomial(); }
    static Polynomial constant(Rat v) { return Polynomial({std::move(v)}); }
    static Polynomial x() { return Polynomial({Rat(0), Rat(1)}); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    bool is_constant() const { return c_.size() <= 1; }

    const Rat& coeff(std::size_t i) const {
        static const Rat kZero(0);
        return i < c_.size() ? c_[i] : kZero;
    }
    const Rat& leading() const {
        if (c_.empty()) throw Error("leading coefficient of the zero polynomial");
        return c_.back();
    }
    const std::vector<Rat>& coeffs() const { return c_; }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<Rat> r(std::max(a.c_.size(), b.c_.size()), Rat(0));
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) + b.coeff(i);
        return Polynomial(std::move(r));
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
        std::vector<Rat> r(std::max(a.c_.size(), b.c_.size()), Rat(0));
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) - b.coeff(i);
        return Polynomial(std::move(r));
    }
    friend Polynomial operator-(const Polynomial& a) {
        std::vector<Rat> r = a.c_;
        for (auto& v : r) v = -v;
        return Polynomial(std::move(r));
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return zero();
        std::vector<Rat> r(a.c_.size() + b.c_.size() - 1, Rat(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return Polynomial(std::move(r));
    }
    friend Polynomial operator*(const Rat& s, const Polynomial& a) {
        std::vector<Rat> r = a.c_;
        for (auto& v : r) v *= s;
        return Polynomial(std::move(r));
    }
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

    Polynomial derivative() const {
        if (c_.size() <= 1) return zero();
        std::vector<Rat> r(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = Rat(static_cast<long>(i)) * c_[i];
        return Polynomial(std::move(r));
    }

    /// Antiderivative with zero constant term.
    Polynomial antiderivative() const {
        if (is_zero()) return zero();
        std::vector<Rat> r(c_.size() + 1, Rat(0));
        for (std::size_t i = 0; i < c_.size(); ++i)
            r[i + 1] = c_[i] / Rat(static_cast<long>(i + 1));
        return Polynomial(std::move(r));
    }

    Rat eval(const Rat& x) const {
        Rat acc(0);
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
        return acc;
    }
    double eval(double x) const {
        double acc = 0.0;
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + to_double(c_[i]);
        return acc;
    }
    DInterval eval(DInterval x) const {
        DInterval acc(0.0);
        for (std::size_t i = c_.size(); i-- > 0;) {
            double c = to_double(c_[i]);
            acc = acc * x + DInterval::widened(c, c);
        }
        return acc;
    }

    /// Divide by the positive rational content; preserves the sign everywhere.
    Polynomial primitive() const {
        if (is_zero()) return zero();
        mpz_class num_gcd(0), den_lcm(1);
        for (const auto& v : c_) {
            if (v == 0) continue;
            mpz_class n = abs(v.get_num());
            num_gcd = num_gcd == 0 ? n : gcd(num_gcd, n);
            den_lcm = lcm(den_lcm, v.get_den());
        }
        Rat content(num_gcd, den_lcm);
        content.canonicalize();
        std::vector<Rat> r = c_;
        for (auto& v : r) v /= content;
        return Polynomial(std::move(r));
    }

    /// Exact synthetic division by (x - r); requires r to be a root.
    Polynomial divide_linear_root(const Rat& r) const {
        int n = degree();
        if (n < 1) throw Error("linear division of a constant polynomial");
        std::vector<Rat> q(static_cast<std::size_t>(n), Rat(0));
        q[n - 1] = c_[n];
        for (int k = n - 1; k >= 1; --k) q[k - 1] = c_[k] + r * q[k];
        return Polynomial(std::move(q));
    }

    /// Exact division remainder of *this by d (d nonzero).
    Polynomial rem(const Polynomial& d) const {
        if (d.is_zero()) throw Error("polynomial division by zero");
        std::vector<Rat> r = c_;
        int dd = d.degree();
        while (static_cast<int>(r.size()) - 1 >= dd) {
            Rat q = r.back() / d.leading();
            std::size_t shift = r.size() - 1 - dd;
            for (int i = 0; i <= dd; ++i) r[shift + i] -= q * d.coeff(i);
            // drop the (now zero) leading term plus any newly vanished ones
            while (!r.empty() && r.back() == 0) r.pop_back();
            if (r.empty()) break;
        }
        return Polynomial(std::move(r));
    }

    /// Every real root lies in [-R, R].
    Rat cauchy_root_radius() const {
        if (degree() < 1) return Rat(1);
        Rat m(0);
        for (std::size_t i = 0; i + 1 < c_.size(); ++i) {
            Rat candidate(abs(c_[i] / c_.back()));
            if (candidate > m) m = candidate;
        }
        return Rat(1) + m;
    }

    Expression to_expression() const {
        Expression acc = Expression::constant(Rat(0));
        Expression x = Expression::variable(Var::X);
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (c_[i] == 0) continue;
            acc = acc + Expression::constant(c_[i]) * x.pow(static_cast<long>(i));
        }
        return acc;
    }

    std::string str() const {
        if (is_zero()) return "0";
        std::string out;
        for (std::size_t i = c_.size(); i-- > 0;) {
            if (c_[i] == 0) continue;
            if (!out.empty()) out += c_[i] > 0 ? " + " : " - ";
            else if (c_[i] < 0) out += "-";
            Rat a = abs(c_[i]);
            if (a != 1 || i == 0) out += rat_to_string(a);
            if (i > 0) {
                if (a != 1) out += "*";
                out += "x";
                if (i > 1) out += "^" + std::to_string(i);
            }
        }
        return out;
    }

private:
    void normalize() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<Rat> c_;
};

/// Convert an expression that is univariate in x and polynomial (integer powers,
/// no transcendental nodes, division only by nonzero constants).
inline Polynomial poly_from_expression(const Expression& e);

namespace detail {

inline Polynomial poly_from_node(const ExprNode& n) {
    using K = ExprNode::Kind;
    switch (n.kind) {
        case K::Num: return Polynomial::constant(n.num);
        case K::Variable:
            if (n.var == Var::Y) throw NotPolynomialError("expression depends on y");
            return Polynomial::x();
        case K::Neg: return -poly_from_node(*n.a);
        case K::Add: return poly_from_node(*n.a) + poly_from_node(*n.b);
        case K::Sub: return poly_from_node(*n.a) - poly_from_node(*n.b);
        case K::Mul: return poly_from_node(*n.a) * poly_from_node(*n.b);
        case K::Div: {
            Polynomial den = poly_from_node(*n.b);
            if (!den.is_constant() || den.is_zero())
                throw NotPolynomialError("division by a non-constant or zero");
            return (Rat(1) / den.coeff(0)) * poly_from_node(*n.a);
        }
        case K::Pow: {
            if (n.exponent < 0) throw NotPolynomialError("negative exponent");
            Polynomial base = poly_from_node(*n.a);
            Polynomial acc = Polynomial::constant(Rat(1));
            for (long i = 0; i < n.exponent; ++i) acc = acc * base;
            return acc;
        }
        case K::Func: throw NotPolynomialError("transcendental function node");
    }
    throw Error("corrupt expression node");
}

} // namespace detail

inline Polynomial poly_from_expression(const Expression& e) {
    return detail::poly_from_node(e.node());
}

// ---------------------------------------------------------------------------
// Intervals with rational endpoints (possibly infinite) for certification.

struct RatInterval {
    std::optional<Rat> lo, hi;  // nullopt = infinite
    bool lo_closed = false, hi_closed = false;

    static RatInterval all() { return {}; }
    static RatInterval open(Rat a, Rat b) { return {std::move(a), std::move(b), false, false}; }
    static RatInterval closed(Rat a, Rat b) { return {std::move(a), std::move(b), true, true}; }
    static RatInterval above(Rat a, bool closed = false) {
        return {std::move(a), std::nullopt, closed, false};
    }
    static RatInterval below(Rat b, bool closed = false) {
        return {std::nullopt, std::move(b), false, closed};
    }

    bool empty() const {
        if (!lo || !hi) return false;
        if (*lo > *hi) return true;
        if (*lo == *hi) return !(lo_closed && hi_closed);
        return false;
    }
    bool contains(const Rat& x) const {
        if (lo && (x < *lo || (x == *lo && !lo_closed))) return false;
        if (hi && (x > *hi || (x == *hi && !hi_closed))) return false;
        return true;
    }
    std::string str() const {
        std::string s = lo_closed ? "[" : "(";
        s += lo ? rat_to_string(*lo) : "-inf";
        s += ", ";
        s += hi ? rat_to_string(*hi) : "inf";
        s += hi_closed ? "]" : ")";
        return s;
    }
};

// ---------------------------------------------------------------------------
// Sturm sequences and real-root isolation.

namespace detail {

inline std::vector<Polynomial> sturm_sequence(const Polynomial& p) {
    std::vector<Polynomial> seq;
    seq.push_back(p.primitive());
    Polynomial d = p.derivative().primitive();
    if (!d.is_zero()) seq.push_back(d);
    while (seq.size() >= 2 && seq.back().degree() >= 1) {
        Polynomial r = seq[seq.size() - 2].rem(seq.back());
        if (r.is_zero()) break;
        seq.push_back((-r).primitive());
    }
    return seq;
}

enum class EvalPoint { NegInf, PosInf, Finite };

inline int sign_at(const Polynomial& p, EvalPoint kind, const Rat& x) {
    if (p.is_zero()) return 0;
    switch (kind) {
        case EvalPoint::Finite: return sign_of(p.eval(x));
        case EvalPoint::PosInf: return sign_of(p.leading());
        case EvalPoint::NegInf:
            return p.degree() % 2 == 0 ? sign_of(p.leading()) : -sign_of(p.leading());
    }
    return 0;
}

inline int sign_changes(const std::vector<Polynomial>& seq, EvalPoint kind, const Rat& x) {
    int changes = 0, prev = 0;
    for (const auto& q : seq) {
        int s = sign_at(q, kind, x);
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++changes;
        prev = s;
    }
    return changes;
}

} // namespace detail

/// Number of distinct real roots of p in the open interval (u, v); u and v must
/// not be roots. Infinite endpoints allowed via nullopt.
inline int count_distinct_roots(const Polynomial& p, const std::optional<Rat>& u,
                                const std::optional<Rat>& v) {
    if (p.is_zero()) throw Error("root count of the zero polynomial");
    auto seq = detail::sturm_sequence(p);
    using EP = detail::EvalPoint;
    int vu = u ? detail::sign_changes(seq, EP::Finite, *u)
               : detail::sign_changes(seq, EP::NegInf, Rat(0));
    int vv = v ? detail::sign_changes(seq, EP::Finite, *v)
               : detail::sign_changes(seq, EP::PosInf, Rat(0));
    return vu - vv;
}

namespace detail {

// Finds a point in (lo, hi) that is not a root of p.
inline Rat non_root_point(const Polynomial& p, const Rat& lo, const Rat& hi) {
    Rat mid = (lo + hi) / 2;
    long k = 3;
    while (p.eval(mid) == 0) {
        mid = lo + (hi - lo) * Rat(1, k);
        k += 2;
    }
    return mid;
}

struct RootIsolation {
    // Disjoint open intervals (l, u), each containing exactly one distinct root.
    std::vector<std::pair<Rat, Rat>> intervals;
    // Non-root points separating and flanking the roots, sorted ascending.
    std::vector<Rat> separators;
};

inline void isolate_rec(const Polynomial& p, const std::vector<Polynomial>& seq, const Rat& lo,
                        const Rat& hi, int nroots, std::vector<std::pair<Rat, Rat>>& out,
                        std::vector<Rat>& seps) {
    if (nroots == 0) return;
    if (nroots == 1) {
        out.emplace_back(lo, hi);
        return;
    }
    Rat mid = non_root_point(p, lo, hi);
    int left = sign_changes(seq, EvalPoint::Finite, lo) - sign_changes(seq, EvalPoint::Finite, mid);
    isolate_rec(p, seq, lo, mid, left, out, seps);
    seps.push_back(mid);
    isolate_rec(p, seq, mid, hi, nroots - left, out, seps);
}

/// Isolate the distinct real roots of p inside (lo, hi); endpoints must not be roots.
inline RootIsolation isolate_roots(const Polynomial& p, const Rat& lo, const Rat& hi) {
    RootIsolation iso;
    auto seq = sturm_sequence(p);
    int n = sign_changes(seq, EvalPoint::Finite, lo) - sign_changes(seq, EvalPoint::Finite, hi);
    isolate_rec(p, seq, lo, hi, n, iso.intervals, iso.separators);
    return iso;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Sign certification.

enum class SignRequirement {
    NonNegative,
    NonPositive,
    PositiveExceptFiniteZeros,  // >= 0 with at most finitely many zeros
    StrictlyPositive,
    StrictlyNegative,
};

struct SignVerdict {
    enum class Kind { Proved, Refuted, SampledPass, Inconclusive };
    Kind kind = Kind::Inconclusive;
    std::optional<Rat> witness;  // Refuted: point violating the required sign
    double witness_value = 0.0;  // value at the witness
    long samples = 0;            // SampledPass: number of sample points checked
    std::string reason;

    bool proved() const { return kind == Kind::Proved; }
    bool passed() const { return kind == Kind::Proved || kind == Kind::SampledPass; }

    static SignVerdict proved_v() { return {Kind::Proved, std::nullopt, 0.0, 0, ""}; }
    static SignVerdict refuted_v(Rat w, double val, std::string why = "") {
        return {Kind::Refuted, std::move(w), val, 0, std::move(why)};
    }
    static SignVerdict sampled_v(long n) { return {Kind::SampledPass, std::nullopt, 0.0, n, ""}; }
    static SignVerdict inconclusive_v(std::string why) {
        return {Kind::Inconclusive, std::nullopt, 0.0, 0, std::move(why)};
    }

    std::string describe() const {
        switch (kind) {
            case Kind::Proved: return "proved";
            case Kind::Refuted:
                return "refuted at x = " + (witness ? rat_to_string(*witness) : "?") +
                       (reason.empty() ? "" : " (" + reason + ")");
            case Kind::SampledPass: return "sampled-pass (" + std::to_string(samples) + " points)";
            case Kind::Inconclusive: return "inconclusive: " + reason;
        }
        return "?";
    }
};

namespace detail {

// Mirror requirement for certifying -p instead of p.
inline SignRequirement flip(SignRequirement r) {
    switch (r) {
        case SignRequirement::NonPositive: return SignRequirement::NonNegative;
        case SignRequirement::StrictlyNegative: return SignRequirement::StrictlyPositive;
        default: return r;
    }
}

} // namespace detail

/// Certify the sign of p over an interval by exact root isolation plus exact
/// sample evaluation. Never returns SampledPass: polynomials admit certificates.
inline SignVerdict sign_on_interval(const Polynomial& p, const RatInterval& interval,
                                    SignRequirement required) {
    if (interval.empty()) return SignVerdict::proved_v();

    if (required == SignRequirement::NonPositive || required == SignRequirement::StrictlyNegative) {
        SignVerdict v = sign_on_interval(-p, interval, detail::flip(required));
        v.witness_value = -v.witness_value;
        return v;
    }

    if (p.is_zero()) {
        if (required == SignRequirement::NonNegative) return SignVerdict::proved_v();
        if (required == SignRequirement::PositiveExceptFiniteZeros)
            return SignVerdict::inconclusive_v("zero polynomial has no isolated zeros");
        Rat w = interval.lo ? (interval.hi ? Rat((*interval.lo + *interval.hi) / 2)
                                             : Rat(*interval.lo + 1))
                            : (interval.hi ? Rat(*interval.hi - 1) : Rat(0));
        return SignVerdict::refuted_v(std::move(w), 0.0, "identically zero");
    }

    // Clip infinite ends beyond the Cauchy root radius; the sign is constant there.
    Rat radius = p.cauchy_root_radius() + 1;
    Rat lo_pt = interval.lo ? *interval.lo : -radius;
    Rat hi_pt = interval.hi ? *interval.hi : radius;
    if (!interval.lo && lo_pt > hi_pt) lo_pt = hi_pt - 1;
    if (!interval.hi && hi_pt < lo_pt) hi_pt = lo_pt + 1;

    // Interior anchors: step inward from each endpoint until no root sits between
    // the endpoint and its anchor, so anchor signs represent the boundary gaps.
    bool single_point = lo_pt == hi_pt;
    Rat lo_in = lo_pt, hi_in = hi_pt;
    std::vector<std::pair<Rat, Rat>> root_boxes;
    std::vector<Rat> samples;

    if (!single_point) {
        // Divide out roots located exactly at the working endpoints, for isolation only.
        Polynomial q = p;
        for (const Rat& endpoint : {lo_pt, hi_pt}) {
            while (q.degree() >= 1 && q.eval(endpoint) == 0)
                q = q.divide_linear_root(endpoint);
        }
        auto seq = detail::sturm_sequence(q);
        Rat width = hi_pt - lo_pt;
        Rat step = width / 1024;
        lo_in = detail::non_root_point(q, lo_pt, std::min(hi_pt, Rat(lo_pt + step)));
        while (detail::sign_changes(seq, detail::EvalPoint::Finite, lo_pt) !=
               detail::sign_changes(seq, detail::EvalPoint::Finite, lo_in))
            lo_in = detail::non_root_point(q, lo_pt, lo_in);
        hi_in = detail::non_root_point(q, std::max(lo_pt, Rat(hi_pt - step)), hi_pt);
        while (detail::sign_changes(seq, detail::EvalPoint::Finite, hi_in) !=
               detail::sign_changes(seq, detail::EvalPoint::Finite, hi_pt))
            hi_in = detail::non_root_point(q, hi_in, hi_pt);

        auto iso = detail::isolate_roots(q, lo_in, hi_in);
        root_boxes = iso.intervals;
        samples.push_back(lo_in);
        for (const auto& s : iso.separators) samples.push_back(s);
        samples.push_back(hi_in);
    }

    // Closed finite endpoints participate directly.
    if (interval.lo && interval.lo_closed) samples.push_back(*interval.lo);
    if (interval.hi && interval.hi_closed) samples.push_back(*interval.hi);
    if (single_point && samples.empty()) samples.push_back(lo_pt);

    std::optional<Rat> worst;
    Rat worst_val(0);
    long zeros_at_closed_endpoints = 0;
    for (const auto& s : samples) {
        Rat v = p.eval(s);
        if (v < 0 && (!worst || v < worst_val)) {
            worst = s;
            worst_val = v;
        }
        if (v == 0) ++zeros_at_closed_endpoints;
    }
    if (worst)
        return SignVerdict::refuted_v(*worst, to_double(worst_val),
                                      "sign violated on " + interval.str());

    switch (required) {
        case SignRequirement::NonNegative: return SignVerdict::proved_v();
        case SignRequirement::PositiveExceptFiniteZeros:
            return SignVerdict::proved_v();  // nonzero polynomial: zeros are isolated
        case SignRequirement::StrictlyPositive: {
            if (!root_boxes.empty()) {
                Rat mid = (root_boxes.front().first + root_boxes.front().second) / 2;
                double val = to_double(p.eval(mid));
                return SignVerdict::refuted_v(std::move(mid), val,
                                              "vanishes inside " + interval.str());
            }
            if (zeros_at_closed_endpoints) {
                Rat w = (interval.lo && interval.lo_closed && p.eval(*interval.lo) == 0)
                            ? *interval.lo
                            : *interval.hi;
                return SignVerdict::refuted_v(std::move(w), 0.0, "vanishes at a closed endpoint");
            }
            return SignVerdict::proved_v();
        }
        default: break;
    }
    return SignVerdict::inconclusive_v("unsupported requirement");
}

/// Certified upper bound Z for the Cauchy root box of kappa*z^2 + tau*z + eta,
/// maximized over x in [-eps, eps]: every z-root lies in [-Z, Z] for every such x.
/// Interval evaluation on a fine grid supplies the padding.
inline double cauchy_bound(const Polynomial& kappa, const Polynomial& tau, const Polynomial& eta,
                           double eps) {
    if (!(eps > 0)) throw Error("cauchy_bound requires eps > 0");
    Rat reps = rat_from_double(eps);
    SignVerdict pos = sign_on_interval(kappa, RatInterval::closed(-reps, reps),
                                       SignRequirement::StrictlyPositive);
    if (!pos.proved())
        throw KappaNotPositiveError("kappa is not strictly positive on [-eps, eps]: " +
                                    pos.describe());

    struct Cell {
        double lo, hi;
        int depth;
    };
    std::vector<Cell> stack;
    const int kCells = 2048;
    for (int i = 0; i < kCells; ++i) {
        double a = -eps + 2 * eps * i / kCells;
        double b = -eps + 2 * eps * (i + 1) / kCells;
        stack.push_back({a, b, 0});
    }
    double best = 1.0;
    while (!stack.empty()) {
        Cell cell = stack.back();
        stack.pop_back();
        DInterval X(cell.lo, cell.hi);
        DInterval K = kappa.eval(X);
        if (K.lo <= 0.0) {
            if (cell.depth > 40)
                throw KappaNotPositiveError("interval refinement exhausted near x = " +
                                            std::to_string(cell.lo));
            double mid = 0.5 * (cell.lo + cell.hi);
            stack.push_back({cell.lo, mid, cell.depth + 1});
            stack.push_back({mid, cell.hi, cell.depth + 1});
            continue;
        }
        DInterval T = abs(tau.eval(X)), E = abs(eta.eval(X));
        double z = 1.0 + std::max(T.hi, E.hi) / K.lo;
        best = std::max(best, z);
    }
    return best;
}

} // namespace cycleguard
