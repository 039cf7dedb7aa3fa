#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cycleguard/system.hpp"
#include "cycleguard/transform.hpp"

namespace cycleguard {

class ConstructionFailsError : public Error {
public:
    ConstructionFailsError(const std::string& what, double x, double y, double value)
        : Error(what), x(x), y(y), value(value) {}
    double x, y, value;
};

namespace detail {

inline RatInterval domain_interval(const StructuredSystem& s) {
    RatInterval w = RatInterval::all();
    if (std::isfinite(s.domain_lo())) w.lo = rat_from_double(s.domain_lo());
    if (std::isfinite(s.domain_hi())) w.hi = rat_from_double(s.domain_hi());
    return w;
}

// z-quadratic combinations behind (T+)/(T-):
//   lead = x kappa' + (2h+2r) kappa, mid = x tau' + (h+2r) tau, low = x eta' + 2r eta.
struct ComboPolys {
    Polynomial lead, mid, low, disc;
};

inline Polynomial x_deriv_combo(const Polynomial& p, int weight) {
    return Polynomial::x() * p.derivative() + Rat(weight) * p;
}

inline std::optional<ComboPolys> piece_combos(const TrinomialPiece& p) {
    if (!p.kappa.is_polynomial() || !p.tau.is_polynomial() || !p.eta.is_polynomial())
        return std::nullopt;
    ComboPolys c;
    c.lead = x_deriv_combo(p.kappa.poly(), 2 * p.h + 2 * p.r);
    c.mid = x_deriv_combo(p.tau.poly(), p.h + 2 * p.r);
    c.low = x_deriv_combo(p.eta.poly(), 2 * p.r);
    c.disc = c.mid * c.mid - Rat(4) * (c.low * c.lead);
    return c;
}

inline double combo_eval(const Coefficient& c, int weight, double x) {
    return x * c.deriv_eval(x) + weight * c.eval(x);
}

// Sampled fallback used when a piece has non-polynomial coefficients.
// predicate(x) returns a violation margin (> 0 means violated).
template <typename Fn>
SignVerdict sampled_check(Fn&& violation, double lo, double hi, long n, const std::string& what) {
    double worst = 0.0, worst_x = 0.0;
    for (long i = 0; i <= n; ++i) {
        double x = lo + (hi - lo) * static_cast<double>(i) / n;
        double v = violation(x);
        if (v > worst) {
            worst = v;
            worst_x = x;
        }
    }
    if (worst > 1e-12)
        return SignVerdict::refuted_v(rat_from_double(worst_x), worst, what + " (sampled)");
    return SignVerdict::sampled_v(n + 1);
}

inline double clip_lo(const StructuredSystem& s, double fallback = -50.0) {
    return std::isfinite(s.domain_lo()) ? s.domain_lo() * (1.0 - 1e-9) : fallback;
}
inline double clip_hi(const StructuredSystem& s, double fallback = 50.0) {
    return std::isfinite(s.domain_hi()) ? s.domain_hi() * (1.0 - 1e-9) : fallback;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Trinomial conditions.

/// Star-shapedness from above for one piece: the z-quadratic
/// lead z^2 + mid z + low must be nonnegative for every z, so
/// disc <= 0, lead >= 0 and low >= 0 on the interval (the low condition
/// carries the degenerate lead == 0 case).
inline SignVerdict check_Tplus_piece(const TrinomialPiece& p, const RatInterval& window) {
    if (auto combos = detail::piece_combos(p)) {
        SignVerdict disc = sign_on_interval(combos->disc, window, SignRequirement::NonPositive);
        if (!disc.proved()) return disc;
        SignVerdict lead = sign_on_interval(combos->lead, window, SignRequirement::NonNegative);
        if (!lead.proved()) return lead;
        return sign_on_interval(combos->low, window, SignRequirement::NonNegative);
    }
    double lo = window.lo ? to_double(*window.lo) : -50.0;
    double hi = window.hi ? to_double(*window.hi) : 50.0;
    return detail::sampled_check(
        [&](double x) {
            double a = detail::combo_eval(p.kappa, 2 * p.h + 2 * p.r, x);
            double b = detail::combo_eval(p.tau, p.h + 2 * p.r, x);
            double c = detail::combo_eval(p.eta, 2 * p.r, x);
            double scale = 1.0 + a * a + b * b + c * c;
            return std::max({(b * b - 4 * a * c) / scale, -a / scale, -c / scale});
        },
        lo, hi, 10000, "(T+) combination");
}

inline SignVerdict check_Tminus_piece(const TrinomialPiece& p, const RatInterval& window) {
    if (auto combos = detail::piece_combos(p)) {
        SignVerdict disc = sign_on_interval(combos->disc, window, SignRequirement::NonPositive);
        if (!disc.proved()) return disc;
        SignVerdict lead = sign_on_interval(combos->lead, window, SignRequirement::NonPositive);
        if (!lead.proved()) return lead;
        return sign_on_interval(combos->low, window, SignRequirement::NonPositive);
    }
    double lo = window.lo ? to_double(*window.lo) : -50.0;
    double hi = window.hi ? to_double(*window.hi) : 50.0;
    return detail::sampled_check(
        [&](double x) {
            double a = detail::combo_eval(p.kappa, 2 * p.h + 2 * p.r, x);
            double b = detail::combo_eval(p.tau, p.h + 2 * p.r, x);
            double c = detail::combo_eval(p.eta, 2 * p.r, x);
            double scale = 1.0 + a * a + b * b + c * c;
            return std::max({(b * b - 4 * a * c) / scale, a / scale, c / scale});
        },
        lo, hi, 10000, "(T-) combination");
}

inline std::vector<SignVerdict> check_Tplus(const TrinomialDecomposition& d,
                                            const RatInterval& window) {
    std::vector<SignVerdict> out;
    out.reserve(d.size());
    for (const auto& p : d) out.push_back(check_Tplus_piece(p, window));
    return out;
}

inline std::vector<SignVerdict> check_Tminus(const TrinomialDecomposition& d,
                                             const RatInterval& window) {
    std::vector<SignVerdict> out;
    out.reserve(d.size());
    for (const auto& p : d) out.push_back(check_Tminus_piece(p, window));
    return out;
}

/// Eventual positivity for |x| > eps plus strict positivity of kappa on
/// [-eps, eps] (the extra hypothesis the trapping-disk construction needs).
inline SignVerdict check_Tplusplus_piece(const TrinomialPiece& p, double eps) {
    Rat reps = rat_from_double(eps);
    bool all_poly = p.kappa.is_polynomial() && p.tau.is_polynomial() && p.eta.is_polynomial();
    if (all_poly) {
        const Polynomial& kappa = p.kappa.poly();
        const Polynomial& tau = p.tau.poly();
        const Polynomial& eta = p.eta.poly();
        Polynomial disc = tau * tau - Rat(4) * (eta * kappa);
        for (const RatInterval& side :
             {RatInterval::below(-reps), RatInterval::above(reps)}) {
            SignVerdict v = sign_on_interval(disc, side, SignRequirement::NonPositive);
            if (!v.proved()) return v;
            v = sign_on_interval(kappa, side, SignRequirement::NonNegative);
            if (!v.proved()) return v;
            v = sign_on_interval(eta, side, SignRequirement::NonNegative);
            if (!v.proved()) return v;
        }
        return sign_on_interval(kappa, RatInterval::closed(-reps, reps),
                                SignRequirement::StrictlyPositive);
    }
    SignVerdict tails = detail::sampled_check(
        [&](double t) {
            // map [0, 1] onto the two tails |x| in (eps, eps * 1e6]
            double mag = eps * std::exp(std::log(1e6) * std::fabs(2 * t - 1));
            double x = t < 0.5 ? -mag : mag;
            double k = p.kappa.eval(x), tv = p.tau.eval(x), e = p.eta.eval(x);
            double scale = 1.0 + k * k + tv * tv + e * e;
            return std::max({(tv * tv - 4 * e * k) / scale, -k / scale, -e / scale});
        },
        0.0, 1.0, 10000, "(T++) tails");
    if (!tails.passed()) return tails;
    SignVerdict core = detail::sampled_check(
        [&](double x) { return 1e-9 - p.kappa.eval(x); }, -eps, eps, 2000,
        "kappa > 0 on [-eps, eps]");
    if (!core.passed()) return core;
    return SignVerdict::sampled_v(12001);
}

inline std::vector<SignVerdict> check_Tplusplus(const TrinomialDecomposition& d, double eps) {
    std::vector<SignVerdict> out;
    out.reserve(d.size());
    for (const auto& p : d) out.push_back(check_Tplusplus_piece(p, eps));
    return out;
}

// ---------------------------------------------------------------------------
// Sequence and odd-coefficient conditions.

/// (Seq): points accumulating at 0 where some x f_j' + (j-1) f_j is nonzero.
/// A nonzero polynomial has isolated zeros, so nonvanishing of any combination
/// proves it; expression coefficients are probed on dyadic scales 2^-i.
inline SignVerdict check_seq(const StructuredSystem& s) {
    bool all_poly = true;
    for (const auto& [j, c] : s.f()) all_poly = all_poly && c.is_polynomial();
    if (all_poly) {
        for (const auto& [j, c] : s.f()) {
            Polynomial h = detail::x_deriv_combo(c.poly(), j - 1);
            if (!h.is_zero()) return SignVerdict::proved_v();
        }
        Rat w(0);
        return SignVerdict::refuted_v(w, 0.0,
                                      "every x f_j' + (j-1) f_j is the zero polynomial");
    }
    long hits = 0;
    for (int i = 1; i <= 40; ++i) {
        double scale = std::ldexp(1.0, -i);
        bool found = false;
        for (double x : {scale, -scale, 1.5 * scale, -1.5 * scale}) {
            if (!s.in_domain(x)) continue;
            for (const auto& [j, c] : s.f()) {
                if (std::fabs(detail::combo_eval(c, j - 1, x)) > 1e-14) {
                    found = true;
                    break;
                }
            }
            if (found) break;
        }
        if (!found)
            return SignVerdict::inconclusive_v("no nonzero combination found at scale 2^-" +
                                               std::to_string(i));
        ++hits;
    }
    return SignVerdict::sampled_v(hits);
}

struct OddRouteReport {
    SignVerdict evenness;                 // all even-degree damping terms vanish
    std::map<int, SignVerdict> h_nonneg;  // x f_j' + (j-1) f_j >= 0 per odd j
    SignVerdict seq;

    bool all_passed() const {
        if (!evenness.passed() || !seq.passed()) return false;
        for (const auto& [j, v] : h_nonneg)
            if (!v.passed()) return false;
        return true;
    }
    bool all_proved() const {
        if (!evenness.proved() || !seq.proved()) return false;
        for (const auto& [j, v] : h_nonneg)
            if (!v.proved()) return false;
        return true;
    }
};

/// Hypotheses of the odd-coefficient uniqueness route: f_j = 0 for even j and
/// x f_j' + (j-1) f_j >= 0 for odd j, plus (Seq).
inline OddRouteReport check_corollary_odd(const StructuredSystem& s) {
    OddRouteReport report;
    report.evenness = SignVerdict::proved_v();
    for (const auto& [j, c] : s.f()) {
        if (j % 2 == 0 && !c.is_zero()) {
            report.evenness = SignVerdict::refuted_v(
                Rat(0), c.eval(1.0), "even damping term f_" + std::to_string(j) + " present");
            break;
        }
    }
    RatInterval window = detail::domain_interval(s);
    for (const auto& [j, c] : s.f()) {
        if (j % 2 == 0) continue;
        if (c.is_polynomial()) {
            report.h_nonneg[j] = sign_on_interval(detail::x_deriv_combo(c.poly(), j - 1),
                                                  window, SignRequirement::NonNegative);
        } else {
            report.h_nonneg[j] = detail::sampled_check(
                [&](double x) { return -detail::combo_eval(c, j - 1, x); },
                detail::clip_lo(s), detail::clip_hi(s), 10000,
                "x f_" + std::to_string(j) + "' + " + std::to_string(j - 1) + " f_" +
                    std::to_string(j) + " >= 0");
        }
    }
    report.seq = check_seq(s);
    return report;
}

struct L2L3Report {
    std::map<int, SignVerdict> l2_per;  // f_(2k+1) >= 0 for k >= 1
    std::map<int, SignVerdict> l3_per;  // monotone away from 0, every odd j
    SignVerdict f1_nonneg;              // informational: f_1 >= 0 everywhere
    SignVerdict l2, l3;                 // aggregates
};

/// The classical sign/monotonicity hypotheses which the x f' + (j-1) f
/// condition replaces. f_1 is exempt from (L2); (L3) covers every odd j.
inline L2L3Report check_L2L3(const StructuredSystem& s) {
    for (const auto& [j, c] : s.f())
        if (j % 2 == 0 && !c.is_zero())
            throw Error("(L2)/(L3) apply to odd systems only");
    L2L3Report report;
    report.l2 = SignVerdict::proved_v();
    report.l3 = SignVerdict::proved_v();
    RatInterval window = detail::domain_interval(s);
    auto fold = [](SignVerdict& agg, const SignVerdict& v) {
        if (agg.kind == SignVerdict::Kind::Refuted) return;
        if (v.kind == SignVerdict::Kind::Refuted || v.kind == SignVerdict::Kind::Inconclusive)
            agg = v;
        else if (v.kind == SignVerdict::Kind::SampledPass && agg.proved())
            agg = v;
    };
    for (const auto& [j, c] : s.f()) {
        if (j % 2 == 0) continue;
        SignVerdict nonneg;
        SignVerdict monotone;
        if (c.is_polynomial()) {
            nonneg = sign_on_interval(c.poly(), window, SignRequirement::NonNegative);
            Polynomial d = c.poly().derivative();
            SignVerdict up = sign_on_interval(d, RatInterval::above(Rat(0)),
                                              SignRequirement::NonNegative);
            SignVerdict down = sign_on_interval(d, RatInterval::below(Rat(0)),
                                                SignRequirement::NonPositive);
            monotone = up.proved() ? down : up;
        } else {
            nonneg = detail::sampled_check([&](double x) { return -c.eval(x); },
                                           detail::clip_lo(s), detail::clip_hi(s), 10000,
                                           "f_" + std::to_string(j) + " >= 0");
            monotone = detail::sampled_check(
                [&](double x) { return x >= 0 ? -c.deriv_eval(x) : c.deriv_eval(x); },
                detail::clip_lo(s), detail::clip_hi(s), 10000,
                "f_" + std::to_string(j) + " monotone away from 0");
        }
        if (j == 1) report.f1_nonneg = nonneg;
        else {
            report.l2_per[j] = nonneg;
            fold(report.l2, nonneg);
        }
        report.l3_per[j] = monotone;
        fold(report.l3, monotone);
    }
    return report;
}

// ---------------------------------------------------------------------------
// The transformed odd-coefficient condition for nonlinear g.

struct HgVerdict {
    SignVerdict nonneg;      // cleared form >= 0 on the strip
    SignVerdict strict_seq;  // cleared form not identically zero (isolated zeros)
};

/// Condition on f for power j over restoring force g:
///   x [ j f g + 2G (f' g - f g') / g ] >= 0 for x != 0.
/// Multiplying the bracket by g^2 > 0 clears the denominator, giving the
/// polynomial certificate x [ j f g^3 + 2 G g (f' g - f g') ] >= 0.
inline HgVerdict check_Hg(const Coefficient& f, const Coefficient& g, int j,
                          const RatInterval& window) {
    double lo = window.lo ? to_double(*window.lo) : -std::numeric_limits<double>::infinity();
    double hi = window.hi ? to_double(*window.hi) : std::numeric_limits<double>::infinity();
    ContiFilippov cf(g, lo, hi);  // throws GNotAdmissibleError when x g(x) > 0 fails

    if (f.is_polynomial() && g.is_polynomial()) {
        const Polynomial& fp = f.poly();
        const Polynomial& gp = g.poly();
        Polynomial G = gp.antiderivative();
        Polynomial bracket =
            Rat(j) * (fp * gp * gp * gp) +
            Rat(2) * (G * gp * (fp.derivative() * gp - fp * gp.derivative()));
        Polynomial cleared = Polynomial::x() * bracket;
        HgVerdict out;
        out.nonneg = sign_on_interval(cleared, window, SignRequirement::NonNegative);
        out.strict_seq = cleared.is_zero()
                             ? SignVerdict::inconclusive_v("cleared form is identically zero")
                             : (out.nonneg.proved() ? SignVerdict::proved_v() : out.nonneg);
        return out;
    }

    double clo = std::isfinite(lo) ? lo * (1 - 1e-9) : -50.0;
    double chi = std::isfinite(hi) ? hi * (1 - 1e-9) : 50.0;
    GEvaluator G(g);
    auto bracket_eval = [&](double x) {
        double gv = g.eval(x), gd = g.deriv_eval(x);
        double fv = f.eval(x), fd = f.deriv_eval(x);
        return x * (j * fv * gv + 2.0 * G(x) * (fd * gv - fv * gd) / gv);
    };
    HgVerdict out;
    out.nonneg = detail::sampled_check(
        [&](double x) {
            if (std::fabs(x) < 1e-8) return 0.0;
            return -bracket_eval(x);
        },
        clo, chi, 10000, "(Hg) cleared form");
    bool nonzero_somewhere = false;
    for (int i = 1; i <= 40 && !nonzero_somewhere; ++i) {
        double x = std::ldexp(1.0, -i);
        if (std::fabs(bracket_eval(x)) > 1e-14 || std::fabs(bracket_eval(-x)) > 1e-14)
            nonzero_somewhere = true;
    }
    out.strict_seq = nonzero_somewhere
                         ? SignVerdict::sampled_v(80)
                         : SignVerdict::inconclusive_v("no strict point found near 0");
    return out;
}

// ---------------------------------------------------------------------------
// Trapping-region construction.

struct BoundednessConstruction {
    double epsilon = 0;
    double Ybar = 0;
    double M = 0;  // trapping sublevel set {2E <= M^2}
    std::string route;  // "trinomial" or "odd"
    SignVerdict axis_positive;  // phi(0, y) > 0 for |y| > Ybar (sampled)
    long boundary_samples = 0;
};

/// Build the rectangle [-eps, eps] x [-Ybar, Ybar] outside which phi >= 0, and
/// the smallest energy sublevel set containing it. Requires the eventual
/// positivity conditions to hold at this eps; the boundary of the sublevel set
/// is re-checked by sampling.
inline BoundednessConstruction boundedness_construction(const StructuredSystem& s, double eps) {
    BoundednessConstruction out;
    out.epsilon = eps;

    auto fail = [](const std::string& what, double x, double y, double value) {
        throw ConstructionFailsError(what + " at (" + std::to_string(x) + ", " +
                                         std::to_string(y) + "), value " +
                                         std::to_string(value),
                                     x, y, value);
    };

    // Route 1: trinomial pieces with positive kappa.
    std::optional<TrinomialDecomposition> pieces;
    try {
        pieces = decomposition_or_default(s);
    } catch (const DecompositionRequiredError&) {
        pieces = std::nullopt;
    }
    bool trinomial_ok = pieces.has_value() && !pieces->empty();
    if (trinomial_ok)
        for (const auto& v : check_Tplusplus(*pieces, eps)) trinomial_ok &= v.passed();

    double ybar = 0.0;
    if (pieces && pieces->empty()) {
        out.route = "trinomial";
        ybar = 0.0;  // no damping pieces at all: phi = 0 everywhere
    } else if (trinomial_ok) {
        out.route = "trinomial";
        for (const auto& p : *pieces) {
            double z;
            if (p.kappa.is_polynomial() && p.tau.is_polynomial() && p.eta.is_polynomial()) {
                z = cauchy_bound(p.kappa.poly(), p.tau.poly(), p.eta.poly(), eps);
            } else {
                z = 1.0;
                for (int i = 0; i <= 4096; ++i) {
                    double x = -eps + 2 * eps * i / 4096.0;
                    double k = p.kappa.eval(x);
                    if (!(k > 0)) fail("kappa not positive", x, 0.0, k);
                    z = std::max(z, 1.0 + std::max(std::fabs(p.tau.eval(x)),
                                                   std::fabs(p.eta.eval(x))) /
                                          k * (1.0 + 1e-9));
                }
            }
            ybar = std::max(ybar, std::pow(z, 1.0 / p.h));
        }
    } else {
        // Route 2: odd coefficients with f_1 >= 0 off [-eps, eps] and some
        // strictly positive f_(2k+1) on it.
        OddRouteReport odd = check_corollary_odd(s);
        bool h_ok = odd.evenness.passed();
        for (const auto& [j, v] : odd.h_nonneg) h_ok &= v.passed();
        if (!h_ok) fail("no trinomial route and the odd-route h conditions fail", 0, 0, 0);

        const Coefficient& f1 = s.f_at(1);
        Rat reps = rat_from_double(eps);
        SignVerdict f1_out;
        if (f1.is_polynomial()) {
            SignVerdict above = sign_on_interval(f1.poly(), RatInterval::above(reps),
                                                 SignRequirement::NonNegative);
            SignVerdict below = sign_on_interval(f1.poly(), RatInterval::below(-reps),
                                                 SignRequirement::NonNegative);
            f1_out = above.proved() ? below : above;
        } else {
            f1_out = detail::sampled_check(
                [&](double t) {
                    double mag = eps * std::exp(std::log(1e6) * std::fabs(2 * t - 1));
                    double x = t < 0.5 ? -mag : mag;
                    return -f1.eval(x);
                },
                0.0, 1.0, 10000, "f_1 >= 0 off [-eps, eps]");
        }
        if (!f1_out.passed()) {
            double wx = f1_out.witness ? to_double(*f1_out.witness) : 2 * eps;
            fail("f_1 negative outside the core interval", wx, 0.0, f1.eval(wx));
        }

        int kbar = 0;
        for (const auto& [j, c] : s.f()) {
            if (j < 3 || j % 2 == 0) continue;
            bool positive;
            if (c.is_polynomial())
                positive = sign_on_interval(c.poly(), RatInterval::closed(-reps, reps),
                                            SignRequirement::StrictlyPositive)
                               .proved();
            else {
                positive = true;
                for (int i = 0; i <= 2000; ++i) {
                    double x = -eps + 2 * eps * i / 2000.0;
                    positive &= c.eval(x) > 0;
                }
            }
            if (positive) {
                kbar = j;
                break;
            }
        }
        if (kbar == 0)
            fail("no strictly positive odd coefficient on [-eps, eps]", 0.0, 0.0, 0.0);
        out.route = "odd";
        // phi >= f_1 + f_kbar y^(kbar-1); bound the z-root of f_kbar z + f_1
        double z;
        const Coefficient& fk = s.f_at(kbar);
        if (fk.is_polynomial() && f1.is_polynomial()) {
            z = cauchy_bound(fk.poly(), Polynomial::zero(), f1.poly(), eps);
        } else {
            z = 1.0;
            for (int i = 0; i <= 4096; ++i) {
                double x = -eps + 2 * eps * i / 4096.0;
                double k = fk.eval(x);
                if (!(k > 0)) fail("f_kbar not positive on the core", x, 0.0, k);
                z = std::max(z, (1.0 + std::fabs(f1.eval(x)) / k) * (1.0 + 1e-9));
            }
        }
        ybar = std::pow(z, 1.0 / (kbar - 1));
    }

    out.Ybar = ybar;

    // Smallest sublevel set {2E <= M^2} containing the rectangle.
    double g_lo = 2.0 * s.energy(-eps, 0.0), g_hi = 2.0 * s.energy(eps, 0.0);
    out.M = std::sqrt(std::max(g_lo, g_hi) + ybar * ybar);

    // Sample the boundary: 2G(x) + y^2 = M^2 via x = beta(M cos t), y = M sin t.
    ContiFilippov cf(s.g(), s.domain_lo(), s.domain_hi());
    const int kBoundary = 1000;
    for (int i = 0; i < kBoundary; ++i) {
        double t = 2.0 * M_PI * i / kBoundary;
        double u = out.M * std::cos(t);
        if (u <= cf.u_minus() || u >= cf.u_plus()) continue;
        double x = cf.beta(u), y = out.M * std::sin(t);
        double phi = s.phi(x, y);
        if (phi < -1e-12) fail("phi negative on the trapping boundary", x, y, phi);
    }
    out.boundary_samples = kBoundary;

    // Lemma-style non-invariance anchor: phi(0, y) > 0 beyond Ybar on the axis.
    out.axis_positive = detail::sampled_check(
        [&](double y) {
            double yy = ybar + 1e-6 + y;
            return 1e-15 - s.phi(0.0, yy);
        },
        0.0, std::max(10.0, 2 * ybar), 1000, "phi(0, y) > 0 for y > Ybar");

    return out;
}

} // namespace cycleguard
