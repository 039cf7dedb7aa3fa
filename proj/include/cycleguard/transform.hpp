#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "cycleguard/system.hpp"

namespace cycleguard {

/// The change of variables (u, v) = (alpha(x), y) with alpha = sigma(x) sqrt(2 G(x)),
/// which carries x' = y, y' = -g(x) - y Phi(x, y) to a system with linear
/// restoring force and the same orbits.
///
/// Requires x g(x) > 0 for x != 0 on the strip and g'(0) > 0. Certification of
/// the sign condition is exact for polynomial g, sampled otherwise.
class ContiFilippov {
public:
    ContiFilippov(Coefficient g, double dom_lo, double dom_hi)
        : g_(std::move(g)), lo_(dom_lo), hi_(dom_hi), G_(g_) {
        check_admissible();
        if (!g_.is_polynomial() && !g_.is_black_box()) build_table();
        u_minus_ = -limit_sqrt_2G(false);
        u_plus_ = limit_sqrt_2G(true);
    }

    double gprime0() const { return gp0_; }
    bool admissibility_certified() const { return certified_; }
    double u_minus() const { return u_minus_; }
    double u_plus() const { return u_plus_; }
    double domain_lo() const { return lo_; }
    double domain_hi() const { return hi_; }
    const Coefficient& g() const { return g_; }

    double G(double x) const {
        if (!(x > lo_ && x < hi_)) throw OutOfDomainError("G: x outside the strip");
        return G_raw(x);
    }

    double alpha(double x) const {
        if (!(x > lo_ && x < hi_)) throw OutOfDomainError("alpha: x outside the strip");
        double G2 = 2.0 * G_raw(x);
        double s = x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
        return s * std::sqrt(std::max(G2, 0.0));
    }

    double alpha_prime(double x) const {
        if (std::fabs(x) < 1e-12) return std::sqrt(gp0_);
        double s = x > 0 ? 1.0 : -1.0;
        return s * g_.eval(x) / std::sqrt(2.0 * G_raw(x));
    }

    /// Inverse of alpha by bracketed Newton iteration:
    /// |alpha(beta(u)) - u| <= 1e-12 (1 + |u|).
    double beta(double u) const {
        if (u == 0.0) return 0.0;
        if (u < u_minus_ || u > u_plus_) throw OutOfRangeError("beta: u outside the image");
        bool pos = u > 0;
        double lo, hi;
        double target = std::fabs(u);
        double bound = pos ? hi_ : -lo_;  // distance to the domain edge
        lo = 0.0;
        hi = std::min(1.0, 0.5 * bound);
        auto mag = [&](double t) { return std::fabs(alpha(pos ? t : -t)); };
        int guard = 0;
        while (mag(hi) < target) {
            hi = std::isfinite(bound) ? 0.5 * (hi + bound) : 2.0 * hi;
            if (++guard > 500 || (std::isfinite(bound) && bound - hi < 1e-300))
                throw OutOfRangeError("beta: bracketing failed");
        }
        const double tol = 1e-12 * (1.0 + target);
        double x = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            double err = mag(x) - target;
            if (std::fabs(err) <= tol) break;
            if (err > 0) hi = x;
            else lo = x;
            double xs = pos ? x : -x;
            double deriv = alpha_prime(xs) * (pos ? 1.0 : -1.0);
            double next = deriv > 0 ? x - err / deriv : 0.5 * (lo + hi);
            x = (next > lo && next < hi) ? next : 0.5 * (lo + hi);
        }
        return pos ? x : -x;
    }

private:
    void check_admissible() {
        // g(0) = 0 and g'(0) > 0
        if (g_.is_polynomial()) {
            const Polynomial& p = g_.poly();
            if (!(p.coeff(0) == 0)) throw GNotAdmissibleError("g(0) != 0");
            if (!(p.coeff(1) > 0)) throw GNotAdmissibleError("g'(0) <= 0");
            gp0_ = to_double(p.coeff(1));

            // x g(x) > 0 for x != 0: strip the root at 0, then certify positivity
            Polynomial xg = Polynomial::x() * p;
            int mult = 0;
            while (xg.degree() >= 1 && xg.coeff(0) == 0) {
                xg = xg.divide_linear_root(Rat(0));
                ++mult;
            }
            if (mult % 2 != 0) throw GNotAdmissibleError("x g(x) changes sign at 0");
            RatInterval window = RatInterval::all();
            if (std::isfinite(lo_)) window.lo = rat_from_double(lo_);
            if (std::isfinite(hi_)) window.hi = rat_from_double(hi_);
            SignVerdict v = sign_on_interval(xg, window, SignRequirement::StrictlyPositive);
            if (!v.proved())
                throw GNotAdmissibleError("x g(x) > 0 fails on the strip: " + v.describe());
            certified_ = true;
        } else {
            double g0 = g_.eval(0.0);
            if (std::fabs(g0) > 1e-12) throw GNotAdmissibleError("g(0) != 0");
            gp0_ = g_.deriv_eval(0.0);
            if (!(gp0_ > 0)) throw GNotAdmissibleError("g'(0) <= 0");
            double span_lo = std::isfinite(lo_) ? lo_ : -64.0;
            double span_hi = std::isfinite(hi_) ? hi_ : 64.0;
            // Refute on a strictly negative product only: x g(x) may underflow
            // to zero for rapidly decaying g even though it is positive.
            for (int i = 1; i <= 5000; ++i) {
                double t = static_cast<double>(i) / 5001.0;
                for (double x : {span_lo * t, span_hi * t}) {
                    if (x == 0.0 || !(x > lo_ && x < hi_)) continue;
                    if (x * g_.eval(x) < 0)
                        throw GNotAdmissibleError("sampled x g(x) < 0 at x = " +
                                                  std::to_string(x));
                }
            }
            certified_ = false;
        }
    }

    double G_raw(double x) const {
        if (g_.is_polynomial() || table_.empty()) return G_(x);
        if (x < table_.front().x || x > table_.back().x) return G_(x);
        // cubic Hermite between quadrature nodes; G' = g exactly at the nodes
        std::size_t lo = 0, hi = table_.size() - 1;
        while (lo + 1 < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (table_[mid].x <= x) lo = mid;
            else hi = mid;
        }
        const Node& n0 = table_[lo];
        const Node& n1 = table_[lo + 1];
        double h = n1.x - n0.x;
        if (h <= 0) return n0.G;
        double t = (x - n0.x) / h;
        double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
        double h10 = t * (1 - t) * (1 - t);
        double h01 = t * t * (3 - 2 * t);
        double h11 = t * t * (t - 1);
        return h00 * n0.G + h10 * h * n0.g + h01 * n1.G + h11 * h * n1.g;
    }

    void build_table() {
        double span_lo = std::max(lo_, -64.0), span_hi = std::min(hi_, 64.0);
        if (std::isfinite(lo_)) span_lo = lo_ + 1e-9 * (1.0 + std::fabs(lo_));
        if (std::isfinite(hi_)) span_hi = hi_ - 1e-9 * (1.0 + std::fabs(hi_));
        auto fg = [this](double t) { return g_.eval(t); };
        // adaptive node placement: split until the two-panel Simpson correction
        // on each cell is below tolerance. The stack is seeded with a fine
        // uniform partition so narrow features are never straddled and missed.
        std::vector<double> xs{0.0};
        for (double side : {span_hi, span_lo}) {
            if (side == 0.0) continue;
            std::vector<std::pair<double, double>> stack;
            const int kSeed = 256;
            for (int k = 0; k < kSeed; ++k)
                stack.push_back({side * k / kSeed, side * (k + 1) / kSeed});
            while (!stack.empty()) {
                auto [a, b] = stack.back();
                stack.pop_back();
                double m = 0.5 * (a + b);
                double s1 = (b - a) / 6.0 * (fg(a) + 4 * fg(m) + fg(b));
                double m1 = 0.5 * (a + m), m2 = 0.5 * (m + b);
                double s2 = (m - a) / 6.0 * (fg(a) + 4 * fg(m1) + fg(m)) +
                            (b - m) / 6.0 * (fg(m) + 4 * fg(m2) + fg(b));
                if (std::fabs(s2 - s1) < 1e-13 * (1.0 + std::fabs(s2)) ||
                    std::fabs(b - a) < 1e-6) {
                    xs.push_back(m);
                    xs.push_back(b);
                } else {
                    stack.push_back({a, m});
                    stack.push_back({m, b});
                }
            }
        }
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        table_.reserve(xs.size());
        // cumulative Simpson between consecutive nodes
        std::size_t zero_idx = std::lower_bound(xs.begin(), xs.end(), 0.0) - xs.begin();
        std::vector<double> cumulative(xs.size(), 0.0);
        for (std::size_t i = zero_idx + 1; i < xs.size(); ++i) {
            double a = xs[i - 1], b = xs[i], m = 0.5 * (a + b);
            cumulative[i] = cumulative[i - 1] + (b - a) / 6.0 * (fg(a) + 4 * fg(m) + fg(b));
        }
        for (std::size_t i = zero_idx; i-- > 0;) {
            double a = xs[i], b = xs[i + 1], m = 0.5 * (a + b);
            cumulative[i] = cumulative[i + 1] - (b - a) / 6.0 * (fg(a) + 4 * fg(m) + fg(b));
        }
        for (std::size_t i = 0; i < xs.size(); ++i)
            table_.push_back({xs[i], cumulative[i], fg(xs[i])});
    }

    double limit_sqrt_2G(bool upper) const {
        double edge = upper ? hi_ : lo_;
        if (std::isfinite(edge)) {
            double prev = 0.0;
            for (int k = 8; k <= 48; ++k) {
                double x = edge - (upper ? 1.0 : -1.0) * std::ldexp(std::fabs(edge) + 1.0, -k);
                if (!(x > lo_ && x < hi_)) continue;
                double v = std::sqrt(std::max(0.0, 2.0 * G_raw(x)));
                if (k > 8 && std::fabs(v - prev) <= 1e-10 * (1.0 + v)) return v;
                prev = v;
            }
            return prev;  // g stays integrable up to a finite edge for C1 g
        }
        double prev = -1.0;
        for (int k = 0; k <= 60; ++k) {
            double x = (upper ? 1.0 : -1.0) * std::ldexp(1.0, k);
            double v = 2.0 * G_raw(x);
            if (v > 1e30) return std::numeric_limits<double>::infinity();
            if (prev >= 0 && std::fabs(v - prev) <= 1e-12 * (1.0 + v)) return std::sqrt(v);
            prev = v;
        }
        return std::numeric_limits<double>::infinity();
    }

    struct Node {
        double x, G, g;
    };

    Coefficient g_;
    double lo_, hi_;
    GEvaluator G_;
    std::vector<Node> table_;
    double gp0_ = 0.0;
    bool certified_ = false;
    double u_minus_ = 0.0, u_plus_ = 0.0;
};

struct Pushforward {
    StructuredSystem system;                     // u' = v, v' = -u - v sum ftilde_j(u) v^(j-1)
    std::shared_ptr<const ContiFilippov> map;    // the underlying change of variables
};

/// Coefficients ftilde_j(u) = u f_j(beta(u)) / g(beta(u)), with the removable
/// singularity at u = 0 handled by the limit u/g(beta(u)) -> 1/sqrt(g'(0)).
inline Pushforward pushforward(const StructuredSystem& s) {
    auto cf = std::make_shared<ContiFilippov>(s.g(), s.domain_lo(), s.domain_hi());
    std::map<int, Coefficient> ftilde;
    for (const auto& [j, c] : s.f()) {
        Coefficient coeff = c;  // by-value capture keeps the pushforward self-contained
        auto value = [cf, coeff](double u) {
            double x = cf->beta(u);
            double q = std::fabs(u) < 1e-6 ? 1.0 / std::sqrt(cf->gprime0())
                                           : u / cf->g().eval(x);
            return q * coeff.eval(x);
        };
        ftilde.emplace(j, Coefficient::black_box(value));
    }
    StructuredSystem pushed(Coefficient(Polynomial::x()), std::move(ftilde), cf->u_minus(),
                            cf->u_plus());
    return {std::move(pushed), std::move(cf)};
}

/// Pointwise value of the star-shapedness certificate field: Psi(x, y) equals
/// u phi_u + v phi_v of the pushforward evaluated at (u, v) = (alpha(x), y).
/// For x != 0:
///   Psi = (sigma sqrt(2G)/g) [ 2G (Phi_x g - Phi g') / g^2 + Phi + y Phi_y ],
/// with the continuous extension Psi(0, y) = y Phi_y(0, y) / sqrt(g'(0)).
inline double psi_eval(const StructuredSystem& s, const ContiFilippov& cf, double x, double y) {
    double phi = s.phi(x, y);
    double phi_x = s.phi_x(x, y);
    double phi_y = s.phi_y(x, y);
    if (std::fabs(x) < 1e-8) return y * phi_y / std::sqrt(cf.gprime0());
    double g = cf.g().eval(x);
    double gp = cf.g().deriv_eval(x);
    double G = cf.G(x);
    double sgn = x > 0 ? 1.0 : -1.0;
    double pref = sgn * std::sqrt(2.0 * G) / g;
    return pref * (2.0 * G * (phi_x * g - phi * gp) / (g * g) + phi + y * phi_y);
}

inline double psi_eval(const StructuredSystem& s, double x, double y) {
    ContiFilippov cf(s.g(), s.domain_lo(), s.domain_hi());
    return psi_eval(s, cf, x, y);
}

/// Symmetric Hausdorff distance between two closed polylines.
inline double hausdorff_distance(const std::vector<std::pair<double, double>>& a,
                                 const std::vector<std::pair<double, double>>& b) {
    auto point_segment = [](double px, double py, double ax, double ay, double bx, double by) {
        double vx = bx - ax, vy = by - ay;
        double len2 = vx * vx + vy * vy;
        double t = len2 > 0 ? ((px - ax) * vx + (py - ay) * vy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        return std::hypot(px - (ax + t * vx), py - (ay + t * vy));
    };
    auto one_sided = [&](const auto& from, const auto& to) {
        double worst = 0.0;
        for (const auto& [px, py] : from) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i + 1 < to.size(); ++i)
                best = std::min(best, point_segment(px, py, to[i].first, to[i].second,
                                                    to[i + 1].first, to[i + 1].second));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

} // namespace cycleguard
