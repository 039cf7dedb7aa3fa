#pragma once

#include <cmath>
#include <functional>

#include "cycleguard/coefficient.hpp"

namespace cycleguard {

namespace detail {

inline double simpson(const std::function<double(double)>& f, double a, double fa, double m,
                      double fm, double b, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double fa,
                                   double b, double fb, double m, double fm, double whole,
                                   double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(f, a, fa, lm, flm, m, fm);
    double right = simpson(f, m, fm, rm, frm, b, fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol) {
    if (a == b) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fb = f(b), fm = f(m);
    double whole = simpson(f, a, fa, m, fm, b, fb);
    return adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

} // namespace detail

/// G(x) = integral of g from 0 to x. Exact antiderivative for polynomial g,
/// adaptive quadrature (absolute tolerance 1e-12) otherwise.
class GEvaluator {
public:
    explicit GEvaluator(Coefficient g) : g_(std::move(g)) {
        if (g_.is_polynomial()) G_ = g_.poly().antiderivative();
    }

    double operator()(double x) const {
        if (g_.is_polynomial()) return G_.eval(x);
        return detail::adaptive_simpson([this](double t) { return g_.eval(t); }, 0.0, x, 1e-12);
    }

    Rat exact(const Rat& x) const { return G_.eval(x); }
    bool is_exact() const { return g_.is_polynomial(); }
    const Polynomial& poly() const { return G_; }
    const Coefficient& g() const { return g_; }

private:
    Coefficient g_;
    Polynomial G_;
};

} // namespace cycleguard
