#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cycleguard/coefficient.hpp"
#include "cycleguard/quadrature.hpp"

namespace cycleguard {

/// One y-trinomial kappa*y^(2h+2r) + tau*y^(h+2r) + eta*y^(2r).
struct TrinomialPiece {
    Coefficient kappa, tau, eta;
    int h = 1;
    int r = 0;
};
using TrinomialDecomposition = std::vector<TrinomialPiece>;

/// x' = y, y' = -g(x) - sum_j f_j(x) y^j on the strip (a, b) x R.
class StructuredSystem {
public:
    StructuredSystem(Coefficient g, std::map<int, Coefficient> f,
                     double domain_lo = -std::numeric_limits<double>::infinity(),
                     double domain_hi = std::numeric_limits<double>::infinity(),
                     std::optional<TrinomialDecomposition> trinomials = std::nullopt)
        : g_(std::move(g)),
          f_(std::move(f)),
          lo_(domain_lo),
          hi_(domain_hi),
          trinomials_(std::move(trinomials)),
          G_(std::make_shared<GEvaluator>(g_)) {
        if (!(lo_ < 0.0 && 0.0 < hi_)) throw Error("domain must contain 0 in its interior");
        for (auto& [j, c] : f_)
            if (j < 1) throw Error("damping powers start at y^1");
        if (g_.is_polynomial()) {
            const Polynomial& p = g_.poly();
            if (p.degree() == 1 && p.coeff(0) == 0 && p.coeff(1) > 0) {
                linear_k_ = to_double(p.coeff(1));
            }
        }
    }

    const Coefficient& g() const { return g_; }
    const std::map<int, Coefficient>& f() const { return f_; }
    const Coefficient& f_at(int j) const {
        static const Coefficient kZero{};
        auto it = f_.find(j);
        return it == f_.end() ? kZero : it->second;
    }
    int max_power() const { return f_.empty() ? 0 : f_.rbegin()->first; }

    double domain_lo() const { return lo_; }
    double domain_hi() const { return hi_; }
    bool in_domain(double x) const { return x > lo_ && x < hi_; }
    void require_in_domain(double x) const {
        if (!in_domain(x))
            throw OutOfDomainError("x = " + std::to_string(x) + " outside (" +
                                   std::to_string(lo_) + ", " + std::to_string(hi_) + ")");
    }

    /// g(x) = k x with k > 0.
    bool linear_g() const { return linear_k_.has_value(); }
    double linear_k() const { return linear_k_.value(); }

    const std::optional<TrinomialDecomposition>& trinomials() const { return trinomials_; }

    // phi(x, y) = sum_j f_j(x) y^(j-1)
    double phi(double x, double y) const {
        require_in_domain(x);
        double acc = 0.0;
        for (const auto& [j, c] : f_) acc += c.eval(x) * pow_int(y, j - 1);
        return acc;
    }
    double phi_x(double x, double y) const {
        require_in_domain(x);
        double acc = 0.0;
        for (const auto& [j, c] : f_) acc += c.deriv_eval(x) * pow_int(y, j - 1);
        return acc;
    }
    double phi_y(double x, double y) const {
        require_in_domain(x);
        double acc = 0.0;
        for (const auto& [j, c] : f_)
            if (j >= 2) acc += (j - 1) * c.eval(x) * pow_int(y, j - 2);
        return acc;
    }

    std::pair<double, double> vector_field(double x, double y) const {
        require_in_domain(x);
        return {y, -g_.eval(x) - y * phi(x, y)};
    }

    // A = y x' - x y' = y^2 + x g(x) + x y phi(x, y)
    double A(double x, double y) const {
        require_in_domain(x);
        return y * y + x * g_.eval(x) + x * y * phi(x, y);
    }

    // x phi_x + y phi_y = sum_j (x f_j' + (j-1) f_j) y^(j-1)
    double starshape(double x, double y) const {
        require_in_domain(x);
        double acc = 0.0;
        for (const auto& [j, c] : f_)
            acc += (x * c.deriv_eval(x) + (j - 1) * c.eval(x)) * pow_int(y, j - 1);
        return acc;
    }

    double divergence(double x, double y) const {
        require_in_domain(x);
        double acc = 0.0;
        for (const auto& [j, c] : f_) acc += j * c.eval(x) * pow_int(y, j - 1);
        return -acc;
    }

    // nu A = y (g - x g') - y^2 (x phi_x + y phi_y); the first term vanishes for g = kx.
    double nu(double x, double y) const {
        double a = A(x, y);
        if (std::fabs(a) < 1e-12 * (1.0 + x * x + y * y))
            throw AngularSpeedZeroError("A vanishes near (" + std::to_string(x) + ", " +
                                        std::to_string(y) + ")");
        double num = y * (g_.eval(x) - x * g_.deriv_eval(x)) - y * y * starshape(x, y);
        return num / a;
    }

    double energy(double x, double y) const {
        require_in_domain(x);
        return (*G_)(x) + 0.5 * y * y;
    }
    double energy_rate(double x, double y) const {
        return -y * y * phi(x, y);
    }
    const GEvaluator& G() const { return *G_; }

private:
    static double pow_int(double y, int e) {
        double acc = 1.0;
        for (int i = 0; i < e; ++i) acc *= y;
        return acc;
    }

    Coefficient g_;
    std::map<int, Coefficient> f_;
    double lo_, hi_;
    std::optional<TrinomialDecomposition> trinomials_;
    std::shared_ptr<const GEvaluator> G_;
    std::optional<double> linear_k_;
};

/// x' = P(x, y), y' = Q(x, y) with symbolic partial derivatives.
class GeneralSystem {
public:
    GeneralSystem(Expression P, Expression Q)
        : P_(std::move(P)),
          Q_(std::move(Q)),
          Px_(P_.differentiate(Var::X)),
          Py_(P_.differentiate(Var::Y)),
          Qx_(Q_.differentiate(Var::X)),
          Qy_(Q_.differentiate(Var::Y)),
          cP_(P_.compile()),
          cQ_(Q_.compile()),
          cPx_(Px_.compile()),
          cPy_(Py_.compile()),
          cQx_(Qx_.compile()),
          cQy_(Qy_.compile()) {}

    const Expression& P() const { return P_; }
    const Expression& Q() const { return Q_; }
    const CompiledExpr& compiled_P() const { return cP_; }
    const CompiledExpr& compiled_Q() const { return cQ_; }

    std::pair<double, double> vector_field(double x, double y) const {
        return {cP_.eval(x, y), cQ_.eval(x, y)};
    }

    double A(double x, double y) const { return y * cP_.eval(x, y) - x * cQ_.eval(x, y); }

    double divergence(double x, double y) const { return cPx_.eval(x, y) + cQy_.eval(x, y); }

    double nu(double x, double y) const {
        double a = A(x, y);
        if (std::fabs(a) < 1e-12 * (1.0 + x * x + y * y))
            throw AngularSpeedZeroError("A vanishes near (" + std::to_string(x) + ", " +
                                        std::to_string(y) + ")");
        double p = cP_.eval(x, y), q = cQ_.eval(x, y);
        double num = p * (x * cQx_.eval(x, y) + y * cQy_.eval(x, y)) -
                     q * (x * cPx_.eval(x, y) + y * cPy_.eval(x, y));
        return num / a;
    }

private:
    Expression P_, Q_, Px_, Py_, Qx_, Qy_;
    CompiledExpr cP_, cQ_, cPx_, cPy_, cQx_, cQy_;
};

using PlanarSystem = std::variant<StructuredSystem, GeneralSystem>;

/// The equivalent (P, Q) form with closed-form coefficients.
inline GeneralSystem to_general(const StructuredSystem& s) {
    Expression y = Expression::variable(Var::Y);
    Expression Q = -s.g().to_expression();
    for (const auto& [j, c] : s.f()) Q = Q - c.to_expression() * y.pow(j);
    return GeneralSystem(y, Q);
}

inline std::pair<double, double> vector_field(const PlanarSystem& sys, double x, double y) {
    return std::visit([&](const auto& s) { return s.vector_field(x, y); }, sys);
}
inline double A_field(const PlanarSystem& sys, double x, double y) {
    return std::visit([&](const auto& s) { return s.A(x, y); }, sys);
}
inline double nu_field(const PlanarSystem& sys, double x, double y) {
    return std::visit([&](const auto& s) { return s.nu(x, y); }, sys);
}
inline double divergence_field(const PlanarSystem& sys, double x, double y) {
    return std::visit([&](const auto& s) { return s.divergence(x, y); }, sys);
}
inline bool system_in_domain(const PlanarSystem& sys, double x) {
    if (const auto* s = std::get_if<StructuredSystem>(&sys)) return s->in_domain(x);
    return true;
}

// ---------------------------------------------------------------------------
// Trinomial decompositions.

/// Degenerate decomposition for odd systems: each f_(2k+1) y^(2k) becomes a
/// piece with kappa = tau = 0, eta = f_(2k+1), r = k. Even terms have no
/// canonical grouping, so their presence is an error.
inline TrinomialDecomposition default_decomposition(const StructuredSystem& s) {
    TrinomialDecomposition d;
    for (const auto& [j, c] : s.f()) {
        if (c.is_zero()) continue;
        if (j % 2 == 0)
            throw DecompositionRequiredError(
                "system has an even damping term f_" + std::to_string(j) +
                "; supply an explicit trinomial decomposition");
        TrinomialPiece piece;
        piece.eta = c;
        piece.h = 1;
        piece.r = (j - 1) / 2;
        d.push_back(std::move(piece));
    }
    return d;
}

inline TrinomialDecomposition decomposition_or_default(const StructuredSystem& s) {
    if (s.trinomials()) return *s.trinomials();
    return default_decomposition(s);
}

struct DecompositionCheck {
    bool ok = false;
    bool exact = false;  // coefficient-wise comparison vs. random sampling
    std::string detail;
};

/// Verify sum of pieces == sum_j f_j(x) y^(j-1). Exact coefficient comparison
/// when everything is polynomial; 200-point random sampling within 1e-9 otherwise.
inline DecompositionCheck verify_decomposition(const StructuredSystem& s,
                                               const TrinomialDecomposition& d) {
    bool all_poly = s.g().is_polynomial();
    for (const auto& [j, c] : s.f()) all_poly = all_poly && c.is_polynomial();
    for (const auto& p : d)
        all_poly = all_poly && p.kappa.is_polynomial() && p.tau.is_polynomial() &&
                   p.eta.is_polynomial();

    if (all_poly) {
        std::map<int, Polynomial> by_power;
        auto add = [&](int power, const Polynomial& p) {
            auto [it, fresh] = by_power.try_emplace(power, p);
            if (!fresh) it->second = it->second + p;
        };
        for (const auto& p : d) {
            add(2 * p.h + 2 * p.r, p.kappa.poly());
            add(p.h + 2 * p.r, p.tau.poly());
            add(2 * p.r, p.eta.poly());
        }
        for (const auto& [j, c] : s.f()) add(j - 1, -c.poly());
        for (const auto& [power, p] : by_power)
            if (!p.is_zero())
                return {false, true,
                        "mismatch at y^" + std::to_string(power) + ": " + p.str()};
        return {true, true, "coefficient-exact"};
    }

    std::mt19937_64 rng(20240617);
    double xr = std::min(3.0, 0.5 * std::min(-s.domain_lo(), s.domain_hi()));
    if (!std::isfinite(xr) || xr <= 0) xr = 3.0;
    std::uniform_real_distribution<double> px(-xr, xr), py(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        double x = px(rng), y = py(rng);
        double want = s.phi(x, y);
        double got = 0.0;
        for (const auto& p : d) {
            double z = 1.0;
            for (int k = 0; k < p.h; ++k) z *= y;
            double y2r = 1.0;
            for (int k = 0; k < 2 * p.r; ++k) y2r *= y;
            got += (p.kappa.eval(x) * z * z + p.tau.eval(x) * z + p.eta.eval(x)) * y2r;
        }
        if (std::fabs(got - want) > 1e-9 * (1.0 + std::fabs(want)))
            return {false, false,
                    "sampled mismatch at (" + std::to_string(x) + ", " + std::to_string(y) + ")"};
    }
    return {true, false, "verified on 200 samples"};
}

} // namespace cycleguard
