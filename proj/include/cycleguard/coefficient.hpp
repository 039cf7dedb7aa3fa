#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>

#include "cycleguard/errors.hpp"
#include "cycleguard/expr.hpp"
#include "cycleguard/poly.hpp"

namespace cycleguard {

/// A single-variable coefficient function of x. Exact polynomial when possible,
/// symbolic expression otherwise, or an opaque evaluator (used by pushforwards).
class Coefficient {
public:
    struct BlackBox {
        std::function<double(double)> value;
        std::function<double(double)> deriv;  // optional; central difference when absent
    };

    Coefficient() : impl_(Polynomial::zero()) {}
    Coefficient(Polynomial p) : impl_(std::move(p)) {}
    Coefficient(Expression e) {
        if (e.uses(Var::Y)) throw Error("coefficient functions depend on x only");
        try {
            impl_ = poly_from_expression(e);
        } catch (const NotPolynomialError&) {
            Expression d = e.differentiate(Var::X);
            compiled_ = std::make_shared<Compiled>(Compiled{e.compile(), d.compile()});
            dexpr_ = std::make_shared<Expression>(std::move(d));
            impl_ = std::move(e);
        }
    }
    static Coefficient black_box(std::function<double(double)> value,
                                 std::function<double(double)> deriv = nullptr) {
        Coefficient c;
        c.impl_ = BlackBox{std::move(value), std::move(deriv)};
        return c;
    }

    double eval(double x) const {
        if (const auto* p = std::get_if<Polynomial>(&impl_)) return p->eval(x);
        if (std::holds_alternative<Expression>(impl_)) return compiled_->value.eval(x);
        return std::get<BlackBox>(impl_).value(x);
    }

    double deriv_eval(double x) const {
        if (const auto* p = std::get_if<Polynomial>(&impl_)) return p->derivative().eval(x);
        if (std::holds_alternative<Expression>(impl_)) return compiled_->deriv.eval(x);
        const auto& bb = std::get<BlackBox>(impl_);
        if (bb.deriv) return bb.deriv(x);
        double h = 1e-6 * (1.0 + std::fabs(x));
        return (bb.value(x + h) - bb.value(x - h)) / (2.0 * h);
    }

    bool is_polynomial() const { return std::holds_alternative<Polynomial>(impl_); }
    bool is_expression() const { return std::holds_alternative<Expression>(impl_); }
    bool is_black_box() const { return std::holds_alternative<BlackBox>(impl_); }

    const Polynomial& poly() const {
        if (!is_polynomial()) throw NotPolynomialError("coefficient is not polynomial");
        return std::get<Polynomial>(impl_);
    }
    const Expression& expression() const { return std::get<Expression>(impl_); }

    /// Identically-zero test. Conservative for non-polynomials.
    bool is_zero() const { return is_polynomial() && poly().is_zero(); }

    double at_zero() const { return eval(0.0); }

    Expression to_expression() const {
        if (is_polynomial()) return poly().to_expression();
        if (is_expression()) return expression();
        throw Error("black-box coefficient has no closed form");
    }

    std::string describe() const {
        if (is_polynomial()) return poly().str();
        if (is_expression()) return expression().print();
        return "<black box>";
    }

private:
    struct Compiled {
        CompiledExpr value, deriv;
    };
    std::variant<Polynomial, Expression, BlackBox> impl_;
    std::shared_ptr<const Expression> dexpr_;   // cached symbolic derivative
    std::shared_ptr<const Compiled> compiled_;  // tape form of both
};

} // namespace cycleguard
