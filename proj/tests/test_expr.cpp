#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "cycleguard/expr.hpp"

using namespace cycleguard;
using Catch::Approx;

TEST_CASE("parse basics") {
    Expression x = Expression::parse("x");
    REQUIRE(x.print() == "x");
    REQUIRE(x.eval(3.0, 0.0) == 3.0);

    Expression e = Expression::parse("-exp(-x^2)");
    REQUIRE(e.print() == "-exp(-(x^2))");
    REQUIRE(e.eval(0.0) == Approx(-1.0));
    REQUIRE(e.eval(1.0) == Approx(-std::exp(-1.0)));

    Expression q = Expression::parse("x^4 - x^2 + 1");
    REQUIRE(q.eval(2.0) == Approx(13.0));
    REQUIRE(q.eval(1.0) == Approx(1.0));
}

TEST_CASE("eval basics") {
    REQUIRE(Expression::parse("x*y").eval(3, 4) == Approx(12.0));
    REQUIRE(Expression::parse("1 - exp(-x^2)").eval(0, 0) == Approx(0.0));
}

TEST_CASE("constant folding keeps rationals exact") {
    Expression c = Expression::parse("3191/100");
    REQUIRE(c.is_constant());
    REQUIRE(c.constant_value() == Rat(3191, 100));
    Expression d = Expression::parse("0.5 + 1/4");
    REQUIRE(d.constant_value() == Rat(3, 4));
    Expression sci = Expression::parse("1e-3");
    REQUIRE(sci.constant_value() == Rat(1, 1000));
}

TEST_CASE("syntax errors carry byte offsets") {
    REQUIRE_THROWS_AS(Expression::parse(""), SyntaxError);
    REQUIRE_THROWS_AS(Expression::parse("z + 1"), UnknownIdentifierError);
    REQUIRE_THROWS_AS(Expression::parse("foo(x)"), UnknownIdentifierError);
    try {
        Expression::parse("2x");
        FAIL("implicit multiplication must not parse");
    } catch (const SyntaxError& err) {
        REQUIRE(err.offset == 1);
    }
    REQUIRE_THROWS_AS(Expression::parse("x^y"), SyntaxError);
    REQUIRE_THROWS_AS(Expression::parse("(x"), SyntaxError);
}

TEST_CASE("domain errors are reported, not NaN") {
    REQUIRE_THROWS_AS(Expression::parse("sqrt(x)").eval(-1.0), EvalDomainError);
    REQUIRE_THROWS_AS(Expression::parse("1/x").eval(0.0), EvalDomainError);
    Expression dabs = Expression::parse("abs(x)").differentiate(Var::X);
    REQUIRE(dabs.eval(2.0) == Approx(1.0));
    REQUIRE(dabs.eval(-2.0) == Approx(-1.0));
    REQUIRE_THROWS_AS(dabs.eval(0.0), EvalDomainError);
}

TEST_CASE("symbolic derivatives match hand values") {
    Expression q = Expression::parse("x^4 - x^2 + 1");
    Expression dq = q.differentiate(Var::X);
    REQUIRE(dq.eval(1.0) == Approx(2.0));   // 4x^3 - 2x at 1
    REQUIRE(dq.eval(2.0) == Approx(28.0));

    Expression m = Expression::parse("x*y^2");
    REQUIRE(m.differentiate(Var::Y).eval(3.0, 5.0) == Approx(30.0));  // 2xy

    Expression g = Expression::parse("-exp(-x^2)");
    REQUIRE(g.differentiate(Var::X).eval(1.0) == Approx(2.0 * std::exp(-1.0)));
}

TEST_CASE("mixed partials commute") {
    std::vector<std::string> sources = {
        "x*y^2 + sin(x)*cos(y)", "exp(-x^2)*y^3", "(x^2+1)*y^2 + x^2/10*y + x^2 - 1",
        "sqrt(1 + x^2 + y^2)"};
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> pick(-2.0, 2.0);
    for (const auto& src : sources) {
        Expression e = Expression::parse(src);
        Expression dxy = e.differentiate(Var::X).differentiate(Var::Y);
        Expression dyx = e.differentiate(Var::Y).differentiate(Var::X);
        for (int i = 0; i < 100; ++i) {
            double x = pick(rng), y = pick(rng);
            double a = dxy.eval(x, y), b = dyx.eval(x, y);
            REQUIRE(std::fabs(a - b) <= 1e-12 * (1.0 + std::fabs(a)));
        }
    }
}

TEST_CASE("derivative matches central finite difference") {
    std::vector<std::string> sources = {
        "x^2 - 1",
        "x^4 - x^2 + 1",
        "-exp(-x^2)",
        "1 - exp(-x^2)",
        "(x^2+1)*y^2 + (x^2/10)*y + x^2 - 1",
        "x + x^3",
        "x*exp(-x^2)",
        "y*cos(x^2+y^2) - x*sin(x^2+y^2)",
    };
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> pick(-2.0, 2.0);
    const double h = 1e-5;
    for (const auto& src : sources) {
        Expression e = Expression::parse(src);
        Expression dx = e.differentiate(Var::X);
        Expression dy = e.differentiate(Var::Y);
        for (int i = 0; i < 1000; ++i) {
            double x = pick(rng), y = pick(rng);
            double fd_x = (e.eval(x + h, y) - e.eval(x - h, y)) / (2 * h);
            double fd_y = (e.eval(x, y + h) - e.eval(x, y - h)) / (2 * h);
            double sx = dx.eval(x, y), sy = dy.eval(x, y);
            REQUIRE(std::fabs(sx - fd_x) <= 1e-6 * (1.0 + std::fabs(sx)));
            REQUIRE(std::fabs(sy - fd_y) <= 1e-6 * (1.0 + std::fabs(sy)));
        }
    }
}

TEST_CASE("printer round-trips") {
    std::vector<std::string> sources = {
        "x",
        "-exp(-x^2)",
        "x^4 - x^2 + 1",
        "(x^2+1)*y^2 + (x^2/10)*y + x^2 - 1",
        "y*cos(x^2+y^2) - x*sin(x^2+y^2)",
        "x^-2 + abs(x - y)",
        "sqrt(x^2 + 1) / (1 + y^2)",
    };
    for (const auto& src : sources) {
        std::string once = Expression::parse(src).print();
        std::string twice = Expression::parse(once).print();
        REQUIRE(once == twice);
    }
}

TEST_CASE("programmatic construction") {
    Expression x = Expression::variable(Var::X);
    Expression y = Expression::variable(Var::Y);
    Expression e = x.pow(2) * y - Expression::constant(Rat(1, 2));
    REQUIRE(e.eval(2.0, 3.0) == Approx(11.5));
    REQUIRE(e.uses(Var::Y));
    REQUIRE_FALSE((x.pow(3) + x).uses(Var::Y));
}
