#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "cycleguard/poly.hpp"

using namespace cycleguard;
using Catch::Approx;

namespace {

Polynomial P(const std::string& src) { return poly_from_expression(Expression::parse(src)); }

// Independent root-count oracle: walk an evaluation grid, counting exact zeros
// and sign changes between consecutive nonzero samples (crossings off the grid).
int grid_root_count(const Polynomial& p, double lo, double hi, double res) {
    int count = 0;
    int last_sign = 0;
    bool zero_since_last_sign = false;
    long n = static_cast<long>((hi - lo) / res);
    for (long i = 0; i <= n; ++i) {
        double x = lo + i * res;
        double v = p.eval(x);
        if (v == 0.0) {
            ++count;
            zero_since_last_sign = true;
            continue;
        }
        int s = v > 0 ? 1 : -1;
        if (last_sign != 0 && s != last_sign && !zero_since_last_sign) ++count;
        last_sign = s;
        zero_since_last_sign = false;
    }
    return count;
}

} // namespace

TEST_CASE("poly_from_expression") {
    Polynomial q = P("x^4 - x^2 + 1");
    REQUIRE(q.coeffs() == std::vector<Rat>{Rat(1), Rat(0), Rat(-1), Rat(0), Rat(1)});
    REQUIRE(P("0").is_zero());
    Polynomial sq = P("x^2 + 1") * P("x^2 + 1");
    REQUIRE(sq.coeffs() == std::vector<Rat>{Rat(1), Rat(0), Rat(2), Rat(0), Rat(1)});

    REQUIRE_THROWS_AS(P("exp(x)"), NotPolynomialError);
    REQUIRE_THROWS_AS(P("x*y"), NotPolynomialError);
    REQUIRE_THROWS_AS(P("1/x"), NotPolynomialError);
    REQUIRE(P("x^2/10").coeff(2) == Rat(1, 10));
}

TEST_CASE("arithmetic and derivative") {
    Polynomial f = P("x^4 - x^2 + 1");
    REQUIRE(f.derivative() == P("4*x^3 - 2*x"));
    REQUIRE((f * Polynomial::zero()).is_zero());

    // x*f' + 2k*f at k=1
    Polynomial combo = Polynomial::x() * f.derivative() + Rat(2) * f;
    REQUIRE(combo == P("6*x^4 - 4*x^2 + 2"));

    REQUIRE(f.eval(Rat(2)) == Rat(13));
    REQUIRE(f.eval(2.0) == Approx(13.0));
    REQUIRE(P("x + x^3").antiderivative() == P("x^2/2 + x^4/4"));
}

TEST_CASE("degree is additive for products") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> pick_deg(0, 6);
    std::uniform_int_distribution<long> pick_c(-5, 5);
    for (int trial = 0; trial < 200; ++trial) {
        auto random_poly = [&] {
            int d = pick_deg(rng);
            std::vector<Rat> c(d + 1);
            for (auto& v : c) v = Rat(pick_c(rng));
            if (c.back() == 0) c.back() = 1;
            return Polynomial(c);
        };
        Polynomial a = random_poly(), b = random_poly();
        REQUIRE((a * b).degree() == a.degree() + b.degree());
    }
}

TEST_CASE("sign_on_interval certifies the Remark-2 style combinations") {
    SignVerdict v = sign_on_interval(P("6*x^4 - 4*x^2 + 2"), RatInterval::all(),
                                     SignRequirement::NonNegative);
    REQUIRE(v.proved());

    v = sign_on_interval(P("x^2 - 1"), RatInterval::all(), SignRequirement::NonNegative);
    REQUIRE(v.kind == SignVerdict::Kind::Refuted);
    REQUIRE(v.witness.has_value());
    REQUIRE(*v.witness == Rat(0));
    REQUIRE(v.witness_value == Approx(-1.0));

    v = sign_on_interval(P("-(3191/100)*x^4 - 16*x^2"), RatInterval::all(),
                         SignRequirement::NonPositive);
    REQUIRE(v.proved());
}

TEST_CASE("strict positivity of the quartic family") {
    for (long k = 1; k <= 3; ++k) {
        // (4+2k)x^4 - (2+2k)x^2 + 2k, as a z-quadratic has discriminant 4 - 24k - 12k^2
        Rat disc = Rat(4) - Rat(24) * k - Rat(12) * k * k;
        REQUIRE(disc < 0);
        std::vector<Rat> c = {Rat(2 * k), Rat(0), Rat(-(2 + 2 * k)), Rat(0), Rat(4 + 2 * k)};
        Polynomial p{c};
        REQUIRE(sign_on_interval(p, RatInterval::all(), SignRequirement::StrictlyPositive)
                    .proved());
        REQUIRE(count_distinct_roots(p, std::nullopt, std::nullopt) == 0);
    }
}

TEST_CASE("interval endpoint handling") {
    Polynomial x = Polynomial::x();
    REQUIRE(sign_on_interval(x, RatInterval::above(Rat(0)), SignRequirement::StrictlyPositive)
                .proved());
    REQUIRE(sign_on_interval(x, RatInterval::closed(Rat(0), Rat(1)),
                             SignRequirement::StrictlyPositive)
                .kind == SignVerdict::Kind::Refuted);
    REQUIRE(sign_on_interval(x, RatInterval::below(Rat(0)), SignRequirement::NonPositive)
                .proved());

    // monotonicity refutation pattern: 4x^3 - 2x is negative inside (0, 1/sqrt(2))
    SignVerdict v = sign_on_interval(P("4*x^3 - 2*x"), RatInterval::above(Rat(0)),
                                     SignRequirement::NonNegative);
    REQUIRE(v.kind == SignVerdict::Kind::Refuted);
    REQUIRE(v.witness.has_value());
    double w = to_double(*v.witness);
    REQUIRE(w > 0.0);
    REQUIRE(v.witness_value < -1e-12);

    // zero polynomial passes the weak signs only
    REQUIRE(sign_on_interval(Polynomial::zero(), RatInterval::all(),
                             SignRequirement::NonNegative)
                .proved());
    REQUIRE(sign_on_interval(Polynomial::zero(), RatInterval::all(),
                             SignRequirement::StrictlyPositive)
                .kind == SignVerdict::Kind::Refuted);
}

TEST_CASE("sturm count matches the evaluation-grid oracle") {
    std::vector<Polynomial> gallery = {
        P("x^2 - 1"),
        P("4*x^3 - 2*x"),
        P("6*x^4 - 4*x^2 + 2"),
        P("-(3191/100)*x^4 - 16*x^2"),
        P("x^4 - x^2 + 1"),
        P("2*x^2"),
        P("x*(x^2-2)*(x^2-3)"),
        P("8*x^4 - 6*x^2 + 4"),
    };
    for (const auto& p : gallery) {
        REQUIRE(p.eval(Rat(-2)) != 0);
        REQUIRE(p.eval(Rat(2)) != 0);
        int sturm = count_distinct_roots(p, Rat(-2), Rat(2));
        int grid = grid_root_count(p, -2.0, 2.0, 1e-4);
        INFO("p = " << p.str());
        REQUIRE(sturm == grid);
    }
}

TEST_CASE("proved nonnegativity survives random sampling") {
    std::vector<Polynomial> proved = {P("6*x^4 - 4*x^2 + 2"), P("2*x^2"),
                                      P("x^4 - x^2 + 1"), P("(x^2+1)^2")};
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> pick(-50.0, 50.0);
    for (const auto& p : proved) {
        REQUIRE(sign_on_interval(p, RatInterval::all(), SignRequirement::NonNegative).proved());
        for (int i = 0; i < 10000; ++i) REQUIRE(p.eval(pick(rng)) >= -1e-12);
    }
}

TEST_CASE("refutation witnesses violate exactly") {
    std::vector<std::pair<Polynomial, SignRequirement>> cases = {
        {P("x^2 - 1"), SignRequirement::NonNegative},
        {P("-x^2 + 1/2"), SignRequirement::NonPositive},
        {P("4*x^3 - 2*x"), SignRequirement::NonNegative},
    };
    for (const auto& [p, req] : cases) {
        SignVerdict v = sign_on_interval(p, RatInterval::all(), req);
        REQUIRE(v.kind == SignVerdict::Kind::Refuted);
        REQUIRE(v.witness.has_value());
        Rat exact = p.eval(*v.witness);
        if (req == SignRequirement::NonNegative) {
            REQUIRE(exact < 0);
            REQUIRE(to_double(exact) < -1e-12);
        } else {
            REQUIRE(exact > 0);
            REQUIRE(to_double(exact) > 1e-12);
        }
    }
}

TEST_CASE("cauchy_bound") {
    Polynomial one = Polynomial::constant(Rat(1));
    Polynomial zero = Polynomial::zero();

    double z = cauchy_bound(one, zero, Polynomial::constant(Rat(-1)), 1.0);
    REQUIRE(z == Approx(2.0).margin(1e-9));

    REQUIRE(cauchy_bound(one, zero, zero, 0.5) == Approx(1.0).margin(1e-9));

    double z2 = cauchy_bound(P("x^2 + 1"), P("x^2/10"), P("x^2 - 1"), 1.0);
    REQUIRE(z2 >= 2.0);
    REQUIRE(z2 == Approx(2.0).margin(1e-3));

    REQUIRE_THROWS_AS(cauchy_bound(Polynomial::x(), zero, zero, 1.0), KappaNotPositiveError);
    REQUIRE_THROWS_AS(cauchy_bound(zero, zero, one, 1.0), KappaNotPositiveError);
}
