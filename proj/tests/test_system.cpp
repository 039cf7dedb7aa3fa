#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cycleguard/gallery.hpp"
#include "cycleguard/system.hpp"

using namespace cycleguard;
using Catch::Approx;

namespace {

StructuredSystem get_structured(const std::string& name) {
    auto sys = gallery_find(name)->make();
    return std::get<StructuredSystem>(sys);
}

GeneralSystem get_general(const std::string& name) {
    auto sys = gallery_find(name)->make();
    return std::get<GeneralSystem>(sys);
}

} // namespace

TEST_CASE("phi") {
    StructuredSystem vdp = get_structured("vdp");
    REQUIRE(vdp.phi(2, 5) == Approx(3.0));

    StructuredSystem fig2 = get_structured("fig2");
    REQUIRE(fig2.phi(0, 0) == Approx(-1.0));
    REQUIRE(fig2.phi(1, 1) == Approx(2.1));

    StructuredSystem center = get_structured("linear-center");
    REQUIRE(center.phi(0.3, -2.0) == 0.0);
    REQUIRE_THROWS_AS(StructuredSystem(Coefficient(Expression::parse("x")), {}, -1.0, 1.0)
                          .phi(2.0, 0.0),
                      OutOfDomainError);
}

TEST_CASE("vector_field") {
    StructuredSystem vdp = get_structured("vdp");
    auto [dx, dy] = vdp.vector_field(1.0, 0.0);
    REQUIRE(dx == Approx(0.0).margin(1e-15));
    REQUIRE(dy == Approx(-1.0));

    auto [ox, oy] = vdp.vector_field(0.0, 0.0);
    REQUIRE(ox == 0.0);
    REQUIRE(oy == 0.0);

    GeneralSystem two = get_general("two-cycles");
    auto [px, py] = two.vector_field(1.0, 0.0);
    REQUIRE(px == Approx(-1.0));
    REQUIRE(py == Approx(0.0).margin(1e-15));
}

TEST_CASE("A field") {
    StructuredSystem vdp = get_structured("vdp");
    REQUIRE(vdp.A(1, 1) == Approx(2.0));
    // on the axes A reduces to x^2 + y^2 for linear g
    REQUIRE(vdp.A(0.0, 1.5) == Approx(2.25));
    REQUIRE(vdp.A(-2.0, 0.0) == Approx(4.0));

    StructuredSystem fig2 = get_structured("fig2");
    REQUIRE(fig2.A(1, 1) == Approx(4.1));
}

TEST_CASE("nu") {
    StructuredSystem center = get_structured("linear-center");
    REQUIRE(center.nu(0.7, -0.3) == Approx(0.0).margin(1e-15));

    StructuredSystem vdp = get_structured("vdp");
    REQUIRE(vdp.nu(1, 1) == Approx(-1.0));

    // nu * A = -y^2 (x phi_x + y phi_y): starshape(1,1) = 8.3, A(1,1) = 4.1
    StructuredSystem fig2 = get_structured("fig2");
    REQUIRE(fig2.nu(1, 1) == Approx(-8.3 / 4.1));

    REQUIRE_THROWS_AS(vdp.nu(0, 0), AngularSpeedZeroError);
}

TEST_CASE("divergence") {
    StructuredSystem vdp = get_structured("vdp");
    REQUIRE(vdp.divergence(1, 1) == Approx(0.0).margin(1e-15));

    StructuredSystem quartic = get_structured("quartic-demo");
    // on y = 0 only the f_1 term survives
    REQUIRE(quartic.divergence(2.0, 0.0) == Approx(-3.0));

    GeneralSystem two = get_general("two-cycles");
    double r2 = (3.0 - std::sqrt(5.0)) / 2.0;
    REQUIRE(two.divergence(std::sqrt(r2), 0.0) == Approx(5.0 - 3.0 * std::sqrt(5.0)).epsilon(1e-9));
}

TEST_CASE("starshape form") {
    StructuredSystem fig2 = get_structured("fig2");
    REQUIRE(fig2.starshape(1, 1) == Approx(8.3));

    StructuredSystem constant_damping(Coefficient(Expression::parse("x")),
                                      {{1, Coefficient(Expression::parse("5"))}});
    REQUIRE(constant_damping.starshape(1.7, -0.4) == Approx(0.0).margin(1e-15));

    StructuredSystem lone_cubic(Coefficient(Expression::parse("x")),
                                {{3, Coefficient(Expression::parse("x^4 - x^2 + 1"))}});
    REQUIRE(lone_cubic.starshape(1, 1) == Approx(4.0));
}

TEST_CASE("energy") {
    StructuredSystem center = get_structured("linear-center");
    REQUIRE(center.energy(1, 1) == Approx(1.0));

    StructuredSystem cubic = get_structured("cubic-g");
    REQUIRE(cubic.energy(1, 0) == Approx(0.75));
    REQUIRE(cubic.energy(-2, 0) == Approx(2.0 + 4.0));

    StructuredSystem vdp = get_structured("vdp");
    REQUIRE(vdp.energy_rate(1, 1) == Approx(0.0).margin(1e-15));
    REQUIRE(vdp.energy_rate(0, 1) == Approx(1.0));  // -y^2 (x^2-1) at x=0
}

TEST_CASE("radial identity r A_r = 2A + xy (x phi_x + y phi_y)") {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> pick(-2.5, 2.5);
    for (const char* name : {"linear-center", "vdp", "fig2", "quartic-demo", "gauss"}) {
        StructuredSystem s = get_structured(name);
        int tested = 0;
        while (tested < 1000) {
            double x = pick(rng), y = pick(rng);
            double r = std::hypot(x, y);
            if (r < 0.1) continue;
            ++tested;
            double h = 1e-6;
            double ux = x / r, uy = y / r;
            double Ap = s.A(x + h * ux, y + h * uy);
            double Am = s.A(x - h * ux, y - h * uy);
            double lhs = r * (Ap - Am) / (2 * h);
            double rhs = 2 * s.A(x, y) + x * y * s.starshape(x, y);
            REQUIRE(lhs == Approx(rhs).epsilon(1e-5).margin(1e-5));
        }
    }
}

TEST_CASE("structured nu equals the symbolic general-system quotient") {
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> pick(-2.5, 2.5);
    for (const char* name : {"vdp", "fig2", "quartic-demo", "gauss", "cubic-g"}) {
        StructuredSystem s = get_structured(name);
        GeneralSystem gen = to_general(s);
        int tested = 0;
        while (tested < 500) {
            double x = pick(rng), y = pick(rng);
            if (std::fabs(s.A(x, y)) <= 1e-6) continue;
            ++tested;
            double a = s.nu(x, y), b = gen.nu(x, y);
            REQUIRE(a == Approx(b).epsilon(1e-10).margin(1e-10));
            double c = s.divergence(x, y), d = gen.divergence(x, y);
            REQUIRE(c == Approx(d).epsilon(1e-10).margin(1e-10));
        }
    }
}

TEST_CASE("nu A identity for linear-g structured systems") {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> pick(-2.0, 2.0);
    for (const char* name : {"vdp", "fig2", "quartic-demo"}) {
        StructuredSystem s = get_structured(name);
        int tested = 0;
        while (tested < 500) {
            double x = pick(rng), y = pick(rng);
            double a = s.A(x, y);
            if (std::fabs(a) <= 1e-6) continue;
            ++tested;
            double lhs = s.nu(x, y) * a;
            double rhs = -y * y * s.starshape(x, y);
            REQUIRE(lhs == Approx(rhs).epsilon(1e-10).margin(1e-12));
        }
    }
}

TEST_CASE("trinomial decompositions") {
    StructuredSystem fig2 = get_structured("fig2");
    REQUIRE(fig2.trinomials().has_value());
    DecompositionCheck check = verify_decomposition(fig2, *fig2.trinomials());
    REQUIRE(check.ok);
    REQUIRE(check.exact);

    StructuredSystem quartic = get_structured("quartic-demo");
    TrinomialDecomposition d = default_decomposition(quartic);
    REQUIRE(d.size() == 2);
    REQUIRE(d[0].r == 0);
    REQUIRE(d[1].r == 1);
    REQUIRE(verify_decomposition(quartic, d).ok);

    StructuredSystem gauss = get_structured("gauss");
    DecompositionCheck sampled = verify_decomposition(gauss, default_decomposition(gauss));
    REQUIRE(sampled.ok);
    REQUIRE_FALSE(sampled.exact);

    // an even term has no default grouping
    REQUIRE_THROWS_AS(default_decomposition(fig2), DecompositionRequiredError);

    // a wrong decomposition is rejected with a detail message
    TrinomialDecomposition bad = d;
    bad[0].eta = Coefficient(Expression::parse("x^2"));
    REQUIRE_FALSE(verify_decomposition(quartic, bad).ok);
}

TEST_CASE("shift translates the critical point") {
    auto sys = parse_system_text(
        R"({"kind":"structured","g":"x - 2","f":{"1":"x^2 - 1"},"shift":2.0})");
    auto& s = std::get<StructuredSystem>(sys);
    REQUIRE(s.g().eval(0.0) == Approx(0.0));
    REQUIRE(s.linear_g());
    REQUIRE(s.f_at(1).eval(0.0) == Approx(3.0));  // (x+2)^2 - 1 at 0
}

TEST_CASE("system file validation") {
    REQUIRE_THROWS_AS(parse_system_text(R"({"kind":"nope"})"), InvalidSystemError);
    REQUIRE_THROWS_AS(parse_system_text(R"({"kind":"structured"})"), InvalidSystemError);
    REQUIRE_THROWS_AS(parse_system_text(R"({"kind":"general","P":"y"})"), InvalidSystemError);
    REQUIRE_THROWS_AS(
        parse_system_text(R"({"kind":"structured","g":"x","domain":[1, 2]})"),
        InvalidSystemError);
    REQUIRE_THROWS_AS(
        parse_system_text(
            R"({"kind":"structured","g":"x","f":{"1":"x"},
                "trinomials":[{"eta":"x^2","h":1,"r":0}]})"),
        InvalidSystemError);
    REQUIRE_THROWS_AS(parse_system_text(R"({"kind":"structured","g":"x(" })"), SyntaxError);
}

TEST_CASE("gallery entries all parse") {
    for (const auto& entry : gallery()) {
        PlanarSystem sys = entry.make();
        auto [dx, dy] = vector_field(sys, 0.5, 0.25);
        REQUIRE(std::isfinite(dx));
        REQUIRE(std::isfinite(dy));
    }
}
