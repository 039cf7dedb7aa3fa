#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cycleguard/systemfile.hpp"

namespace cycleguard {

/// Facts a gallery system is expected to reproduce. "analytic" provenance means
/// a closed form (polar reduction, discriminants); "numeric" means the value was
/// frozen from an independent computation and is re-derived by the test suite.
struct ExpectedFacts {
    int cycle_count = -1;  // -1: not pinned
    std::vector<double> section_points;
    std::vector<int> exponent_signs;     // per cycle, sorted by section point
    std::vector<double> div_integrals;   // NaN entries: not pinned analytically
    std::vector<int> rotations;          // +1 ccw, -1 cw; empty: not pinned
    bool degenerate_continuum = false;
    std::string provenance;
};

struct GalleryEntry {
    std::string name;
    std::string title;
    std::string json_text;
    ExpectedFacts expected;

    PlanarSystem make() const { return parse_system_text(json_text); }
};

inline const std::vector<GalleryEntry>& gallery() {
    static const std::vector<GalleryEntry> entries = [] {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const double pi = M_PI;
        const double s5 = std::sqrt(5.0);
        std::vector<GalleryEntry> g;

        g.push_back({"linear-center",
                     "harmonic oscillator; a continuum of circular orbits",
                     R"json({"kind":"structured","g":"x","f":{}})json",
                     {0, {}, {}, {}, {}, true, "analytic"}});

        g.push_back({"vdp",
                     "Van der Pol oscillator, unit parameter",
                     R"json({"kind":"structured","g":"x","f":{"1":"x^2 - 1"}})json",
                     {1, {nan}, {-1}, {nan}, {-1}, false, "numeric"}});

        g.push_back({"fig2",
                     "cubic-in-y damping with one limit cycle and sign-changing angular speed",
                     R"json({"kind":"structured","g":"x",
                         "f":{"1":"x^2 - 1","2":"x^2/10","3":"x^2 + 1"},
                         "trinomials":[{"kappa":"x^2 + 1","tau":"x^2/10","eta":"x^2 - 1","h":1,"r":0}]})json",
                     {1, {nan}, {-1}, {nan}, {-1}, false, "numeric"}});

        g.push_back({"quartic-demo",
                     "odd damping with the sign-certified quartic cubic coefficient",
                     R"json({"kind":"structured","g":"x","f":{"1":"x^2 - 1","3":"x^4 - x^2 + 1"}})json",
                     {1, {nan}, {-1}, {nan}, {-1}, false, "numeric"}});

        g.push_back({"gauss",
                     "Gaussian damping pair whose energy-dissipation zero set is unbounded",
                     R"json({"kind":"structured","g":"x","f":{"1":"-exp(-x^2)","3":"1 - exp(-x^2)"}})json",
                     {-1, {}, {}, {}, {}, false, "numeric"}});

        g.push_back({"cubic-g",
                     "Van der Pol damping over a cubic restoring force",
                     R"json({"kind":"structured","g":"x + x^3","f":{"1":"x^2 - 1"}})json",
                     {1, {nan}, {-1}, {nan}, {-1}, false, "numeric"}});

        // Two star-shaped circular cycles at r^2 = (3 -+ sqrt(5))/2; the polar
        // reduction r' = r(1 - 3r^2 + r^4), theta' = r^4 - r^2 gives the
        // section points and exponents in closed form.
        g.push_back(
            {"two-cycles",
             "radial quartic with an attracting and a repelling circular cycle",
             R"json({"kind":"general",
                 "P":"y*(x^2 + y^2 - (x^2 + y^2)^2) + x*(1 - 3*(x^2 + y^2) + (x^2 + y^2)^2)",
                 "Q":"-x*(x^2 + y^2 - (x^2 + y^2)^2) + y*(1 - 3*(x^2 + y^2) + (x^2 + y^2)^2)"})json",
             {2,
              {std::sqrt((3.0 - s5) / 2.0), std::sqrt((3.0 + s5) / 2.0)},
              {-1, +1},
              {-2.0 * pi * (5.0 + s5), 2.0 * pi * (5.0 - s5)},
              {-1, +1},
              false,
              "analytic"}});

        // Circular cycles at r^2 = k*pi; r' = -r sin(r^2), theta' = -cos(r^2):
        // on the k-th circle div = -2k*pi*(-1)^k and the period is 2*pi.
        g.push_back({"trig",
                     "trigonometric field with infinitely many alternating circular cycles",
                     R"json({"kind":"general",
                         "P":"y*cos(x^2 + y^2) - x*sin(x^2 + y^2)",
                         "Q":"-x*cos(x^2 + y^2) - y*sin(x^2 + y^2)"})json",
                     {4,
                      {std::sqrt(pi), std::sqrt(2 * pi), std::sqrt(3 * pi), std::sqrt(4 * pi)},
                      {+1, -1, +1, -1},
                      {4 * pi * pi, -8 * pi * pi, 12 * pi * pi, -16 * pi * pi},
                      {+1, -1, +1, -1},
                      false,
                      "analytic"}});

        return g;
    }();
    return entries;
}

inline const GalleryEntry* gallery_find(const std::string& name) {
    for (const auto& e : gallery())
        if (e.name == name) return &e;
    return nullptr;
}

} // namespace cycleguard
