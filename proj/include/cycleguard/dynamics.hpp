#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cycleguard/parallel.hpp"
#include "cycleguard/system.hpp"

namespace cycleguard {

enum class Direction { Forward, Backward };
enum class Termination { Horizon, DomainExit, BlowUp, StepBudget };

namespace detail {

// Dormand-Prince 5(4) pair with the standard quartic dense-output interpolant.
template <int N>
struct Dense {
    double t0 = 0, h = 0;
    std::array<double, N> c0{}, c1{}, c2{}, c3{}, c4{};

    double eval(int i, double theta) const {
        double th1 = 1.0 - theta;
        return c0[i] + theta * (c1[i] + th1 * (c2[i] + theta * (c3[i] + th1 * c4[i])));
    }
};

template <int N, class F>
class Dopri5 {
public:
    using Vec = std::array<double, N>;

    Dopri5(F f, double tol) : f_(std::move(f)) {
        rtol_ = atol_ = std::clamp(tol, 1e-13, 1e-3);
    }

    void start(const Vec& y0) {
        y_ = y0;
        t_ = 0.0;
        f_(y_, k1_);
        double ny = norm(y_), nf = norm(k1_);
        h_ = 0.01 * (1.0 + ny) / (1.0 + nf);
        h_ = std::clamp(h_, 1e-10, 0.1);
    }

    // Advances one accepted step; fills the dense interpolant.
    // Returns false if the step size underflowed.
    bool step(Dense<N>& dense) {
        for (int attempt = 0; attempt < 64; ++attempt) {
            if (!(h_ > 1e-14 * (1.0 + std::fabs(t_)))) return false;
            Vec k2, k3, k4, k5, k6, k7, yn, ytmp;

            stage(ytmp, {a21}, {&k1_});
            f_(ytmp, k2);
            stage(ytmp, {a31, a32}, {&k1_, &k2});
            f_(ytmp, k3);
            stage(ytmp, {a41, a42, a43}, {&k1_, &k2, &k3});
            f_(ytmp, k4);
            stage(ytmp, {a51, a52, a53, a54}, {&k1_, &k2, &k3, &k4});
            f_(ytmp, k5);
            stage(ytmp, {a61, a62, a63, a64, a65}, {&k1_, &k2, &k3, &k4, &k5});
            f_(ytmp, k6);
            stage(yn, {b1, 0.0, b3, b4, b5, b6}, {&k1_, &k2, &k3, &k4, &k5, &k6});
            f_(yn, k7);

            double err = 0.0;
            for (int i = 0; i < N; ++i) {
                double e = h_ * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                 e6 * k6[i] + e7 * k7[i]);
                double sc = atol_ + rtol_ * std::max(std::fabs(y_[i]), std::fabs(yn[i]));
                err += (e / sc) * (e / sc);
            }
            err = std::sqrt(err / N);

            if (err <= 1.0) {
                dense.t0 = t_;
                dense.h = h_;
                for (int i = 0; i < N; ++i) {
                    double ydiff = yn[i] - y_[i];
                    double bspl = h_ * k1_[i] - ydiff;
                    dense.c0[i] = y_[i];
                    dense.c1[i] = ydiff;
                    dense.c2[i] = bspl;
                    dense.c3[i] = ydiff - h_ * k7[i] - bspl;
                    dense.c4[i] = h_ * (d1 * k1_[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                        d6 * k6[i] + d7 * k7[i]);
                }
                t_ += h_;
                y_ = yn;
                k1_ = k7;  // FSAL
                double fac = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
                h_ *= std::clamp(fac, 0.2, 5.0);
                return true;
            }
            h_ *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 1.0);
        }
        return false;
    }

    double t() const { return t_; }
    const Vec& y() const { return y_; }
    void clamp_next_step(double hmax) { h_ = std::min(h_, hmax); }

private:
    static double norm(const Vec& v) {
        double s = 0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    }
    void stage(Vec& out, std::initializer_list<double> coeffs,
               std::initializer_list<const Vec*> ks) {
        out = y_;
        auto c = coeffs.begin();
        for (const Vec* k : ks) {
            if (*c != 0.0)
                for (int i = 0; i < N; ++i) out[i] += h_ * (*c) * (*k)[i];
            ++c;
        }
    }

    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432.0,
                            d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0,
                            d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

    F f_;
    double rtol_, atol_;
    double t_ = 0, h_ = 0;
    Vec y_{}, k1_{};
};

struct PlaneField {
    std::function<void(const std::array<double, 2>&, std::array<double, 2>&)> rhs;
    double dom_lo, dom_hi;
};

// Unchecked evaluators: the integrator tests the strip after each accepted step,
// so stage points may probe slightly outside it.
inline PlaneField make_field(const PlanarSystem& sys, Direction dir) {
    double sgn = dir == Direction::Forward ? 1.0 : -1.0;
    PlaneField field;
    if (const auto* s = std::get_if<StructuredSystem>(&sys)) {
        field.dom_lo = s->domain_lo();
        field.dom_hi = s->domain_hi();
        field.rhs = [s, sgn](const std::array<double, 2>& y, std::array<double, 2>& dy) {
            double phi = 0.0;
            for (const auto& [j, c] : s->f()) {
                double power = 1.0;
                for (int k = 0; k < j - 1; ++k) power *= y[1];
                phi += c.eval(y[0]) * power;
            }
            dy[0] = sgn * y[1];
            dy[1] = sgn * (-s->g().eval(y[0]) - y[1] * phi);
        };
    } else {
        const auto* gsys = std::get_if<GeneralSystem>(&sys);
        field.dom_lo = -std::numeric_limits<double>::infinity();
        field.dom_hi = std::numeric_limits<double>::infinity();
        field.rhs = [gsys, sgn](const std::array<double, 2>& y, std::array<double, 2>& dy) {
            dy[0] = sgn * gsys->compiled_P().eval(y[0], y[1]);
            dy[1] = sgn * gsys->compiled_Q().eval(y[0], y[1]);
        };
    }
    return field;
}

} // namespace detail

struct OrbitSample {
    double t, x, y;
};

struct Orbit {
    std::vector<OrbitSample> samples;          // accepted step endpoints, t strictly increasing
    std::vector<detail::Dense<2>> dense;       // one interpolant per step
    Direction direction = Direction::Forward;
    Termination termination = Termination::Horizon;
    double final_time = 0;

    const OrbitSample& last() const { return samples.back(); }

    /// Interpolated state at time t (within the integrated span).
    std::pair<double, double> at(double t) const {
        if (dense.empty()) return {samples.front().x, samples.front().y};
        std::size_t lo = 0, hi = dense.size();
        while (lo + 1 < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (dense[mid].t0 <= t) lo = mid;
            else hi = mid;
        }
        const auto& d = dense[lo];
        double theta = d.h > 0 ? std::clamp((t - d.t0) / d.h, 0.0, 1.0) : 0.0;
        return {d.eval(0, theta), d.eval(1, theta)};
    }
};

constexpr double kBlowUpRadius = 1e8;

/// Integrate from `start` for `horizon` time units (in the given direction; the
/// reported times are nonnegative either way).
inline Orbit integrate(const PlanarSystem& sys, std::pair<double, double> start, double horizon,
                       double tol = 1e-10, Direction dir = Direction::Forward,
                       long step_budget = 20'000'000) {
    auto field = detail::make_field(sys, dir);
    Orbit orbit;
    orbit.direction = dir;
    if (!(start.first > field.dom_lo && start.first < field.dom_hi))
        throw OutOfDomainError("start lies outside the strip");

    detail::Dopri5<2, decltype(field.rhs)> stepper(field.rhs, tol);
    stepper.start({start.first, start.second});
    orbit.samples.push_back({0.0, start.first, start.second});

    while (stepper.t() < horizon) {
        stepper.clamp_next_step(horizon - stepper.t());
        detail::Dense<2> dense;
        if (!stepper.step(dense) || --step_budget <= 0) {
            // Step-size underflow far from the start is a finite-time blow-up:
            // the admissible step collapses like (t* - t) as |f| explodes.
            double r = std::hypot(stepper.y()[0], stepper.y()[1]);
            double r0 = std::hypot(start.first, start.second);
            orbit.termination = r > std::max(1e3, 50.0 * (1.0 + r0)) ? Termination::BlowUp
                                                                     : Termination::StepBudget;
            break;
        }
        orbit.dense.push_back(dense);
        orbit.samples.push_back({stepper.t(), stepper.y()[0], stepper.y()[1]});
        double x = stepper.y()[0], y = stepper.y()[1];
        if (std::hypot(x, y) > kBlowUpRadius) {
            orbit.termination = Termination::BlowUp;
            break;
        }
        if (!(x > field.dom_lo && x < field.dom_hi)) {
            orbit.termination = Termination::DomainExit;
            break;
        }
        if (stepper.t() >= horizon) {
            orbit.termination = Termination::Horizon;
            break;
        }
    }
    orbit.final_time = stepper.t();
    return orbit;
}

namespace detail {

inline double angle_between(double x0, double y0, double x1, double y1) {
    return std::atan2(x0 * y1 - y0 * x1, x0 * x1 + y0 * y1);
}

struct CrossingSearch {
    double x1 = 0, time = 0;
    bool found = false;
    long steps_used = 0;
};

// First return to the section {y = 0, x > 0} after a full revolution around the
// origin (unwrapped angle +-2*pi). Works for either rotation sense and tolerates
// starts where ydot vanishes on the section.
template <class RHS>
CrossingSearch first_return(RHS rhs, double dom_lo, double dom_hi, double x0, double tol,
                            long step_budget) {
    Dopri5<2, RHS> stepper(rhs, tol);
    stepper.start({x0, 0.0});
    CrossingSearch out;
    double winding = 0.0;
    double px = x0, py = 0.0;
    const double two_pi = 2.0 * M_PI;

    for (long n = 0; n < step_budget; ++n) {
        Dense<2> dense;
        if (!stepper.step(dense)) return out;
        out.steps_used = n + 1;
        double cx = stepper.y()[0], cy = stepper.y()[1];

        // Scan the dense output for sign changes of y; sub-sample so that a
        // double crossing within one step is not missed.
        const int kScan = 8;
        double prev_theta = 0.0, prev_y = dense.eval(1, 0.0);
        for (int m = 1; m <= kScan; ++m) {
            double theta = static_cast<double>(m) / kScan;
            double yv = dense.eval(1, theta);
            if ((prev_y < 0 && yv >= 0) || (prev_y > 0 && yv <= 0) ||
                (prev_y == 0 && yv != 0 && m > 1)) {
                double lo = prev_theta, hi = theta;
                for (int it = 0; it < 200; ++it) {
                    double mid = 0.5 * (lo + hi);
                    double ym = dense.eval(1, mid);
                    if (std::fabs(ym) <= 1e-12) {
                        lo = hi = mid;
                        break;
                    }
                    if ((dense.eval(1, lo) < 0) == (ym < 0)) lo = mid;
                    else hi = mid;
                }
                double thc = 0.5 * (lo + hi);
                double xc = dense.eval(0, thc);
                if (xc > 0.0) {
                    double w = winding + angle_between(px, py, xc, dense.eval(1, thc));
                    double revs = w / two_pi;
                    if (std::fabs(std::fabs(revs) - 1.0) < 0.25) {
                        out.x1 = xc;
                        out.time = dense.t0 + thc * dense.h;
                        out.found = true;
                        return out;
                    }
                }
            }
            prev_theta = theta;
            prev_y = yv;
        }

        winding += angle_between(px, py, cx, cy);
        px = cx;
        py = cy;
        double r = std::hypot(cx, cy);
        if (r > kBlowUpRadius) return out;
        if (r < 1e-9 * (1.0 + x0)) return out;  // captured by the equilibrium
        if (!(cx > dom_lo && cx < dom_hi)) return out;
        // A return matches the +-1 revolution mark; winding past it means the
        // crossing cannot occur any more.
        if (std::fabs(winding) > 3.0 * two_pi) return out;
    }
    return out;
}

} // namespace detail

/// One turn of the Poincare map on {y = 0, x > 0}: returns (x1, elapsed time).
inline std::pair<double, double> return_map(const PlanarSystem& sys, double x0,
                                            double tol = 1e-10,
                                            Direction dir = Direction::Forward,
                                            long step_budget = 1'000'000) {
    if (!(x0 > 0)) throw Error("section point must satisfy x0 > 0");
    if (!system_in_domain(sys, x0)) throw OutOfDomainError("section point outside the strip");
    auto field = detail::make_field(sys, dir);
    auto res = detail::first_return(field.rhs, field.dom_lo, field.dom_hi, x0, tol, step_budget);
    if (!res.found)
        throw NoReturnError("orbit from x0 = " + std::to_string(x0) +
                            " did not return to the section");
    return {res.x1, res.time};
}

struct Cycle {
    double section_x = 0;  // fixed point on {y = 0, x > 0}
    double period = 0;
    bool attracting = false;
    Direction stable_dir = Direction::Forward;  // time direction in which the cycle attracts
    int rotation = 0;  // +1 counter-clockwise, -1 clockwise
    double div_integral = 0;
    std::optional<double> nu_integral;           // absent when A vanishes on the cycle
    std::optional<double> log_return_deriv;      // absent when outside finite-difference reach
    double min_abs_A = 0;
    double residual = 0;  // achieved |rho(x*) - x*|
    std::vector<std::pair<double, double>> points;  // sampled closed polyline
};

struct CycleSearch {
    std::vector<Cycle> cycles;  // sorted by section_x
    bool degenerate = false;    // continuum of closed orbits (no isolated cycles)
    std::string note;
};

enum class CycleField { Divergence, Nu };

/// Time integral of div or nu over one period, computed by integrating the field
/// as an extra quadrature state along the cycle. The traversal runs in the
/// cycle's stable time direction so the orbit stays on the cycle; the integral
/// is direction-independent because the path covers the same point set.
inline double cycle_integral(const PlanarSystem& sys, const Cycle& c, CycleField which,
                             double tol = 1e-10) {
    if (which == CycleField::Nu && c.min_abs_A < 1e-8)
        throw AngularSpeedZeroError("min |A| on cycle = " + std::to_string(c.min_abs_A));
    auto field = detail::make_field(sys, c.stable_dir);
    auto rhs = [&](const std::array<double, 3>& y, std::array<double, 3>& dy) {
        std::array<double, 2> p{y[0], y[1]}, dp;
        field.rhs(p, dp);
        dy[0] = dp[0];
        dy[1] = dp[1];
        dy[2] = which == CycleField::Divergence ? divergence_field(sys, y[0], y[1])
                                                : nu_field(sys, y[0], y[1]);
    };
    detail::Dopri5<3, decltype(rhs)> stepper(rhs, std::min(tol, 1e-9));
    stepper.start({c.section_x, 0.0, 0.0});
    long guard = 10'000'000;
    while (stepper.t() < c.period && guard-- > 0) {
        stepper.clamp_next_step(c.period - stepper.t());
        detail::Dense<3> dense;
        if (!stepper.step(dense)) break;
    }
    return stepper.y()[2];
}

namespace detail {

inline double min_abs_A_on(const PlanarSystem& sys,
                           const std::vector<std::pair<double, double>>& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [x, y] : pts) best = std::min(best, std::fabs(A_field(sys, x, y)));
    return best;
}

inline int rotation_sense(const PlanarSystem& sys, double x0) {
    // Sign of the initial angular velocity on the positive x-axis; fall back to
    // a probe point slightly off the section when ydot vanishes there.
    auto [dx, dy] = vector_field(sys, x0, 0.0);
    if (dy != 0.0) return dy > 0 ? 1 : -1;
    auto [dx2, dy2] = vector_field(sys, x0 * (1 - 1e-6), 0.0);
    return dy2 > 0 ? 1 : -1;
}

} // namespace detail

/// Locate limit cycles crossing {y = 0, x > 0} by bracketing sign changes of
/// rho(x) - x on the grid, in forward and (for repelling cycles) reversed time.
inline CycleSearch find_cycles(const PlanarSystem& sys, const std::vector<double>& grid,
                               double tol = 1e-10) {
    CycleSearch search;
    const double deg_tol = std::max(1e-12, 10.0 * tol);

    struct MapValue {
        bool ok = false;
        double d = 0, T = 0;
    };

    auto eval_grid = [&](Direction dir) {
        std::vector<MapValue> vals(grid.size());
        parallel_for(grid.size(), [&](std::size_t i) {
            try {
                auto [x1, T] = return_map(sys, grid[i], tol, dir);
                vals[i] = {true, x1 - grid[i], T};
            } catch (const Error&) {
                vals[i] = {};
            }
        });
        return vals;
    };

    auto refine = [&](double lo, double hi, Direction dir) -> std::optional<Cycle> {
        auto displacement = [&](double x) {
            auto [x1, T] = return_map(sys, x, tol, dir);
            return std::make_pair(x1 - x, T);
        };
        double dlo = displacement(lo).first;
        double best_x = lo, best_d = dlo, period = 0;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            double dm;
            try {
                auto [d, T] = displacement(mid);
                dm = d;
                period = T;
            } catch (const Error&) {
                return std::nullopt;
            }
            if (std::fabs(dm) < std::fabs(best_d)) {
                best_d = dm;
                best_x = mid;
            }
            if (std::fabs(dm) <= 1e-10 || hi - lo < 4e-14 * (1.0 + std::fabs(mid))) break;
            if ((dm < 0) == (dlo < 0)) {
                lo = mid;
                dlo = dm;
            } else {
                hi = mid;
            }
        }
        (void)period;
        Cycle c;
        c.section_x = best_x;
        c.stable_dir = dir;
        try {
            auto [d_final, T_final] = displacement(best_x);
            c.period = T_final;
            c.residual = std::min(std::fabs(best_d), std::fabs(d_final));
        } catch (const Error&) {
            return std::nullopt;
        }
        return c;
    };

    std::vector<Cycle> found;
    for (Direction dir : {Direction::Forward, Direction::Backward}) {
        auto vals = eval_grid(dir);
        if (dir == Direction::Forward) {
            // A run of near-zero displacements signals a continuum of closed orbits.
            int run = 0;
            for (const auto& v : vals) {
                run = (v.ok && std::fabs(v.d) <= deg_tol) ? run + 1 : 0;
                if (run >= 5) {
                    search.degenerate = true;
                    search.note = "return map is the identity on a grid run; "
                                  "continuum of closed orbits, no isolated cycles";
                    break;
                }
            }
            if (search.degenerate) break;
        }
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            if (!vals[i].ok || !vals[i + 1].ok) continue;
            bool bracket = (vals[i].d < 0) != (vals[i + 1].d < 0) ||
                           std::fabs(vals[i].d) <= deg_tol;
            if (!bracket) continue;
            auto cycle = refine(grid[i], grid[i + 1], dir);
            if (!cycle || cycle->residual > 1e-6) continue;
            Cycle* twin = nullptr;
            for (auto& c : found)
                if (std::fabs(c.section_x - cycle->section_x) < 1e-6) twin = &c;
            if (!twin) found.push_back(*cycle);
            else if (cycle->residual < twin->residual) *twin = *cycle;
        }
    }

    std::sort(found.begin(), found.end(),
              [](const Cycle& a, const Cycle& b) { return a.section_x < b.section_x; });

    // Character of each cycle: polyline, rotation, exponents. The polyline is
    // traversed in the stable direction so it stays on the cycle.
    for (Cycle& c : found) {
        Orbit orbit =
            integrate(sys, {c.section_x, 0.0}, c.period, std::min(tol, 1e-10), c.stable_dir);
        const int kSamples = 2048;
        c.points.clear();
        c.points.reserve(kSamples + 1);
        for (int i = 0; i <= kSamples; ++i)
            c.points.push_back(orbit.at(c.period * i / kSamples));
        c.rotation = detail::rotation_sense(sys, c.section_x);
        c.min_abs_A = detail::min_abs_A_on(sys, c.points);
        c.div_integral = cycle_integral(sys, c, CycleField::Divergence, tol);
        c.attracting = c.div_integral < 0;
        if (c.min_abs_A >= 1e-8) c.nu_integral = cycle_integral(sys, c, CycleField::Nu, tol);
    }
    search.cycles = std::move(found);
    return search;
}

/// log of the return-map derivative at the fixed point, by Richardson-refined
/// central differences with h = 1e-5 * x*. Computed in the cycle's stable time
/// direction; the finite difference resolves |log rho'| only up to roughly 15.
inline double log_return_derivative(const PlanarSystem& sys, const Cycle& c,
                                    double tol = 1e-11) {
    Direction dir = c.stable_dir;
    double sgn = dir == Direction::Forward ? 1.0 : -1.0;
    auto rho = [&](double x) { return return_map(sys, x, tol, dir).first; };
    double x = c.section_x;
    double h = 1e-5 * x;
    auto central = [&](double hh) { return (rho(x + hh) - rho(x - hh)) / (2.0 * hh); };
    double d1 = central(h), d2 = central(0.5 * h);
    double richardson = (4.0 * d2 - d1) / 3.0;
    if (!(richardson > 0))
        throw Error("return-map derivative estimate is not positive; exponent out of "
                    "finite-difference range");
    return sgn * std::log(richardson);
}

enum class ProbeOutcome { EntersAndStays, Escapes, Undecided };

struct ProbeResult {
    ProbeOutcome outcome = ProbeOutcome::Undecided;
    double first_entry = -1.0;  // time of first entry into {2E <= M^2}, -1 if never
    std::string note;
};

/// Track 2E(x,y) = 2G(x) + y^2 against M^2 along orbits from the given starts.
inline std::vector<ProbeResult> boundedness_probe(const StructuredSystem& s,
                                                  const std::vector<std::pair<double, double>>& starts,
                                                  double M, double horizon, double tol = 1e-9) {
    std::vector<ProbeResult> results(starts.size());
    const double cap = M * M * (1.0 + 1e-6) + 1e-9;
    PlanarSystem sys = s;
    parallel_for(starts.size(), [&](std::size_t i) {
        ProbeResult r;
        try {
            Orbit orbit = integrate(sys, starts[i], horizon, tol);
            bool entered = false;
            bool left_after_entry = false;
            for (const auto& smp : orbit.samples) {
                double e2 = 2.0 * s.energy(smp.x, smp.y);
                if (!entered && e2 <= M * M) {
                    entered = true;
                    r.first_entry = smp.t;
                } else if (entered && e2 > cap) {
                    left_after_entry = true;
                    r.note = "left the sublevel set at t = " + std::to_string(smp.t);
                    break;
                }
            }
            if (orbit.termination == Termination::BlowUp ||
                orbit.termination == Termination::DomainExit) {
                r.outcome = ProbeOutcome::Escapes;
                r.note = "orbit left the integration region";
            } else if (entered && !left_after_entry) {
                r.outcome = ProbeOutcome::EntersAndStays;
            } else if (left_after_entry) {
                r.outcome = ProbeOutcome::Escapes;
            } else {
                r.outcome = ProbeOutcome::Undecided;
                r.note = "never entered within the horizon";
            }
        } catch (const Error& err) {
            r.outcome = ProbeOutcome::Undecided;
            r.note = err.what();
        }
        results[i] = r;
    });
    return results;
}

} // namespace cycleguard
