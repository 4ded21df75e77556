#include "doctest.h"
#include "loewner/core.hpp"

#include <cmath>
#include <random>

using namespace loewner;

TEST_CASE("chordal backward step closed forms") {
    CHECK(std::abs(chordal_backward_step(0.0, 0.0, 1.0) - cplx(0, 2)) < 1e-15);
    CHECK(std::abs(chordal_backward_step(3.0, 0.0, 1.0) - std::sqrt(5.0)) < 1e-14);
    CHECK(std::abs(chordal_backward_step(-3.0, 0.0, 1.0) + std::sqrt(5.0)) < 1e-14);
    CHECK(chordal_backward_step(cplx(0, 1), 0.0, 0.0) == cplx(0, 1));
    CHECK_THROWS_AS(chordal_backward_step(1.0, 0.0, 1.0, StepMode::interior), NumericError);
    cplx z(0.7, 1.3);
    CHECK(std::abs(chordal_backward_step(z, 0.2, 0.4) - rk4_chordal_backward(z, 0.2, 0.4)) < 1e-10);
}

TEST_CASE("chordal forward step inverts backward") {
    CHECK(std::abs(chordal_forward_step(cplx(0, 2), 0.0, 1.0)) < 1e-15);
    CHECK(std::abs(chordal_forward_step(std::sqrt(5.0), 0.0, 1.0) - 3.0) < 1e-14);
    cplx z(1, 2);
    CHECK(std::abs(chordal_forward_step(chordal_backward_step(z, 0, 0.3), 0, 0.3) - z) < 1e-12);
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> u(-2, 2), d(0.01, 1.0), h(0.01, 3);
    double worst = 0;
    for (int i = 0; i < 64; ++i) {
        double lam = u(g), del = d(g);
        cplx p(u(g), h(g));
        worst = std::max(worst, std::abs(chordal_forward_step(chordal_backward_step(p, lam, del), lam, del) - p));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("radial step closed forms and oracle") {
    Jet j = radial_backward_jet(0.0, 0.0, 0.5);
    CHECK(std::abs(j.v) == 0.0);
    CHECK(std::abs(j.d1 - std::exp(-0.5)) < 1e-15);
    double d = 0.1;
    double tip = 2 * std::exp(d) - 1 - 2 * std::sqrt(std::exp(2 * d) - std::exp(d));
    CHECK(std::abs(radial_backward_step(1.0, 0.0, d) - tip) < 1e-13);
    CHECK(std::abs(tip - 0.5285) < 1e-3);
    cplx e = std::polar(1.0, 0.8);
    CHECK(std::abs(radial_backward_step(-e, 0.8, 0.7) + e) < 1e-13);
    CHECK(std::abs(rk4_radial_backward(-e, 0.8, 0.7) + e) < 1e-10);
    cplx z(0.3, -0.4);
    CHECK(std::abs(radial_backward_step(z, 1.1, 0.3) - rk4_radial_backward(z, 1.1, 0.3)) < 1e-9);
    cplx w = radial_forward_step(radial_backward_step(z, 1.1, 0.3), 1.1, 0.3);
    CHECK(std::abs(w - z) < 1e-12);
}

TEST_CASE("jets match finite differences") {
    cplx z(0.4, 0.9), h(1e-4, 0);
    auto check = [&](auto f, Jet j) {
        cplx d1 = (f(z + h) - f(z - h)) / (2.0 * h);
        cplx d2 = (f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h);
        CHECK(std::abs(d1 - j.d1) < 1e-7);
        CHECK(std::abs(d2 - j.d2) < 1e-4);
    };
    check([](cplx x) { return chordal_backward_step(x, 0.1, 0.2); }, chordal_backward_jet(z, 0.1, 0.2));
    check([](cplx x) { return radial_backward_step(x, 0.1, 0.2); }, radial_backward_jet(z, 0.1, 0.2));
    check([](cplx x) { return covering_forward_step(x, 0.1, 0.2); }, covering_forward_jet(z, 0.1, 0.2));
    Jet s = radial_backward_jet(cplx(1e-8, 0), 0.3, 0.2);
    Jet l = radial_backward_jet(cplx(1e-3, 0), 0.3, 0.2);
    CHECK(std::abs(s.d2 - l.d2) < 1e-2);
}

TEST_CASE("stack semantics") {
    MapStack empty;
    Jet j = evaluate_stack(empty, cplx(1, 1), 3);
    CHECK(j.v == cplx(1, 1));
    CHECK(j.d1 == cplx(1.0));
    MapStack two{Geometry::chordal, Direction::backward, {{0, 0.5}, {0, 0.5}}, 0, 1};
    CHECK(std::abs(evaluate_stack_value(two, 3.0) - std::sqrt(5.0)) < 1e-13);
    DrivingPath p = function_path(Geometry::chordal, 1.0, 200, [](double t) { return std::sin(3 * t); });
    MapStack f = backward_stack(p);
    cplx big(1e6, 0.0);
    CHECK(std::abs(evaluate_stack_value(f, big) - big) < 1e-4);
    cplx z(0.3, 0.8);
    cplx a = evaluate_stack_value(f, z);
    cplx b = evaluate_stack_value(backward_stack(p, 0.4, 1.0), evaluate_stack_value(backward_stack(p, 0.0, 0.4), z));
    CHECK(std::abs(a - b) < 1e-9);
    CHECK(std::abs(evaluate_stack_value(f.inverse(), a) - z) < 1e-9);
    CHECK(std::abs(std::conj(evaluate_stack_value(f, std::conj(z))) - a) < 1e-12);
    CHECK(std::abs(capacity_from_map(f) - 2.0) < 1e-8);
}

TEST_CASE("radial stacks: inversion symmetry and capacity") {
    DrivingPath p = function_path(Geometry::radial, 0.7, 100, [](double t) { return 2 * t; });
    MapStack f = backward_stack(p);
    CHECK(capacity(f) == doctest::Approx(0.7));
    CHECK(std::abs(capacity_from_map(f) - 0.7) < 1e-10);
    cplx z(0.2, 0.5);
    cplx a = evaluate_stack_value(f, z);
    cplx b = evaluate_stack_value(f, 1.0 / std::conj(z));
    CHECK(std::abs(1.0 / std::conj(b) - a) < 1e-12);
}

TEST_CASE("reversal correspondence") {
    auto lam = [](double t) { return std::cos(2 * t) + t; };
    DrivingPath p = function_path(Geometry::chordal, 1.0, 400, lam);
    MapStack f = backward_stack(p);
    MapStack g;
    g.direction = Direction::forward;
    for (std::size_t i = p.n_steps(); i-- > 0;) g.steps.push_back({p.step_lambda(i), p.step_delta(i)});
    // forward chain driven by λ(T−t), inverted
    cplx z(0.1, 0.9);
    CHECK(std::abs(evaluate_stack_value(g.inverse(), z) - evaluate_stack_value(f, z)) < 1e-8);
}

TEST_CASE("traces") {
    Trace tr = compute_trace(constant_path(Geometry::chordal, 0.0, 1.0, 50));
    CHECK(std::abs(tr.points[0] - cplx(0, 2)) < 1e-13);
    CHECK(std::abs(tr.points.back()) == 0.0);
    Trace rt = compute_trace(constant_path(Geometry::radial, 0.0, 0.1, 20));
    CHECK(std::abs(rt.points[0] - 0.5285) < 1e-3);
    Trace zt = compute_trace(constant_path(Geometry::chordal, 0.5, 0.0, 0));
    CHECK(zt.points.size() == 1);
    CHECK(zt.points[0] == cplx(0.5));
    Trace ft = compute_trace(constant_path(Geometry::chordal, 0.0, 1.0, 50), TraceKind::forward);
    CHECK(ft.points[0] == cplx(0.0));
    CHECK(std::abs(ft.points.back() - cplx(0, 2)) < 1e-12);
}

TEST_CASE("swallowing times") {
    DrivingPath p = constant_path(Geometry::chordal, 0.0, 3.0, 30);
    CHECK(swallow_time(p, 2.0)->tau == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(swallow_time(p, -2.0)->tau == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(swallow_time(p, -2.0)->side == -1);
    CHECK(swallow_time(p, 0.0)->tau == 0.0);
    CHECK(!swallow_time(p, 4.0).has_value());
    DrivingPath r = constant_path(Geometry::radial, 0.0, 3.0, 30);
    double th = 1.0;
    auto s = swallow_time(r, th);
    REQUIRE(s);
    CHECK(s->tau == doctest::Approx(-2 * std::log(std::cos(th / 2))).epsilon(1e-12));
    CHECK(!swallow_time(r, pi).has_value());
}
