#include "doctest.h"
#include "loewner/sle.hpp"
#include "loewner/welding.hpp"

#include <cmath>

using namespace loewner;

TEST_CASE("deterministic chordal welding is reflection") {
    DrivingPath p = constant_path(Geometry::chordal, 0.0, 4.0, 400);
    Welding w = compute_welding(p, 20);
    REQUIRE(w.pairs.size() == 20);
    for (const auto& pr : w.pairs) {
        CHECK(std::abs(pr.y + pr.x) < 1e-9);
        CHECK(pr.tau == doctest::Approx(pr.x * pr.x / 4).epsilon(1e-12));
    }
    auto [a, b] = support_interval(p);
    CHECK(a == doctest::Approx(-4.0).epsilon(1e-12));
    CHECK(b == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(compute_welding(p, 0).pairs.empty());
}

TEST_CASE("deterministic radial welding is conjugation") {
    DrivingPath p = constant_path(Geometry::radial, 0.0, 6.0, 600);
    Welding w = compute_welding(p, 12);
    for (const auto& pr : w.pairs) CHECK(std::abs(pr.y + pr.x) < 1e-9);
    auto fp = second_fixed_point(p, 0.5);
    CHECK(std::abs(std::abs(fp.angle) - pi) < 1e-9);
    DrivingPath z = constant_path(Geometry::radial, 0.0, 0.0, 0);
    CHECK_THROWS_AS(second_fixed_point(z), WeldingError);
}

TEST_CASE("conjugation") {
    DrivingPath p = constant_path(Geometry::chordal, 0.0, 2.0, 100);
    Welding w = compute_welding(p, 5);
    MobiusMap inv{0.0, -1.0, 1.0, 0.0, MobiusClass::half_to_half};
    Welding c = conjugate_welding(w, inv);
    for (const auto& pr : c.pairs) CHECK(std::abs(pr.y + pr.x) < 1e-9);
    Welding id = conjugate_welding(w, MobiusMap::identity());
    for (std::size_t i = 0; i < w.pairs.size(); ++i) CHECK(id.pairs[i].y == w.pairs[i].y);
    MobiusMap w1{2.0, 1.0, 1.0, 3.0, MobiusClass::half_to_half}, w2{1.0, -0.5, 0.2, 1.0, MobiusClass::half_to_half};
    Welding twice = conjugate_welding(conjugate_welding(w, w1), w2);
    Welding once = conjugate_welding(w, compose(w2, w1));
    for (std::size_t i = 0; i < w.pairs.size(); ++i) CHECK(std::abs(twice.pairs[i].y - once.pairs[i].y) < 1e-12);

    DrivingPath r = constant_path(Geometry::radial, 0.0, 6.0, 300);
    Welding rw = compute_welding(r, 6);
    rw.p_inf = pi;
    Welding h = conjugate_welding(rw, MobiusMap::cayley_disc_to_half());
    CHECK(h.geometry == Geometry::chordal);
    CHECK(std::abs(h.p0) < 1e-15);
    CHECK(std::abs(h.p_inf) > 1e10);
    for (const auto& pr : h.pairs) CHECK(std::abs(pr.x + pr.y) < 1e-8);
    CHECK_THROWS_AS(conjugate_welding(w, MobiusMap::cayley_disc_to_half()), WeldingError);
}

TEST_CASE("KS harness") {
    std::vector<double> a, b;
    CounterRng g{3, 0};
    for (int i = 0; i < 1000; ++i) {
        a.push_back(g.normal(i));
        b.push_back(g.normal(5000 + i) + 0.5);
    }
    CHECK(compare_weldings("id", a, a).ks.p_value == 1.0);
    CHECK(ks_two_sample(a, b).p_value < 1e-6);
    std::vector<double> s = a;
    std::reverse(s.begin(), s.end());
    CHECK(ks_two_sample(a, s).p_value > 0.99);
    CHECK_THROWS(ks_two_sample({}, a));
    auto ncdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    CHECK(ks_one_sample(a, ncdf).p_value > 0.01);
}
