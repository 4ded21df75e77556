#include "doctest.h"

#include "loewner/hull.hpp"
#include "loewner/lattice.hpp"

#include <cmath>

using namespace loewner;

namespace {

Hull slit(double center, double T, std::size_t n = 64) {
    return segment_hull(constant_path(Geometry::chordal, center, T, n), 0.0, T);
}

const cplx probes[] = {{0.3, 1.2}, {-2.0, 0.5}, {4.0, 3.0}, {0.0, 0.1}, {-0.7, 2.2}};

}  // namespace

TEST_CASE("product with the empty hull is the identity") {
    Hull K = slit(0.0, 0.4);
    Hull E = empty_hull(Geometry::chordal);
    Hull P = dot_product(K, E), Q = dot_product(E, K);
    for (cplx z : probes) {
        CHECK(std::abs(evaluate_stack_value(P.stack, z) - evaluate_stack_value(K.stack, z)) == 0.0);
        CHECK(std::abs(evaluate_stack_value(Q.stack, z) - evaluate_stack_value(K.stack, z)) == 0.0);
    }
}

TEST_CASE("capacities add under products") {
    Hull K1 = slit(0.0, 0.25), K2 = slit(1.0, 0.35);
    CHECK(K1.capacity == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(K2.capacity == doctest::Approx(0.7).epsilon(1e-14));
    Hull P = dot_product(K1, K2);
    CHECK(P.capacity == doctest::Approx(1.2).epsilon(1e-14));
    CHECK(std::abs(capacity_from_map(P.stack) - 1.2) < 1e-8);
}

TEST_CASE("product is associative") {
    auto p = function_path(Geometry::chordal, 1.0, 300, [](double t) { return std::sin(3 * t); });
    Hull A = segment_hull(p, 0.0, 0.3), B = segment_hull(p, 0.3, 0.6), C = segment_hull(p, 0.6, 1.0);
    Hull L = dot_product(dot_product(A, B), C), R = dot_product(A, dot_product(B, C));
    for (cplx z : probes) CHECK(std::abs(evaluate_stack_value(L.stack, z) - evaluate_stack_value(R.stack, z)) < 1e-11);
}

TEST_CASE("segments have capacity twice their length and chain together") {
    auto p = function_path(Geometry::chordal, 1.0, 200, [](double t) { return t * t - 0.5 * t; });
    CHECK(segment_hull(p, 0.3, 0.8).capacity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(segment_hull(p, 0.4, 0.4).empty());
    CHECK_THROWS_AS(segment_hull(p, 0.5, 1.5), std::out_of_range);
    // The later segment is the outer factor.
    Hull whole = segment_hull(p, 0.0, 0.8);
    Hull joined = dot_product(segment_hull(p, 0.4, 0.8), segment_hull(p, 0.0, 0.4));
    for (cplx z : probes)
        CHECK(std::abs(evaluate_stack_value(whole.stack, z) - evaluate_stack_value(joined.stack, z)) < 1e-12);
}

TEST_CASE("supports of chain hulls") {
    Hull K = slit(0.0, 1.0);
    CHECK(K.support.a == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(K.support.b == doctest::Approx(2.0).epsilon(1e-12));
    // the base of a vertical slit is its foot
    CHECK(std::abs(K.base.a) < 1e-4);
    CHECK(std::abs(K.base.b) < 1e-4);
    auto p = constant_path(Geometry::chordal, 0.5, 1.0, 100);
    Hull z = segment_hull(p, 0.0, 0.0);
    CHECK(z.support.a == 0.5);
    CHECK(z.support.b == 0.5);
    auto q = function_path(Geometry::chordal, 1.0, 400, [](double t) { return std::cos(5 * t); });
    Hull h1 = segment_hull(q, 0.0, 0.5), h2 = segment_hull(q, 0.0, 1.0);
    CHECK(h1.support.a > h2.support.a);
    CHECK(h1.support.b < h2.support.b);
}

TEST_CASE("boundary measure of a vertical slit") {
    Hull K = slit(0.0, 1.0, 1);  // length 2
    auto m = boundary_measure(K, 257);
    CHECK(m.dropped.empty());
    CHECK(std::abs(m.total_mass - 2.0) < 1e-6);
    double bound = K.support.length() / two_pi * (1.0 + 1e-3);
    double peak = 0.0;
    for (std::size_t k = 0; k < m.nodes.size(); ++k) {
        double exact = std::sqrt(std::max(0.0, 4.0 - m.nodes[k] * m.nodes[k])) / pi;
        CHECK(std::abs(m.density[k] - exact) < 1e-9);
        CHECK(m.density[k] <= bound);
        peak = std::max(peak, m.density[k]);
    }
    CHECK(peak <= 2.0 / pi);
    CHECK(peak == doctest::Approx(2.0 / pi).epsilon(1e-3));  // no node sits exactly at the centre
    cplx z(0.0, 3.0);
    CHECK(std::abs(eval_by_measure(m, z) - evaluate_stack_value(K.stack, z)) < 1e-9);
    cplx big(1e3, 0.0);
    CHECK(std::abs(eval_by_measure(m, big) - big + m.total_mass / big) < 1e-6 * m.total_mass);
    CHECK(near_support(m, cplx(0.0, 1e-4)));
    CHECK_FALSE(near_support(m, cplx(0.0, 3.0)));
    auto e = boundary_measure(empty_hull(Geometry::chordal), 16);
    CHECK(e.total_mass == 0.0);
    CHECK(eval_by_measure(e, z) == z);
}

TEST_CASE("measure matches the map for a curved hull") {
    auto p = function_path(Geometry::chordal, 0.5, 2000, [](double t) { return 1.5 * std::sin(4 * t); });
    Hull K = segment_hull(p, 0.0, 0.5);
    auto m = boundary_measure(K, 256);
    CHECK(std::abs(m.total_mass - K.capacity) < 1e-9 * K.capacity);
    double bound = K.support.length() / two_pi * (1.0 + 1e-3);
    for (double r : m.density) CHECK(r <= bound);
    for (int k = 0; k < 16; ++k) {
        cplx z = std::polar(3.0, pi * (k + 0.5) / 16.0);
        CHECK(std::abs(eval_by_measure(m, z) - evaluate_stack_value(K.stack, z)) < 1e-5);
    }
}

TEST_CASE("lattice integrals agree along rows, columns and the double integral") {
    auto p1 = function_path(Geometry::chordal, 0.06, 400, [](double t) { return -1.5 + 0.5 * t; });
    auto p2 = function_path(Geometry::chordal, 0.05, 400, [](double t) { return 1.5 - t; });
    auto lat = goursat_lattice(Geometry::chordal, p1, p2);
    REQUIRE_FALSE(lat.exited);
    CHECK(std::abs(lat.corner.cap - lat.cap_by_columns) < 1e-8);
    CHECK(std::abs(lat.corner.lnF - lat.lnF_by_columns) < 1e-6 * (1.0 + std::abs(lat.corner.lnF)));
    CHECK(std::abs(lat.corner.lnF - lat.lnF_double_integral) < 1e-6 * std::abs(lat.corner.lnF));
}

TEST_CASE("quotient union of two slits") {
    Hull E = empty_hull(Geometry::chordal);
    Hull K1 = slit(-1.5, 1.0 / 16.0, 1000), K2 = slit(1.5, 1.0 / 16.0, 1000);
    CHECK(K1.support.a == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(K1.support.b == doctest::Approx(-1.0).epsilon(1e-12));
    auto triv = quotient_union(K1, E);
    CHECK(triv.H2.empty());
    CHECK(triv.joined.capacity == K1.capacity);

    auto q = quotient_union(K1, K2);
    REQUIRE(q.support.size() == 2);
    CHECK(std::abs(q.support[0].a + 2.0) < 1e-6);
    CHECK(std::abs(q.support[0].b + 1.0) < 1e-6);
    CHECK(std::abs(q.support[1].a - 1.0) < 1e-6);
    CHECK(std::abs(q.support[1].b - 2.0) < 1e-6);

    MapStack other = q.H2.stack.after(K1.stack);
    double worst = 0.0;
    for (int k = 0; k < 32; ++k) {
        cplx z = std::polar(0.5 + 0.2 * (k % 5), pi * (k + 0.5) / 32.0) + cplx(0.4 * (k % 3) - 0.4, 0.0);
        worst = std::max(worst, std::abs(evaluate_stack_value(q.joined.stack, z) - evaluate_stack_value(other, z)));
    }
    MESSAGE("quotient union composition mismatch " << worst);
    CHECK(worst < 1e-9);
    // both factorizations carry the same capacity, and the map agrees with the bookkeeping
    CHECK(std::abs(q.joined.capacity - (q.H2.capacity + K1.capacity)) < 1e-9);
    CHECK(std::abs(capacity_from_map(q.joined.stack) - q.joined.capacity) < 1e-8);
    CHECK_THROWS_AS(quotient_union(K1, slit(-1.2, 0.01, 50)), std::invalid_argument);
}
