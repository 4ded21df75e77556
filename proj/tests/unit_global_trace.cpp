#include "doctest.h"

#include "loewner/global_trace.hpp"
#include "loewner/sle.hpp"
#include "loewner/stats.hpp"

#include <cmath>

using namespace loewner;

namespace {

DrivingPath sle_path(double kappa, double T, double dt, std::uint64_t seed) {
    SleConfig c;
    c.kappa = kappa;
    c.horizon = T;
    c.grid = GridSpec::uniform(dt);
    c.seed = seed;
    return sample_sle_driving(c);
}

cplx beta_at(const GlobalTrace& g, double t) {
    for (std::size_t i = 0; i < g.t.size(); ++i)
        if (std::abs(g.t[i] - t) < 1e-9) return g.points[i];
    return cplx(NAN, NAN);
}

}  // namespace

TEST_CASE("zero driver gives a ray from the origin") {
    std::vector<double> angles;
    for (double T : {1.0, 4.0, 16.0}) {
        auto g = build_global_trace(constant_path(Geometry::chordal, 0.0, T, static_cast<std::size_t>(T * 200)), T);
        CHECK(g.points[0] == cplx(0.0, 0.0));
        CHECK(g.phase_dev < 1e-12);
        CHECK(g.gaps.empty());
        double ang = std::arg(g.points.back() - g.points[0]);
        for (std::size_t i = 1; i < g.points.size(); ++i)
            CHECK(std::abs(std::arg(g.points[i] - g.points[0]) - ang) < 1e-6);
        angles.push_back(ang);
        CHECK(g.anchor_clearance > 0.5);
    }
    CHECK(std::abs(angles[2] - angles[0]) * 180.0 / pi < 1.0);
}

TEST_CASE("normalized point at t=1 settles as the horizon grows") {
    // Closed form: β(1) = 2i·a(√(T−1) − √T) with a = 1/(√(1+4T) − 2√T), limit −4i.
    std::vector<double> vals;
    for (double T : {1.0, 2.0, 4.0, 16.0, 32.0, 64.0}) {
        auto p = constant_path(Geometry::chordal, 0.0, T, static_cast<std::size_t>(T * 50));
        auto g = build_global_trace(p, T);
        double a = 1.0 / (std::sqrt(1.0 + 4.0 * T) - 2.0 * std::sqrt(T));
        double exact = 2.0 * a * (std::sqrt(T - 1.0) - std::sqrt(T));
        cplx b1 = beta_at(g, 1.0);
        CHECK(std::abs(std::real(b1)) < 1e-9);
        CHECK(std::abs(std::imag(b1) - exact) < 1e-7 * std::abs(exact));
        vals.push_back(std::imag(b1));
    }
    MESSAGE("beta(1) for T* = 1,2,4,16,32,64: " << vals[0] << " " << vals[1] << " " << vals[2] << " " << vals[3]
                                                 << " " << vals[4] << " " << vals[5]);
    // small horizons are far apart; the large ones agree within 2%
    CHECK(std::abs(vals[0] / vals[2] - 1.0) > 0.5);
    CHECK(std::abs(vals[5] / vals[3] - 1.0) < 0.02);
    CHECK(std::abs(vals[5] + 4.0) < 0.03);
}

TEST_CASE("zero horizon is a single point") {
    auto g = build_global_trace(constant_path(Geometry::chordal, 0.4, 1.0, 10), 0.0);
    REQUIRE(g.points.size() == 1);
    CHECK(g.points[0] == cplx(0.4, 0.0));
}

TEST_CASE("truncation compatibility") {
    auto p = sle_path(2.0, 2.0, 1e-3, 5);
    std::vector<cplx> probes{{0.1, 0.5}, {-1.0, 1.0}, {2.0, 0.05}, {0.0, 3.0}};
    for (double t2 : {0.3, 0.7777, 1.5}) CHECK(truncation_compatibility(p, 0.1, t2, 2.0, probes) < 1e-6);
    CHECK_THROWS(truncation_compatibility(p, 0.5, 0.2, 2.0, probes));
    auto q = truncate_path(p, 1.2345);
    CHECK(q.horizon() == doctest::Approx(1.2345).epsilon(1e-14));
}

TEST_CASE("sampled traces are simple for small kappa") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        auto p = sle_path(2.0, 1.0, 2e-3, seed);
        auto g = build_global_trace(p, 1.0);
        CHECK(g.gaps.empty());
        CHECK(g.points[0] == cplx(p.values[0], 0.0));
        CHECK(polyline_simple(g.points));
        CHECK(g.anchor_clearance > 1e-6);
    }
    CHECK_FALSE(polyline_simple({0.0, 1.0, cplx(1, 1), cplx(0.5, -1)}));
    CHECK(polyline_simple({0.0, 1.0, cplx(1, 1), cplx(0, 1)}));
    CHECK(distance_to_polyline({0.0, 2.0}, cplx(1.0, 1.0)) == doctest::Approx(1.0));
}

TEST_CASE("divergence functional") {
    auto p = constant_path(Geometry::chordal, 0.0, 3.0, 300);
    auto d = divergence_functional(p, cplx(0.0, 1.0));
    CHECK(d.N[0] == 1.0);
    for (std::size_t i = 0; i < d.t.size(); ++i) CHECK(std::abs(d.N[i] - (1.0 + 4.0 * d.t[i])) < 1e-9);
    CHECK(divergence_functional(p, cplx(0.3, 0.2)).N[0] == doctest::Approx(0.2));
    CHECK_THROWS(divergence_functional(p, cplx(0.0, -1.0)));
    // median over seeds grows on [0.5, 5]
    std::vector<std::vector<double>> at(4);
    const double marks[4] = {0.5, 1.5, 3.0, 5.0};
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        auto q = sle_path(2.0, 5.0, 5e-3, seed);
        auto s = divergence_functional(q, cplx(0.0, 1.0));
        for (int k = 0; k < 4; ++k) at[k].push_back(s.N[static_cast<std::size_t>(std::llround(marks[k] / 5e-3))]);
    }
    for (int k = 1; k < 4; ++k) CHECK(median(at[k]) > median(at[k - 1]));
}
