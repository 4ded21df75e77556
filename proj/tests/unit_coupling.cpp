#include "doctest.h"

#include "loewner/coupling.hpp"
#include "loewner/parallel.hpp"

#include <cmath>

using namespace loewner;

TEST_CASE("coupling constants") {
    auto k2 = coupling_constants(2.0), k4 = coupling_constants(4.0), k6 = coupling_constants(6.0);
    CHECK(k2.alpha == doctest::Approx(-2.0));
    CHECK(k2.c == doctest::Approx(28.0));
    CHECK(k4.alpha == doctest::Approx(-1.25));
    CHECK(k4.c == doctest::Approx(25.0));
    CHECK(k6.alpha == doctest::Approx(-1.0));
    CHECK(k6.c == doctest::Approx(26.0));
    for (double k = 0.05; k < 50.0; k *= 1.3) CHECK(coupling_constants(k).c >= 25.0 - 1e-12);
    CHECK_THROWS_AS(coupling_constants(0.0), std::invalid_argument);
}

TEST_CASE("arc pairs") {
    CHECK_NOTHROW(ArcPair::symmetric(0.0, pi, 1.0).validate(0.0, pi));
    CHECK_THROWS(ArcPair::symmetric(0.0, pi, 1.7).validate(0.0, pi));
    CHECK_THROWS(ArcPair::symmetric(0.0, 1.0, 0.6).validate(0.0, 1.0));
    CHECK_THROWS(ArcPair{0.1, 0.5, 2.0, 3.0}.validate(0.0, 2.5));
    // wrap-around: J2 straddles the cut
    CHECK_NOTHROW(ArcPair{-0.5, 0.5, 2.5, 3.5}.validate(0.0, 3.0));
}

TEST_CASE("a single coupled run") {
    CouplingConfig cfg;
    cfg.kappa = 2.0;
    cfg.grid = GridSpec::uniform(1e-3);
    cfg.probe_t1 = {0.0, 0.02};
    cfg.dump = true;
    auto r = evolve_pair(cfg, 7);
    CHECK(r.stopped);
    CHECK_FALSE(r.exited);
    CHECK(r.max_axis_lnM < 1e-12);
    CHECK(std::abs(r.lnM_probe[0]) < 1e-12);  // t1 = 0 lies on the axis
    CHECK(r.column_check < 1e-6);
    CHECK(std::abs(r.lnF_row - r.lnF_double) < 0.02 * std::abs(r.lnF_row));
    CHECK(std::isfinite(r.lnM));
    REQUIRE_FALSE(r.dump.empty());
    for (const auto& row : r.dump)
        if (row.t2 == 0.0) {
            CHECK(row.A11 == 1.0);
            CHECK(row.lnF == 0.0);
            CHECK(row.cap == doctest::Approx(row.t1).epsilon(1e-12));
        }
    auto again = evolve_pair(cfg, 7);
    CHECK(again.lnM == r.lnM);
    CHECK_THROWS_AS(([&] { auto c = cfg; c.kappa = 0.0; evolve_pair(c, 0); })(), std::invalid_argument);
}

TEST_CASE("small ensemble mean of M and thread independence") {
    CouplingConfig cfg;
    cfg.kappa = 4.0;
    cfg.grid = GridSpec::uniform(2e-3);
    auto a = run_coupling(cfg, 300);
    auto s = martingale_M(a);
    CHECK(s.n_used == 300);
    CHECK(std::abs(s.mean_M - 1.0) < 4.0 * s.stderr_M);
    std::vector<double> serial(40), threaded(40);
    parallel_for(40, [&](std::size_t i) { serial[i] = evolve_pair(cfg, i).lnM; }, 1);
    parallel_for(40, [&](std::size_t i) { threaded[i] = evolve_pair(cfg, i).lnM; }, 3);
    CHECK(serial == threaded);
}
