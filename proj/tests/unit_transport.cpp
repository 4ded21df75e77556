#include "doctest.h"

#include "loewner/transport.hpp"
#include "loewner/welding.hpp"

#include <cmath>

using namespace loewner;

namespace {

DrivingPath smooth(double T, std::size_t n) {
    return function_path(Geometry::chordal, T, n, [](double t) { return 0.3 * std::sin(2.0 * t); });
}

MobiusMap real_map(double a, double b, double c, double d) { return {a, b, c, d, MobiusClass::half_to_half}; }

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("Möbius basics") {
    CHECK(mobius_apply(MobiusMap::identity(), cplx(0.3, 0.7)) == cplx(0.3, 0.7));
    CHECK(std::abs(mobius_apply(real_map(0, -1, 1, 0), 2.0) + 0.5) < 1e-15);
    auto C = MobiusMap::cayley_disc_to_half();
    CHECK(std::abs(mobius_apply(C, 0.0) - cplx(0, 1)) < 1e-15);
    CHECK(std::isinf(std::real(mobius_apply(C, -1.0, true))));
    CHECK_THROWS_AS(mobius_apply(C, -1.0), NumericError);
}

TEST_CASE("transport by affine maps") {
    auto p = smooth(1.0, 200);
    auto id = transport_chain(p, MobiusMap::identity());
    CHECK(sup_diff(id.lambda_star, p.values) < 1e-8);
    CHECK(sup_diff(id.u, p.t) < 1e-8);
    auto sh = transport_chain(p, real_map(1, 0.7, 0, 1));
    for (std::size_t i = 0; i < p.t.size(); ++i) {
        CHECK(std::abs(sh.lambda_star[i] - p.values[i] - 0.7) < 1e-12);
        CHECK(std::abs(sh.u[i] - p.t[i]) < 1e-12);
    }
    auto sc = transport_chain(p, real_map(2, 0, 0, 1));
    for (std::size_t i = 0; i < p.t.size(); ++i) {
        CHECK(std::abs(sc.lambda_star[i] - 2.0 * p.values[i]) < 1e-6);
        CHECK(std::abs(sc.u[i] - 4.0 * p.t[i]) < 1e-6);
    }
    auto r = verify_tip_odes(sc);
    CHECK(r.max_minus3 < 1e-9);
    CHECK(r.max_u < 1e-9);
}

TEST_CASE("chordal transport follows the closed pole flow") {
    // W = 1 − 1/(z+1); with λ ≡ 0 the pole moves as a boundary point, r² = 1 − 4t.
    auto p = constant_path(Geometry::chordal, 0.0, 0.2, 50);
    auto ch = transport_chain(p, real_map(1, 0, 1, 1));
    double t = 0.2, r = std::sqrt(1.0 - 4.0 * t);
    double P = -r, B = -1.0 / r, A = 1.0 - 0.5 * (1.0 / (r * r) - 1.0);  // A' = 2B/(λ−P)³
    for (cplx w : {cplx(0.3, 1.0), cplx(-2.0, 0.4), cplx(5.0, 5.0)})
        CHECK(std::abs(mobius_apply(ch.maps.back(), w) - (A + B / (w - P))) < 1e-10);
    // u' = W'(0)² = B²/P⁴ = 1/r⁶ integrates to ((1−4t)^{-2} − 1)/8
    CHECK(std::abs(ch.u.back() - (std::pow(1.0 - 4.0 * t, -2.0) - 1.0) / 8.0) < 1e-9);
}

TEST_CASE("tip ODE residuals converge at first order") {
    auto W = real_map(1, 0, 1, 1);
    double prev = 0.0;
    for (double dt : {2e-4, 1e-4, 5e-5}) {
        auto p = function_path(Geometry::chordal, 0.1, static_cast<std::size_t>(std::llround(0.1 / dt)),
                               [](double t) { return 0.2 * t; });
        auto r = verify_tip_odes(transport_chain(p, W));
        if (dt <= 1e-4) {
            CHECK(r.max_minus3 < 1e-3);
            CHECK(r.max_u < 1e-3);
        }
        CHECK(r.max_ratio < 1e-2);
        if (prev > 0.0) CHECK(r.max_minus3 < 0.6 * prev);
        prev = r.max_minus3;
    }
}

TEST_CASE("radial and mixed classes") {
    auto p = function_path(Geometry::radial, 0.1, 1000, [](double t) { return 0.4 * t; });
    MobiusMap rot{std::polar(1.0, 0.5), 0.0, 0.0, 1.0, MobiusClass::disc_to_disc};
    auto rc = transport_chain(p, rot);
    for (std::size_t i = 0; i < p.t.size(); ++i) {
        CHECK(std::abs(rc.lambda_star[i] - p.values[i] - 0.5) < 1e-9);
        CHECK(std::abs(rc.u[i] - p.t[i]) < 1e-9);
    }
    // a disc automorphism moving 0 to 0.3
    MobiusMap aut{1.0, 0.3, 0.3, 1.0, MobiusClass::disc_to_disc};
    auto ac = transport_chain(p, aut);
    auto r = verify_tip_odes(ac);
    CHECK(r.max_minus3 < 1e-3);
    CHECK(r.max_u < 1e-3);
    CHECK(r.max_ratio < 1e-2);
    for (std::size_t i = 1; i < ac.u.size(); ++i) CHECK(ac.u[i] > ac.u[i - 1]);
    auto cc = transport_chain(p, MobiusMap::cayley_disc_to_half());
    auto rr = verify_tip_odes(cc);
    CHECK(rr.max_minus3 < 1e-3);
    CHECK(rr.max_ratio < 1e-2);
    CHECK(std::abs(cc.lambda_star[0] - 0.0) < 1e-12);
}

TEST_CASE("transport respects composition") {
    auto p = smooth(0.3, 3000);
    auto W1 = real_map(1, 0, 1, 4), W2 = real_map(2, 1, 0.5, 3);
    auto once = transport_chain(p, compose(W2, W1));
    auto first = transport_chain(p, W1);
    auto twice = transport_chain(first.as_path(), W2);
    MESSAGE("composition sup difference " << sup_diff(once.lambda_star, twice.lambda_star));
    CHECK(sup_diff(once.lambda_star, twice.lambda_star) < 1e-5);
    CHECK(sup_diff(once.u, twice.u) < 1e-5);
}

TEST_CASE("circ identity and welding conjugation") {
    auto p = smooth(0.25, 4000);
    auto W = real_map(1, 0, 1, 2);  // pole at −2
    auto ch = transport_chain(p, W);
    std::vector<cplx> probes{{0.5, 1.0}, {-1.0, 0.3}, {3.0, 2.0}, {0.0, 0.2}};
    double e = circ_identity_error(p, ch, probes);
    MESSAGE("circ identity error " << e);
    CHECK(e < 1e-4);
    // The welding of the transported chain is the conjugated welding.
    auto w = compute_welding_at(p, {0.3, 0.6, 0.9});
    auto conj = conjugate_welding(w, W);
    auto direct = compute_welding_at(ch.as_path(), {conj.pairs[0].x, conj.pairs[1].x, conj.pairs[2].x});
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(direct.pairs[k].y - conj.pairs[k].y) < 1e-4);
}

TEST_CASE("pole collision is reported") {
    auto p = constant_path(Geometry::chordal, 0.0, 0.3, 300);
    CHECK_THROWS_AS(transport_chain(p, real_map(0, 1, -1, 1)), NumericError);
}

TEST_CASE("capacity scaling") {
    std::vector<double> sizes{0.1, 0.03, 0.01};
    for (const auto& row : capacity_scaling_probe(real_map(2, 0, 0, 1), 0.0, sizes))
        CHECK(std::abs(row.ratio - 4.0) < 1e-9);
    auto rows = capacity_scaling_probe(real_map(1, 0, 1, 1), 0.0, sizes);
    CHECK(rows[0].rel_error > rows[1].rel_error);
    CHECK(rows[1].rel_error > rows[2].rel_error);
    CHECK(rows[2].rel_error < 0.05);
    auto cay = capacity_scaling_probe(MobiusMap::cayley_disc_to_half(), 0.0, sizes);
    CHECK(cay[2].expected == doctest::Approx(0.5));
    CHECK(cay[2].rel_error < 0.05);
    CHECK(cay[0].rel_error > cay[2].rel_error);
}
