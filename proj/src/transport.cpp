#include "loewner/transport.hpp"

#include <array>
#include <cmath>

namespace loewner {

namespace {

const cplx I(0.0, 1.0);

// Backward Loewner vector fields in natural coordinates.
cplx field(Geometry g, cplx w, double lambda) {
    if (g == Geometry::chordal) return -2.0 / (w - lambda);
    cplx e = std::polar(1.0, lambda);
    return -w * (e + w) / (e - w);
}

struct State {
    std::array<cplx, 4> m;  // a, b, c, d
    double u;
};

MobiusMap as_map(const std::array<cplx, 4>& m, MobiusClass cls) { return {m[0], m[1], m[2], m[3], cls}; }

double unwrap_near(double v, double ref) { return ref + std::remainder(v - ref, two_pi); }

// Time derivative of the state for a constant source driver.
State rhs(const State& s, MobiusClass cls, double lambda, double sign, double ref_star) {
    MobiusMap W = as_map(s.m, cls);
    Geometry src = W.source_geometry(), tgt = W.target_geometry();
    Jet J = covering_mobius_jet(W, lambda);
    double up = std::real(J.d1 * J.d1);
    double ls = std::real(J.v);
    if (tgt == Geometry::radial) ls = unwrap_near(ls, ref_star);
    std::array<cplx, 3> w;
    if (src == Geometry::chordal) {
        w = {cplx(lambda, 1.0), cplx(lambda + 1.0, 2.0), cplx(lambda - 1.0, 2.0)};
    } else {
        w = {0.0, 0.5 * std::polar(1.0, lambda + 2.0 * pi / 3.0), 0.5 * std::polar(1.0, lambda - 2.0 * pi / 3.0)};
    }
    std::array<cplx, 3> Wk, y;
    for (int k = 0; k < 3; ++k) {
        Jet j = mobius_jet(W, w[k]);
        Wk[k] = j.v;
        y[k] = sign * (up * field(tgt, j.v, ls) - j.d1 * field(src, w[k], lambda));
    }
    // Fit y = α + βW + γW², then dM/dt = X·M with X = [[β/2, α], [−γ, −β/2]].
    cplx d01 = (y[1] - y[0]) / (Wk[1] - Wk[0]), d02 = (y[2] - y[0]) / (Wk[2] - Wk[0]);
    cplx gam = (d02 - d01) / (Wk[2] - Wk[1]);
    cplx bet = d01 - gam * (Wk[1] + Wk[0]);
    cplx alp = y[0] - bet * Wk[0] - gam * Wk[0] * Wk[0];
    const auto& m = s.m;
    State d;
    d.m = {0.5 * bet * m[0] + alp * m[2], 0.5 * bet * m[1] + alp * m[3], -gam * m[0] - 0.5 * bet * m[2],
           -gam * m[1] - 0.5 * bet * m[3]};
    d.u = up;
    return d;
}

State axpy(const State& s, double h, const State& d) {
    State r;
    for (int k = 0; k < 4; ++k) r.m[k] = s.m[k] + h * d.m[k];
    r.u = s.u + h * d.u;
    return r;
}

void normalize(State& s) {
    double r = std::sqrt(std::abs(s.m[0] * s.m[3] - s.m[1] * s.m[2]));
    if (r > 0.0 && std::isfinite(r))
        for (auto& v : s.m) v /= r;
}

// A pole on the source boundary moves like a boundary point; it must not be swallowed.
void check_pole(const MobiusMap& W, double lambda, double h, Direction dir) {
    if (W.c == 0.0) return;
    cplx P = W.pole();
    Geometry g = W.source_geometry();
    bool on_boundary = g == Geometry::chordal ? std::abs(std::imag(P)) < 1e-9 * (1.0 + std::abs(P))
                                               : std::abs(std::abs(P) - 1.0) < 1e-9;
    if (!on_boundary) return;
    double x = g == Geometry::chordal ? std::real(P) : std::arg(P);
    double gap = g == Geometry::chordal ? std::abs(x - lambda) : std::abs(std::sin(0.5 * (x - lambda)));
    bool hit = dir == Direction::backward ? !evolve_boundary_point(g, x, lambda, h).has_value() : gap < 1e-9;
    if (hit) throw NumericError("pole-collision", "the pole of the transported map reached the driver");
}

}  // namespace

Geometry TransportedChain::source_geometry() const { return MobiusMap::identity(cls).source_geometry(); }
Geometry TransportedChain::target_geometry() const { return MobiusMap::identity(cls).target_geometry(); }

DrivingPath TransportedChain::as_path() const { return DrivingPath(target_geometry(), u, lambda_star); }

Jet covering_mobius_jet(const MobiusMap& W, double x) {
    Geometry src = W.source_geometry(), tgt = W.target_geometry();
    Jet j;
    if (src == Geometry::radial) {
        cplx e = std::polar(1.0, x);
        j = compose(mobius_jet(W, e), Jet{e, I * e, -e, -I * e});
    } else {
        j = mobius_jet(W, x);
    }
    if (tgt == Geometry::radial) {
        cplx z = j.v;
        Jet lg{std::arg(z), -I / z, I / (z * z), -2.0 * I / (z * z * z)};
        lg.v = cplx(std::arg(z), -std::log(std::abs(z)));
        j = compose(lg, j);
    }
    return j;
}

TransportedChain transport_chain(const DrivingPath& path, const MobiusMap& W, Direction direction,
                                 double max_substep) {
    path.validate();
    if (W.source_geometry() != path.geometry) throw std::invalid_argument("Möbius map does not act on this geometry");
    W.validate();
    TransportedChain ch;
    ch.cls = W.cls;
    ch.direction = direction;
    ch.t = path.t;
    const double sign = direction == Direction::backward ? 1.0 : -1.0;
    const bool radial_target = W.target_geometry() == Geometry::radial;
    State s{{W.a, W.b, W.c, W.d}, 0.0};
    normalize(s);
    auto tip = [&](const State& st, double lambda, double ref) {
        double v = std::real(covering_mobius_jet(as_map(st.m, W.cls), lambda).v);
        return radial_target ? unwrap_near(v, ref) : v;
    };
    double ls = std::real(covering_mobius_jet(W, path.values[0]).v);
    ch.lambda_star.push_back(ls);
    ch.u.push_back(0.0);
    ch.maps.push_back(as_map(s.m, W.cls));
    for (std::size_t i = 0; i < path.n_steps(); ++i) {
        double lambda = path.step_lambda(i), delta = path.step_delta(i);
        ch.lambda.push_back(lambda);
        int n = std::max(1, static_cast<int>(std::ceil(delta / max_substep)));
        double h = delta / n;
        for (int k = 0; k < n; ++k) {
            check_pole(as_map(s.m, W.cls), lambda, h, direction);
            double ref = ch.lambda_star.back();
            State k1 = rhs(s, W.cls, lambda, sign, ref);
            State k2 = rhs(axpy(s, 0.5 * h, k1), W.cls, lambda, sign, ref);
            State k3 = rhs(axpy(s, 0.5 * h, k2), W.cls, lambda, sign, ref);
            State k4 = rhs(axpy(s, h, k3), W.cls, lambda, sign, ref);
            for (int q = 0; q < 4; ++q) s.m[q] += h / 6.0 * (k1.m[q] + 2.0 * k2.m[q] + 2.0 * k3.m[q] + k4.m[q]);
            s.u += h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
            normalize(s);
            if (!std::isfinite(s.u)) throw NumericError("pole-collision", "transport blew up");
        }
        ch.lambda_star.push_back(tip(s, path.values[i + 1], ch.lambda_star.back()));
        ch.u.push_back(s.u);
        ch.maps.push_back(as_map(s.m, W.cls));
    }
    return ch;
}

TipResiduals verify_tip_odes(const TransportedChain& ch) {
    TipResiduals r;
    const double sign = ch.direction == Direction::backward ? 1.0 : -1.0;
    const bool src_radial = ch.source_geometry() == Geometry::radial;
    const bool tgt_radial = ch.target_geometry() == Geometry::radial;
    for (std::size_t i = 0; i + 1 < ch.t.size(); ++i) {
        double lam = ch.lambda[i], dt = ch.t[i + 1] - ch.t[i];
        Jet a = covering_mobius_jet(ch.maps[i], lam), b = covering_mobius_jet(ch.maps[i + 1], lam);
        double av = std::real(a.v), bv = std::real(b.v);
        if (tgt_radial) bv = unwrap_near(bv, av);
        double d1 = std::real(a.d1), d2 = std::real(a.d2), d3 = std::real(a.d3);
        auto scaled = [](double lhs, double rhs) { return std::abs(lhs - rhs) / (1.0 + std::abs(rhs)); };
        r.max_minus3 = std::max(r.max_minus3, scaled((bv - av) / dt, sign * 3.0 * d2));
        r.max_u = std::max(r.max_u, scaled((ch.u[i + 1] - ch.u[i]) / dt, d1 * d1));
        double rhs = -0.5 * (d2 / d1) * (d2 / d1) + 4.0 / 3.0 * d3 / d1;
        if (tgt_radial) rhs += d1 * d1 / 6.0;
        if (src_radial) rhs -= 1.0 / 6.0;
        double lhs = (std::real(b.d1) - d1) / (dt * d1);
        r.max_ratio = std::max(r.max_ratio, scaled(lhs, sign * rhs));
        ++r.n;
    }
    return r;
}

double circ_identity_error(const DrivingPath& path, const TransportedChain& ch, const std::vector<cplx>& probes) {
    if (ch.direction != Direction::backward) throw std::invalid_argument("circ identity is checked for backward chains");
    MapStack f = backward_stack(path);
    MapStack fs = backward_stack(ch.as_path());
    const MobiusMap& WT = ch.maps.back();
    const MobiusMap& W0 = ch.maps.front();
    double worst = 0.0;
    for (cplx z : probes) {
        cplx lhs = mobius_apply(WT, evaluate_stack_value(f, z));
        cplx rhs = evaluate_stack_value(fs, mobius_apply(W0, z));
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

std::vector<ScalingRow> capacity_scaling_probe(const MobiusMap& W, double z0, const std::vector<double>& sizes,
                                               std::size_t steps) {
    W.validate();
    Geometry src = W.source_geometry(), tgt = W.target_geometry();
    cplx p0 = boundary_point(src, z0);
    double wp = std::abs(mobius_jet(W, p0).d1);
    double factor = (tgt == Geometry::chordal ? 2.0 : 1.0) / (src == Geometry::chordal ? 2.0 : 1.0);
    double expected = factor * wp * wp;
    std::vector<ScalingRow> out;
    for (double eps : sizes) {
        if (!(eps > 0.0)) throw std::invalid_argument("slit size must be positive");
        double T;
        if (src == Geometry::chordal) {
            T = 0.25 * eps * eps;
        } else {
            if (eps >= 1.0) throw std::invalid_argument("radial slit must stay inside the disc");
            // slit length from the tip of the one-step radial map
            auto len = [&](double t) { return 1.0 - std::abs(radial_backward_step(p0, z0, t)); };
            double lo = 0.0, hi = 1e-6;
            while (len(hi) < eps) hi *= 2.0;
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                (len(mid) < eps ? lo : hi) = mid;
            }
            T = 0.5 * (lo + hi);
        }
        DrivingPath p = constant_path(src, z0, T, steps);
        TransportedChain ch = transport_chain(p, W, Direction::forward, T / static_cast<double>(steps) / 4.0);
        double cs = src == Geometry::chordal ? 2.0 * T : T;
        double ci = tgt == Geometry::chordal ? 2.0 * ch.u.back() : ch.u.back();
        double ratio = ci / cs;
        double rel = std::abs(ratio - expected) / expected;
        out.push_back({eps, cs, ci, ratio, expected, rel, rel > 0.05});
    }
    return out;
}

}  // namespace loewner
