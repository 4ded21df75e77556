#include "loewner/hull.hpp"

#include "loewner/lattice.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace loewner {

namespace {

bool in_support(const MapStack& s, double x, bool continuous) {
    return swallow_time(s, x, continuous).has_value();
}

double bisect(const MapStack& s, double c, int side, bool continuous) {
    auto pred = [&](double r) { return in_support(s, c + side * r, continuous); };
    double lo = 0.0, hi;
    if (s.geometry == Geometry::radial) {
        hi = two_pi;
        if (pred(hi)) return hi;
    } else {
        hi = 1e-6;
        for (int k = 0; pred(hi); ++k) {
            lo = hi;
            hi *= 2.0;
            if (k > 200) throw NumericError("support", "support search diverged");
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(c) + hi); ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (pred(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double boundary_image(const MapStack& s, double x) {
    if (s.geometry == Geometry::radial) return std::real(evaluate_covering_value(s, cplx(x, 0.0)));
    return std::real(evaluate_stack_value(s, cplx(x, 0.0)));
}

Interval base_from_support(const MapStack& s, const Interval& sup) {
    if (s.steps.empty()) return sup;
    double eps = 1e-10 * (1.0 + std::abs(sup.a) + std::abs(sup.b));
    double a1 = boundary_image(s, sup.a - eps), a2 = boundary_image(s, sup.a - 4.0 * eps);
    double b1 = boundary_image(s, sup.b + eps), b2 = boundary_image(s, sup.b + 4.0 * eps);
    return {a1, b1, std::max(std::abs(a1 - a2), std::abs(b1 - b2))};
}

// Real preimage of y under one backward slit step; y must differ from lambda.
double pull_back(double y, double lambda, double delta) {
    double d = y - lambda;
    return lambda + std::copysign(std::sqrt(d * d + 4.0 * delta), d);
}

}  // namespace

Interval support_near(const MapStack& s, double center, bool continuous) {
    if (s.steps.empty()) return {center, center, 0.0};
    double r = bisect(s, center, 1, continuous), l = bisect(s, center, -1, continuous);
    double err = 1e-14 * (1.0 + std::abs(center) + std::max(l, r));
    return {center - l, center + r, err};
}

Interval support_of(const Hull& h) {
    if (h.empty()) {
        double c = h.path ? h.path->values[0] : 0.0;
        return {c, c, 0.0};
    }
    return support_near(h.stack, h.stack.steps[0].lambda, h.continuous);
}

Hull make_hull(const MapStack& s, bool continuous) {
    if (s.direction != Direction::backward) throw std::invalid_argument("hulls are built from backward stacks");
    Hull h;
    h.geometry = s.geometry;
    h.stack = s;
    h.continuous = continuous;
    h.capacity = capacity(s);
    h.support = support_of(h);
    h.base = base_from_support(s, h.support);
    return h;
}

Hull empty_hull(Geometry g) {
    MapStack s;
    s.geometry = g;
    return make_hull(s, true);
}

Hull segment_hull(const DrivingPath& path, double t1, double t2) {
    if (!(t1 >= 0.0 && t1 <= t2 && t2 <= path.horizon() * (1.0 + 1e-14)))
        throw std::out_of_range("segment times outside the path horizon");
    MapStack s = backward_stack(path, t1, t2);
    Hull h = make_hull(s, true);
    // Sub-path shifted to start at 0, endpoints interpolated.
    auto value_at = [&](double t) {
        auto it = std::upper_bound(path.t.begin(), path.t.end(), t);
        if (it == path.t.begin()) return path.values.front();
        if (it == path.t.end()) return path.values.back();
        std::size_t k = static_cast<std::size_t>(it - path.t.begin());
        double u = (t - path.t[k - 1]) / (path.t[k] - path.t[k - 1]);
        return path.values[k - 1] + u * (path.values[k] - path.values[k - 1]);
    };
    std::vector<double> tt{0.0}, vv{value_at(t1)};
    for (std::size_t k = 0; k < path.t.size(); ++k)
        if (path.t[k] > t1 && path.t[k] < t2) {
            tt.push_back(path.t[k] - t1);
            vv.push_back(path.values[k]);
        }
    if (t2 > t1) {
        tt.push_back(t2 - t1);
        vv.push_back(value_at(t2));
    }
    DrivingPath sub(path.geometry, tt, vv);
    sub.kappa = path.kappa;
    sub.rho = path.rho;
    if (!h.empty()) {
        Trace tr = compute_trace(sub);
        for (std::size_t k = 0; k < tr.points.size(); ++k)
            if (std::isfinite(std::real(tr.points[k]))) h.trace.push_back(tr.points[k]);
    }
    if (h.empty()) h.support = h.base = {vv[0], vv[0], 0.0};
    h.path = std::move(sub);
    return h;
}

Hull dot_product(const Hull& K1, const Hull& K2) {
    if (K1.geometry != K2.geometry) throw std::invalid_argument("hull product needs matching geometry");
    if (K2.empty()) return K1;
    if (K1.empty()) return K2;
    MapStack s = K1.stack.after(K2.stack);
    // The driver is continuous across the joint only if the last step of K2 meets the first of K1.
    bool joint = std::abs(K2.stack.steps.back().lambda - K1.stack.steps.front().lambda) < 1e-12;
    Hull h = make_hull(s, K1.continuous && K2.continuous && joint);
    h.capacity = K1.capacity + K2.capacity;
    return h;
}

BoundaryMeasure boundary_measure(const Hull& h, std::size_t n_nodes) {
    if (h.geometry != Geometry::chordal) throw std::invalid_argument("boundary measure needs a chordal hull");
    if (n_nodes < 8) throw std::invalid_argument("boundary measure needs at least 8 nodes");
    BoundaryMeasure m;
    m.hull_of_support = h.support;
    if (h.empty()) return m;
    const auto& st = h.stack.steps;
    // The density has square-root kinks where points enter the hull, i.e. at the pull-backs of
    // λ_k ± 2√δ_k. Between consecutive kinks it is smooth.
    std::vector<double> br;
    for (std::size_t k = 0; k < st.size(); ++k) {
        if (st[k].delta <= 0.0) continue;
        for (int side : {-1, 1}) {
            double x = st[k].lambda + side * 2.0 * std::sqrt(st[k].delta);
            for (std::size_t j = k; j-- > 0;)
                if (st[j].delta > 0.0) x = pull_back(x, st[j].lambda, st[j].delta);
            br.push_back(x);
        }
    }
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    std::vector<std::pair<double, double>> pieces;
    for (std::size_t k = 0; k + 1 < br.size(); ++k)
        if (br[k + 1] - br[k] > 1e-15 * (1.0 + std::abs(br[k]))) pieces.emplace_back(br[k], br[k + 1]);
    using GL = boost::math::quadrature::gauss<double, 10>;
    const std::size_t per = 10;
    std::size_t sub = std::max<std::size_t>(1, (n_nodes + per * pieces.size() - 1) / (per * std::max<std::size_t>(1, pieces.size())));
    std::vector<double> gx, gw;  // full rule on [-1, 1]
    for (std::size_t i = 0; i < GL::abscissa().size(); ++i) {
        gx.push_back(GL::abscissa()[i]);
        gw.push_back(GL::weights()[i]);
        if (GL::abscissa()[i] != 0.0) {
            gx.push_back(-GL::abscissa()[i]);
            gw.push_back(GL::weights()[i]);
        }
    }
    for (const auto& [a, b] : pieces) {
        // x = a + (b − a)(1 − cos θ)/2 turns the endpoint square roots into smooth functions of θ
        for (std::size_t s = 0; s < sub; ++s) {
            double t0 = pi * static_cast<double>(s) / static_cast<double>(sub);
            double t1 = pi * static_cast<double>(s + 1) / static_cast<double>(sub);
            for (std::size_t q = 0; q < gx.size(); ++q) {
                double th = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * gx[q];
                double x = a + 0.5 * (b - a) * (1.0 - std::cos(th));
                double wt = 0.5 * (t1 - t0) * gw[q] * 0.5 * (b - a) * std::sin(th);
                double rho;
                try {
                    rho = std::imag(evaluate_stack_value(h.stack, cplx(x, 0.0))) / pi;
                } catch (const NumericError&) {
                    rho = NAN;
                }
                if (!std::isfinite(rho)) {
                    m.dropped.push_back(x);
                    continue;
                }
                rho = std::max(rho, 0.0);
                m.nodes.push_back(x);
                m.density.push_back(rho);
                m.weights.push_back(wt);
                m.total_mass += wt * rho;
            }
        }
    }
    // nodes in increasing order
    std::vector<std::size_t> idx(m.nodes.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return m.nodes[i] < m.nodes[j]; });
    BoundaryMeasure out = m;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.nodes[i] = m.nodes[idx[i]];
        out.density[i] = m.density[idx[i]];
        out.weights[i] = m.weights[idx[i]];
    }
    return out;
}

cplx eval_by_measure(const BoundaryMeasure& m, cplx z) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < m.nodes.size(); ++k) acc += m.weights[k] * m.density[k] / (z - m.nodes[k]);
    return z - acc;
}

bool near_support(const BoundaryMeasure& m, cplx z) {
    const auto& x = m.nodes;
    if (x.size() < 2) return false;
    double re = std::real(z);
    std::size_t k = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), re) - x.begin());
    k = std::clamp<std::size_t>(k, 1, x.size() - 1);
    double spacing = x[k] - x[k - 1];
    if (k + 1 < x.size()) spacing = std::max(spacing, x[k + 1] - x[k]);
    double dx = std::max({m.hull_of_support.a - re, re - m.hull_of_support.b, 0.0});
    return std::hypot(dx, std::imag(z)) < spacing;
}

QuotientUnion quotient_union(const Hull& K1, const Hull& K2) {
    if (K1.geometry != Geometry::chordal || K2.geometry != Geometry::chordal)
        throw std::invalid_argument("quotient union is implemented for chordal hulls");
    QuotientUnion q;
    if (K2.empty()) {
        q.H1 = K1;
        q.H2 = empty_hull(Geometry::chordal);
        q.joined = K1;
        q.support = {K1.support};
        return q;
    }
    if (K1.empty()) {
        q.H1 = empty_hull(Geometry::chordal);
        q.H2 = K2;
        q.joined = K2;
        q.support = {K2.support};
        return q;
    }
    if (!K1.path || !K2.path) throw std::invalid_argument("quotient union needs chain-generated hulls");
    if (!(K1.support.b < K2.support.a || K2.support.b < K1.support.a))
        throw std::invalid_argument("support-overlap");

    LatticeResult lat = goursat_lattice(Geometry::chordal, *K1.path, *K2.path);
    if (lat.exited) throw NumericError("lattice", "hull tips collided in the lattice");

    MapStack s1 = stack_from_tips(Geometry::chordal, K1.path->t, lat.last_row);
    MapStack s2 = stack_from_tips(Geometry::chordal, K2.path->t, lat.last_col);
    q.H1 = make_hull(s1, true);
    q.H2 = make_hull(s2, true);
    q.joined = make_hull(s1.after(backward_stack(*K2.path)), false);
    q.joined.capacity = q.H1.capacity + K2.capacity;
    for (cplx z : K1.trace) q.H1.trace.push_back(evaluate_stack_value(s2, z));
    for (cplx z : K2.trace) q.H2.trace.push_back(evaluate_stack_value(s1, z));
    q.support = {support_near(q.joined.stack, 0.5 * (K1.support.a + K1.support.b), false),
                 support_near(q.joined.stack, 0.5 * (K2.support.a + K2.support.b), false)};
    return q;
}

}  // namespace loewner
