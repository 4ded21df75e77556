#include "loewner/global_trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace loewner {

namespace {

double cross(cplx a, cplx b) { return std::real(a) * std::imag(b) - std::imag(a) * std::real(b); }

int orient(cplx p, cplx q, cplx r) {
    double v = cross(q - p, r - p);
    return (v > 0.0) - (v < 0.0);
}

bool on_segment(cplx p, cplx q, cplx r) {
    return std::min(std::real(p), std::real(q)) <= std::real(r) && std::real(r) <= std::max(std::real(p), std::real(q)) &&
           std::min(std::imag(p), std::imag(q)) <= std::imag(r) && std::imag(r) <= std::max(std::imag(p), std::imag(q));
}

bool segments_meet(cplx p1, cplx p2, cplx q1, cplx q2) {
    int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2), o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

double point_segment(cplx p, cplx q, cplx z) {
    cplx d = q - p;
    double l2 = std::norm(d);
    double s = l2 > 0.0 ? std::clamp(std::real((z - p) * std::conj(d)) / l2, 0.0, 1.0) : 0.0;
    return std::abs(z - (p + s * d));
}

}  // namespace

DrivingPath truncate_path(const DrivingPath& path, double T) {
    path.validate();
    if (T < 0.0 || T > path.horizon() * (1.0 + 1e-12)) throw std::invalid_argument("truncation outside the path");
    std::vector<double> t, v;
    for (std::size_t i = 0; i < path.t.size() && path.t[i] <= T; ++i) {
        t.push_back(path.t[i]);
        v.push_back(path.values[i]);
    }
    if (t.back() < T) {
        std::size_t i = t.size() - 1;
        double s = (T - path.t[i]) / (path.t[i + 1] - path.t[i]);
        t.push_back(T);
        v.push_back(path.values[i] + s * (path.values[i + 1] - path.values[i]));
    }
    DrivingPath out(path.geometry, std::move(t), std::move(v));
    out.kappa = path.kappa;
    out.rho = path.rho;
    return out;
}

GlobalTrace build_global_trace(const DrivingPath& full, double T_star, double eps_geom) {
    if (full.geometry != Geometry::chordal) throw std::invalid_argument("global trace is built for chordal paths");
    GlobalTrace g;
    g.T_star = T_star;
    if (full.kappa >= 4.0) g.warnings.push_back("kappa >= 4: trace need not be removable");
    DrivingPath p = truncate_path(full, T_star);
    const double l0 = p.values[0];
    const std::size_t n = p.n_steps();
    g.t = p.t;
    if (n == 0) {
        g.points = {cplx(l0, 0.0)};
        g.anchor_clearance = 1.0;
        return g;
    }
    auto tail = [&](cplx z, std::size_t from) {
        for (std::size_t k = from; k < n; ++k) z = chordal_backward_step(z, p.step_lambda(k), p.step_delta(k));
        return z;
    };
    // The tip anchor uses the same boundary evaluation as β(0).
    cplx w0 = tail(p.step_lambda(0), 0);
    cplx w1 = tail(cplx(l0, 1.0), 0);
    if (std::abs(w1 - w0) < 1e-12 * (1.0 + std::abs(w0)))
        throw NumericError("normalization-degenerate", "anchor images coincide");
    g.a = cplx(0.0, 1.0) / (w1 - w0);
    g.b = l0 - g.a * w0;
    g.phase_dev = std::abs(std::arg(g.a));
    g.points.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        try {
            cplx w = i == 0 ? w0 : i == n ? cplx(p.values[n], 0.0) : tail(p.step_lambda(i), i);
            g.points[i] = g.a * w + g.b;
        } catch (const NumericError&) {
            g.points[i] = cplx(NAN, NAN);
            g.gaps.push_back(i);
        }
    }
    g.points[0] = l0;  // exact by construction; kill the rounding
    std::vector<cplx> finite;
    for (cplx z : g.points)
        if (std::isfinite(std::real(z))) finite.push_back(z);
    g.anchor_clearance = distance_to_polyline(finite, cplx(l0, 1.0));
    if (g.anchor_clearance < eps_geom) g.warnings.push_back("trace passes through the interior anchor");
    if (!g.gaps.empty()) g.warnings.push_back("boundary evaluation failed at some nodes");
    return g;
}

double truncation_compatibility(const DrivingPath& path, double t1, double t2, double T,
                                const std::vector<cplx>& probes) {
    if (!(0.0 <= t1 && t1 <= t2 && t2 <= T)) throw std::invalid_argument("need t1 <= t2 <= T");
    MapStack whole = backward_stack(path, t1, T);
    MapStack outer = backward_stack(path, t2, T), inner = backward_stack(path, t1, t2);
    double worst = 0.0;
    for (cplx z : probes) {
        cplx d = evaluate_stack_value(whole, z) - evaluate_stack_value(outer, evaluate_stack_value(inner, z));
        worst = std::max(worst, std::abs(d));
    }
    return worst;
}

bool polyline_simple(const std::vector<cplx>& pts) {
    const std::size_t m = pts.size();
    for (std::size_t i = 0; i + 1 < m; ++i)
        for (std::size_t j = i + 2; j + 1 < m; ++j)
            if (segments_meet(pts[i], pts[i + 1], pts[j], pts[j + 1])) return false;
    return true;
}

double distance_to_polyline(const std::vector<cplx>& pts, cplx z) {
    if (pts.empty()) return std::numeric_limits<double>::infinity();
    double d = std::abs(z - pts[0]);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) d = std::min(d, point_segment(pts[i], pts[i + 1], z));
    return d;
}

DivergenceSeries divergence_functional(const DrivingPath& path, cplx z0) {
    if (path.geometry != Geometry::chordal) throw std::invalid_argument("divergence functional needs a chordal path");
    if (!(std::imag(z0) > 0.0)) throw std::invalid_argument("z0 must lie in the upper half-plane");
    path.validate();
    DivergenceSeries s;
    s.t = path.t;
    Jet J = Jet::identity(z0);
    s.N.push_back(std::imag(z0));
    for (std::size_t k = 0; k < path.n_steps(); ++k) {
        J = compose(chordal_backward_jet(J.v, path.step_lambda(k), path.step_delta(k)), J);
        s.N.push_back(std::imag(J.v) / std::abs(J.d1));
    }
    return s;
}

}  // namespace loewner
