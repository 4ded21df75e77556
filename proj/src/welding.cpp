#include "loewner/welding.hpp"

#include <cmath>

namespace loewner {

namespace {

// Largest r in (lo, hi) with pred(r) true, assuming pred is true below and false above.
template <class P>
double bisect_edge(P pred, double lo, double hi) {
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (pred(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

bool swallowed_by(const DrivingPath& p, double x, int side, double tau) {
    auto s = swallow_time(p, x);
    return s && s->side == side && s->tau <= tau;
}

}  // namespace

std::optional<WeldingPair> welding_partner(const DrivingPath& p, double x) {
    auto sx = swallow_time(p, x);
    if (!sx) return std::nullopt;
    double x0 = p.values[0];
    int side = -sx->side;
    double tau = sx->tau;
    auto pred = [&](double r) { return swallowed_by(p, x0 + side * r, side, tau); };
    double hi;
    if (p.geometry == Geometry::radial) {
        hi = two_pi;
    } else {
        hi = std::max(std::abs(x - x0), 1e-12);
        for (int k = 0; pred(hi); ++k) {
            hi *= 2.0;
            if (k > 200) throw WeldingError("no-partner", "partner search diverged");
        }
    }
    double r = bisect_edge(pred, 0.0, hi);
    return WeldingPair{x, x0 + side * r, tau};
}

std::pair<double, double> support_interval(const DrivingPath& p) {
    double x0 = p.values[0], T = p.horizon();
    if (p.n_steps() == 0) return {x0, x0};
    auto edge = [&](int side) {
        auto pred = [&](double r) { return swallowed_by(p, x0 + side * r, side, T); };
        double hi;
        if (p.geometry == Geometry::radial) {
            hi = two_pi;
        } else {
            hi = 1e-6;
            while (pred(hi)) hi *= 2.0;
        }
        return bisect_edge(pred, 0.0, hi);
    };
    return {x0 - edge(-1), x0 + edge(1)};
}

Welding compute_welding_at(const DrivingPath& p, const std::vector<double>& xs) {
    Welding w;
    w.geometry = p.geometry;
    w.p0 = p.values[0];
    for (double x : xs) {
        auto pr = welding_partner(p, x);
        if (!pr) throw WeldingError("horizon-too-short", "abscissa not swallowed before the horizon");
        w.pairs.push_back(*pr);
    }
    return w;
}

Welding compute_welding(const DrivingPath& p, std::size_t n_pairs) {
    if (n_pairs == 0) {
        Welding w;
        w.geometry = p.geometry;
        w.p0 = p.values[0];
        return w;
    }
    auto [a, b] = support_interval(p);
    double x0 = p.values[0];
    double reach = b - x0;
    if (!(reach > 0.0)) throw WeldingError("horizon-too-short", "empty support");
    std::vector<double> xs;
    // geometric ladder from 1e-3 of the support up to 99% of it
    for (std::size_t j = 0; j < n_pairs; ++j) {
        double f = n_pairs == 1 ? 0.5 : std::pow(1e-3, 1.0 - static_cast<double>(j) / (n_pairs - 1)) * 0.99;
        xs.push_back(x0 + f * reach);
    }
    (void)a;
    return compute_welding_at(p, xs);
}

FixedPointEstimate second_fixed_point(const DrivingPath& p, double max_arc) {
    if (p.geometry != Geometry::radial) throw std::invalid_argument("second fixed point needs a radial path");
    if (p.n_steps() == 0) throw WeldingError("insufficient-horizon", "zero horizon");
    auto [a, b] = support_interval(p);
    double x0 = p.values[0];
    double plus = b - x0, minus = x0 - a;
    double arc = two_pi - plus - minus;
    if (arc > max_arc) throw WeldingError("insufficient-horizon", "unswallowed arc still too wide");
    return {wrap_angle(x0 + plus + 0.5 * arc), arc};
}

Welding conjugate_welding(const Welding& w, const MobiusMap& W) {
    if (W.source_geometry() != w.geometry) throw WeldingError("symmetry-violation", "map domain does not match welding");
    try {
        W.validate();
    } catch (const std::invalid_argument& e) {
        throw WeldingError("symmetry-violation", e.what());
    }
    Welding r;
    r.geometry = W.target_geometry();
    for (const auto& pr : w.pairs) r.pairs.push_back({mobius_boundary(W, pr.x), mobius_boundary(W, pr.y), pr.tau});
    r.p0 = mobius_boundary(W, w.p0);
    bool known = w.geometry == Geometry::chordal || std::isfinite(w.p_inf);
    r.p_inf = known ? mobius_boundary(W, w.p_inf) : w.p_inf;
    r.p_inf_error = w.p_inf_error;
    return r;
}

WeldingComparison compare_weldings(const std::string& functional, const std::vector<double>& a,
                                   const std::vector<double>& b) {
    return {functional, ks_two_sample(a, b)};
}

}  // namespace loewner
