#include "loewner/lattice.hpp"

#include <cmath>

namespace loewner {

namespace {

// One exact backward step applied to a real boundary jet.
TipJet advance(Geometry g, const TipJet& a, double lambda, double du) {
    if (du <= 0.0) return a;
    Jet P = g == Geometry::chordal ? chordal_backward_jet(a.v, lambda, du) : covering_backward_jet(a.v, lambda, du);
    double d1 = std::real(P.d1), d2 = std::real(P.d2), d3 = std::real(P.d3);
    if (!std::isfinite(d1) || d1 == 0.0 || std::abs(std::imag(P.v)) > 1e-9 * (1.0 + std::abs(P.v)))
        throw NumericError("lattice", "tip left the boundary");
    double S = d3 / d1 - 1.5 * (d2 / d1) * (d2 / d1);
    return {std::real(P.v), d1 * a.d1, S * a.d1 * a.d1 + a.S};
}

// Step of chain `a` across a cell edge where the other chain goes from b0 to b1.
TipJet across(Geometry g, const TipJet& a, const TipJet& b0, const TipJet& b1, double dt) {
    return advance(g, a, 0.5 * (b0.v + b1.v), 0.5 * (b0.d1 * b0.d1 + b1.d1 * b1.d1) * dt);
}

bool too_close(Geometry g, double x, double y, double thr) {
    if (g == Geometry::radial) return std::abs(std::sin(0.5 * (x - y))) < thr;
    return std::abs(x - y) < thr;
}

// Third derivative of the flow kernel, evaluated at the gap between tips.
double kernel_d3(Geometry g, double x) {
    if (g == Geometry::chordal) return -12.0 / (x * x * x * x);
    double c = 1.0 / std::tan(0.5 * x);
    double s2 = 1.0 + c * c;
    return -0.25 * s2 * (1.0 + 3.0 * c * c);
}

double trap_weight(const std::vector<double>& t, std::size_t i) {
    double w = 0.0;
    if (i > 0) w += 0.5 * (t[i] - t[i - 1]);
    if (i + 1 < t.size()) w += 0.5 * (t[i + 1] - t[i]);
    return w;
}

}  // namespace

LatticeResult goursat_lattice(Geometry g, const DrivingPath& p1, const DrivingPath& p2, const LatticeOptions& opt) {
    if (p1.geometry != g || p2.geometry != g) throw std::invalid_argument("lattice paths must share the geometry");
    const std::size_t n1 = p1.n_steps(), n2 = p2.n_steps();
    LatticeResult res;
    std::vector<TipJet> a1_prev(n1 + 1), a2_prev(n1 + 1), a1(n1 + 1), a2(n1 + 1);
    std::vector<double> cap(n1 + 1), lnF(n1 + 1);
    res.last_col.resize(n2 + 1);
    double dbl = 0.0;

    auto finish_row = [&](std::size_t j) {
        double t2 = p2.t[j];
        cap[0] = t2;
        lnF[0] = 0.0;
        double row_q = 0.0;
        for (std::size_t i = 0; i <= n1; ++i) {
            if (i > 0) {
                double dt = p1.step_delta(i - 1);
                cap[i] = cap[i - 1] + 0.5 * (a1[i - 1].d1 * a1[i - 1].d1 + a1[i].d1 * a1[i].d1) * dt;
                lnF[i] = lnF[i - 1] - 0.5 * (a1[i - 1].S + a1[i].S) * dt;
            }
            double q = a1[i].d1 * a1[i].d1 * a2[i].d1 * a2[i].d1 * kernel_d3(g, a1[i].v - a2[i].v);
            row_q += trap_weight(p1.t, i) * q;
            if (opt.visit) opt.visit({i, j, p1.t[i], t2, a1[i], a2[i], cap[i], lnF[i]});
        }
        dbl += trap_weight(p2.t, j) * row_q;
        res.last_col[j] = a2[n1];
    };

    auto check = [&](std::size_t i, std::size_t j) {
        if (i == 0 && j == 0) return false;
        if (too_close(g, a1[i].v, a2[i].v, opt.exit_threshold)) {
            res.exited = true;
            res.exit_i = i;
            res.exit_j = j;
            return true;
        }
        return false;
    };

    auto fail = [&](std::size_t i, std::size_t j) {
        res.exited = true;
        res.exit_i = i;
        res.exit_j = j;
        return res;
    };

    // Row j = 0: chain 1 is its own driver, chain 2 is pushed along by it.
    for (std::size_t i = 0; i <= n1; ++i) a1[i] = {p1.values[i], 1.0, 0.0};
    a2[0] = {p2.values[0], 1.0, 0.0};
    try {
        for (std::size_t i = 1; i <= n1; ++i) {
            a2[i] = across(g, a2[i - 1], a1[i - 1], a1[i], p1.step_delta(i - 1));
            if (check(i, 0)) return res;
        }
    } catch (const NumericError&) {
        return fail(0, 0);
    }
    finish_row(0);

    for (std::size_t j = 1; j <= n2; ++j) {
        std::swap(a1, a1_prev);
        std::swap(a2, a2_prev);
        double dt2 = p2.step_delta(j - 1);
        try {
            a2[0] = {p2.values[j], 1.0, 0.0};
            a1[0] = across(g, a1_prev[0], a2_prev[0], a2[0], dt2);
            if (check(0, j)) return res;
            for (std::size_t i = 1; i <= n1; ++i) {
                double dt1 = p1.step_delta(i - 1);
                TipJet b1 = across(g, a1_prev[i], a2_prev[i], a2_prev[i], dt2);
                TipJet b2 = across(g, a2[i - 1], a1[i - 1], a1[i - 1], dt1);
                for (int c = 0; c < opt.corrector_passes; ++c) {
                    TipJet n1j = across(g, a1_prev[i], a2_prev[i], b2, dt2);
                    TipJet n2j = across(g, a2[i - 1], a1[i - 1], b1, dt1);
                    b1 = n1j;
                    b2 = n2j;
                }
                a1[i] = b1;
                a2[i] = b2;
                if (check(i, j)) return res;
            }
        } catch (const NumericError&) {
            return fail(0, j);
        }
        finish_row(j);
    }

    res.last_row = a1;
    res.corner = {n1, n2, p1.horizon(), p2.horizon(), a1[n1], a2[n1], cap[n1], lnF[n1]};
    double cc = p1.horizon(), fc = 0.0;
    for (std::size_t j = 1; j <= n2; ++j) {
        const TipJet &u = res.last_col[j - 1], &v = res.last_col[j];
        double dt = p2.step_delta(j - 1);
        cc += 0.5 * (u.d1 * u.d1 + v.d1 * v.d1) * dt;
        fc -= 0.5 * (u.S + v.S) * dt;
    }
    res.cap_by_columns = cc;
    res.lnF_by_columns = fc;
    res.lnF_double_integral = dbl;
    return res;
}

MapStack stack_from_tips(Geometry g, const std::vector<double>& t, const std::vector<TipJet>& tips) {
    if (t.size() != tips.size() || t.empty()) throw std::invalid_argument("tip data must match the time grid");
    MapStack s;
    s.geometry = g;
    s.direction = Direction::backward;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        double du = 0.5 * (tips[i].d1 * tips[i].d1 + tips[i + 1].d1 * tips[i + 1].d1) * (t[i + 1] - t[i]);
        s.steps.push_back({0.5 * (tips[i].v + tips[i + 1].v), du});
    }
    s.t_b = s.duration();
    return s;
}

}  // namespace loewner
