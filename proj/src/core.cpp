#include "loewner/core.hpp"

#include <algorithm>
#include <cmath>

namespace loewner {

namespace {

const cplx I(0.0, 1.0);

cplx fix_zero(cplx z) {
    if (std::imag(z) == 0.0) return {std::real(z), 0.0};
    return z;
}

// Jet of a map with (f - λ)^2 = w^2 + c, given s = f - λ and w = z - λ.
Jet quadratic_jet(cplx lambda_plus_s, cplx s, cplx w) {
    if (s == 0.0) throw NumericError("singular-jet", "jet requested at a branch point");
    Jet j;
    j.v = lambda_plus_s;
    j.d1 = w / s;
    j.d2 = (1.0 - j.d1 * j.d1) / s;
    j.d3 = -3.0 * j.d1 * j.d2 / s;
    return j;
}

// Solves cos(V/2) = c cos(u/2) for V in the closed upper half-plane, continuing the
// identity at c = 1. one_minus_c is passed separately to keep precision near the tip.
cplx solve_cos(cplx u, double c, double one_minus_c) {
    if (std::imag(u) < 0.0) return std::conj(solve_cos(std::conj(u), c, one_minus_c));
    double n = std::floor((std::real(u) + pi) / two_pi);
    cplx u0 = u - two_pi * n;
    if (std::imag(u0) == 0.0) {
        double x = std::real(u0);
        double s = std::sin(0.25 * x);
        double m = one_minus_c + 2.0 * c * s * s;  // 1 - c cos(x/2)
        double V;
        if (m >= 0.0) {
            V = 4.0 * std::asin(std::sqrt(std::min(1.0, 0.5 * m)));
            if (x < 0.0) V = -V;
            return {V + two_pi * n, 0.0};
        }
        return {two_pi * n, 4.0 * std::asinh(std::sqrt(-0.5 * m))};
    }
    cplx s = std::sin(0.25 * u0);
    cplx m = one_minus_c + 2.0 * c * s * s;
    cplx V = 4.0 * std::asin(std::sqrt(0.5 * m));
    double scale = 1.0 + std::abs(V);
    if (std::abs(std::imag(V)) > 1e-13 * scale) {
        if (std::imag(V) < 0.0) V = -V;
    } else if (std::real(V) * std::real(u0) < 0.0) {
        V = -V;
    }
    return V + two_pi * n;
}

Jet covering_jet(cplx z, double lambda, double c, double one_minus_c) {
    cplx u = z - lambda;
    cplx V = solve_cos(u, c, one_minus_c);
    double n = std::floor((std::real(u) + pi) / two_pi);
    cplx u0 = u - two_pi * n;
    cplx V0 = V - two_pi * n;
    cplx sV = std::sin(0.5 * V0);
    if (std::abs(sV) == 0.0) throw NumericError("singular-jet", "covering jet at a branch point");
    cplx cotV = std::cos(0.5 * V0) / sV;
    Jet j;
    j.v = lambda + V;
    j.d1 = c * std::sin(0.5 * u0) / sV;
    j.d2 = 0.5 * cotV * (1.0 - j.d1 * j.d1);
    j.d3 = -0.25 * j.d1 * (1.0 - j.d1 * j.d1) - 1.5 * cotV * j.d1 * j.d2;
    return j;
}

// Series of the disc step near the origin; a = f'(0).
Jet disc_series_jet(cplx z, double lambda, double a) {
    cplx rot = std::polar(1.0, -lambda);
    cplx w = rot * z;
    double b = 2.0 * a * a - 2.0 * a;
    double c = 3.0 * a + 4.0 * a * b - 3.0 * a * a * a;
    Jet j;
    j.v = (a * w + b * w * w + c * w * w * w) / rot;
    j.d1 = a + 2.0 * b * w + 3.0 * c * w * w;
    j.d2 = (2.0 * b + 6.0 * c * w) * rot;
    j.d3 = 6.0 * c * rot * rot;
    return j;
}

cplx to_covering(cplx z) { return {std::arg(z), -std::log(std::abs(z))}; }
cplx from_covering(cplx v) { return std::polar(std::exp(-std::imag(v)), std::real(v)); }

Jet log_jet(cplx z) {
    Jet j;
    j.v = to_covering(z);
    j.d1 = -I / z;
    j.d2 = I / (z * z);
    j.d3 = -2.0 * I / (z * z * z);
    return j;
}

Jet exp_jet(cplx v) {
    cplx e = from_covering(v);
    return {e, I * e, -e, -I * e};
}

Jet disc_jet(cplx z, double lambda, double delta, bool backward) {
    double a = backward ? std::exp(-delta) : std::exp(delta);
    if (std::abs(z) < 1e-6) return disc_series_jet(z, lambda, a);
    Jet l = log_jet(z);
    Jet c = backward ? covering_backward_jet(l.v, lambda, delta) : covering_forward_jet(l.v, lambda, delta);
    return compose(exp_jet(c.v), compose(c, l));
}

}  // namespace

const char* to_string(Geometry g) { return g == Geometry::chordal ? "chordal" : "radial"; }

Geometry geometry_from_string(const std::string& s) {
    if (s == "chordal") return Geometry::chordal;
    if (s == "radial") return Geometry::radial;
    throw std::invalid_argument("unknown geometry: " + s);
}

cplx Jet::schwarzian() const {
    cplx r = d2 / d1;
    return d3 / d1 - 1.5 * r * r;
}

Jet compose(const Jet& F, const Jet& g) {
    Jet h;
    h.v = F.v;
    h.d1 = F.d1 * g.d1;
    h.d2 = F.d2 * g.d1 * g.d1 + F.d1 * g.d2;
    h.d3 = F.d3 * g.d1 * g.d1 * g.d1 + 3.0 * F.d2 * g.d1 * g.d2 + F.d1 * g.d3;
    return h;
}

cplx chordal_backward_step(cplx z, double lambda, double delta, StepMode mode) {
    if (delta < 0.0) throw std::invalid_argument("negative step duration");
    if (delta == 0.0) return z;
    cplx w = fix_zero(z - lambda);
    double a = 2.0 * std::sqrt(delta);
    if (mode == StepMode::interior && std::imag(w) == 0.0 && std::abs(std::real(w)) <= a)
        throw NumericError("branch-ambiguity", "point on the support of a backward step");
    return fix_zero(lambda + std::sqrt(w - a) * std::sqrt(w + a));
}

cplx chordal_forward_step(cplx z, double lambda, double delta) {
    if (delta < 0.0) throw std::invalid_argument("negative step duration");
    if (delta == 0.0) return z;
    cplx w = fix_zero(z - lambda);
    if (w == 0.0) throw NumericError("domain", "forward step at the base of its slit");
    if (std::real(w) == 0.0 && std::imag(w) > 0.0 && std::imag(w) < 2.0 * std::sqrt(delta))
        throw NumericError("domain", "point inside the slit being erased");
    return fix_zero(lambda + w * std::sqrt(1.0 + 4.0 * delta / (w * w)));
}

Jet chordal_backward_jet(cplx z, double lambda, double delta) {
    if (delta == 0.0) return Jet::identity(z);
    cplx f = chordal_backward_step(z, lambda, delta);
    return quadratic_jet(f, f - lambda, z - lambda);
}

Jet chordal_forward_jet(cplx z, double lambda, double delta) {
    if (delta == 0.0) return Jet::identity(z);
    cplx g = chordal_forward_step(z, lambda, delta);
    return quadratic_jet(g, g - lambda, z - lambda);
}

cplx covering_backward_step(cplx z, double lambda, double delta) {
    if (delta < 0.0) throw std::invalid_argument("negative step duration");
    if (delta == 0.0) return z;
    return lambda + solve_cos(z - lambda, std::exp(0.5 * delta), -std::expm1(0.5 * delta));
}

cplx covering_forward_step(cplx z, double lambda, double delta) {
    if (delta < 0.0) throw std::invalid_argument("negative step duration");
    if (delta == 0.0) return z;
    return lambda + solve_cos(z - lambda, std::exp(-0.5 * delta), -std::expm1(-0.5 * delta));
}

Jet covering_backward_jet(cplx z, double lambda, double delta) {
    if (delta == 0.0) return Jet::identity(z);
    return covering_jet(z, lambda, std::exp(0.5 * delta), -std::expm1(0.5 * delta));
}

Jet covering_forward_jet(cplx z, double lambda, double delta) {
    if (delta == 0.0) return Jet::identity(z);
    return covering_jet(z, lambda, std::exp(-0.5 * delta), -std::expm1(-0.5 * delta));
}

cplx radial_backward_step(cplx z, double lambda, double delta) {
    if (delta == 0.0 || z == 0.0) return z;
    if (std::abs(z) < 1e-6) return disc_series_jet(z, lambda, std::exp(-delta)).v;
    return from_covering(covering_backward_step(to_covering(z), lambda, delta));
}

cplx radial_forward_step(cplx z, double lambda, double delta) {
    if (delta == 0.0 || z == 0.0) return z;
    if (std::abs(z) < 1e-6) return disc_series_jet(z, lambda, std::exp(delta)).v;
    return from_covering(covering_forward_step(to_covering(z), lambda, delta));
}

Jet radial_backward_jet(cplx z, double lambda, double delta) {
    if (delta == 0.0) return Jet::identity(z);
    return disc_jet(z, lambda, delta, true);
}

Jet radial_forward_jet(cplx z, double lambda, double delta) {
    if (delta == 0.0) return Jet::identity(z);
    return disc_jet(z, lambda, delta, false);
}

namespace {

template <class F>
cplx rk4_adaptive(cplx y, double T, F rhs, double tol) {
    auto step = [&](cplx y0, double h) {
        cplx k1 = rhs(y0);
        cplx k2 = rhs(y0 + 0.5 * h * k1);
        cplx k3 = rhs(y0 + 0.5 * h * k2);
        cplx k4 = rhs(y0 + h * k3);
        return y0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };
    double t = 0.0;
    double h = std::min(T, 1e-3);
    while (t < T) {
        if (t + h > T) h = T - t;
        cplx full = step(y, h);
        cplx half = step(step(y, 0.5 * h), 0.5 * h);
        double err = std::abs(half - full) / 15.0;
        double scale = std::max(1.0, std::abs(half));
        if (err <= tol * scale || h < 1e-14) {
            y = half + (half - full) / 15.0;
            t += h;
            double grow = err > 0 ? 0.9 * std::pow(tol * scale / err, 0.2) : 4.0;
            h *= std::clamp(grow, 0.2, 4.0);
        } else {
            h *= std::clamp(0.9 * std::pow(tol * scale / err, 0.2), 0.1, 0.5);
        }
    }
    return y;
}

}  // namespace

cplx rk4_chordal_backward(cplx z, double lambda, double delta, double tol) {
    return rk4_adaptive(z, delta, [&](cplx f) { return -2.0 / (f - lambda); }, tol);
}

cplx rk4_radial_backward(cplx z, double lambda, double delta, double tol) {
    cplx e = std::polar(1.0, lambda);
    return rk4_adaptive(z, delta, [&](cplx f) { return -f * (e + f) / (e - f); }, tol);
}

double MapStack::duration() const {
    double s = 0.0;
    for (const auto& st : steps) s += st.delta;
    return s;
}

MapStack MapStack::inverse() const {
    MapStack r = *this;
    r.direction = direction == Direction::backward ? Direction::forward : Direction::backward;
    std::reverse(r.steps.begin(), r.steps.end());
    return r;
}

MapStack MapStack::after(const MapStack& other) const {
    if (other.geometry != geometry || other.direction != direction)
        throw std::invalid_argument("stack composition needs matching geometry and direction");
    MapStack r = other;
    r.steps.insert(r.steps.end(), steps.begin(), steps.end());
    r.t_b = other.t_b + duration();
    return r;
}

cplx evaluate_covering_value(const MapStack& s, cplx z) {
    bool back = s.direction == Direction::backward;
    for (const auto& st : s.steps)
        z = back ? covering_backward_step(z, st.lambda, st.delta) : covering_forward_step(z, st.lambda, st.delta);
    return z;
}

Jet evaluate_covering(const MapStack& s, cplx z, int order) {
    if (order == 0) return {evaluate_covering_value(s, z), 1.0, 0.0, 0.0};
    bool back = s.direction == Direction::backward;
    Jet j = Jet::identity(z);
    for (const auto& st : s.steps)
        j = compose(back ? covering_backward_jet(j.v, st.lambda, st.delta)
                         : covering_forward_jet(j.v, st.lambda, st.delta),
                    j);
    return j;
}

cplx evaluate_stack_value(const MapStack& s, cplx z) {
    bool back = s.direction == Direction::backward;
    if (s.geometry == Geometry::chordal) {
        for (const auto& st : s.steps)
            z = back ? chordal_backward_step(z, st.lambda, st.delta) : chordal_forward_step(z, st.lambda, st.delta);
        return z;
    }
    if (z == 0.0 || s.steps.empty()) return z;
    if (std::abs(z) < 1e-6) return evaluate_stack(s, z, 1).v;
    return from_covering(evaluate_covering_value(s, to_covering(z)));
}

Jet evaluate_stack(const MapStack& s, cplx z, int order) {
    if (order == 0) return {evaluate_stack_value(s, z), 1.0, 0.0, 0.0};
    bool back = s.direction == Direction::backward;
    if (s.geometry == Geometry::chordal) {
        Jet j = Jet::identity(z);
        for (const auto& st : s.steps)
            j = compose(back ? chordal_backward_jet(j.v, st.lambda, st.delta)
                             : chordal_forward_jet(j.v, st.lambda, st.delta),
                        j);
        return j;
    }
    if (s.steps.empty()) return Jet::identity(z);
    if (std::abs(z) < 1e-6) {
        Jet j = Jet::identity(z);
        for (const auto& st : s.steps)
            j = compose(back ? radial_backward_jet(j.v, st.lambda, st.delta)
                             : radial_forward_jet(j.v, st.lambda, st.delta),
                        j);
        return j;
    }
    Jet l = log_jet(z);
    Jet c = evaluate_covering(s, l.v, order);
    return compose(exp_jet(c.v), compose(c, l));
}

double capacity(const MapStack& s) {
    double d = s.duration();
    return s.geometry == Geometry::chordal ? 2.0 * d : d;
}

double capacity_from_map(const MapStack& s) {
    double sign = s.direction == Direction::backward ? -1.0 : 1.0;
    if (s.geometry == Geometry::radial) {
        Jet j = evaluate_stack(s, 0.0, 1);
        return sign * std::log(std::abs(j.d1));
    }
    if (s.steps.empty()) return 0.0;
    // Residue at infinity of f(z) - z on a circle enclosing the support.
    double reach = 0.0;
    for (const auto& st : s.steps) reach = std::max(reach, std::abs(st.lambda));
    double R = 2.0 * (reach + 4.0 * std::sqrt(s.duration()) + 1.0);
    const int M = 256;
    cplx acc = 0.0;
    for (int k = 0; k < M; ++k) {
        double th = two_pi * (k + 0.5) / M;
        cplx z = std::polar(R, th);
        acc += (evaluate_stack_value(s, z) - z) * z;
    }
    return sign * std::real(acc) / M;
}

DrivingPath::DrivingPath(Geometry g, std::vector<double> t_grid, std::vector<double> vals)
    : geometry(g), t(std::move(t_grid)), values(std::move(vals)) {
    validate();
}

void DrivingPath::validate() const {
    if (t.empty() || t.size() != values.size()) throw std::invalid_argument("driving path needs matching grids");
    if (t[0] != 0.0) throw std::invalid_argument("driving path must start at t=0");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(values[i]) || !std::isfinite(t[i])) throw std::invalid_argument("non-finite driving data");
        if (i > 0 && !(t[i] > t[i - 1])) throw std::invalid_argument("time grid must be strictly increasing");
    }
}

DrivingPath constant_path(Geometry g, double value, double T, std::size_t n) {
    return function_path(g, T, n, [value](double) { return value; });
}

DrivingPath function_path(Geometry g, double T, std::size_t n, const std::function<double(double)>& fn) {
    std::vector<double> t, v;
    if (T <= 0.0 || n == 0) {
        t = {0.0};
        v = {fn(0.0)};
    } else {
        for (std::size_t i = 0; i <= n; ++i) {
            double ti = T * static_cast<double>(i) / static_cast<double>(n);
            t.push_back(ti);
            v.push_back(fn(ti));
        }
    }
    return DrivingPath(g, std::move(t), std::move(v));
}

MapStack backward_stack(const DrivingPath& p, double t1, double t2) {
    if (t1 < 0.0 || t2 < t1 || t2 > p.horizon() * (1.0 + 1e-14))
        throw std::out_of_range("stack interval outside the path horizon");
    MapStack s;
    s.geometry = p.geometry;
    s.direction = Direction::backward;
    s.t_a = t1;
    s.t_b = t2;
    for (std::size_t i = 0; i < p.n_steps(); ++i) {
        double a = std::max(p.t[i], t1), b = std::min(p.t[i + 1], t2);
        if (b > a) s.steps.push_back({p.step_lambda(i), b - a});
    }
    return s;
}

MapStack backward_stack(const DrivingPath& p) { return backward_stack(p, 0.0, p.horizon()); }

MapStack forward_stack(const DrivingPath& p, double t) {
    MapStack s = backward_stack(p, 0.0, t);
    s.direction = Direction::forward;
    return s;
}

Trace compute_trace(const DrivingPath& p, TraceKind kind) {
    Trace tr;
    tr.geometry = p.geometry;
    tr.kind = kind;
    tr.t = p.t;
    std::size_t n = p.n_steps();
    bool radial = p.geometry == Geometry::radial;
    auto step = [&](cplx z, std::size_t i) {
        return radial ? covering_backward_step(z, p.step_lambda(i), p.step_delta(i))
                      : chordal_backward_step(z, p.step_lambda(i), p.step_delta(i));
    };
    auto out = [&](cplx z) { return radial ? from_covering(z) : z; };
    tr.points.resize(n + 1);
    if (kind == TraceKind::backward_at_horizon) {
        for (std::size_t i = 0; i <= n; ++i) {
            try {
                if (i == n) {
                    tr.points[i] = out(p.values[n]);
                    continue;
                }
                cplx z = p.step_lambda(i);
                for (std::size_t k = i; k < n; ++k) z = step(z, k);
                tr.points[i] = out(z);
            } catch (const NumericError&) {
                tr.points[i] = cplx(NAN, NAN);
                tr.gaps.push_back(i);
            }
        }
    } else {
        tr.points[0] = out(p.values[0]);
        for (std::size_t k = 1; k <= n; ++k) {
            try {
                cplx z = p.step_lambda(k - 1);
                for (std::size_t i = k; i-- > 0;) z = step(z, i);
                tr.points[k] = out(z);
            } catch (const NumericError&) {
                tr.points[k] = cplx(NAN, NAN);
                tr.gaps.push_back(k);
            }
        }
    }
    return tr;
}

double wrap_angle(double a) {
    double r = std::remainder(a, two_pi);
    if (r <= -pi) r += two_pi;
    return r;
}

namespace {

// Offset of x from the driver: plain difference on the line, wrapped angle on the circle.
double offset(Geometry g, double x, double lambda) {
    return g == Geometry::chordal ? x - lambda : wrap_angle(x - lambda);
}

// Time within a step of duration delta at which offset w reaches the driver, or -1.
double hit_time(Geometry g, double w, double delta) {
    if (g == Geometry::chordal) {
        double h = 0.25 * w * w;
        return h <= delta ? h : -1.0;
    }
    double c = std::cos(0.5 * w);
    if (c <= 0.0) return -1.0;
    double h = -2.0 * std::log(c);
    return h <= delta ? h : -1.0;
}

std::optional<SwallowResult> swallow_steps(Geometry g, const std::vector<Step>& steps, double t0, double x,
                                           double start_value, bool continuous) {
    auto sgn = [](double v) { return v < 0.0 ? -1 : 1; };
    if (steps.empty()) return std::nullopt;
    if (continuous) {
        double a = offset(g, x, start_value), b = offset(g, x, steps[0].lambda);
        if (a == 0.0) return SwallowResult{t0, 1};
        if (sgn(a) != sgn(b) && std::abs(a - b) < pi) return SwallowResult{t0, sgn(a)};
    }
    double t = t0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const Step& st = steps[i];
        double w = offset(g, x, st.lambda);
        double h = hit_time(g, w, st.delta);
        if (h >= 0.0) return SwallowResult{t + h, sgn(w)};
        auto nx = evolve_boundary_point(g, x, st.lambda, st.delta);
        x = *nx;
        t += st.delta;
        if (continuous && i + 1 < steps.size()) {
            double w2 = offset(g, x, steps[i + 1].lambda);
            double w1 = offset(g, x, st.lambda);
            if (sgn(w2) != sgn(w1) && std::abs(w2 - w1) < pi) return SwallowResult{t, sgn(w)};
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<double> evolve_boundary_point(Geometry g, double x, double lambda, double delta) {
    double w = offset(g, x, lambda);
    if (hit_time(g, w, delta) >= 0.0 && delta > 0.0) return std::nullopt;
    if (g == Geometry::chordal) {
        double r = std::sqrt(w * w - 4.0 * delta);
        return lambda + (w < 0 ? -r : r);
    }
    cplx v = solve_cos(cplx(w, 0.0), std::exp(0.5 * delta), -std::expm1(0.5 * delta));
    return x + (std::real(v) - w);
}

std::optional<SwallowResult> swallow_time(const DrivingPath& p, double x, bool continuous_driver) {
    std::vector<Step> steps(p.n_steps());
    for (std::size_t i = 0; i < steps.size(); ++i) steps[i] = {p.step_lambda(i), p.step_delta(i)};
    if (steps.empty()) {
        if (offset(p.geometry, x, p.values[0]) == 0.0) return SwallowResult{0.0, 1};
        return std::nullopt;
    }
    return swallow_steps(p.geometry, steps, 0.0, x, p.values[0], continuous_driver);
}

std::optional<SwallowResult> swallow_time(const MapStack& s, double x, bool continuous_driver) {
    if (s.direction != Direction::backward) throw std::invalid_argument("swallowing needs a backward stack");
    if (s.steps.empty()) return std::nullopt;
    return swallow_steps(s.geometry, s.steps, s.t_a, x, s.steps[0].lambda, continuous_driver);
}

}  // namespace loewner
