#include "loewner/sle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace loewner {

double GridSpec::step_at(double t) const { return std::clamp(rel * t, dt_min, dt_max); }

void SleConfig::validate() const {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be finite and >= 0");
    if (rho.size() != force_points.size()) throw std::invalid_argument("rho and force points must match in length");
    if (!(grid.dt_min > 0.0) || grid.dt_max < grid.dt_min || grid.rel < 0.0)
        throw std::invalid_argument("invalid step grid");
    if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be >= 0");
    if (!std::isfinite(horizon) && watch.empty()) throw std::invalid_argument("infinite horizon needs watch points");
    for (const cplx& q : force_points) {
        if (std::imag(q) != 0.0) {
            if (geometry == Geometry::chordal && std::imag(q) < 0.0)
                throw std::invalid_argument("interior force point must lie in the upper half-plane");
            continue;
        }
        if (std::isinf(std::real(q))) {
            if (geometry == Geometry::radial) throw std::invalid_argument("radial force points must be finite");
            continue;
        }
        double w = geometry == Geometry::chordal ? std::real(q) - x0 : wrap_angle(std::real(q) - x0);
        if (w == 0.0) throw std::invalid_argument("force point coincides with the start");
    }
}

double bessel_dimension(double kappa, double rho) { return 1.0 - (4.0 + 2.0 * rho) / kappa; }

namespace {

struct Sampler {
    const SleConfig& cfg;
    CounterRng rng;
    SleSample out;
    std::vector<double> watch_pos;
    std::vector<double> watch_prev_offset;
    double sqk;
    bool radial;
    bool stop = false;

    explicit Sampler(const SleConfig& c)
        : cfg(c), rng{c.seed, c.stream}, sqk(std::sqrt(c.kappa)), radial(c.geometry == Geometry::radial) {}

    double offset(double x, double lambda) const { return radial ? wrap_angle(x - lambda) : x - lambda; }

    // Sign change that is not just a wrap through the antipode.
    static bool flipped(double a, double b) { return (a < 0) != (b < 0) && std::abs(a - b) < pi; }

    static bool is_boundary(const ForceTrack& f) { return std::imag(f.image) == 0.0 && !std::isinf(std::real(f.image)); }

    double drift(double lambda) const {
        double d = 0.0;
        for (std::size_t k = 0; k < out.force.size(); ++k) {
            const ForceTrack& f = out.force[k];
            if (!f.alive || std::isinf(std::real(f.image))) continue;
            double x = lambda - std::real(f.image);
            if (radial)
                d += -0.5 * cfg.rho[k] / std::tan(0.5 * x);
            else
                d += -cfg.rho[k] / x;
        }
        return d;
    }

    // Does a step from lambda to lambda_new swallow or jump over boundary force point k?
    bool collides(std::size_t k, double lambda, double lambda_new, double delta) const {
        const ForceTrack& f = out.force[k];
        if (!f.alive || !is_boundary(f)) return false;
        double x = std::real(f.image);
        double lm = 0.5 * (lambda + lambda_new);
        double a = offset(x, lambda), b = offset(x, lm);
        if (flipped(a, b)) return true;
        auto nx = evolve_boundary_point(cfg.geometry, x, lm, delta);
        if (!nx) return true;
        double v = offset(*nx, lm);
        double c = offset(*nx, lambda_new);
        return flipped(v, c) || c == 0.0;
    }

    void accept(double t, double lambda, double lambda_new, double delta) {
        double lm = 0.5 * (lambda + lambda_new);
        for (auto& f : out.force) {
            if (!f.alive || std::isinf(std::real(f.image))) continue;
            if (is_boundary(f)) {
                auto nx = evolve_boundary_point(cfg.geometry, std::real(f.image), lm, delta);
                if (!nx) {
                    f.alive = false;
                    f.death_time = t + delta;
                } else {
                    f.image = *nx;
                }
            } else {
                f.image = radial ? covering_backward_step(f.image, lm, delta)
                                 : chordal_backward_step(f.image, lm, delta, StepMode::interior);
            }
        }
        bool all = !watch_pos.empty();
        for (std::size_t w = 0; w < watch_pos.size(); ++w) {
            if (std::isfinite(out.watch_tau[w])) continue;
            double x = watch_pos[w];
            double o = offset(x, lm);
            if (flipped(o, watch_prev_offset[w]) || o == 0.0) {
                out.watch_tau[w] = t;
                continue;
            }
            auto nx = evolve_boundary_point(cfg.geometry, x, lm, delta);
            if (!nx) {
                double tau_in = radial ? -2.0 * std::log(std::cos(0.5 * o)) : 0.25 * o * o;
                out.watch_tau[w] = t + tau_in;
                continue;
            }
            watch_pos[w] = *nx;
            watch_prev_offset[w] = offset(*nx, lm);
            all = false;
        }
        out.path.t.push_back(t + delta);
        out.path.values.push_back(lambda_new);
        if (all) stop = true;
        if (cfg.stop_on_first_watch)
            for (double v : out.watch_tau)
                if (std::isfinite(v)) stop = true;
    }

    // Advances from (t, lambda) over delta with Brownian increment dB; refines by bridge splitting.
    double advance(double t, double lambda, double delta, double dB, int depth, std::uint64_t key) {
        double lambda_new = lambda + drift(lambda) * delta + sqk * dB;
        bool hit = false, hard = false;
        for (std::size_t k = 0; k < out.force.size(); ++k) {
            if (collides(k, lambda, lambda_new, delta)) {
                hit = true;
                if (out.force[k].bessel_dimension < 2.0) hard = true;
            }
        }
        if (hit && !hard && depth < cfg.max_refine_depth) {
            ++out.refinements;
            CounterRng bridge{cfg.seed, cfg.stream ^ mix64(0xB51D6Eull + static_cast<std::uint64_t>(depth))};
            double dB1 = 0.5 * dB + std::sqrt(0.25 * delta) * bridge.normal(key);
            double mid = advance(t, lambda, 0.5 * delta, dB1, depth + 1, 2 * key);
            if (stop) return mid;
            return advance(t + 0.5 * delta, mid, 0.5 * delta, dB - dB1, depth + 1, 2 * key + 1);
        }
        if (hit && hard) {
            out.collision_stop = true;
            stop = true;
            for (std::size_t k = 0; k < out.force.size(); ++k)
                if (collides(k, lambda, lambda_new, delta)) {
                    out.force[k].alive = false;
                    out.force[k].death_time = t;
                }
            return lambda;
        }
        accept(t, lambda, lambda_new, delta);
        return lambda_new;
    }

    void run() {
        out.path.geometry = cfg.geometry;
        out.path.kappa = cfg.kappa;
        out.path.rho = cfg.rho;
        out.path.t = {0.0};
        out.path.values = {cfg.x0};
        for (std::size_t k = 0; k < cfg.force_points.size(); ++k) {
            ForceTrack f;
            f.image = cfg.force_points[k];
            f.bessel_dimension = cfg.kappa > 0 ? bessel_dimension(cfg.kappa, cfg.rho[k]) : 1e300;
            out.force.push_back(f);
        }
        watch_pos = cfg.watch;
        out.watch_tau.assign(cfg.watch.size(), std::numeric_limits<double>::infinity());
        for (std::size_t w = 0; w < watch_pos.size(); ++w) {
            watch_prev_offset.push_back(offset(watch_pos[w], cfg.x0));
            if (watch_prev_offset.back() == 0.0) out.watch_tau[w] = 0.0;
        }
        if (!watch_pos.empty() &&
            std::all_of(out.watch_tau.begin(), out.watch_tau.end(), [](double v) { return std::isfinite(v); }))
            return;
        double t = 0.0, lambda = cfg.x0;
        for (std::uint64_t i = 0; !stop; ++i) {
            if (t >= cfg.horizon) break;
            double delta = cfg.grid.step_at(t);
            if (t + delta > cfg.horizon * (1.0 - 1e-12)) delta = cfg.horizon - t;
            double dB = std::sqrt(delta) * rng.normal(i);
            lambda = advance(t, lambda, delta, dB, 0, 1);
            t = out.path.t.back();
        }
    }
};

}  // namespace

SleSample sample_sle_kappa_rho(const SleConfig& cfg) {
    cfg.validate();
    Sampler s(cfg);
    s.run();
    s.out.path.validate();
    return std::move(s.out);
}

DrivingPath sample_sle_driving(const SleConfig& cfg) {
    if (!cfg.rho.empty()) throw std::invalid_argument("plain SLE sampling takes no force points");
    return sample_sle_kappa_rho(cfg).path;
}

double quadratic_variation(const DrivingPath& p, double t) {
    double q = 0.0;
    for (std::size_t i = 0; i + 1 < p.t.size() && p.t[i + 1] <= t * (1 + 1e-12); ++i) {
        double d = p.values[i + 1] - p.values[i];
        q += d * d;
    }
    return q;
}

}  // namespace loewner
