#pragma once

#include "loewner/core.hpp"
#include "loewner/rng.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace loewner {

// Step-size rule: delta(t) = clamp(rel * t, dt_min, dt_max). rel = 0 gives a uniform grid.
struct GridSpec {
    double dt_min = 1e-3;
    double dt_max = 1e-3;
    double rel = 0.0;

    static GridSpec uniform(double dt) { return {dt, dt, 0.0}; }
    static GridSpec geometric(double rel, double dt_min, double dt_max) { return {dt_min, dt_max, rel}; }
    double step_at(double t) const;
};

struct SleConfig {
    Geometry geometry = Geometry::chordal;
    double kappa = 2.0;
    std::vector<double> rho;
    double x0 = 0.0;
    // Chordal: real or complex (Im > 0) points, or infinite real part for ∞.
    // Radial: covering coordinates (angle + i·(−ln|q|)).
    std::vector<cplx> force_points;
    double horizon = 1.0;
    GridSpec grid;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    // Boundary points watched for swallowing; sampling stops once all of them are swallowed.
    std::vector<double> watch;
    bool stop_on_first_watch = false;  // stop when any watched point is swallowed
    int max_refine_depth = 24;

    void validate() const;
};

struct ForceTrack {
    cplx image;
    bool alive = true;
    double death_time = std::numeric_limits<double>::infinity();
    double bessel_dimension = 0.0;
};

struct SleSample {
    DrivingPath path;
    std::vector<ForceTrack> force;
    std::vector<double> watch_tau;  // +inf if not swallowed
    bool collision_stop = false;
    std::size_t refinements = 0;
};

// Bessel dimension of λ − f(q) for a force point of strength rho.
double bessel_dimension(double kappa, double rho);

SleSample sample_sle_kappa_rho(const SleConfig& cfg);
// Plain SLE_κ (ρ empty); same noise as sample_sle_kappa_rho for the same seed.
DrivingPath sample_sle_driving(const SleConfig& cfg);

// Realized quadratic variation of a path up to time t.
double quadratic_variation(const DrivingPath& p, double t);

}  // namespace loewner
