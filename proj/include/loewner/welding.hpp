#pragma once

#include "loewner/core.hpp"
#include "loewner/mobius.hpp"
#include "loewner/stats.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace loewner {

struct WeldingPair {
    double x;
    double y;    // φ(x)
    double tau;  // common swallowing time
};

// Coordinates are abscissae on ℝ̂ (chordal) or angles on 𝕋 (radial).
struct Welding {
    Geometry geometry = Geometry::chordal;
    std::vector<WeldingPair> pairs;
    double p0 = 0.0;
    double p_inf = std::numeric_limits<double>::infinity();
    double p_inf_error = 0.0;
};

struct WeldingError : std::runtime_error {
    std::string kind;
    WeldingError(std::string k, const std::string& what) : std::runtime_error(what), kind(std::move(k)) {}
};

// Partner of x: the point on the other side of λ(0) swallowed at the same time.
// Empty when x is not swallowed before the path horizon.
std::optional<WeldingPair> welding_partner(const DrivingPath& p, double x);

// n_pairs abscissae on a geometric ladder inside the support at the horizon.
Welding compute_welding(const DrivingPath& p, std::size_t n_pairs);
// Pairs at the given abscissae; throws horizon-too-short if one is not swallowed.
Welding compute_welding_at(const DrivingPath& p, const std::vector<double>& xs);

// Support [a, b] at the horizon in boundary coordinates (for radial, a ≤ λ(0) ≤ b as unwrapped angles).
std::pair<double, double> support_interval(const DrivingPath& p);

struct FixedPointEstimate {
    double angle;     // midpoint of the unswallowed arc
    double arc;       // its length, also the error bound
};
FixedPointEstimate second_fixed_point(const DrivingPath& p, double max_arc = 0.05);

Welding conjugate_welding(const Welding& w, const MobiusMap& W);

struct WeldingComparison {
    std::string functional;
    KsResult ks;
};
WeldingComparison compare_weldings(const std::string& functional, const std::vector<double>& a,
                                   const std::vector<double>& b);

}  // namespace loewner
