#pragma once

#include "loewner/core.hpp"

#include <optional>
#include <vector>

namespace loewner {

struct Interval {
    double a = 0.0, b = 0.0;
    double err = 0.0;
    double length() const { return b - a; }
    bool contains(const Interval& o) const { return a <= o.a && o.b <= b; }
};

struct Hull {
    Geometry geometry = Geometry::chordal;
    MapStack stack;        // f_K as a backward stack
    double capacity = 0.0; // hcap or dcap
    Interval support;      // boundary coordinates (covering angles for radial)
    Interval base;
    std::vector<cplx> trace;
    // Driving data when the hull is a single chain segment; enables the lattice operations.
    std::optional<DrivingPath> path;
    // Whether adjacent steps come from a continuous driver; affects swallow detection.
    bool continuous = true;

    bool empty() const { return stack.steps.empty(); }
};

Hull make_hull(const MapStack& s, bool continuous = false);
Hull empty_hull(Geometry g);
Hull segment_hull(const DrivingPath& path, double t1, double t2);
Hull dot_product(const Hull& K1, const Hull& K2);

// Support component that contains `center`, by bisection on swallowing.
Interval support_near(const MapStack& s, double center, bool continuous);
Interval support_of(const Hull& h);

struct BoundaryMeasure {
    std::vector<double> nodes;
    std::vector<double> density;
    std::vector<double> weights;  // quadrature weights for mass
    double total_mass = 0.0;
    std::vector<double> dropped;  // nodes whose boundary evaluation failed
    Interval hull_of_support;
};

BoundaryMeasure boundary_measure(const Hull& h, std::size_t n_nodes = 256);
cplx eval_by_measure(const BoundaryMeasure& m, cplx z);
// True when z is closer to the support than the local node spacing.
bool near_support(const BoundaryMeasure& m, cplx z);

struct QuotientUnion {
    Hull H1;     // K1 seen from outside K2
    Hull H2;     // K2 seen from outside K1
    Hull joined; // K1 ∨ K2 as H1·K2
    std::vector<Interval> support;  // components of the union's support
};

// Needs chain-generated chordal hulls with disjoint supports.
QuotientUnion quotient_union(const Hull& K1, const Hull& K2);

}  // namespace loewner
