#pragma once

#include "loewner/core.hpp"

#include <string>
#include <vector>

namespace loewner {

// Backward trace at a finite horizon, re-anchored by a complex-affine map A(w) = a·w + b so
// that the images of λ(0) and λ(0)+i are fixed. β(t_i) = A(f_{T*,t_i}(λ(t_i))).
struct GlobalTrace {
    std::vector<double> t;
    std::vector<cplx> points;
    cplx a{1.0};
    cplx b{0.0};
    double T_star = 0.0;
    double phase_dev = 0.0;          // |arg a|; zero in the limit
    double anchor_clearance = 0.0;   // distance from λ(0)+i to the polyline
    std::vector<std::size_t> gaps;   // nodes whose boundary evaluation failed
    std::vector<std::string> warnings;
};

GlobalTrace build_global_trace(const DrivingPath& path, double T_star, double eps_geom = 1e-6);

// Path restricted to [0, T]; the last node is interpolated if T falls inside a step.
DrivingPath truncate_path(const DrivingPath& path, double T);

// max over probes of |f_{T,t1}(z) − f_{T,t2}(f_{t2,t1}(z))| for t1 ≤ t2 ≤ T.
double truncation_compatibility(const DrivingPath& path, double t1, double t2, double T,
                                const std::vector<cplx>& probes);

// Exact orientation test on every pair of non-adjacent segments.
bool polyline_simple(const std::vector<cplx>& pts);
double distance_to_polyline(const std::vector<cplx>& pts, cplx z);

struct DivergenceSeries {
    std::vector<double> t;
    std::vector<double> N;  // Im f_t(z0)/|f_t'(z0)|
};

DivergenceSeries divergence_functional(const DrivingPath& path, cplx z0);

}  // namespace loewner
