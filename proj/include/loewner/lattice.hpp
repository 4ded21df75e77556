#pragma once

#include "loewner/core.hpp"

#include <functional>
#include <vector>

namespace loewner {

// Value, first derivative and Schwarzian of a transported map at a driving point.
struct TipJet {
    double v = 0.0;
    double d1 = 1.0;
    double S = 0.0;
};

struct LatticeNode {
    std::size_t i = 0, j = 0;
    double t1 = 0.0, t2 = 0.0;
    TipJet A1, A2;
    double cap = 0.0;  // capacity of the union, integrated along t1
    double lnF = 0.0;  // −∫ A_{1,S} dt1
};

struct LatticeOptions {
    // Radial exit threshold on |sin((A1 − A2)/2)|; chordal uses |A1 − A2| against it.
    double exit_threshold = 1e-3;
    int corrector_passes = 1;
    std::function<void(const LatticeNode&)> visit;  // called at every node, row by row
};

struct LatticeResult {
    std::vector<TipJet> last_row;  // A1(i, n2)
    std::vector<TipJet> last_col;  // A2(n1, j)
    LatticeNode corner;
    bool exited = false;
    std::size_t exit_i = 0, exit_j = 0;
    // Independent column-wise integrals at the corner, for cross-checks.
    double cap_by_columns = 0.0;
    double lnF_by_columns = 0.0;
    double lnF_double_integral = 0.0;
};

// Two commuting backward chains. Chain j grows in time t_j; A_j tracks the image of its driving
// point under the other chain transported through it. Boundary data: A1(i,0) = λ1(t1_i),
// A2(0,j) = λ2(t2_j); the interior follows the closed per-axis flows.
LatticeResult goursat_lattice(Geometry g, const DrivingPath& p1, const DrivingPath& p2,
                              const LatticeOptions& opt = {});

// Backward stack of a transported chain from lattice tip data along one axis.
MapStack stack_from_tips(Geometry g, const std::vector<double>& t, const std::vector<TipJet>& tips);

}  // namespace loewner
