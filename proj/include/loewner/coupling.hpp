#pragma once

#include "loewner/core.hpp"
#include "loewner/sle.hpp"

#include <cstdint>
#include <vector>

namespace loewner {

struct CouplingConstants {
    double alpha;
    double c;  // central charge, ≥ 25
};
CouplingConstants coupling_constants(double kappa);

// Closed arcs J1 ∋ z1, J2 ∋ z2 given by unwrapped angle endpoints lo < z < hi.
struct ArcPair {
    double lo1, hi1, lo2, hi2;
    static ArcPair symmetric(double z1, double z2, double half_width) {
        return {z1 - half_width, z1 + half_width, z2 - half_width, z2 + half_width};
    }
    void validate(double z1, double z2) const;
};

struct CouplingConfig {
    double kappa = 2.0;
    double z1 = 0.0;
    double z2 = pi;
    ArcPair arcs = ArcPair::symmetric(0.0, pi, pi / 4);
    GridSpec grid = GridSpec::uniform(1e-3);
    double horizon = 20.0;  // safety cap; runs normally stop at the arc exit
    std::uint64_t seed = 0;
    double exit_threshold = 1e-3;
    std::vector<double> probe_t1;  // t1 values for the per-variable martingale check
    bool dump = false;
    std::size_t dump_t1_stride = 8;
    std::size_t dump_t2_levels = 16;

    void validate() const;
};

struct LatticeDumpRow {
    std::uint64_t seed;
    double t1, t2, A10, A11, A20, A21, X1, lnY, lnF, cap, lnM;
};

struct CouplingRun {
    std::uint64_t index = 0;
    DrivingPath p1, p2;
    double T1 = 0.0, T2 = 0.0;
    bool stopped = false;  // both chains reached their arc exit before the horizon
    bool exited = false;   // the tips met inside the lattice
    std::size_t n1 = 0, n2 = 0;
    double lnM = 0.0;          // at (T1, T2)
    double max_abs_lnM = 0.0;  // over every lattice node
    double max_axis_lnM = 0.0; // should be exactly 0
    std::vector<double> lnM_probe;  // at (probe_t1[k] ∧ T1, T2)
    double lnF_row = 0.0, lnF_double = 0.0;
    double column_check = 0.0;  // |A10(0, T2) − f̃₂(T2, z̃₁)|
    std::vector<LatticeDumpRow> dump;
};

// Samples the pair with index `index` and evaluates M on the stopped lattice.
CouplingRun evolve_pair(const CouplingConfig& cfg, std::uint64_t index);

struct MartingaleSummary {
    std::size_t n_total = 0, n_used = 0, n_exited = 0, n_unstopped = 0;
    double mean_M = 0.0, stderr_M = 0.0;
    double max_abs_lnM = 0.0;
    std::vector<double> probe_mean, probe_stderr;
    double max_lnF_rel_err = 0.0;
    double max_column_check = 0.0;
};

MartingaleSummary martingale_M(const std::vector<CouplingRun>& runs);

std::vector<CouplingRun> run_coupling(const CouplingConfig& cfg, std::size_t n_pairs);

}  // namespace loewner
