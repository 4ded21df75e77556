#pragma once

#include "loewner/core.hpp"
#include "loewner/mobius.hpp"

#include <vector>

namespace loewner {

// Chain L_t pushed through a Möbius map: L*_t = W_t(L_t), W_t∘f_t = f*_{u(t)}∘W for backward
// chains (g-maps for forward ones). W_t stays Möbius, so it is tracked by its coefficients.
struct TransportedChain {
    MobiusClass cls = MobiusClass::half_to_half;
    Direction direction = Direction::backward;
    std::vector<double> t;
    std::vector<double> lambda;       // source driver on the step (constant within [t_i, t_{i+1}))
    std::vector<double> lambda_star;  // W_t(λ) at the nodes
    std::vector<double> u;            // time change, u(0) = 0
    std::vector<MobiusMap> maps;      // W_{t_i}

    Geometry source_geometry() const;
    Geometry target_geometry() const;
    // λ* on the u grid, usable as a driving path of the target geometry.
    DrivingPath as_path() const;
};

// Covering-coordinate jet of W at the boundary coordinate x: W̃ with e^{i·}∘W̃ = W∘e^{i·} where
// the geometry is radial. Values are real up to rounding; the target angle is not unwrapped.
Jet covering_mobius_jet(const MobiusMap& W, double x);

TransportedChain transport_chain(const DrivingPath& path, const MobiusMap& W,
                                 Direction direction = Direction::backward, double max_substep = 5e-4);

// Residuals are |lhs − rhs|/(1 + |rhs|) with one-sided time differences over each step.
struct TipResiduals {
    double max_minus3 = 0.0;  // ∂_t W̃_t(λ) − 3W̃_t''(λ)
    double max_u = 0.0;       // Δu/Δt − W̃_t'(λ)²
    double max_ratio = 0.0;   // ∂_t W̃_t'(λ)/W̃_t'(λ) against its closed right side
    std::size_t n = 0;
};
TipResiduals verify_tip_odes(const TransportedChain& chain);

// max |W_T(f_T(z)) − f*_{u(T)}(W(z))| over the probes, with f* rebuilt from λ*.
double circ_identity_error(const DrivingPath& path, const TransportedChain& chain, const std::vector<cplx>& probes);

struct ScalingRow {
    double eps;
    double cap_source;
    double cap_image;
    double ratio;
    double expected;
    double rel_error;
    bool outside_asymptotic;  // flagged when the relative error exceeds 5%
};

// Slits of length eps at z0 (abscissa or angle); ratio cap(W(H))/cap(H) with hcap or dcap as the
// geometries dictate. The limit is |W'(z0)|² times 2 for 𝔻→ℍ and 1/2 for ℍ→𝔻.
std::vector<ScalingRow> capacity_scaling_probe(const MobiusMap& W, double z0, const std::vector<double>& sizes,
                                               std::size_t steps = 64);

}  // namespace loewner
