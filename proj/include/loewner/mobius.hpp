#pragma once

#include "loewner/core.hpp"

namespace loewner {

// Which boundary circle the domain and target sit on.
enum class MobiusClass { half_to_half, disc_to_disc, disc_to_half, half_to_disc };

const char* to_string(MobiusClass c);

struct MobiusMap {
    cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};
    MobiusClass cls = MobiusClass::half_to_half;

    static MobiusMap identity(MobiusClass cls = MobiusClass::half_to_half) { return {1.0, 0.0, 0.0, 1.0, cls}; }
    // i(1−z)/(1+z): 𝔻 → ℍ with 1 ↦ 0, −1 ↦ ∞, 0 ↦ i.
    static MobiusMap cayley_disc_to_half();

    Geometry source_geometry() const;
    Geometry target_geometry() const;
    cplx det() const { return a * d - b * c; }
    cplx pole() const;  // preimage of ∞ (infinite if c = 0)
    MobiusMap inverse() const;
    // Throws std::invalid_argument when the coefficients do not respect the class.
    void validate() const;
};

// this = outer ∘ inner. Classes must chain.
MobiusMap compose(const MobiusMap& outer, const MobiusMap& inner);

// Extended mode returns an infinite value at the pole; otherwise the pole raises NumericError.
cplx mobius_apply(const MobiusMap& W, cplx z, bool extended = false);
Jet mobius_jet(const MobiusMap& W, cplx z);

// Boundary coordinates: real abscissa on ℝ̂ for half-plane geometry, angle for the circle.
cplx boundary_point(Geometry g, double coord);
double boundary_coord(Geometry g, cplx z);  // inverse of boundary_point; +inf for ∞
double mobius_boundary(const MobiusMap& W, double coord);

}  // namespace loewner
