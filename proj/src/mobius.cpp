#include "loewner/mobius.hpp"

#include <cmath>
#include <limits>

namespace loewner {

namespace {
const double inf = std::numeric_limits<double>::infinity();
}

const char* to_string(MobiusClass c) {
    switch (c) {
        case MobiusClass::half_to_half: return "half_to_half";
        case MobiusClass::disc_to_disc: return "disc_to_disc";
        case MobiusClass::disc_to_half: return "disc_to_half";
        case MobiusClass::half_to_disc: return "half_to_disc";
    }
    return "?";
}

MobiusMap MobiusMap::cayley_disc_to_half() {
    return {cplx(0, -1), cplx(0, 1), 1.0, 1.0, MobiusClass::disc_to_half};
}

Geometry MobiusMap::source_geometry() const {
    return (cls == MobiusClass::disc_to_disc || cls == MobiusClass::disc_to_half) ? Geometry::radial : Geometry::chordal;
}

Geometry MobiusMap::target_geometry() const {
    return (cls == MobiusClass::disc_to_disc || cls == MobiusClass::half_to_disc) ? Geometry::radial : Geometry::chordal;
}

cplx MobiusMap::pole() const {
    if (c == 0.0) return {inf, 0.0};
    return -d / c;
}

MobiusMap MobiusMap::inverse() const {
    MobiusClass inv = cls;
    if (cls == MobiusClass::disc_to_half) inv = MobiusClass::half_to_disc;
    if (cls == MobiusClass::half_to_disc) inv = MobiusClass::disc_to_half;
    return {d, -b, -c, a, inv};
}

MobiusMap compose(const MobiusMap& o, const MobiusMap& i) {
    if (o.source_geometry() != i.target_geometry()) throw std::invalid_argument("Möbius classes do not chain");
    MobiusMap r{o.a * i.a + o.b * i.c, o.a * i.b + o.b * i.d, o.c * i.a + o.d * i.c, o.c * i.b + o.d * i.d,
                MobiusClass::half_to_half};
    bool src_disc = i.source_geometry() == Geometry::radial, dst_disc = o.target_geometry() == Geometry::radial;
    r.cls = src_disc ? (dst_disc ? MobiusClass::disc_to_disc : MobiusClass::disc_to_half)
                     : (dst_disc ? MobiusClass::half_to_disc : MobiusClass::half_to_half);
    return r;
}

cplx mobius_apply(const MobiusMap& W, cplx z, bool extended) {
    if (std::isinf(std::real(z)) || std::isinf(std::imag(z))) {
        if (W.c == 0.0) return {inf, 0.0};
        return W.a / W.c;
    }
    cplx den = W.c * z + W.d;
    if (den == 0.0) {
        if (extended) return {inf, 0.0};
        throw NumericError("pole", "Möbius map evaluated at its pole");
    }
    return (W.a * z + W.b) / den;
}

Jet mobius_jet(const MobiusMap& W, cplx z) {
    cplx den = W.c * z + W.d;
    if (den == 0.0) throw NumericError("pole", "Möbius jet at the pole");
    Jet j;
    j.v = (W.a * z + W.b) / den;
    j.d1 = W.det() / (den * den);
    j.d2 = -2.0 * W.c * j.d1 / den;
    j.d3 = 6.0 * W.c * W.c * j.d1 / (den * den);
    return j;
}

cplx boundary_point(Geometry g, double coord) {
    if (g == Geometry::radial) return std::polar(1.0, coord);
    return {coord, 0.0};
}

double boundary_coord(Geometry g, cplx z) {
    if (g == Geometry::radial) return std::arg(z);
    if (std::isinf(std::real(z)) || std::abs(z) > 1e300) return inf;
    return std::real(z);
}

double mobius_boundary(const MobiusMap& W, double coord) {
    cplx z = std::isinf(coord) ? cplx(inf, 0.0) : boundary_point(W.source_geometry(), coord);
    return boundary_coord(W.target_geometry(), mobius_apply(W, z, true));
}

void MobiusMap::validate() const {
    if (std::abs(det()) == 0.0) throw std::invalid_argument("degenerate Möbius map");
    // Boundary must go to boundary, and an interior probe to the interior.
    Geometry s = source_geometry(), t = target_geometry();
    const double probes[] = {-1.7, -0.4, 0.3, 1.1, 2.9};
    for (double p : probes) {
        cplx z = boundary_point(s, p);
        cplx w = mobius_apply(*this, z, true);
        if (std::isinf(std::real(w))) {
            if (t == Geometry::radial) throw std::invalid_argument("Möbius map sends the boundary to ∞");
            continue;
        }
        double err = t == Geometry::radial ? std::abs(std::abs(w) - 1.0) : std::abs(std::imag(w)) / (1.0 + std::abs(w));
        if (err > 1e-10) throw std::invalid_argument("Möbius map does not preserve the boundary class");
    }
    cplx inner = s == Geometry::radial ? cplx(0.0) : cplx(0.0, 1.0);
    if (std::abs(mobius_apply(*this, inner, true)) > 1e300) throw std::invalid_argument("interior probe hits the pole");
    cplx w = mobius_apply(*this, inner, true);
    bool inside = t == Geometry::radial ? std::abs(w) < 1.0 : std::imag(w) > 0.0;
    if (!inside) throw std::invalid_argument("Möbius map does not preserve the interior");
}

}  // namespace loewner
