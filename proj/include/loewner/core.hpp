#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace loewner {

using cplx = std::complex<double>;

constexpr double pi = 3.14159265358979323846;
constexpr double two_pi = 2.0 * pi;

enum class Geometry { chordal, radial };
enum class Direction { forward, backward };

const char* to_string(Geometry g);
Geometry geometry_from_string(const std::string& s);

// Raised for branch, domain, and singular-jet failures. `kind` is a short tag.
struct NumericError : std::runtime_error {
    std::string kind;
    NumericError(std::string k, const std::string& what)
        : std::runtime_error(what), kind(std::move(k)) {}
};

// Value and the first three complex derivatives of a map at a point.
struct Jet {
    cplx v{0.0};
    cplx d1{1.0};
    cplx d2{0.0};
    cplx d3{0.0};

    static Jet identity(cplx z) { return {z, 1.0, 0.0, 0.0}; }
    cplx schwarzian() const;
};

// outer is the jet of F at g.v, inner the jet of g at z; returns the jet of F∘g at z.
Jet compose(const Jet& outer, const Jet& inner);

struct Step {
    double lambda;
    double delta;
};

// Elementary constant-driving steps. Real inputs with Im z == 0 are read as
// limits from the upper half-plane (resp. from inside the disc).
enum class StepMode { boundary, interior };

cplx chordal_backward_step(cplx z, double lambda, double delta, StepMode mode = StepMode::boundary);
cplx chordal_forward_step(cplx z, double lambda, double delta);
Jet chordal_backward_jet(cplx z, double lambda, double delta);
Jet chordal_forward_jet(cplx z, double lambda, double delta);

// Radial steps in the covering coordinate (e^{i f̃(z)} = f(e^{iz})).
cplx covering_backward_step(cplx z, double lambda, double delta);
cplx covering_forward_step(cplx z, double lambda, double delta);
Jet covering_backward_jet(cplx z, double lambda, double delta);
Jet covering_forward_jet(cplx z, double lambda, double delta);

// Radial steps on the disc.
cplx radial_backward_step(cplx z, double lambda, double delta);
cplx radial_forward_step(cplx z, double lambda, double delta);
Jet radial_backward_jet(cplx z, double lambda, double delta);
Jet radial_forward_jet(cplx z, double lambda, double delta);

// Reference integrators of the Loewner ODEs (adaptive RK4 with step doubling).
cplx rk4_chordal_backward(cplx z, double lambda, double delta, double tol = 1e-12);
cplx rk4_radial_backward(cplx z, double lambda, double delta, double tol = 1e-12);

struct MapStack {
    Geometry geometry = Geometry::chordal;
    Direction direction = Direction::backward;
    std::vector<Step> steps;  // steps[0] is applied first
    double t_a = 0.0;
    double t_b = 0.0;

    double duration() const;
    // Inverse map: opposite direction, steps reversed.
    MapStack inverse() const;
    // this∘other (other applied first).
    MapStack after(const MapStack& other) const;
};

// Chordal: z in the plane. Radial: z in the plane (disc coordinates).
Jet evaluate_stack(const MapStack& s, cplx z, int order = 1);
cplx evaluate_stack_value(const MapStack& s, cplx z);
// Radial stacks in covering coordinates.
Jet evaluate_covering(const MapStack& s, cplx z, int order = 1);
cplx evaluate_covering_value(const MapStack& s, cplx z);

// hcap for chordal stacks, dcap for radial ones.
double capacity(const MapStack& s);
// Capacity read back from the evaluated map: chordal from the 1/z tail, radial from f'(0).
double capacity_from_map(const MapStack& s);

struct DrivingPath {
    Geometry geometry = Geometry::chordal;
    std::vector<double> t;
    std::vector<double> values;
    double kappa = 0.0;
    std::vector<double> rho;

    DrivingPath() = default;
    DrivingPath(Geometry g, std::vector<double> t_grid, std::vector<double> vals);

    std::size_t n_steps() const { return t.empty() ? 0 : t.size() - 1; }
    double horizon() const { return t.empty() ? 0.0 : t.back(); }
    double step_lambda(std::size_t i) const { return 0.5 * (values[i] + values[i + 1]); }
    double step_delta(std::size_t i) const { return t[i + 1] - t[i]; }
    void validate() const;
};

DrivingPath constant_path(Geometry g, double value, double T, std::size_t n);
DrivingPath function_path(Geometry g, double T, std::size_t n, const std::function<double(double)>& fn);

// Backward stack f_{t2,t1} over [t1,t2]; partial steps are cut at t1 and t2.
MapStack backward_stack(const DrivingPath& p, double t1, double t2);
MapStack backward_stack(const DrivingPath& p);
// Forward stack g_t over [0, t].
MapStack forward_stack(const DrivingPath& p, double t);

enum class TraceKind { forward, backward_at_horizon };

struct Trace {
    Geometry geometry = Geometry::chordal;
    TraceKind kind = TraceKind::backward_at_horizon;
    std::vector<double> t;
    std::vector<cplx> points;
    std::vector<std::size_t> gaps;  // indices whose evaluation failed
};

Trace compute_trace(const DrivingPath& p, TraceKind kind = TraceKind::backward_at_horizon);

// Swallowing of boundary points. With `continuous_driver` a jump of the driver across
// the point between steps counts as swallowing at the grid time.
struct SwallowResult {
    double tau;
    int side;  // +1: point was on the positive side of the driver, -1: negative
};

std::optional<SwallowResult> swallow_time(const DrivingPath& p, double x, bool continuous_driver = true);
std::optional<SwallowResult> swallow_time(const MapStack& s, double x, bool continuous_driver = false);

// Real-line (covering for radial) image of an unswallowed boundary point, following the
// same rules as swallow_time. Returns nullopt once swallowed.
std::optional<double> evolve_boundary_point(Geometry g, double x, double lambda, double delta);

double wrap_angle(double a);  // into (-pi, pi]

}  // namespace loewner
