#include "loewner/suites.hpp"

#include "loewner/coupling.hpp"
#include "loewner/global_trace.hpp"
#include "loewner/hull.hpp"
#include "loewner/io.hpp"
#include "loewner/rng.hpp"
#include "loewner/sle.hpp"
#include "loewner/stats.hpp"
#include "loewner/transport.hpp"
#include "loewner/welding.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace loewner {

namespace {

Gate gate(std::string name, double value, double tol, std::string rel) {
    bool ok = false;
    if (rel == "<") ok = value < tol;
    else if (rel == "<=") ok = value <= tol;
    else if (rel == ">") ok = value > tol;
    else if (rel == "true") ok = value != 0.0;
    if (!std::isfinite(value) && rel != "true") ok = false;
    return {std::move(name), value, tol, std::move(rel), ok};
}

struct Ctx {
    double kappa;
    std::size_t n;
    double dt;
    std::uint64_t seed;
    unsigned threads;
};

DrivingPath sle(Geometry g, double kappa, double T, const GridSpec& grid, std::uint64_t seed, std::uint64_t stream = 0) {
    SleConfig c;
    c.geometry = g;
    c.kappa = kappa;
    c.horizon = T;
    c.grid = grid;
    c.seed = seed;
    c.stream = stream;
    return sample_sle_driving(c);
}

// ---- suites ----

void capacity_suite(const Ctx& c, SuiteReport& r) {
    std::vector<double> book(c.n), extract(c.n), additive(c.n);
    parallel_for(c.n, [&](std::size_t i) {
        Geometry g = i % 2 ? Geometry::radial : Geometry::chordal;
        double T = 1.0;
        DrivingPath p = sle(g, c.kappa, T, GridSpec::uniform(c.dt), c.seed + i);
        double expect = g == Geometry::chordal ? 2.0 * T : T;
        MapStack s = backward_stack(p);
        book[i] = std::abs(capacity(s) - expect) / expect;
        extract[i] = std::abs(capacity_from_map(s) - expect);
        double t1 = 0.37 * T;
        MapStack a = backward_stack(p, 0.0, t1), b = backward_stack(p, t1, T);
        additive[i] = std::abs(capacity_from_map(a) + capacity_from_map(b) - capacity_from_map(s));
    }, c.threads);
    double mb = *std::max_element(book.begin(), book.end());
    double me = *std::max_element(extract.begin(), extract.end());
    double ma = *std::max_element(additive.begin(), additive.end());
    r.gates.push_back(gate("bookkeeping_rel_error", mb, 1e-12, "<"));
    r.gates.push_back(gate("extraction_error", me, 1e-8, "<"));
    r.gates.push_back(gate("additivity_residual", ma, 1e-8, "<"));
    r.stats["paths"] = c.n;
}

void measure_suite(const Ctx& c, SuiteReport& r) {
    std::vector<double> mass(c.n), dens(c.n), eval(c.n);
    std::vector<std::size_t> probes(c.n), dropped(c.n);
    parallel_for(c.n, [&](std::size_t i) {
        DrivingPath p = sle(Geometry::chordal, c.kappa, 0.5, GridSpec::uniform(c.dt), c.seed + i);
        Hull K = segment_hull(p, 0.0, p.horizon());
        BoundaryMeasure m = boundary_measure(K, 256);
        mass[i] = std::abs(m.total_mass - K.capacity) / K.capacity;
        double bound = K.support.length() / two_pi;
        double mx = 0.0;
        for (double d : m.density) mx = std::max(mx, std::abs(d));
        dens[i] = mx / bound;
        dropped[i] = m.dropped.size();
        double worst = 0.0, mid = 0.5 * (K.support.a + K.support.b), half = 0.5 * K.support.length();
        std::vector<cplx> zs;
        for (int k = 0; k < 16; ++k) zs.push_back(mid + std::polar(2.0 * half + 1.0, pi * (k + 0.5) / 16.0));
        for (int k = 0; k <= 8; ++k) zs.push_back(cplx(K.support.a - 0.5 + (2.0 * half + 1.0) * k / 8.0, 0.5));
        for (cplx z : zs) {
            if (near_support(m, z)) continue;
            ++probes[i];
            worst = std::max(worst, std::abs(eval_by_measure(m, z) - evaluate_stack_value(K.stack, z)));
        }
        eval[i] = worst;
    }, c.threads);
    auto mx = [](const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); };
    r.gates.push_back(gate("mass_rel_error", mx(mass), 1e-4, "<"));
    r.gates.push_back(gate("density_over_bound", mx(dens), 1.0 + 1e-3, "<="));
    r.gates.push_back(gate("eval_error_off_support", mx(eval), 1e-5, "<"));
    std::size_t np = 0, nd = 0;
    for (std::size_t i = 0; i < c.n; ++i) np += probes[i], nd += dropped[i];
    r.stats["hulls"] = c.n;
    r.stats["probes"] = np;
    r.stats["dropped_nodes"] = nd;
}

void welding_symmetry_suite(const Ctx& c, SuiteReport& r) {
    if (c.kappa == 0.0) {
        Welding ch = compute_welding(constant_path(Geometry::chordal, 0.0, 4.0, 400), 16);
        Welding ra = compute_welding(constant_path(Geometry::radial, 0.0, 6.0, 600), 16);
        double ec = 0.0, er = 0.0;
        for (const auto& p : ch.pairs) ec = std::max(ec, std::abs(p.y + p.x));
        for (const auto& p : ra.pairs) er = std::max(er, std::abs(p.y + p.x));
        r.gates.push_back(gate("chordal_reflection_residual", ec, 1e-9, "<"));
        r.gates.push_back(gate("radial_conjugation_residual", er, 1e-9, "<"));
        r.stats["pairs"] = ch.pairs.size() + ra.pairs.size();
        return;
    }
    // random drivers: the law of φ(1) matches that of −φ(−1)
    std::vector<double> a(c.n), b(c.n);
    parallel_for(2 * c.n, [&](std::size_t s) {
        SleConfig cfg;
        cfg.kappa = c.kappa;
        cfg.horizon = 1e9;
        cfg.grid = GridSpec::geometric(0.002, 1e-7, 0.05);
        cfg.seed = c.seed + s;
        bool first = s < c.n;
        double x = first ? 1.0 : -1.0;
        cfg.watch = {x};
        auto smp = sample_sle_kappa_rho(cfg);
        auto pr = welding_partner(smp.path, x);
        double y = pr ? pr->y : NAN;
        (first ? a[s] : b[s - c.n]) = first ? y : -y;
    }, c.threads);
    auto ks = ks_two_sample(a, b);
    r.gates.push_back(gate("ks_p_value", ks.p_value, 0.01, ">"));
    r.stats["ks_statistic"] = ks.statistic;
}

void scaling_suite(const Ctx&, SuiteReport& r) {
    struct Case {
        std::string name;
        MobiusMap W;
        double z0;
    };
    std::vector<Case> cases{{"z/(1+z) at 0", {1.0, 0.0, 1.0, 1.0, MobiusClass::half_to_half}, 0.0},
                            {"(2z+1)/(z+3) at 0.5", {2.0, 1.0, 1.0, 3.0, MobiusClass::half_to_half}, 0.5},
                            {"cayley at 1", MobiusMap::cayley_disc_to_half(), 0.0}};
    std::vector<double> sizes{0.1, 0.03, 0.01};
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& cs : cases) {
        auto res = capacity_scaling_probe(cs.W, cs.z0, sizes);
        bool decreasing = true;
        for (std::size_t k = 1; k < res.size(); ++k) decreasing = decreasing && res[k].rel_error < res[k - 1].rel_error;
        // an exact ratio at every size also counts as decreasing
        if (res.front().rel_error < 1e-12) decreasing = true;
        r.gates.push_back(gate(cs.name + ": error decreasing", decreasing ? 1.0 : 0.0, 0.0, "true"));
        r.gates.push_back(gate(cs.name + ": rel error at 0.01", res.back().rel_error, 0.05, "<"));
        for (const auto& row : res)
            rows.push_back({{"map", cs.name}, {"eps", row.eps}, {"ratio", row.ratio}, {"expected", row.expected},
                            {"rel_error", row.rel_error}});
    }
    r.stats["rows"] = rows;
}

void transport_suite(const Ctx&, SuiteReport& r) {
    struct Case {
        std::string name;
        Geometry g;
        MobiusMap W;
        double slope;
    };
    std::vector<Case> cases{{"chordal pole at -1", Geometry::chordal, {1.0, 0.0, 1.0, 1.0, MobiusClass::half_to_half}, 0.2},
                            {"disc automorphism", Geometry::radial, {1.0, 0.3, 0.3, 1.0, MobiusClass::disc_to_disc}, 0.4},
                            {"cayley", Geometry::radial, MobiusMap::cayley_disc_to_half(), 0.4}};
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& cs : cases) {
        std::vector<TipResiduals> res;
        for (double dt : {2e-4, 1e-4, 5e-5}) {
            double slope = cs.slope;
            auto p = function_path(cs.g, 0.1, static_cast<std::size_t>(std::llround(0.1 / dt)),
                                   [slope](double t) { return slope * t; });
            res.push_back(verify_tip_odes(transport_chain(p, cs.W)));
            rows.push_back({{"case", cs.name}, {"dt", dt}, {"minus3", res.back().max_minus3},
                            {"u", res.back().max_u}, {"ratio", res.back().max_ratio}});
        }
        r.gates.push_back(gate(cs.name + ": -3 residual at 1e-4", res[1].max_minus3, 1e-3, "<"));
        r.gates.push_back(gate(cs.name + ": u' residual at 1e-4", res[1].max_u, 1e-3, "<"));
        double h1 = res[1].max_minus3 / res[0].max_minus3, h2 = res[2].max_minus3 / res[1].max_minus3;
        r.gates.push_back(gate(cs.name + ": -3 halving ratio", std::max(h1, h2), 0.6, "<"));
    }
    r.stats["rows"] = rows;
}

void martingale_suite(const Ctx& c, SuiteReport& r) {
    CouplingConfig cfg;
    cfg.kappa = c.kappa;
    cfg.z1 = 0.0;
    cfg.z2 = pi;
    cfg.arcs = ArcPair::symmetric(0.0, pi, pi / 4.0);
    cfg.grid = GridSpec::uniform(c.dt);
    cfg.seed = c.seed;
    std::vector<CouplingRun> runs(c.n);
    parallel_for(c.n, [&](std::size_t i) {
        runs[i] = evolve_pair(cfg, i);
        runs[i].p1 = DrivingPath();
        runs[i].p2 = DrivingPath();
    }, c.threads);
    auto s = martingale_M(runs);
    double z = s.stderr_M > 0 ? std::abs(s.mean_M - 1.0) / s.stderr_M : INFINITY;
    r.gates.push_back(gate("|E[M]-1| in standard errors", z, 3.0, "<"));
    r.gates.push_back(gate("max |ln M| over the sample", s.max_abs_lnM, 10.0, "<"));
    r.gates.push_back(gate("usable pairs", static_cast<double>(s.n_used), 0.95 * static_cast<double>(c.n), ">"));
    r.stats = summary_json(s);
}

void reversibility_suite(const Ctx& c, SuiteReport& r) {
    // Side A watches x and reads φ(x); side B watches h(x) = −1/x and reads h(φ(h(x))).
    const std::vector<double> xs{1.0, 0.3};
    std::vector<std::vector<double>> A(xs.size(), std::vector<double>(c.n)), B = A;
    parallel_for(2 * c.n, [&](std::size_t s) {
        bool a = s < c.n;
        SleConfig cfg;
        cfg.kappa = c.kappa;
        cfg.horizon = 1e9;
        cfg.grid = GridSpec::geometric(c.dt, 1e-7, 0.05);
        cfg.seed = c.seed + s;
        for (double x : xs) cfg.watch.push_back(a ? x : -1.0 / x);
        auto smp = sample_sle_kappa_rho(cfg);
        for (std::size_t k = 0; k < xs.size(); ++k) {
            auto pr = welding_partner(smp.path, cfg.watch[k]);
            double y = pr ? pr->y : NAN;
            if (a) A[k][s] = y;
            else B[k][s - c.n] = -1.0 / y;
        }
    }, c.threads);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        auto ks = ks_two_sample(A[k], B[k]);
        std::string tag = "x=" + format_double(xs[k]);
        r.gates.push_back(gate(tag + ": KS p-value", ks.p_value, 0.01, ">"));
        r.stats[tag] = {{"ks_statistic", ks.statistic}, {"median_A", median(A[k])}, {"median_B", median(B[k])}};
    }
}

void radial_to_chordal_suite(const Ctx& c, SuiteReport& r) {
    // Cayley boundary map: angle θ ↦ tan(θ/2).
    const std::vector<double> xs{1.0, 0.3};
    std::vector<std::vector<double>> A(xs.size(), std::vector<double>(c.n)), B = A;
    parallel_for(2 * c.n, [&](std::size_t s) {
        bool radial = s < c.n;
        std::size_t i = radial ? s : s - c.n;
        SleConfig cfg;
        cfg.kappa = c.kappa;
        cfg.horizon = 1e9;
        cfg.grid = GridSpec::geometric(c.dt, 1e-7, 0.05);
        cfg.seed = c.seed + i;
        if (radial) {
            cfg.geometry = Geometry::radial;
            cfg.rho = {-c.kappa - 6.0};
            cfg.force_points = {cplx(pi, 0.0)};
            cfg.stream = 1;
            for (double x : xs) cfg.watch.push_back(2.0 * std::atan(x));
        } else {
            cfg.watch = xs;
        }
        auto smp = sample_sle_kappa_rho(cfg);
        for (std::size_t k = 0; k < xs.size(); ++k) {
            auto pr = welding_partner(smp.path, cfg.watch[k]);
            double y = pr ? pr->y : NAN;
            if (radial) A[k][i] = std::tan(0.5 * y);
            else B[k][i] = y;
        }
    }, c.threads);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        auto ks = ks_two_sample(A[k], B[k]);
        std::string tag = "x=" + format_double(xs[k]);
        r.gates.push_back(gate(tag + ": KS p-value", ks.p_value, 0.01, ">"));
        r.stats[tag] = {{"ks_statistic", ks.statistic}, {"median_radial", median(A[k])}, {"median_chordal", median(B[k])}};
    }
}

// CDF of the density ∝ sin(θ/2)^{4/κ} on (0, 2π), tabulated.
std::function<double(double)> fixed_point_cdf(double kappa) {
    const int n = 1 << 14;
    auto tab = std::make_shared<std::vector<double>>(n + 1, 0.0);
    double e = 4.0 / kappa, h = two_pi / n;
    auto f = [e](double th) { return std::pow(std::sin(0.5 * th), e); };
    for (int k = 0; k < n; ++k) {
        double a = k * h;
        (*tab)[k + 1] = (*tab)[k] + h / 6.0 * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h));
    }
    double total = tab->back();
    for (auto& v : *tab) v /= total;
    return [tab, h, n](double th) {
        if (th <= 0.0) return 0.0;
        if (th >= two_pi) return 1.0;
        double u = th / h;
        int k = std::min(static_cast<int>(u), n - 1);
        return (*tab)[k] + (u - k) * ((*tab)[k + 1] - (*tab)[k]);
    };
}

void fixed_point_suite(const Ctx& c, SuiteReport& r) {
    const double T = 12.0;
    std::vector<double> th(c.n, NAN), arc(c.n, NAN);
    parallel_for(c.n, [&](std::size_t s) {
        SleConfig cfg;
        cfg.geometry = Geometry::radial;
        cfg.kappa = c.kappa;
        cfg.horizon = T;
        cfg.grid = GridSpec::geometric(c.dt, 1e-7, 0.01);
        cfg.seed = c.seed + s;
        auto smp = sample_sle_kappa_rho(cfg);
        try {
            auto fp = second_fixed_point(smp.path, 0.05);
            th[s] = fp.angle < 0.0 ? fp.angle + two_pi : fp.angle;
            arc[s] = fp.arc;
        } catch (const WeldingError&) {
        }
    }, c.threads);
    std::vector<double> ok;
    double max_arc = 0.0;
    for (std::size_t s = 0; s < c.n; ++s)
        if (std::isfinite(th[s])) ok.push_back(th[s]), max_arc = std::max(max_arc, arc[s]);
    std::size_t failed = c.n - ok.size();
    r.gates.push_back(gate("paths without a resolved fixed point", static_cast<double>(failed), 0.0, "<="));
    if (!ok.empty()) {
        auto ks = ks_one_sample(ok, fixed_point_cdf(c.kappa));
        r.gates.push_back(gate("KS p-value", ks.p_value, 0.01, ">"));
        r.stats["ks_statistic"] = ks.statistic;
    }
    r.stats["max_arc"] = max_arc;
    r.stats["horizon"] = T;
}

void divergence_suite(const Ctx& c, SuiteReport& r) {
    const std::vector<double> marks{0.5, 1.0, 2.0, 4.0};
    std::vector<std::vector<double>> at(marks.size(), std::vector<double>(c.n));
    parallel_for(c.n, [&](std::size_t s) {
        DrivingPath p = sle(Geometry::chordal, c.kappa, marks.back(), GridSpec::uniform(c.dt), c.seed + s);
        auto d = divergence_functional(p, cplx(0.0, 1.0));
        for (std::size_t k = 0; k < marks.size(); ++k) {
            auto it = std::lower_bound(d.t.begin(), d.t.end(), marks[k] - 1e-9);
            at[k][s] = d.N[static_cast<std::size_t>(it - d.t.begin())];
        }
    }, c.threads);
    std::vector<double> med;
    for (auto& v : at) med.push_back(median(v));
    double worst = INFINITY;
    for (std::size_t k = 1; k < med.size(); ++k) worst = std::min(worst, med[k] - med[k - 1]);
    r.gates.push_back(gate("min increment of the median", worst, 0.0, ">"));
    r.stats["t"] = marks;
    r.stats["median_N"] = med;
}

void radial_step_suite(const Ctx& c, SuiteReport& r) {
    CounterRng rng{c.seed, 0x7261646cULL};
    std::vector<double> err(c.n);
    parallel_for(c.n, [&](std::size_t i) {
        double rad = 0.98 * std::sqrt(rng.uniform(4 * i));
        cplx z = std::polar(rad, two_pi * rng.uniform(4 * i + 1));
        double lambda = pi * (2.0 * rng.uniform(4 * i + 2) - 1.0);
        double delta = 2.0 * rng.uniform(4 * i + 3);
        err[i] = std::abs(radial_backward_step(z, lambda, delta) - rk4_radial_backward(z, lambda, delta));
    }, c.threads);
    r.gates.push_back(gate("max |closed form - RK4|", *std::max_element(err.begin(), err.end()), 1e-8, "<"));
    r.stats["triples"] = c.n;
}

struct SuiteDef {
    std::function<void(const Ctx&, SuiteReport&)> run;
    double kappa;
    std::size_t n;
    double dt;
};

const std::map<std::string, SuiteDef>& registry() {
    static const std::map<std::string, SuiteDef> m{
        {"capacity", {capacity_suite, 2.0, 100, 1e-3}},
        {"measure", {measure_suite, 2.0, 20, 1e-3}},
        {"welding-symmetry", {welding_symmetry_suite, 0.0, 500, 0.0}},
        {"scaling", {scaling_suite, 0.0, 0, 0.0}},
        {"transport", {transport_suite, 0.0, 0, 0.0}},
        {"martingale", {martingale_suite, 2.0, 5000, 5e-4}},
        {"reversibility", {reversibility_suite, 2.0, 2000, 0.002}},
        {"radial-to-chordal", {radial_to_chordal_suite, 2.0, 2000, 0.003}},
        {"fixed-point-density", {fixed_point_suite, 2.0, 2000, 0.003}},
        {"divergence", {divergence_suite, 2.0, 200, 1e-3}},
        {"radial-step", {radial_step_suite, 0.0, 1000, 0.0}},
    };
    return m;
}

}  // namespace

nlohmann::json SuiteReport::to_json() const {
    nlohmann::json g = nlohmann::json::array();
    for (const auto& x : gates)
        g.push_back({{"name", x.name}, {"value", x.value}, {"tolerance", x.tolerance}, {"relation", x.relation},
                     {"pass", x.pass}});
    return {{"schema_version", schema_version}, {"suite", suite}, {"pass", pass},   {"gates", g},
            {"stats", stats},                   {"options", options}, {"seconds", seconds}};
}

std::string SuiteReport::one_line() const {
    std::ostringstream o;
    o << (pass ? "PASS " : "FAIL ") << suite;
    for (const auto& g : gates) {
        o << " | " << g.name << " = " << format_double(g.value);
        if (g.relation != "true") o << " (" << g.relation << " " << format_double(g.tolerance) << ")";
        if (!g.pass) o << " FAILED";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, " [%.1fs]", seconds);
    return o.str() + buf;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"capacity",      "welding-symmetry",    "reversibility",
                                                "radial-to-chordal", "martingale",      "measure",
                                                "scaling",       "fixed-point-density", "divergence",
                                                "transport",     "radial-step"};
    return names;
}

bool is_suite(const std::string& name) { return registry().count(name) > 0; }

SuiteReport run_suite(const std::string& name, const SuiteOptions& opt) {
    auto it = registry().find(name);
    if (it == registry().end()) throw std::invalid_argument("unknown suite '" + name + "'");
    const SuiteDef& d = it->second;
    Ctx c{opt.kappa.value_or(d.kappa), opt.n.value_or(d.n), opt.dt.value_or(d.dt), opt.seed,
          std::max(1u, opt.threads)};
    if (c.kappa < 0.0 || !std::isfinite(c.kappa)) throw std::invalid_argument("kappa must be non-negative");
    if (name != "welding-symmetry" && d.kappa > 0.0 && c.kappa == 0.0)
        throw std::invalid_argument("this suite needs kappa > 0");
    if (d.n > 0 && c.n < 2) throw std::invalid_argument("n must be at least 2");
    if (d.dt > 0.0 && !(c.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    SuiteReport r;
    r.suite = name;
    r.options = {{"kappa", c.kappa}, {"n", c.n}, {"dt", c.dt}, {"seed", c.seed}, {"threads", c.threads}};
    auto t0 = std::chrono::steady_clock::now();
    d.run(c, r);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.pass = !r.gates.empty() && std::all_of(r.gates.begin(), r.gates.end(), [](const Gate& g) { return g.pass; });
    return r;
}

}  // namespace loewner
