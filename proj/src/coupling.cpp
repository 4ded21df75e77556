#include "loewner/coupling.hpp"

#include "loewner/lattice.hpp"
#include "loewner/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace loewner {

CouplingConstants coupling_constants(double kappa) {
    if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
    double k = -kappa;  // backward flow
    return {(6.0 - k) / (2.0 * k), (8.0 - 3.0 * k) * (k - 6.0) / (2.0 * k)};
}

void ArcPair::validate(double z1, double z2) const {
    if (!(lo1 < z1 && z1 < hi1 && lo2 < z2 && z2 < hi2)) throw std::invalid_argument("arc must contain its start inside");
    if (hi1 - lo1 + hi2 - lo2 >= two_pi) throw std::invalid_argument("arcs cannot be disjoint");
    // disjoint on the circle: J2 shifted into [lo1, lo1 + 2π) must lie inside (hi1, lo1 + 2π)
    double s = lo1 + std::fmod(std::fmod(lo2 - lo1, two_pi) + two_pi, two_pi);
    if (!(s > hi1 && s + (hi2 - lo2) < lo1 + two_pi)) throw std::invalid_argument("arcs overlap");
}

void CouplingConfig::validate() const {
    if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
    if (std::abs(std::sin(0.5 * (z1 - z2))) < 1e-12) throw std::invalid_argument("start points must differ");
    arcs.validate(z1, z2);
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
}

namespace {

SleSample sample_chain(const CouplingConfig& cfg, double z, double other, double lo, double hi, std::uint64_t stream) {
    SleConfig s;
    s.geometry = Geometry::radial;
    s.kappa = cfg.kappa;
    s.rho = {-cfg.kappa - 6.0};
    s.x0 = z;
    s.force_points = {cplx(other, 0.0)};
    s.horizon = cfg.horizon;
    s.grid = cfg.grid;
    s.seed = cfg.seed;
    s.stream = stream;
    s.watch = {lo, hi};
    s.stop_on_first_watch = true;
    return sample_sle_kappa_rho(s);
}

std::size_t first_at_or_after(const std::vector<double>& t, double s) {
    auto it = std::lower_bound(t.begin(), t.end(), s * (1.0 - 1e-12));
    return it == t.end() ? t.size() - 1 : static_cast<std::size_t>(it - t.begin());
}

}  // namespace

CouplingRun evolve_pair(const CouplingConfig& cfg, std::uint64_t index) {
    cfg.validate();
    CouplingRun run;
    run.index = index;
    SleSample s1 = sample_chain(cfg, cfg.z1, cfg.z2, cfg.arcs.lo1, cfg.arcs.hi1, 2 * index);
    SleSample s2 = sample_chain(cfg, cfg.z2, cfg.z1, cfg.arcs.lo2, cfg.arcs.hi2, 2 * index + 1);
    auto stop_time = [](const SleSample& s) { return std::min(s.watch_tau[0], s.watch_tau[1]); };
    run.stopped = std::isfinite(stop_time(s1)) && std::isfinite(stop_time(s2));
    run.p1 = std::move(s1.path);
    run.p2 = std::move(s2.path);
    run.T1 = run.p1.horizon();
    run.T2 = run.p2.horizon();
    run.n1 = run.p1.n_steps();
    run.n2 = run.p2.n_steps();

    const CouplingConstants K = coupling_constants(cfg.kappa);
    const double a = K.alpha, c = K.c;
    std::vector<double> row0(run.n1 + 1);
    double col0 = 0.0;
    std::vector<std::size_t> probe_i;
    for (double s : cfg.probe_t1) probe_i.push_back(first_at_or_after(run.p1.t, s));
    run.lnM_probe.assign(probe_i.size(), 0.0);
    std::set<std::size_t> dump_j;
    if (cfg.dump) {
        for (std::size_t k = 0; k < cfg.dump_t2_levels; ++k)
            dump_j.insert(first_at_or_after(run.p2.t, run.T2 * std::ldexp(1.0, -static_cast<int>(k))));
        dump_j.insert(0);
    }
    double column_a10 = 0.0;

    LatticeOptions opt;
    opt.exit_threshold = cfg.exit_threshold;
    opt.visit = [&](const LatticeNode& nd) {
        double X = nd.A1.v - nd.A2.v;
        double lnY = -2.0 * a * std::log(std::abs(std::sin(0.5 * X)));
        double lnMh = a * std::log(nd.A1.d1) + a * std::log(nd.A2.d1) + lnY - c / 6.0 * nd.lnF + c / 12.0 * nd.cap;
        if (nd.j == 0) row0[nd.i] = lnMh;
        if (nd.i == 0) col0 = lnMh;
        double lnM = lnMh + row0[0] - row0[nd.i] - col0;
        if (nd.i == 0 || nd.j == 0) run.max_axis_lnM = std::max(run.max_axis_lnM, std::abs(lnM));
        run.max_abs_lnM = std::max(run.max_abs_lnM, std::abs(lnM));
        if (nd.j == run.n2) {
            if (nd.i == run.n1) run.lnM = lnM;
            if (nd.i == 0) column_a10 = nd.A1.v;
            for (std::size_t k = 0; k < probe_i.size(); ++k)
                if (probe_i[k] == nd.i) run.lnM_probe[k] = lnM;
        }
        if (cfg.dump && dump_j.count(nd.j) && (nd.i % cfg.dump_t1_stride == 0 || nd.i == run.n1))
            run.dump.push_back({index, nd.t1, nd.t2, nd.A1.v, nd.A1.d1, nd.A2.v, nd.A2.d1, X, lnY, nd.lnF, nd.cap, lnM});
    };
    LatticeResult lat = goursat_lattice(Geometry::radial, run.p1, run.p2, opt);
    run.exited = lat.exited;
    if (!lat.exited) {
        run.lnF_row = lat.corner.lnF;
        run.lnF_double = lat.lnF_double_integral;
        double direct = std::real(evaluate_covering_value(backward_stack(run.p2), cplx(cfg.z1, 0.0)));
        run.column_check = std::abs(column_a10 - direct);
    }
    return run;
}

MartingaleSummary martingale_M(const std::vector<CouplingRun>& runs) {
    MartingaleSummary s;
    s.n_total = runs.size();
    std::size_t np = runs.empty() ? 0 : runs[0].lnM_probe.size();
    std::vector<double> sum_p(np, 0.0), sq_p(np, 0.0);
    double sum = 0.0, sq = 0.0;
    for (const auto& r : runs) {
        if (r.exited) {
            ++s.n_exited;
            continue;
        }
        if (!r.stopped) {
            ++s.n_unstopped;
            continue;
        }
        ++s.n_used;
        double M = std::exp(r.lnM);
        sum += M;
        sq += M * M;
        for (std::size_t k = 0; k < np; ++k) {
            double m = std::exp(r.lnM_probe[k]);
            sum_p[k] += m;
            sq_p[k] += m * m;
        }
        s.max_abs_lnM = std::max(s.max_abs_lnM, r.max_abs_lnM);
        double rel = std::abs(r.lnF_row - r.lnF_double) / std::max(std::abs(r.lnF_row), 1e-12);
        s.max_lnF_rel_err = std::max(s.max_lnF_rel_err, rel);
        s.max_column_check = std::max(s.max_column_check, r.column_check);
    }
    auto finish = [&](double su, double sqr, double& mean, double& se) {
        double n = static_cast<double>(s.n_used);
        mean = n > 0 ? su / n : 0.0;
        double var = n > 1 ? (sqr - n * mean * mean) / (n - 1.0) : 0.0;
        se = n > 0 ? std::sqrt(std::max(var, 0.0) / n) : 0.0;
    };
    finish(sum, sq, s.mean_M, s.stderr_M);
    s.probe_mean.resize(np);
    s.probe_stderr.resize(np);
    for (std::size_t k = 0; k < np; ++k) finish(sum_p[k], sq_p[k], s.probe_mean[k], s.probe_stderr[k]);
    return s;
}

std::vector<CouplingRun> run_coupling(const CouplingConfig& cfg, std::size_t n_pairs) {
    cfg.validate();
    std::vector<CouplingRun> runs(n_pairs);
    parallel_for(n_pairs, [&](std::size_t i) {
        runs[i] = evolve_pair(cfg, i);
        if (!cfg.dump) {
            // keep memory flat for large ensembles
            runs[i].p1 = DrivingPath();
            runs[i].p2 = DrivingPath();
        }
    });
    return runs;
}

}  // namespace loewner
