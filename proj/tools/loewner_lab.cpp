#include "loewner/global_trace.hpp"
#include "loewner/io.hpp"
#include "loewner/parallel.hpp"
#include "loewner/sle.hpp"
#include "loewner/suites.hpp"
#include "loewner/welding.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>

using namespace loewner;
namespace fs = std::filesystem;

namespace {

constexpr int exit_pass = 0, exit_fail = 1, exit_usage = 2, exit_numeric = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimArgs {
    std::string config;
    std::optional<double> kappa;
    std::vector<double> rho, force;
    std::string geometry = "chordal";
    double T = 1.0;
    double dt = 1e-3;
    std::uint64_t seed = 0;
    std::string out = ".";
    std::size_t welding = 0;
    bool normalize = false;
};

struct VerifyArgs {
    std::string suite;
    std::optional<double> kappa, dt;
    std::optional<std::size_t> n;
    std::uint64_t seed = 0;
    std::optional<unsigned> threads;
    std::string out = ".";
};

struct PlotArgs {
    std::vector<std::string> inputs;
    std::string svg = "plot.svg";
    std::size_t bins = 40;
    std::string title;
};

// Config keys fill whatever the command line left unset.
void apply_config(SimArgs& a, const CLI::App& cmd) {
    if (a.config.empty()) return;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(a.config));
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config is not valid JSON: ") + e.what());
    }
    if (j.contains("schema_version") && j["schema_version"] != schema_version)
        throw UsageError("config schema_version mismatch");
    auto unset = [&](const char* flag) { return cmd.count(flag) == 0; };
    try {
        if (j.contains("kappa") && !a.kappa) a.kappa = j["kappa"].get<double>();
        if (j.contains("rho") && unset("--rho")) a.rho = j["rho"].get<std::vector<double>>();
        if (j.contains("force") && unset("--force")) a.force = j["force"].get<std::vector<double>>();
        if (j.contains("geometry") && unset("--geometry")) a.geometry = j["geometry"].get<std::string>();
        if (j.contains("T") && unset("--T")) a.T = j["T"].get<double>();
        if (j.contains("dt") && unset("--dt")) a.dt = j["dt"].get<double>();
        if (j.contains("seed") && unset("--seed")) a.seed = j["seed"].get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("bad config value: ") + e.what());
    }
}

void ensure_dir(const std::string& d) {
    std::error_code ec;
    fs::create_directories(d, ec);
    if (ec) throw UsageError("cannot create output directory " + d);
}

int cmd_simulate(SimArgs a, const CLI::App& cmd) {
    std::string started = utc_timestamp();
    apply_config(a, cmd);
    if (!a.kappa) throw UsageError("--kappa is required");
    if (*a.kappa < 0.0) throw UsageError("--kappa must be non-negative");
    if (!(a.T >= 0.0) || !(a.dt > 0.0)) throw UsageError("--T must be >= 0 and --dt > 0");
    if (a.rho.size() != a.force.size()) throw UsageError("--rho and --force need the same number of entries");
    Geometry g;
    try {
        g = geometry_from_string(a.geometry);
    } catch (const std::exception&) {
        throw UsageError("--geometry must be chordal or radial");
    }
    DrivingPath p;
    if (*a.kappa == 0.0) {
        if (!a.rho.empty()) throw UsageError("force points need kappa > 0");
        auto n = static_cast<std::size_t>(std::llround(a.T / a.dt));
        p = constant_path(g, 0.0, a.T, n);
    } else {
        SleConfig c;
        c.geometry = g;
        c.kappa = *a.kappa;
        c.rho = a.rho;
        for (double x : a.force) c.force_points.push_back(cplx(x, 0.0));
        c.horizon = a.T;
        c.grid = GridSpec::uniform(a.dt);
        c.seed = a.seed;
        try {
            c.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        p = sample_sle_kappa_rho(c).path;
    }
    ensure_dir(a.out);
    RunManifest man;
    man.command = "simulate";
    man.seeds = {a.seed};
    man.code_version = code_version();
    man.started = started;
    man.config = {{"schema_version", schema_version}, {"kappa", *a.kappa}, {"rho", a.rho}, {"force", a.force},
                  {"geometry", a.geometry}, {"T", a.T}, {"dt", a.dt}, {"seed", a.seed},
                  {"welding", a.welding}, {"normalize", a.normalize}};
    std::string dpath = (fs::path(a.out) / "driving.csv").string();
    write_csv(dpath, driving_table(p));
    man.add_output(dpath);
    std::string tpath = (fs::path(a.out) / "trace.csv").string();
    if (a.normalize) {
        if (g != Geometry::chordal) throw UsageError("--normalize needs the chordal geometry");
        GlobalTrace gt = build_global_trace(p, p.horizon());
        write_csv(tpath, trace_table(gt));
        man.add_output(tpath);
        std::string npath = (fs::path(a.out) / "normalization.json").string();
        write_text(npath, normalization_json(gt).dump(2) + "\n");
        man.add_output(npath);
        for (const auto& w : gt.warnings) std::cerr << "warning: " << w << "\n";
    } else {
        write_csv(tpath, trace_table(compute_trace(p)));
        man.add_output(tpath);
    }
    if (a.welding > 0) {
        std::string wpath = (fs::path(a.out) / "welding.csv").string();
        write_csv(wpath, welding_table(compute_welding(p, a.welding)));
        man.add_output(wpath);
    }
    man.finished = utc_timestamp();
    std::string mpath = (fs::path(a.out) / "manifest.json").string();
    write_text(mpath, man.to_json().dump(2) + "\n");
    for (const auto& [path, digest] : man.outputs) std::cout << path << " " << digest << "\n";
    std::cout << mpath << "\n";
    return exit_pass;
}

int cmd_verify(const VerifyArgs& a) {
    if (!is_suite(a.suite)) throw UsageError("unknown suite '" + a.suite + "'");
    SuiteOptions o;
    o.kappa = a.kappa;
    o.n = a.n;
    o.dt = a.dt;
    o.seed = a.seed;
    if (a.threads) o.threads = *a.threads;
    SuiteReport r;
    try {
        r = run_suite(a.suite, o);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    ensure_dir(a.out);
    write_text((fs::path(a.out) / (a.suite + ".json")).string(), r.to_json().dump(2) + "\n");
    std::cout << r.one_line() << "\n";
    return r.pass ? exit_pass : exit_fail;
}

int cmd_plot(const PlotArgs& a) {
    std::vector<CsvTable> tables;
    for (const auto& f : a.inputs) tables.push_back(read_csv(f));
    const std::string kind = tables.front().kind;
    for (const auto& t : tables)
        if (t.kind != kind) throw SchemaError("inputs mix " + kind + " and " + t.kind + " tables");
    std::size_t rows = 0;
    for (const auto& t : tables) rows += t.rows.size();
    std::string warning = rows == 0 ? "empty input" : "";
    std::string title = a.title.empty() ? kind : a.title;
    std::string svg;
    auto lines = [&](const std::string& xc, const std::string& yc, bool equal) {
        std::vector<Series> ss;
        for (std::size_t k = 0; k < tables.size(); ++k) {
            expect_schema(tables[k], kind, {xc, yc});
            Series s;
            s.label = tables.size() > 1 ? fs::path(a.inputs[k]).filename().string() : "";
            std::size_t ix = tables[k].column(xc), iy = tables[k].column(yc);
            for (const auto& r : tables[k].rows) {
                s.x.push_back(r[ix]);
                s.y.push_back(r[iy]);
            }
            ss.push_back(std::move(s));
        }
        return svg_lines(ss, title, equal, warning);
    };
    if (kind == "trace") {
        svg = lines("re", "im", true);
    } else if (kind == "driving") {
        svg = lines("t", "lambda", false);
    } else if (kind == "transport") {
        svg = lines("u", "lambda_star", false);
    } else if (kind == "measure") {
        svg = lines("x", "rho", false);
    } else if (kind == "welding") {
        std::vector<std::pair<double, double>> pairs;
        for (const auto& t : tables) {
            expect_schema(t, kind, {"x", "y"});
            std::size_t ix = t.column("x"), iy = t.column("y");
            for (const auto& r : t.rows) pairs.emplace_back(r[ix], r[iy]);
        }
        svg = svg_chords(pairs, title, warning);
    } else if (kind == "martingale" || kind == "lattice") {
        std::vector<double> v;
        const char* col = kind == "martingale" ? "M" : "lnM";
        for (const auto& t : tables) {
            expect_schema(t, kind, {col});
            std::size_t ic = t.column(col);
            for (const auto& r : t.rows) v.push_back(r[ic]);
        }
        svg = svg_histogram(v, a.bins, title, warning);
    } else {
        throw SchemaError("no plot for table kind '" + kind + "'");
    }
    if (auto parent = fs::path(a.svg).parent_path(); !parent.empty()) ensure_dir(parent.string());
    write_text(a.svg, svg);
    if (!warning.empty()) std::cerr << "warning: " << warning << "\n";
    std::cout << a.svg << "\n";
    return exit_pass;
}

void diagnostic(const NumericError& e, const std::string& command, const std::string& out_dir) {
    nlohmann::json d = {{"schema_version", schema_version}, {"command", command}, {"error", e.kind},
                        {"message", e.what()}};
    std::cerr << d.dump() << "\n";
    if (!out_dir.empty()) {
        try {
            ensure_dir(out_dir);
            write_text((fs::path(out_dir) / "diagnostic.json").string(), d.dump(2) + "\n");
        } catch (...) {
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Backward Loewner evolution lab: simulate, verify, plot"};
    app.require_subcommand(1);

    SimArgs sim;
    auto* s = app.add_subcommand("simulate", "sample a driving path and write driving, trace and manifest files");
    s->add_option("--config", sim.config, "JSON config; flags override its keys");
    s->add_option("--kappa", sim.kappa, "diffusivity (0 gives the straight slit)");
    s->add_option("--rho", sim.rho, "force point strengths")->delimiter(',');
    s->add_option("--force", sim.force, "force point positions on the boundary")->delimiter(',');
    s->add_option("--geometry", sim.geometry, "chordal or radial");
    s->add_option("--T", sim.T, "horizon");
    s->add_option("--dt", sim.dt, "time step");
    s->add_option("--seed", sim.seed, "random seed");
    s->add_option("--out", sim.out, "output directory");
    s->add_option("--welding", sim.welding, "also write this many welding pairs");
    s->add_flag("--normalize", sim.normalize, "write the affinely normalized global trace");

    VerifyArgs ver;
    auto* v = app.add_subcommand("verify", "run a verification suite; exit 0 iff every gate passes");
    std::string names;
    for (const auto& n : suite_names()) names += (names.empty() ? "" : ", ") + n;
    v->add_option("suite", ver.suite, "one of: " + names)->required();
    v->add_option("--kappa", ver.kappa, "diffusivity");
    v->add_option("--n", ver.n, "sample size");
    v->add_option("--dt", ver.dt, "time step, or relative step for adaptive grids");
    v->add_option("--seed", ver.seed, "base seed");
    v->add_option("--threads", ver.threads, "worker threads (default: LOEWNER_LAB_THREADS or all cores)");
    v->add_option("--out", ver.out, "directory for the JSON report");

    PlotArgs pl;
    auto* p = app.add_subcommand("plot", "render CSV outputs as SVG");
    p->add_option("inputs", pl.inputs, "CSV files of one kind")->required();
    p->add_option("--svg", pl.svg, "output SVG path");
    p->add_option("--bins", pl.bins, "histogram bins");
    p->add_option("--title", pl.title, "plot title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_pass : exit_usage;
    }

    std::string command = s->parsed() ? "simulate" : v->parsed() ? "verify" : "plot";
    std::string out_dir = s->parsed() ? sim.out : v->parsed() ? ver.out : "";
    try {
        if (s->parsed()) return cmd_simulate(sim, *s);
        if (v->parsed()) return cmd_verify(ver);
        return cmd_plot(pl);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return exit_usage;
    } catch (const NumericError& e) {
        diagnostic(e, command, out_dir);
        return exit_numeric;
    } catch (const WeldingError& e) {
        diagnostic(NumericError(e.kind, e.what()), command, out_dir);
        return exit_numeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numeric;
    }
}
