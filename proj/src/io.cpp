#include "loewner/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#ifndef LOEWNER_VERSION
#define LOEWNER_VERSION "dev"
#endif

namespace loewner {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::size_t CsvTable::column(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw SchemaError("missing column '" + name + "' in " + kind + " table");
    return static_cast<std::size_t>(it - columns.begin());
}

std::string to_csv(const CsvTable& t) {
    std::string out = "#schema_version=" + std::to_string(t.version) + ",kind=" + t.kind + "\n";
    for (std::size_t k = 0; k < t.columns.size(); ++k) out += (k ? "," : "") + t.columns[k];
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) out += ",";
            out += format_double(row[k]);
        }
        out += "\n";
    }
    return out;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && s[i] == ' ') ++i;
    return s.substr(i);
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty file: no schema line");
    line = trim(line);
    if (line.rfind("#schema_version=", 0) != 0) throw SchemaError("first line must carry schema_version");
    CsvTable t;
    for (const auto& field : split(line.substr(1), ',')) {
        auto eq = field.find('=');
        if (eq == std::string::npos) continue;
        std::string key = field.substr(0, eq), val = field.substr(eq + 1);
        if (key == "schema_version") {
            try {
                t.version = std::stoi(val);
            } catch (...) {
                throw SchemaError("bad schema_version");
            }
        } else if (key == "kind") {
            t.kind = val;
        }
    }
    if (t.version != schema_version) throw SchemaError("unsupported schema_version " + std::to_string(t.version));
    if (t.kind.empty()) throw SchemaError("schema line names no kind");
    if (!std::getline(in, line)) throw SchemaError("missing header row");
    for (auto& c : split(trim(line), ',')) t.columns.push_back(trim(c));
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        auto cells = split(line, ',');
        if (cells.size() != t.columns.size()) throw SchemaError("row width does not match header");
        std::vector<double> row;
        for (const auto& c : cells) {
            std::string s = trim(c);
            char* end = nullptr;
            double v = std::strtod(s.c_str(), &end);
            if (s.empty() || *end != '\0') throw SchemaError("non-numeric cell '" + s + "'");
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

void write_csv(const std::string& path, const CsvTable& t) { write_text(path, to_csv(t)); }
CsvTable read_csv(const std::string& path) { return parse_csv(read_text(path)); }

void expect_schema(const CsvTable& t, const std::string& kind, const std::vector<std::string>& columns) {
    if (t.kind != kind) throw SchemaError("expected a " + kind + " table, got " + t.kind);
    for (const auto& c : columns) t.column(c);
}

CsvTable driving_table(const DrivingPath& p) {
    CsvTable t{"driving", schema_version, {"t", "lambda"}, {}};
    for (std::size_t i = 0; i < p.t.size(); ++i) t.rows.push_back({p.t[i], p.values[i]});
    return t;
}

DrivingPath driving_from_table(const CsvTable& t, Geometry g) {
    expect_schema(t, "driving", {"t", "lambda"});
    std::size_t it = t.column("t"), il = t.column("lambda");
    std::vector<double> tt, vv;
    for (const auto& r : t.rows) {
        tt.push_back(r[it]);
        vv.push_back(r[il]);
    }
    return DrivingPath(g, std::move(tt), std::move(vv));
}

CsvTable trace_table(const Trace& tr) {
    CsvTable t{"trace", schema_version, {"t", "re", "im"}, {}};
    for (std::size_t i = 0; i < tr.points.size(); ++i)
        t.rows.push_back({tr.t[i], std::real(tr.points[i]), std::imag(tr.points[i])});
    return t;
}

CsvTable trace_table(const GlobalTrace& g) {
    CsvTable t{"trace", schema_version, {"t", "re", "im"}, {}};
    for (std::size_t i = 0; i < g.points.size(); ++i)
        t.rows.push_back({g.t[i], std::real(g.points[i]), std::imag(g.points[i])});
    return t;
}

CsvTable welding_table(const Welding& w) {
    CsvTable t{"welding", schema_version, {"x", "y", "tau"}, {}};
    for (const auto& p : w.pairs) t.rows.push_back({p.x, p.y, p.tau});
    return t;
}

CsvTable measure_table(const BoundaryMeasure& m) {
    CsvTable t{"measure", schema_version, {"x", "rho", "weight"}, {}};
    for (std::size_t i = 0; i < m.nodes.size(); ++i) t.rows.push_back({m.nodes[i], m.density[i], m.weights[i]});
    return t;
}

CsvTable lattice_dump_table(const std::vector<LatticeDumpRow>& rows) {
    CsvTable t{"lattice",
               schema_version,
               {"seed", "t1", "t2", "A10", "A11", "A20", "A21", "X1", "lnY", "lnF", "cap", "lnM"},
               {}};
    for (const auto& r : rows)
        t.rows.push_back({static_cast<double>(r.seed), r.t1, r.t2, r.A10, r.A11, r.A20, r.A21, r.X1, r.lnY, r.lnF,
                          r.cap, r.lnM});
    return t;
}

CsvTable transport_table(const TransportedChain& ch) {
    CsvTable t{"transport", schema_version, {"t", "lambda_star", "u"}, {}};
    for (std::size_t i = 0; i < ch.t.size(); ++i) t.rows.push_back({ch.t[i], ch.lambda_star[i], ch.u[i]});
    return t;
}

CsvTable martingale_table(const std::vector<CouplingRun>& runs) {
    CsvTable t{"martingale", schema_version, {"index", "lnM", "M", "max_abs_lnM", "stopped", "exited"}, {}};
    std::vector<const CouplingRun*> sorted;
    for (const auto& r : runs) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->index < b->index; });
    for (const auto* r : sorted)
        t.rows.push_back({static_cast<double>(r->index), r->lnM, std::exp(r->lnM), r->max_abs_lnM,
                          r->stopped ? 1.0 : 0.0, r->exited ? 1.0 : 0.0});
    return t;
}

nlohmann::json hull_json(const Hull& h) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : h.stack.steps) steps.push_back({s.lambda, s.delta});
    return {{"schema_version", schema_version},
            {"geometry", to_string(h.geometry)},
            {"steps", steps},
            {"capacity", h.capacity},
            {"support", {h.support.a, h.support.b}},
            {"support_err", h.support.err},
            {"base", {h.base.a, h.base.b}}};
}

nlohmann::json normalization_json(const GlobalTrace& g) {
    return {{"schema_version", schema_version},
            {"a_re", std::real(g.a)},
            {"a_im", std::imag(g.a)},
            {"b_re", std::real(g.b)},
            {"b_im", std::imag(g.b)},
            {"phase_dev", g.phase_dev},
            {"T_star", g.T_star},
            {"anchor_clearance", g.anchor_clearance},
            {"warnings", g.warnings}};
}

nlohmann::json summary_json(const MartingaleSummary& s) {
    return {{"schema_version", schema_version},
            {"n_total", s.n_total},
            {"n_used", s.n_used},
            {"n_exited", s.n_exited},
            {"n_unstopped", s.n_unstopped},
            {"mean_M", s.mean_M},
            {"stderr_M", s.stderr_M},
            {"max_abs_lnM", s.max_abs_lnM},
            {"probe_mean", s.probe_mean},
            {"probe_stderr", s.probe_stderr},
            {"max_lnF_rel_err", s.max_lnF_rel_err}};
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr))
        throw std::runtime_error("digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string file_sha256(const std::string& path) { return sha256_hex(read_text(path)); }

void RunManifest::add_output(const std::string& path) { outputs.emplace_back(path, file_sha256(path)); }

nlohmann::json RunManifest::to_json() const {
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& [p, d] : outputs) outs.push_back({{"path", p}, {"sha256", d}});
    return {{"schema_version", schema_version},
            {"command", command},
            {"config", config},
            {"seeds", seeds},
            {"code_version", code_version},
            {"started", started},
            {"finished", finished},
            {"outputs", outs}};
}

std::string code_version() { return LOEWNER_VERSION; }

std::string utc_timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---- SVG ----

namespace {

constexpr double W = 640.0, H = 480.0, M = 48.0;
const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fx(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s = buf;
    return s == "-0.000" ? "0.000" : s;
}

std::string esc(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '&': o += "&amp;"; break;
            case '"': o += "&quot;"; break;
            default: o += c;
        }
    }
    return o;
}

std::string head(const std::string& title) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fx(W) + "\" height=\"" + fx(H) + "\" viewBox=\"0 0 " +
           fx(W) + " " + fx(H) + "\">\n<rect x=\"0\" y=\"0\" width=\"" + fx(W) + "\" height=\"" + fx(H) +
           "\" fill=\"white\"/>\n<text x=\"" + fx(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" " +
           "font-size=\"14\">" + esc(title) + "</text>\n";
}

std::string frame() {
    return "<rect x=\"" + fx(M) + "\" y=\"" + fx(M) + "\" width=\"" + fx(W - 2 * M) + "\" height=\"" + fx(H - 2 * M) +
           "\" fill=\"none\" stroke=\"#888\"/>\n";
}

std::string warn(const std::string& w) {
    if (w.empty()) return "";
    return "<text x=\"" + fx(W / 2) + "\" y=\"" + fx(H / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" fill=\"#b00\">warning: " + esc(w) +
           "</text>\n";
}

struct Box {
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
};

Box bounds(const std::vector<Series>& ss, bool equal) {
    bool any = false;
    Box b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& s : ss)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            any = true;
            b.x0 = std::min(b.x0, s.x[i]);
            b.x1 = std::max(b.x1, s.x[i]);
            b.y0 = std::min(b.y0, s.y[i]);
            b.y1 = std::max(b.y1, s.y[i]);
        }
    if (!any) return Box{};
    if (b.x1 - b.x0 < 1e-12) b.x0 -= 0.5, b.x1 += 0.5;
    if (b.y1 - b.y0 < 1e-12) b.y0 -= 0.5, b.y1 += 0.5;
    if (equal) {
        double sx = (b.x1 - b.x0) / (W - 2 * M), sy = (b.y1 - b.y0) / (H - 2 * M), s = std::max(sx, sy);
        double cx = 0.5 * (b.x0 + b.x1), cy = 0.5 * (b.y0 + b.y1);
        b = {cx - 0.5 * s * (W - 2 * M), cx + 0.5 * s * (W - 2 * M), cy - 0.5 * s * (H - 2 * M),
             cy + 0.5 * s * (H - 2 * M)};
    }
    return b;
}

double px(const Box& b, double x) { return M + (x - b.x0) / (b.x1 - b.x0) * (W - 2 * M); }
double py(const Box& b, double y) { return H - M - (y - b.y0) / (b.y1 - b.y0) * (H - 2 * M); }

std::string axis_labels(const Box& b) {
    auto t = [](double x, double y, const std::string& anchor, double v) {
        return "<text x=\"" + fx(x) + "\" y=\"" + fx(y) + "\" text-anchor=\"" + anchor +
               "\" font-family=\"sans-serif\" font-size=\"10\">" + esc(format_double(std::round(v * 1e4) / 1e4)) +
               "</text>\n";
    };
    return t(M, H - M + 14, "start", b.x0) + t(W - M, H - M + 14, "end", b.x1) + t(M - 4, H - M, "end", b.y0) +
           t(M - 4, M + 8, "end", b.y1);
}

}  // namespace

std::string svg_lines(const std::vector<Series>& series, const std::string& title, bool equal_aspect,
                      const std::string& warning) {
    std::string out = head(title) + frame();
    Box b = bounds(series, equal_aspect);
    out += axis_labels(b);
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        std::string col = palette[k % 6];
        std::string pts;
        auto flush = [&] {
            if (!pts.empty())
                out += "<polyline fill=\"none\" stroke=\"" + col + "\" stroke-width=\"1\" points=\"" + pts + "\"/>\n";
            pts.clear();
        };
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                flush();  // gaps split the line
                continue;
            }
            if (!pts.empty()) pts += ' ';
            pts += fx(px(b, s.x[i])) + "," + fx(py(b, s.y[i]));
        }
        flush();
        if (!s.label.empty())
            out += "<text x=\"" + fx(W - M - 4) + "\" y=\"" + fx(M + 14 + 14 * k) + "\" text-anchor=\"end\" fill=\"" +
                   col + "\" font-family=\"sans-serif\" font-size=\"11\">" + esc(s.label) + "</text>\n";
    }
    out += warn(warning);
    return out + "</svg>\n";
}

std::string svg_chords(const std::vector<std::pair<double, double>>& pairs, const std::string& title,
                       const std::string& warning) {
    std::string out = head(title);
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const auto& [x, y] : pairs) {
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        lo = any ? std::min({lo, x, y}) : std::min(x, y);
        hi = any ? std::max({hi, x, y}) : std::max(x, y);
        any = true;
    }
    if (hi - lo < 1e-12) lo -= 1.0, hi += 1.0;
    double base = H - M;
    out += "<line x1=\"" + fx(M) + "\" y1=\"" + fx(base) + "\" x2=\"" + fx(W - M) + "\" y2=\"" + fx(base) +
           "\" stroke=\"#444\"/>\n";
    Box b{lo, hi, 0.0, 1.0};
    out += axis_labels(b);
    for (const auto& [x, y] : pairs) {
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        double a = px(b, std::min(x, y)), c = px(b, std::max(x, y));
        double r = 0.5 * (c - a);
        out += "<path d=\"M " + fx(a) + " " + fx(base) + " A " + fx(r) + " " + fx(std::min(r, H - 2 * M)) +
               " 0 0 1 " + fx(c) + " " + fx(base) + "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"0.8\"/>\n";
    }
    out += warn(warning);
    return out + "</svg>\n";
}

std::string svg_histogram(const std::vector<double>& values, std::size_t bins, const std::string& title,
                          const std::string& warning) {
    std::string out = head(title) + frame();
    std::vector<double> v;
    for (double x : values)
        if (std::isfinite(x)) v.push_back(x);
    if (bins == 0) bins = 1;
    if (!v.empty()) {
        auto [mn, mx] = std::minmax_element(v.begin(), v.end());
        double lo = *mn, hi = *mx;
        if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
        std::vector<std::size_t> count(bins, 0);
        for (double x : v) {
            auto k = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
            count[std::min(k, bins - 1)]++;
        }
        double top = static_cast<double>(*std::max_element(count.begin(), count.end()));
        Box b{lo, hi, 0.0, top};
        out += axis_labels(b);
        double bw = (W - 2 * M) / static_cast<double>(bins);
        for (std::size_t k = 0; k < bins; ++k) {
            double h = static_cast<double>(count[k]) / top * (H - 2 * M);
            out += "<rect x=\"" + fx(M + bw * static_cast<double>(k)) + "\" y=\"" + fx(H - M - h) + "\" width=\"" +
                   fx(bw) + "\" height=\"" + fx(h) + "\" fill=\"#1f77b4\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
        }
    }
    out += warn(warning);
    return out + "</svg>\n";
}

}  // namespace loewner
