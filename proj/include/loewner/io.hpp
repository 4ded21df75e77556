#pragma once

#include "loewner/core.hpp"
#include "loewner/coupling.hpp"
#include "loewner/global_trace.hpp"
#include "loewner/hull.hpp"
#include "loewner/transport.hpp"
#include "loewner/welding.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace loewner {

inline constexpr int schema_version = 1;

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shortest round-trip representation; fixed across platforms with IEEE doubles.
std::string format_double(double v);

// CSV files open with "#schema_version=1,kind=<kind>" followed by a header row.
struct CsvTable {
    std::string kind;
    int version = schema_version;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const;  // throws SchemaError
};

std::string to_csv(const CsvTable& t);
CsvTable parse_csv(const std::string& text);
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);
void write_csv(const std::string& path, const CsvTable& t);
CsvTable read_csv(const std::string& path);
// Checks kind and required columns.
void expect_schema(const CsvTable& t, const std::string& kind, const std::vector<std::string>& columns);

CsvTable driving_table(const DrivingPath& p);
DrivingPath driving_from_table(const CsvTable& t, Geometry g);
CsvTable trace_table(const Trace& tr);
CsvTable trace_table(const GlobalTrace& g);
CsvTable welding_table(const Welding& w);
CsvTable measure_table(const BoundaryMeasure& m);
CsvTable lattice_dump_table(const std::vector<LatticeDumpRow>& rows);
CsvTable transport_table(const TransportedChain& ch);
CsvTable martingale_table(const std::vector<CouplingRun>& runs);

nlohmann::json hull_json(const Hull& h);
nlohmann::json normalization_json(const GlobalTrace& g);
nlohmann::json summary_json(const MartingaleSummary& s);

std::string sha256_hex(const std::string& bytes);
std::string file_sha256(const std::string& path);

struct RunManifest {
    std::string command;
    nlohmann::json config;
    std::vector<std::uint64_t> seeds;
    std::string code_version;
    std::string started;
    std::string finished;
    std::vector<std::pair<std::string, std::string>> outputs;  // path, digest

    void add_output(const std::string& path);
    nlohmann::json to_json() const;
};

std::string code_version();
std::string utc_timestamp();

// Plots. Coordinates are printed with fixed precision so reruns are byte-identical.
struct Series {
    std::string label;
    std::vector<double> x, y;
};
std::string svg_lines(const std::vector<Series>& series, const std::string& title, bool equal_aspect,
                      const std::string& warning = "");
std::string svg_chords(const std::vector<std::pair<double, double>>& pairs, const std::string& title,
                       const std::string& warning = "");
std::string svg_histogram(const std::vector<double>& values, std::size_t bins, const std::string& title,
                          const std::string& warning = "");

}  // namespace loewner
