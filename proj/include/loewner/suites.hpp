#pragma once

#include "loewner/parallel.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace loewner {

struct Gate {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    std::string relation;  // "<", "<=", ">" or "true"
    bool pass = false;
};

// Unset fields take the suite's own defaults.
struct SuiteOptions {
    std::optional<double> kappa;
    std::optional<std::size_t> n;
    std::optional<double> dt;
    std::uint64_t seed = 0;
    unsigned threads = thread_count();
};

struct SuiteReport {
    std::string suite;
    bool pass = false;
    std::vector<Gate> gates;
    nlohmann::json stats = nlohmann::json::object();
    nlohmann::json options = nlohmann::json::object();
    double seconds = 0.0;

    nlohmann::json to_json() const;
    std::string one_line() const;
};

// The verify suites plus two extra gates (transport residuals and the radial step oracle).
const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);
// Throws std::invalid_argument for an unknown suite or bad options.
SuiteReport run_suite(const std::string& name, const SuiteOptions& opt = {});

}  // namespace loewner
