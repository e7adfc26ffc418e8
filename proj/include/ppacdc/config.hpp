#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppacdc/sim.hpp"

namespace ppacdc {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GraphSpec {
    enum class Type { ring, random, file };
    Type type = Type::ring;
    int n = 5;
    double extra_edge_prob = 0.0;
    std::uint64_t seed = 0;
    std::string path;

    Digraph build() const;
};

// Output file names; empty means "do not write". Paths resolve against the
// chosen output directory.
struct OutputSpec {
    std::string trace_csv;
    std::string summary_json;
    std::string sweep_csv;
};

// Schema-validated experiment file. Unknown keys are rejected everywhere so
// a typo cannot silently fall back to a default.
struct Experiment {
    std::string mode = "run";  // "run" | "sweep"
    std::string comment;
    GraphSpec graph;
    X0Spec x0;
    ProtocolParams protocol;
    int max_iters = 20000;
    double conv_tolerance = 1e-8;
    std::uint64_t seed = 0;
    bool exact_mode = false;
    bool record_trace = true;
    std::vector<int> bits_list;  // run mode: one run per entry (empty: single run)
    SweepOptions sweep;
    OutputSpec output;

    SimConfig to_sim_config() const;
};

Experiment parse_experiment(const nlohmann::json& doc);
nlohmann::json load_json_file(const std::string& path);  // line/column diagnostics on error
Experiment load_experiment_file(const std::string& path);

// Applies "dotted.key=value" into the JSON document before parsing. The
// value is parsed as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace ppacdc
