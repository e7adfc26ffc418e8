#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ppacdc/analysis.hpp"
#include "ppacdc/config.hpp"
#include "ppacdc/driver.hpp"
#include "ppacdc/io.hpp"
#include "ppacdc/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

#ifndef PPACDC_PRESET_DIR
#define PPACDC_PRESET_DIR "presets"
#endif

namespace {

// exit codes: 0 success/converged (analyze: spectral check passes),
// 1 config or invariant error, 2 non-convergence / failed check,
// 3 eigen-solver non-convergence
constexpr int kError = 1;
constexpr int kNotConverged = 2;
constexpr int kEigenFailed = 3;

std::string default_out_dir() {
    if (const char* env = std::getenv("PPACDC_OUT")) return env;
    return ".";
}

std::string preset_dir() {
    if (const char* env = std::getenv("PPACDC_PRESETS")) return env;
    return PPACDC_PRESET_DIR;
}

json load_with_overrides(const std::string& config_path,
                         const std::vector<std::string>& overrides) {
    json doc = ppacdc::load_json_file(config_path);
    for (const std::string& ov : overrides) ppacdc::apply_override(doc, ov);
    return doc;
}

int cmd_analyze(const std::string& graph_path, int ring_n, double gamma, double tol) {
    if (!(gamma > 0.0)) throw ppacdc::ConfigError("gamma must be positive");
    ppacdc::Digraph g = graph_path.empty() ? ppacdc::Digraph::ring(ring_n)
                                           : ppacdc::load_edge_list_file(graph_path);
    const auto sys = ppacdc::build_augmented(g, gamma);
    const auto report = ppacdc::spectral_check(sys, tol);
    nlohmann::ordered_json j;
    j["gamma"] = gamma;
    j["dominant_re"] = report.dominant.real();
    j["dominant_im"] = report.dominant.imag();
    j["second_modulus"] = report.second_modulus;
    j["passes"] = report.passes;
    std::cout << j.dump() << "\n";
    return report.passes ? 0 : kNotConverged;
}

int cmd_gen_graph(int n, double prob, std::uint64_t seed, const std::string& out) {
    const ppacdc::Digraph g = ppacdc::random_strongly_connected(n, prob, seed);
    ppacdc::save_edge_list_file(g, out);
    std::cout << "n=" << g.node_count() << " m=" << g.edge_count()
              << " diameter=" << ppacdc::diameter(g) << " -> " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pp-acdc: quantized push-pull average consensus simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = default_out_dir(), graph_path, gen_out;
    std::vector<std::string> overrides;
    std::string seed_str;
    int ring_n = 5, gen_n = 5;
    double gamma = 0.2, tol = 1e-9, gen_prob = 0.0;
    std::uint64_t gen_seed = 0;
    std::string preset_name;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", out_dir, "output directory (default $PPACDC_OUT or .)");
        sub->add_option("--seed", seed_str, "override the experiment seed");
        sub->add_option("--override", overrides,
                        "dotted.key=value override into the config JSON");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "execute a single-run experiment");
    run_cmd->add_option("--config", config_path, "experiment JSON")->required();
    add_common(run_cmd);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "execute a parameter sweep");
    sweep_cmd->add_option("--config", config_path, "experiment JSON")->required();
    add_common(sweep_cmd);

    CLI::App* analyze_cmd =
        app.add_subcommand("analyze", "spectral check of the augmented consensus system");
    analyze_cmd->add_option("--graph", graph_path, "edge-list graph file");
    analyze_cmd->add_option("--ring", ring_n, "use a directed ring of this size instead");
    analyze_cmd->add_option("--gamma", gamma, "surplus gain")->required();
    analyze_cmd->add_option("--tol", tol, "spectral tolerance (default 1e-9)");

    CLI::App* gen_cmd = app.add_subcommand("gen-graph", "generate a strongly connected digraph");
    gen_cmd->add_option("--n", gen_n, "node count")->required();
    gen_cmd->add_option("--prob", gen_prob, "extra-edge probability in [0,1]");
    gen_cmd->add_option("--seed", gen_seed, "generator seed");
    gen_cmd->add_option("--out", gen_out, "output edge-list path")->required();

    CLI::App* preset_cmd = app.add_subcommand("preset", "run a named committed preset");
    preset_cmd->add_option("name", preset_name, "preset name (e.g. paper-fig2)")->required();
    add_common(preset_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed() || sweep_cmd->parsed()) {
            if (!seed_str.empty()) overrides.push_back("seed=" + seed_str);
            const auto ex = ppacdc::parse_experiment(load_with_overrides(config_path, overrides));
            if (sweep_cmd->parsed() && ex.mode != "sweep") {
                std::cerr << "error: config mode is \"" << ex.mode << "\", expected sweep\n";
                return kError;
            }
            if (run_cmd->parsed() && ex.mode != "run") {
                std::cerr << "error: config mode is \"" << ex.mode << "\", expected run\n";
                return kError;
            }
            return ppacdc::execute_experiment(ex, out_dir);
        }
        if (preset_cmd->parsed()) {
            const fs::path path = fs::path(preset_dir()) / (preset_name + ".json");
            if (!fs::exists(path)) {
                std::cerr << "error: unknown preset \"" << preset_name << "\" (looked at "
                          << path.string() << ")\n";
                return kError;
            }
            if (!seed_str.empty()) overrides.push_back("seed=" + seed_str);
            const auto ex =
                ppacdc::parse_experiment(load_with_overrides(path.string(), overrides));
            return ppacdc::execute_experiment(ex, out_dir);
        }
        if (analyze_cmd->parsed()) return cmd_analyze(graph_path, ring_n, gamma, tol);
        if (gen_cmd->parsed()) return cmd_gen_graph(gen_n, gen_prob, gen_seed, gen_out);
    } catch (const ppacdc::EigenFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kEigenFailed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
