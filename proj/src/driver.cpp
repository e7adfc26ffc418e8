#include "ppacdc/driver.hpp"

#include <filesystem>
#include <iostream>

#include "ppacdc/io.hpp"

namespace ppacdc {

namespace fs = std::filesystem;

namespace {

fs::path out_path(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    return fs::path(dir) / name;
}

std::string with_bits_suffix(const std::string& name, int bits) {
    const fs::path p(name);
    fs::path out = p.parent_path() / (p.stem().string() + "_b" + std::to_string(bits));
    out += p.extension();
    return out.string();
}

}  // namespace

int execute_run(const Experiment& ex, const std::string& out_dir) {
    std::vector<int> bits_list = ex.bits_list;
    if (bits_list.empty()) bits_list.push_back(ex.protocol.bits);

    nlohmann::ordered_json summaries = nlohmann::ordered_json::array();
    bool all_converged = true;
    for (int bits : bits_list) {
        SimConfig cfg = ex.to_sim_config();
        cfg.protocol.bits = bits;
        const RunResult result = run(cfg);
        all_converged = all_converged && result.converged;

        if (!ex.output.trace_csv.empty()) {
            const std::string name = ex.bits_list.empty()
                                         ? ex.output.trace_csv
                                         : with_bits_suffix(ex.output.trace_csv, bits);
            write_trace_csv(out_path(out_dir, name).string(), result.trace);
        }
        summaries.push_back(run_summary_json(result, cfg));
        std::cout << "run bits=" << bits << ": "
                  << (result.converged
                          ? "converged at k=" + std::to_string(*result.convergence_iter)
                          : "not converged within " + std::to_string(cfg.max_iters))
                  << ", final_error=" << format_double(result.final_error) << "\n";
    }
    if (!ex.output.summary_json.empty()) {
        const nlohmann::ordered_json doc =
            ex.bits_list.empty() ? summaries.at(0) : nlohmann::ordered_json{{"runs", summaries}};
        write_text_file_atomic(out_path(out_dir, ex.output.summary_json).string(),
                               doc.dump(2) + "\n");
    }
    return all_converged ? 0 : 2;
}

int execute_sweep(const Experiment& ex, const std::string& out_dir) {
    const SimConfig base = ex.to_sim_config();
    const auto cells = sweep(base, ex.sweep);
    const std::string name = ex.output.sweep_csv.empty() ? "sweep.csv" : ex.output.sweep_csv;
    const auto path = out_path(out_dir, name);
    write_sweep_csv(path.string(), cells);

    int flagged = 0;
    for (const auto& c : cells)
        if (c.converged_count < c.seeds) ++flagged;
    std::cout << "sweep: " << cells.size() << " cells, " << flagged
              << " with non-converged seeds -> " << path.string() << "\n";
    return 0;
}

int execute_experiment(const Experiment& ex, const std::string& out_dir) {
    return ex.mode == "sweep" ? execute_sweep(ex, out_dir) : execute_run(ex, out_dir);
}

}  // namespace ppacdc
