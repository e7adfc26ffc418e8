#include "ppacdc/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ppacdc {

std::string format_double(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, end);
}

void write_text_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write file: " + tmp);
        f << content;
        if (!f.good()) throw std::runtime_error("error writing file: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("cannot rename " + tmp + " to " + path);
    }
}

std::string trace_csv_text(std::span<const TraceRecord> trace) {
    std::string out = "k,agent,x,s,delta,sigma,zeta,consensus_error,bits_cumulative\n";
    for (const TraceRecord& rec : trace) {
        for (std::size_t j = 0; j < rec.x.size(); ++j) {
            out += std::to_string(rec.k);
            out += ',';
            out += std::to_string(j);
            out += ',';
            out += format_double(rec.x[j]);
            out += ',';
            out += format_double(rec.s[j]);
            out += ',';
            out += format_double(rec.delta);
            out += ',';
            out += format_double(rec.sigma);
            out += ',';
            out += std::to_string(rec.zeta[j]);
            out += ',';
            out += format_double(rec.consensus_error);
            out += ',';
            out += std::to_string(rec.bits_cumulative);
            out += '\n';
        }
    }
    return out;
}

void write_trace_csv(const std::string& path, std::span<const TraceRecord> trace) {
    write_text_file_atomic(path, trace_csv_text(trace));
}

std::string sweep_csv_text(std::span<const SweepCell> cells) {
    std::string out = "alpha,bits,seeds,converged_count,mean_iters,min_iters,max_iters\n";
    for (const SweepCell& c : cells) {
        out += format_double(c.alpha);
        out += ',';
        out += std::to_string(c.bits);
        out += ',';
        out += std::to_string(c.seeds);
        out += ',';
        out += std::to_string(c.converged_count);
        out += ',';
        if (c.converged_count > 0) {
            out += format_double(c.mean_iters);
            out += ',';
            out += std::to_string(c.min_iters);
            out += ',';
            out += std::to_string(c.max_iters);
        } else {
            out += ",,";
        }
        out += '\n';
    }
    return out;
}

void write_sweep_csv(const std::string& path, std::span<const SweepCell> cells) {
    write_text_file_atomic(path, sweep_csv_text(cells));
}

nlohmann::ordered_json run_summary_json(const RunResult& result, const SimConfig& config) {
    nlohmann::ordered_json j;
    j["converged"] = result.converged;
    if (result.convergence_iter)
        j["convergence_iter"] = *result.convergence_iter;
    else
        j["convergence_iter"] = nullptr;
    if (result.pairwise_iter)
        j["pairwise_iter"] = *result.pairwise_iter;
    else
        j["pairwise_iter"] = nullptr;
    j["iters"] = result.iters;
    j["final_error"] = result.final_error;
    j["bits_total"] = result.bits_total;
    j["final_x"] = result.final_x;
    j["final_s"] = result.final_s;
    j["n"] = config.graph.node_count();
    j["edges"] = config.graph.edge_count();
    j["gamma"] = config.protocol.gamma;
    j["alpha"] = config.protocol.alpha;
    j["bits"] = config.protocol.bits;
    j["d_bar"] = config.protocol.d_bar;
    j["seed"] = config.seed;
    j["exact_mode"] = config.exact_mode;
    return j;
}

}  // namespace ppacdc
