#pragma once

#include <span>
#include <string>

#include <json.hpp>

#include "ppacdc/sim.hpp"

namespace ppacdc {

// Shortest round-trip decimal form (std::to_chars); locale-free, so output
// files are byte-stable across runs and machines.
std::string format_double(double v);

// Writes to <path>.tmp then renames, so a failed run never leaves a partial
// output file behind.
void write_text_file_atomic(const std::string& path, const std::string& content);

// "k,agent,x,s,delta,sigma,zeta,consensus_error,bits_cumulative", one row
// per agent per recorded round.
std::string trace_csv_text(std::span<const TraceRecord> trace);
void write_trace_csv(const std::string& path, std::span<const TraceRecord> trace);

// "alpha,bits,seeds,converged_count,mean_iters,min_iters,max_iters"; cells
// that never converged leave the statistics columns empty.
std::string sweep_csv_text(std::span<const SweepCell> cells);
void write_sweep_csv(const std::string& path, std::span<const SweepCell> cells);

nlohmann::ordered_json run_summary_json(const RunResult& result, const SimConfig& config);

}  // namespace ppacdc
