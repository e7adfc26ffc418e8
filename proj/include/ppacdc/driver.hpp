#pragma once

#include <string>

#include "ppacdc/config.hpp"

namespace ppacdc {

// Executes a parsed experiment and writes its output files under out_dir
// (created if missing). Returns the process exit code contract: 0 on
// success/convergence, 2 when a run hit max_iters without converging.
// Config and invariant problems surface as exceptions.
int execute_experiment(const Experiment& ex, const std::string& out_dir);

int execute_run(const Experiment& ex, const std::string& out_dir);
int execute_sweep(const Experiment& ex, const std::string& out_dir);

}  // namespace ppacdc
