#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppacdc/graph.hpp"
#include "ppacdc/protocol.hpp"

namespace ppacdc {

// Initial states: explicit per-agent values win when non-empty, otherwise
// each agent draws uniformly from [uniform_lo, uniform_hi] using the run
// seed.
struct X0Spec {
    std::vector<double> values;
    double uniform_lo = 0.0;
    double uniform_hi = 1000.0;
};

struct SimConfig {
    explicit SimConfig(Digraph g) : graph(std::move(g)) {}

    Digraph graph;
    X0Spec x0;
    ProtocolParams protocol;
    int max_iters = 20000;
    double conv_tolerance = 1e-8;
    std::uint64_t seed = 0;
    bool exact_mode = false;   // bypass quantization entirely (e_k = 0)
    bool record_trace = true;  // sweeps switch this off

    void validate() const;  // throws std::invalid_argument
    std::vector<double> initial_states() const;
};

// Snapshot of state index k. delta/sigma are the grid in force during round
// k (window-boundary adjustments already applied); x_hat/s_hat are what the
// agents transmit on that grid.
struct TraceRecord {
    int k = 0;
    std::vector<double> x, s;
    std::vector<double> x_hat, s_hat;
    std::vector<int> zeta;
    double delta = 0.0;
    double sigma = 0.0;
    double consensus_error = 0.0;
    std::uint64_t bits_cumulative = 0;
};

struct RunResult {
    // Both criteria: pairwise spread <= tol AND every |x_j - x_ave| <=
    // 100*tol. Plain agreement alone would not detect a biased consensus.
    bool converged = false;
    std::optional<int> convergence_iter;  // first k meeting both criteria
    std::optional<int> pairwise_iter;     // first k with spread <= tol (the
                                          // convergence-time metric sweeps report)
    double final_error = 0.0;             // ||x - x_ave*1||_2 at the last state
    std::vector<double> final_x, final_s;
    int iters = 0;  // last state index reached
    std::uint64_t bits_total = 0;
    std::vector<TraceRecord> trace;
};

// Network-level invariant violation with enough context to debug: which
// round, which agent (-1 for network-wide quantities), and what went wrong.
struct SimInvariantError : std::runtime_error {
    SimInvariantError(int round_, int agent_, const std::string& quantity_,
                      const std::string& detail)
        : std::runtime_error("invariant violation at round " + std::to_string(round_) +
                             ", agent " + std::to_string(agent_) + ": " + quantity_ + " (" +
                             detail + ")"),
          round(round_),
          agent(agent_),
          quantity(quantity_) {}
    int round;
    int agent;
    std::string quantity;
};

// How the per-round agent map executes. Results are bitwise identical
// either way: each agent reads only round-k messages and writes only its
// own next-round slot.
enum class ExecMode { serial, parallel };

bool detect_convergence(std::span<const double> x, double tol);
double consensus_error(std::span<const double> x, std::span<const double> x0);

// Round-synchronous engine. One round = optional window-boundary update
// (k in K_D), invariant checks, message build/encode, delivery along edges,
// coordination (max/min consensus) plus the push-pull consensus update for
// every agent, all against round-k state.
class Engine {
public:
    explicit Engine(SimConfig config, ExecMode mode = ExecMode::serial);

    // Applies the window-boundary update for the current round if due and
    // re-checks network invariants. Idempotent per round.
    void begin_round();
    // Message exchange and state updates; advances to round k+1.
    void finish_round();
    void step() {
        begin_round();
        finish_round();
    }

    int round() const { return k_; }
    std::span<const AgentState> agents() const { return agents_; }
    std::span<const double> initial_states() const { return x0_; }
    std::uint64_t bits_cumulative() const { return bits_; }
    const SimConfig& config() const { return cfg_; }

    std::vector<double> states_x() const;
    std::vector<double> states_s() const;

    void verify_invariants() const;  // throws SimInvariantError

    // Instrumentation hook: permutes the order the serial path processes
    // agents in. Results must not depend on it (round-barrier property).
    void set_processing_order(std::vector<int> order);

private:
    struct ExactPayload {
        double x = 0.0, s = 0.0, window_max = 0.0, window_min = 0.0;
        int zeta = 0;
        int out_degree = 0;
    };

    void update_agent(int j);
    void update_agents_serial();
    void update_agents_parallel();  // OpenMP map over agents; same results

    SimConfig cfg_;
    ExecMode mode_;
    std::vector<double> x0_;
    double mass0_ = 0.0;
    double mass_tolerance_ = 0.0;
    int k_ = 0;
    bool round_begun_ = false;
    std::uint64_t bits_ = 0;
    std::vector<AgentState> agents_;
    std::vector<AgentState> next_;
    std::vector<std::vector<std::uint8_t>> wire_;
    std::vector<ExactPayload> exact_wire_;
    std::vector<std::vector<std::pair<RoundMessage, NodeId>>> inbox_;  // per-agent scratch
    std::vector<std::vector<NeighborValue>> exact_scratch_;
    std::vector<int> order_;
};

RunResult run(const SimConfig& config, ExecMode mode = ExecMode::serial);

// One sweep cell aggregates n_seeds runs of a (zoom factor, bits) pair.
// Iteration statistics cover converged seeds only; a cell that never
// converged carries no statistics and is reported flagged, never averaged.
struct SweepCell {
    double alpha = 0.0;
    int bits = 0;
    int seeds = 0;
    int converged_count = 0;
    double mean_iters = 0.0;
    int min_iters = 0;
    int max_iters = 0;
};

struct SweepOptions {
    std::vector<double> alphas;
    std::vector<int> bits;
    int n_seeds = 1;
    // When set, each seed also redraws the topology (same node count,
    // seeded); d_bar is raised to the drawn diameter when needed.
    bool resample_topology = false;
    double resample_edge_prob = 0.25;
};

// Runs every (alpha, bits, seed) combination; per-run seeds derive from the
// base seed and the cell indices, so results do not depend on execution
// order. ExecMode::parallel fans runs out across OpenMP threads.
std::vector<SweepCell> sweep(const SimConfig& base, const SweepOptions& opts,
                             ExecMode mode = ExecMode::parallel);

}  // namespace ppacdc
