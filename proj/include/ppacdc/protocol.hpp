#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ppacdc/graph.hpp"
#include "ppacdc/quantizer.hpp"

namespace ppacdc {

// Which interval counts as "well within range" for the zoom-in vote.
// `centered` contracts the range symmetrically around the midpoint;
// `literal` scales the raw interval endpoints toward zero, which moves the
// window away from the midpoint once sigma != 0. Centered is the default;
// literal is kept selectable for fidelity experiments.
enum class ZoomInRule { centered, literal };

struct ProtocolParams {
    double gamma = 0.2;   // surplus gain
    double alpha = 1.2;   // zooming factor
    int d_bar = 1;        // upper bound on the network diameter
    int bits = 12;        // quantizer bits b
    double delta0 = 1.0;  // initial step size (must be > 0: zooming multiplies)
    double sigma0 = 0.0;  // initial midpoint
    ZoomInRule zoom_in_rule = ZoomInRule::centered;

    void validate() const;  // throws std::invalid_argument
};

// One agent's protocol state. Owned by exactly one execution context per
// round; all cross-agent influence flows through RoundMessage values.
struct AgentState {
    NodeId id = 0;
    double x = 0.0;  // state
    double s = 0.0;  // surplus
    int zeta = 0;    // range vote in {-1, 0, +1}, max-consensus aggregated
    // Running extrema of quantized states this window. The level is the
    // authoritative value (it is what travels); the real fields are its
    // decoding on the current grid, kept for the midpoint shift and for
    // inspection. In exact mode the reals carry raw states and the levels
    // stay zero.
    double window_max = 0.0;
    double window_min = 0.0;
    QuantLevel window_max_level = 0;
    QuantLevel window_min_level = 0;
    QuantizerParams grid{};  // current (b, delta_k, sigma_k); network-identical
    int out_degree = 0;
};

// Per-edge payload. x/window levels are relative to (delta, sigma); the
// surplus level is relative to (delta, 0).
struct RoundMessage {
    QuantLevel x_level = 0;
    QuantLevel s_level = 0;
    QuantLevel window_max_level = 0;
    QuantLevel window_min_level = 0;
    int zeta = 0;
    int out_degree = 0;
};

// Range classification of x against the grid: +1 out of range, -1 well
// within (zoom-in region), 0 in the peripheral band. Boundary points fall
// in the 0 band.
int compute_zeta(double x, const QuantizerParams& grid, double alpha, ZoomInRule rule);

double max_consensus_step(double own, std::span<const double> incoming);
double min_consensus_step(double own, std::span<const double> incoming);

// Fresh agent at k = 0: s = 0, grid (b, delta0, sigma0), window variables
// and zeta reset against that grid.
AgentState make_initial_agent(NodeId id, double x0, const ProtocolParams& params,
                              int out_degree, bool exact = false);

// Re-quantizes x on the agent's current grid and resets window_max,
// window_min and zeta from it. Runs at every window boundary, including
// k = 0 where it is the whole update. With exact set, quantization is
// bypassed and the extrema reset to the raw state.
void window_reset(AgentState& agent, const ProtocolParams& params, bool exact = false);

// Window boundary with converged extrema (k in K, k > 0): shift the
// midpoint to (window_max + window_min)/2, then zoom the step size by the
// aggregated zeta, then window_reset on the new grid.
void window_boundary_update(AgentState& agent, const ProtocolParams& params,
                            bool exact = false);

RoundMessage build_message(const AgentState& agent);

// Normative wire layout, MSB-first: x_level (b) | s_level (b) |
// window_max_level (b) | window_min_level (b) | zeta (2: 00=0, 01=+1,
// 10=-1) | out_degree (16, unsigned). 4b + 18 bits, zero-padded to bytes.
std::vector<std::uint8_t> encode_message(const RoundMessage& m, int bits);
void encode_message(const RoundMessage& m, int bits, std::vector<std::uint8_t>& out);
RoundMessage decode_message(std::span<const std::uint8_t> bytes, int bits);
std::size_t message_bit_count(int bits);

// Decoded view of one in-neighbor's transmission.
struct NeighborValue {
    double x_hat = 0.0;
    double s_hat = 0.0;
    int out_degree = 0;
};

struct StateUpdate {
    double x = 0.0;
    double s = 0.0;
};

// Push-pull update core shared by the quantized and the exact paths:
//   x' = x + gamma*s + (r_jj - 1)*x_hat_own + sum_i r_ji * x_hat_i
//   s' = s + x - x' + (c_jj - 1)*s_hat_own + sum_i s_hat_i / (1 + d_i_out)
// with r_ji = 1/(1 + in_degree). `incoming` must be ordered by sender id so
// results do not depend on delivery order.
StateUpdate push_pull_update(const AgentState& agent, double x_hat_own, double s_hat_own,
                             std::span<const NeighborValue> incoming, double gamma);

// Quantized-path update: decodes levels against the agent's grid, validates
// the sender set against the topology (exactly one message per in-neighbor),
// and applies push_pull_update with the agent's own quantized values.
StateUpdate consensus_update(const AgentState& agent,
                             std::span<const std::pair<RoundMessage, NodeId>> incoming,
                             const Digraph& g, double gamma);

}  // namespace ppacdc
