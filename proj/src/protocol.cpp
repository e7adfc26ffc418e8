#include "ppacdc/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ppacdc {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

constexpr int kZetaBits = 2;
constexpr int kDegreeBits = 16;

std::uint64_t zeta_code(int zeta) {
    switch (zeta) {
        case 0: return 0b00;
        case 1: return 0b01;
        case -1: return 0b10;
        default: fail("zeta must be -1, 0 or +1");
    }
}

int zeta_from_code(std::uint64_t code) {
    switch (code) {
        case 0b00: return 0;
        case 0b01: return 1;
        case 0b10: return -1;
        default: fail("invalid zeta code on the wire");
    }
}

}  // namespace

void ProtocolParams::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) fail("gamma must be positive");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) fail("alpha must be positive");
    if (d_bar < 1) fail("d_bar must be >= 1");
    if (!(delta0 > 0.0) || !std::isfinite(delta0))
        fail("delta0 must be positive (a zero step size can never zoom out)");
    if (!std::isfinite(sigma0)) fail("sigma0 must be finite");
    QuantizerParams{bits, delta0, sigma0}.validate();
}

int compute_zeta(double x, const QuantizerParams& grid, double alpha, ZoomInRule rule) {
    if (!(alpha > 0.0)) fail("compute_zeta: alpha must be positive");
    const double xbar = range_limit(grid);
    const double sigma = grid.midpoint;
    if (x > sigma + xbar || x < sigma - xbar) return 1;
    double lo, hi;
    if (rule == ZoomInRule::centered) {
        lo = sigma - xbar / (1.0 + alpha);
        hi = sigma + xbar / (1.0 + alpha);
    } else {
        lo = (sigma - xbar) / (1.0 + alpha);
        hi = (sigma + xbar) / (1.0 + alpha);
    }
    if (x > lo && x < hi) return -1;
    return 0;
}

double max_consensus_step(double own, std::span<const double> incoming) {
    double best = own;
    for (double v : incoming) best = std::max(best, v);
    return best;
}

double min_consensus_step(double own, std::span<const double> incoming) {
    double best = own;
    for (double v : incoming) best = std::min(best, v);
    return best;
}

AgentState make_initial_agent(NodeId id, double x0, const ProtocolParams& params,
                              int out_degree, bool exact) {
    params.validate();
    if (!std::isfinite(x0)) fail("initial state must be finite");
    if (out_degree < 1) fail("agent needs at least one out-neighbor");
    AgentState a;
    a.id = id;
    a.x = x0;
    a.s = 0.0;
    a.grid = QuantizerParams{params.bits, params.delta0, params.sigma0};
    a.out_degree = out_degree;
    window_reset(a, params, exact);
    return a;
}

void window_reset(AgentState& agent, const ProtocolParams& params, bool exact) {
    if (exact) {
        agent.window_max = agent.x;
        agent.window_min = agent.x;
        agent.window_max_level = 0;
        agent.window_min_level = 0;
    } else {
        const QuantLevel l = quantize_level(agent.x, agent.grid);
        const double x_hat = from_level(l, agent.grid);
        agent.window_max = x_hat;
        agent.window_min = x_hat;
        agent.window_max_level = l;
        agent.window_min_level = l;
    }
    agent.zeta = compute_zeta(agent.x, agent.grid, params.alpha, params.zoom_in_rule);
}

void window_boundary_update(AgentState& agent, const ProtocolParams& params, bool exact) {
    // Shift first: the converged extrema live on the grid they were
    // measured against. Then zoom, then reset everything on the new grid.
    agent.grid.midpoint = 0.5 * (agent.window_max + agent.window_min);
    if (agent.zeta == 1)
        agent.grid.step *= 1.0 + params.alpha;
    else if (agent.zeta == -1)
        agent.grid.step /= 1.0 + params.alpha;
    window_reset(agent, params, exact);
}

RoundMessage build_message(const AgentState& agent) {
    agent.grid.validate();
    const QuantizerParams surplus_grid{agent.grid.bits, agent.grid.step, 0.0};
    RoundMessage m;
    m.x_level = quantize_level(agent.x, agent.grid);
    m.s_level = quantize_level(agent.s, surplus_grid);
    m.window_max_level = agent.window_max_level;
    m.window_min_level = agent.window_min_level;
    m.zeta = agent.zeta;
    m.out_degree = agent.out_degree;
    return m;
}

std::size_t message_bit_count(int bits) {
    return 4 * static_cast<std::size_t>(bits) + kZetaBits + kDegreeBits;
}

void encode_message(const RoundMessage& m, int bits, std::vector<std::uint8_t>& out) {
    const QuantLevel lmax = max_level(bits);
    for (QuantLevel l : {m.x_level, m.s_level, m.window_max_level, m.window_min_level})
        if (std::abs(l) > lmax)
            fail("encode_message: level " + std::to_string(l) + " overflows " +
                 std::to_string(bits) + " bits");
    if (m.out_degree < 1) fail("encode_message: out_degree must be >= 1");
    if (m.out_degree >= (1 << kDegreeBits)) fail("encode_message: out_degree overflows 16 bits");

    // writes in place so per-round buffers keep their capacity
    out.assign((message_bit_count(bits) + 7) / 8, 0);
    std::size_t pos = 0;
    const auto put = [&](std::uint64_t v, int n) {
        for (int i = n - 1; i >= 0; --i, ++pos)
            out[pos / 8] |= static_cast<std::uint8_t>(((v >> i) & 1u) << (7 - pos % 8));
    };
    const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
    put(static_cast<std::uint64_t>(m.x_level) & mask, bits);
    put(static_cast<std::uint64_t>(m.s_level) & mask, bits);
    put(static_cast<std::uint64_t>(m.window_max_level) & mask, bits);
    put(static_cast<std::uint64_t>(m.window_min_level) & mask, bits);
    put(zeta_code(m.zeta), kZetaBits);
    put(static_cast<std::uint64_t>(m.out_degree), kDegreeBits);
}

std::vector<std::uint8_t> encode_message(const RoundMessage& m, int bits) {
    std::vector<std::uint8_t> out;
    encode_message(m, bits, out);
    return out;
}

RoundMessage decode_message(std::span<const std::uint8_t> bytes, int bits) {
    const QuantLevel lmax = max_level(bits);
    BitReader r(bytes);
    RoundMessage m;
    QuantLevel* const fields[] = {&m.x_level, &m.s_level, &m.window_max_level,
                                  &m.window_min_level};
    for (QuantLevel* f : fields) {
        *f = sign_extend(r.get(bits), bits);
        // -2^(b-1) is the reserved-invalid code; seeing it means the sender
        // ran a different grid.
        if (std::abs(*f) > lmax) fail("decode_message: reserved level code on the wire");
    }
    m.zeta = zeta_from_code(r.get(kZetaBits));
    m.out_degree = static_cast<int>(r.get(kDegreeBits));
    if (m.out_degree < 1) fail("decode_message: out_degree must be >= 1");
    return m;
}

StateUpdate push_pull_update(const AgentState& agent, double x_hat_own, double s_hat_own,
                             std::span<const NeighborValue> incoming, double gamma) {
    const int in_degree = static_cast<int>(incoming.size());
    const double r = 1.0 / (1.0 + in_degree);
    const double c_own = 1.0 / (1.0 + agent.out_degree);

    double x_new = agent.x + gamma * agent.s + (r - 1.0) * x_hat_own;
    for (const NeighborValue& nv : incoming) x_new += r * nv.x_hat;

    double s_new = agent.s + agent.x - x_new + (c_own - 1.0) * s_hat_own;
    for (const NeighborValue& nv : incoming) s_new += nv.s_hat / (1.0 + nv.out_degree);

    return {x_new, s_new};
}

StateUpdate consensus_update(const AgentState& agent,
                             std::span<const std::pair<RoundMessage, NodeId>> incoming,
                             const Digraph& g, double gamma) {
    const auto& expected = g.in_neighbors(agent.id);
    if (incoming.size() != expected.size())
        fail("consensus_update: agent " + std::to_string(agent.id) + " expected " +
             std::to_string(expected.size()) + " messages, got " +
             std::to_string(incoming.size()));
    for (std::size_t i = 0; i < incoming.size(); ++i)
        if (incoming[i].second != expected[i])
            fail("consensus_update: sender set does not match the in-neighborhood "
                 "(expected ascending sender ids)");

    // allocation-free equivalent of decode-all-then-push_pull_update, with
    // the same ascending-sender accumulation order
    const QuantizerParams surplus_grid{agent.grid.bits, agent.grid.step, 0.0};
    const double x_hat_own = quantize(agent.x, agent.grid);
    const double s_hat_own = quantize(agent.s, surplus_grid);
    const double r = 1.0 / (1.0 + static_cast<double>(incoming.size()));
    const double c_own = 1.0 / (1.0 + agent.out_degree);

    double x_new = agent.x + gamma * agent.s + (r - 1.0) * x_hat_own;
    for (const auto& [msg, sender] : incoming) x_new += r * from_level(msg.x_level, agent.grid);

    double s_new = agent.s + agent.x - x_new + (c_own - 1.0) * s_hat_own;
    for (const auto& [msg, sender] : incoming)
        s_new += from_level(msg.s_level, surplus_grid) / (1.0 + msg.out_degree);

    return {x_new, s_new};
}

}  // namespace ppacdc
