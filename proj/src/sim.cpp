#include "ppacdc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "ppacdc/rng.hpp"

namespace ppacdc {

namespace {

bool same_grid_bits(const QuantizerParams& a, const QuantizerParams& b) {
    return a.bits == b.bits &&
           std::memcmp(&a.step, &b.step, sizeof(double)) == 0 &&
           std::memcmp(&a.midpoint, &b.midpoint, sizeof(double)) == 0;
}

}  // namespace

void SimConfig::validate() const {
    protocol.validate();
    if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
    if (!(conv_tolerance > 0.0)) throw std::invalid_argument("conv_tolerance must be positive");
    if (!x0.values.empty()) {
        if (static_cast<int>(x0.values.size()) != graph.node_count())
            throw std::invalid_argument("x0 values must match the node count");
        for (double v : x0.values)
            if (!std::isfinite(v)) throw std::invalid_argument("x0 values must be finite");
    } else if (!(x0.uniform_lo <= x0.uniform_hi) || !std::isfinite(x0.uniform_lo) ||
               !std::isfinite(x0.uniform_hi)) {
        throw std::invalid_argument("x0 uniform interval is invalid");
    }
    if (!is_strongly_connected(graph))
        throw std::invalid_argument("graph must be strongly connected");
    const int d = diameter(graph);
    if (protocol.d_bar < d)
        throw std::invalid_argument("d_bar (" + std::to_string(protocol.d_bar) +
                                    ") must be >= the graph diameter (" + std::to_string(d) +
                                    ")");
}

std::vector<double> SimConfig::initial_states() const {
    if (!x0.values.empty()) return x0.values;
    Xoshiro256StarStar rng(seed);
    std::vector<double> out(graph.node_count());
    for (double& v : out) v = rng.uniform(x0.uniform_lo, x0.uniform_hi);
    return out;
}

bool detect_convergence(std::span<const double> x, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (x.empty()) return true;
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    return (*hi - *lo) <= tol;
}

double consensus_error(std::span<const double> x, std::span<const double> x0) {
    if (x.size() != x0.size()) throw std::invalid_argument("consensus_error: length mismatch");
    double mean = 0.0;
    for (double v : x0) mean += v;
    mean /= static_cast<double>(x0.size());
    double sq = 0.0;
    for (double v : x) sq += (v - mean) * (v - mean);
    return std::sqrt(sq);
}

Engine::Engine(SimConfig config, ExecMode mode) : cfg_(std::move(config)), mode_(mode) {
    cfg_.validate();
    const int n = cfg_.graph.node_count();
    x0_ = cfg_.initial_states();
    mass0_ = std::accumulate(x0_.begin(), x0_.end(), 0.0);
    double scale = 1.0;
    for (double v : x0_) scale = std::max(scale, std::abs(v));
    mass_tolerance_ = 1e-9 * n * scale;

    agents_.reserve(n);
    for (NodeId j = 0; j < n; ++j)
        agents_.push_back(make_initial_agent(j, x0_[j], cfg_.protocol, cfg_.graph.out_degree(j),
                                             cfg_.exact_mode));
    next_ = agents_;
    wire_.resize(n);
    exact_wire_.resize(n);
    inbox_.resize(n);
    exact_scratch_.resize(n);
    for (NodeId j = 0; j < n; ++j) {
        inbox_[j].reserve(cfg_.graph.in_degree(j));
        exact_scratch_[j].reserve(cfg_.graph.in_degree(j));
    }
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
}

void Engine::set_processing_order(std::vector<int> order) {
    if (static_cast<int>(order.size()) != cfg_.graph.node_count())
        throw std::invalid_argument("processing order must cover every agent once");
    order_ = std::move(order);
}

std::vector<double> Engine::states_x() const {
    std::vector<double> out(agents_.size());
    for (std::size_t j = 0; j < agents_.size(); ++j) out[j] = agents_[j].x;
    return out;
}

std::vector<double> Engine::states_s() const {
    std::vector<double> out(agents_.size());
    for (std::size_t j = 0; j < agents_.size(); ++j) out[j] = agents_[j].s;
    return out;
}

void Engine::verify_invariants() const {
    const QuantizerParams& g0 = agents_[0].grid;
    for (const AgentState& a : agents_) {
        if (!same_grid_bits(a.grid, g0))
            throw SimInvariantError(k_, a.id, "grid synchrony",
                                    "agent grid differs from agent 0");
        if (a.zeta < -1 || a.zeta > 1)
            throw SimInvariantError(k_, a.id, "zeta", "outside {-1, 0, 1}");
        if (a.window_max < a.window_min)
            throw SimInvariantError(k_, a.id, "window extrema", "max below min");
        if (!(a.grid.step > 0.0))
            throw SimInvariantError(k_, a.id, "step size", "not positive");
    }
    double mass = 0.0;
    for (const AgentState& a : agents_) mass += a.x + a.s;
    if (std::abs(mass - mass0_) > mass_tolerance_)
        throw SimInvariantError(k_, -1, "mass conservation",
                                "|1'(x+s) - 1'x0| = " + std::to_string(std::abs(mass - mass0_)) +
                                    " exceeds " + std::to_string(mass_tolerance_));
}

void Engine::begin_round() {
    if (round_begun_) return;
    if (k_ % cfg_.protocol.d_bar == 0) {
        if (k_ == 0) {
            // No completed window yet: reset only, on the initial grid.
            // make_initial_agent already did exactly this, so state is
            // unchanged; kept for the k = 0 in K_D semantics.
            for (AgentState& a : agents_) window_reset(a, cfg_.protocol, cfg_.exact_mode);
        } else {
            for (AgentState& a : agents_)
                window_boundary_update(a, cfg_.protocol, cfg_.exact_mode);
        }
    }
    verify_invariants();
    round_begun_ = true;
}

void Engine::update_agent(int j) {
    AgentState& agent = next_[j];
    agent = agents_[j];
    const auto& in = cfg_.graph.in_neighbors(j);
    const double gamma = cfg_.protocol.gamma;

    if (cfg_.exact_mode) {
        double zeta_best = agent.zeta;
        double wmax = agent.window_max;
        double wmin = agent.window_min;
        auto& values = exact_scratch_[j];
        values.clear();
        for (NodeId i : in) {
            const ExactPayload& p = exact_wire_[i];
            values.push_back({p.x, p.s, p.out_degree});
            zeta_best = std::max(zeta_best, static_cast<double>(p.zeta));
            wmax = std::max(wmax, p.window_max);
            wmin = std::min(wmin, p.window_min);
        }
        const StateUpdate up =
            push_pull_update(agents_[j], agents_[j].x, agents_[j].s, values, gamma);
        agent.x = up.x;
        agent.s = up.s;
        agent.zeta = static_cast<int>(zeta_best);
        agent.window_max = wmax;
        agent.window_min = wmin;
        return;
    }

    auto& inbox = inbox_[j];
    inbox.clear();
    for (NodeId i : in)
        inbox.emplace_back(decode_message(wire_[i], cfg_.protocol.bits), i);

    const StateUpdate up = consensus_update(agents_[j], inbox, cfg_.graph, gamma);

    // Coordination happens on levels: max/min of on-grid values is the
    // max/min of their indices, and the index is what the wire carries.
    int zeta_best = agent.zeta;
    QuantLevel lmax = agent.window_max_level;
    QuantLevel lmin = agent.window_min_level;
    for (const auto& [msg, sender] : inbox) {
        zeta_best = std::max(zeta_best, msg.zeta);
        lmax = std::max(lmax, msg.window_max_level);
        lmin = std::min(lmin, msg.window_min_level);
    }
    agent.x = up.x;
    agent.s = up.s;
    agent.zeta = zeta_best;
    agent.window_max_level = lmax;
    agent.window_min_level = lmin;
    agent.window_max = from_level(lmax, agents_[j].grid);
    agent.window_min = from_level(lmin, agents_[j].grid);
}

void Engine::update_agents_serial() {
    for (int idx : order_) update_agent(idx);
}

void Engine::update_agents_parallel() {
    const int n = static_cast<int>(agents_.size());
    std::exception_ptr first_error = nullptr;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int j = 0; j < n; ++j) {
        try {
            update_agent(j);
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

void Engine::finish_round() {
    begin_round();  // no-op if already begun

    const int n = static_cast<int>(agents_.size());
    // Build this round's transmissions. Every edge carries one message; the
    // engine bills 4b + 18 bits per edge whether or not exact mode skips
    // the physical encoding.
    if (cfg_.exact_mode) {
        for (int j = 0; j < n; ++j) {
            const AgentState& a = agents_[j];
            exact_wire_[j] = {a.x, a.s, a.window_max, a.window_min, a.zeta, a.out_degree};
        }
    } else {
        for (int j = 0; j < n; ++j)
            encode_message(build_message(agents_[j]), cfg_.protocol.bits, wire_[j]);
    }
    bits_ += static_cast<std::uint64_t>(cfg_.graph.edge_count()) *
             message_bit_count(cfg_.protocol.bits);

    if (mode_ == ExecMode::parallel)
        update_agents_parallel();
    else
        update_agents_serial();

    agents_.swap(next_);
    ++k_;
    round_begun_ = false;
}

RunResult run(const SimConfig& config, ExecMode mode) {
    Engine eng(config, mode);
    const int n = config.graph.node_count();
    const std::vector<double> x0(eng.initial_states().begin(), eng.initial_states().end());
    double x_ave = 0.0;
    for (double v : x0) x_ave += v;
    x_ave /= static_cast<double>(n);
    const double avg_tol = 100.0 * config.conv_tolerance;

    RunResult res;
    for (int k = 0;; ++k) {
        eng.begin_round();

        const auto x = eng.states_x();
        const bool pairwise = detect_convergence(x, config.conv_tolerance);
        bool average = true;
        for (double v : x)
            if (std::abs(v - x_ave) > avg_tol) {
                average = false;
                break;
            }
        if (pairwise && !res.pairwise_iter) res.pairwise_iter = k;
        if (pairwise && average && !res.convergence_iter) res.convergence_iter = k;
        const bool halting = (pairwise && average) || k == config.max_iters;

        if (config.record_trace &&
            (n <= 64 || k % config.protocol.d_bar == 0 || halting)) {
            TraceRecord rec;
            rec.k = k;
            rec.x = x;
            rec.s = eng.states_s();
            rec.x_hat.resize(n);
            rec.s_hat.resize(n);
            rec.zeta.resize(n);
            const QuantizerParams grid = eng.agents()[0].grid;
            const QuantizerParams surplus_grid{grid.bits, grid.step, 0.0};
            for (int j = 0; j < n; ++j) {
                const AgentState& a = eng.agents()[j];
                rec.x_hat[j] = config.exact_mode ? a.x : quantize(a.x, grid);
                rec.s_hat[j] = config.exact_mode ? a.s : quantize(a.s, surplus_grid);
                rec.zeta[j] = a.zeta;
            }
            rec.delta = grid.step;
            rec.sigma = grid.midpoint;
            rec.consensus_error = consensus_error(x, x0);
            rec.bits_cumulative = eng.bits_cumulative();
            res.trace.push_back(std::move(rec));
        }

        if (halting) {
            res.converged = res.convergence_iter.has_value();
            res.final_error = consensus_error(x, x0);
            res.final_x = x;
            res.final_s = eng.states_s();
            res.iters = k;
            res.bits_total = eng.bits_cumulative();
            break;
        }
        eng.finish_round();
    }
    return res;
}

std::vector<SweepCell> sweep(const SimConfig& base, const SweepOptions& opts, ExecMode mode) {
    if (opts.n_seeds < 1) throw std::invalid_argument("sweep needs n_seeds >= 1");
    if (opts.alphas.empty() || opts.bits.empty())
        throw std::invalid_argument("sweep needs at least one alpha and one bits value");
    base.validate();

    const int n_cells = static_cast<int>(opts.alphas.size() * opts.bits.size());
    const int total = n_cells * opts.n_seeds;
    std::vector<std::optional<int>> iters(total);
    std::exception_ptr first_error = nullptr;

    const bool parallel = mode == ExecMode::parallel;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#else
    (void)parallel;
#endif
    for (int job = 0; job < total; ++job) {
        try {
            const int cell = job / opts.n_seeds;
            const int seed_idx = job % opts.n_seeds;
            const int a_idx = cell / static_cast<int>(opts.bits.size());
            const int b_idx = cell % static_cast<int>(opts.bits.size());

            SimConfig cfg = base;
            cfg.protocol.alpha = opts.alphas[a_idx];
            cfg.protocol.bits = opts.bits[b_idx];
            cfg.seed = derive_seed(base.seed, {static_cast<std::uint64_t>(a_idx),
                                               static_cast<std::uint64_t>(b_idx),
                                               static_cast<std::uint64_t>(seed_idx)});
            cfg.record_trace = false;
            if (opts.resample_topology) {
                cfg.graph = random_strongly_connected(
                    base.graph.node_count(), opts.resample_edge_prob,
                    derive_seed(base.seed, {0x70706fULL, static_cast<std::uint64_t>(seed_idx)}));
                cfg.protocol.d_bar = std::max(base.protocol.d_bar, diameter(cfg.graph));
            }
            // Each run is single-threaded; parallelism lives at this level.
            const RunResult r = run(cfg, ExecMode::serial);
            iters[job] = r.pairwise_iter;
        } catch (...) {
            // exceptions must not unwind out of the parallel region
#ifdef _OPENMP
#pragma omp critical
#endif
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<SweepCell> cells;
    cells.reserve(n_cells);
    for (int cell = 0; cell < n_cells; ++cell) {
        const int a_idx = cell / static_cast<int>(opts.bits.size());
        const int b_idx = cell % static_cast<int>(opts.bits.size());
        SweepCell c;
        c.alpha = opts.alphas[a_idx];
        c.bits = opts.bits[b_idx];
        c.seeds = opts.n_seeds;
        long long sum = 0;
        for (int s = 0; s < opts.n_seeds; ++s) {
            const auto& it = iters[cell * opts.n_seeds + s];
            if (!it) continue;
            if (c.converged_count == 0) {
                c.min_iters = c.max_iters = *it;
            } else {
                c.min_iters = std::min(c.min_iters, *it);
                c.max_iters = std::max(c.max_iters, *it);
            }
            sum += *it;
            ++c.converged_count;
        }
        if (c.converged_count > 0)
            c.mean_iters = static_cast<double>(sum) / c.converged_count;
        cells.push_back(c);
    }
    return cells;
}

}  // namespace ppacdc
