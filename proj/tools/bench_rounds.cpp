// Round-throughput benchmark: the serial reference agent map against the
// OpenMP one, on a circulant digraph large enough for the parallel loop to
// matter. Also proves the two paths produce bitwise-identical states.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ppacdc/sim.hpp"

using namespace ppacdc;

namespace {

// ring + two long chords; strongly connected with in-degree 3
Digraph circulant(int n) {
    std::vector<Digraph::Edge> edges;
    edges.reserve(3 * n);
    for (NodeId j = 0; j < n; ++j) {
        edges.emplace_back(j, (j + n - 1) % n);
        edges.emplace_back(j, (j + n - 7) % n);
        edges.emplace_back(j, (j + n - 191) % n);
    }
    return Digraph(n, edges);
}

double run_rounds(Engine& eng, int rounds) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < rounds; ++k) eng.step();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 4096;
    const int rounds = argc > 2 ? std::atoi(argv[2]) : 400;
    if (n < 400 || rounds < 1) {
        std::fprintf(stderr, "usage: %s [n >= 400] [rounds >= 1]\n", argv[0]);
        return 1;
    }

    SimConfig cfg{circulant(n)};
    cfg.protocol.bits = 12;
    cfg.protocol.d_bar = diameter(cfg.graph);
    cfg.seed = 42;
    cfg.record_trace = false;

#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("openmp: not enabled (parallel mode falls back to serial)\n");
#endif
    std::printf("graph: n=%d m=%d d_bar=%d, %d rounds, b=%d\n", n, cfg.graph.edge_count(),
                cfg.protocol.d_bar, rounds, cfg.protocol.bits);

    Engine serial(cfg, ExecMode::serial);
    const double t_serial = run_rounds(serial, rounds);

    Engine parallel(cfg, ExecMode::parallel);
    const double t_parallel = run_rounds(parallel, rounds);

    const auto xs = serial.states_x();
    const auto xp = parallel.states_x();
    const auto ss = serial.states_s();
    const auto sp = parallel.states_s();
    bool identical = xs.size() == xp.size();
    for (std::size_t i = 0; identical && i < xs.size(); ++i)
        identical = std::memcmp(&xs[i], &xp[i], sizeof(double)) == 0 &&
                    std::memcmp(&ss[i], &sp[i], sizeof(double)) == 0;

    std::printf("round map,  serial:   %8.3f s  (%.2f Magent-rounds/s)\n", t_serial,
                1e-6 * n * rounds / t_serial);
    std::printf("round map,  parallel: %8.3f s  (%.2f Magent-rounds/s)\n", t_parallel,
                1e-6 * n * rounds / t_parallel);
    std::printf("round map speedup:    %.2fx\n", t_serial / t_parallel);
    std::printf("states bitwise identical: %s\n", identical ? "yes" : "NO");

    // sweep granularity: whole runs fan out across threads
    SimConfig small(Digraph::ring(5));
    small.protocol = {0.2, 1.2, 4, 8, 1.0, 0.0, ZoomInRule::centered};
    small.seed = 7;
    SweepOptions opts;
    opts.alphas = {1.2, 1.5, 2.0, 5.0};
    opts.bits = {4, 6, 8, 10, 12, 16};
    opts.n_seeds = 8;

    auto t0 = std::chrono::steady_clock::now();
    const auto cells_serial = sweep(small, opts, ExecMode::serial);
    auto t1 = std::chrono::steady_clock::now();
    const auto cells_parallel = sweep(small, opts, ExecMode::parallel);
    auto t2 = std::chrono::steady_clock::now();
    const double sw_serial = std::chrono::duration<double>(t1 - t0).count();
    const double sw_parallel = std::chrono::duration<double>(t2 - t1).count();

    bool cells_match = cells_serial.size() == cells_parallel.size();
    for (std::size_t i = 0; cells_match && i < cells_serial.size(); ++i)
        cells_match = cells_serial[i].converged_count == cells_parallel[i].converged_count &&
                      cells_serial[i].mean_iters == cells_parallel[i].mean_iters;

    std::printf("sweep (%zu runs), serial:   %8.3f s\n",
                opts.alphas.size() * opts.bits.size() * opts.n_seeds, sw_serial);
    std::printf("sweep (%zu runs), parallel: %8.3f s\n",
                opts.alphas.size() * opts.bits.size() * opts.n_seeds, sw_parallel);
    std::printf("sweep speedup:        %.2fx\n", sw_serial / sw_parallel);
    std::printf("sweep results identical: %s\n", cells_match ? "yes" : "NO");
    return identical && cells_match ? 0 : 1;
}
