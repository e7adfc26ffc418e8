#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <vector>

#include "ppacdc/graph.hpp"
#include "ppacdc/rng.hpp"

using namespace ppacdc;

namespace {

constexpr int kUnreach = 1 << 20;

// independent all-pairs oracle
std::vector<std::vector<int>> floyd_warshall(const Digraph& g) {
    const int n = g.node_count();
    std::vector<std::vector<int>> d(n, std::vector<int>(n, kUnreach));
    for (int i = 0; i < n; ++i) d[i][i] = 0;
    for (const auto& [receiver, sender] : g.edges()) d[sender][receiver] = 1;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    return d;
}

Digraph complete(int n) {
    std::vector<Digraph::Edge> edges;
    for (NodeId a = 0; a < n; ++a)
        for (NodeId b = 0; b < n; ++b)
            if (a != b) edges.emplace_back(a, b);
    return Digraph(n, edges);
}

}  // namespace

TEST_CASE("ring neighborhoods") {
    const Digraph g = Digraph::ring(3);  // 0->1->2->0
    CHECK(g.in_neighbors(2) == std::vector<NodeId>{1});
    CHECK(g.out_neighbors(2) == std::vector<NodeId>{0});
    CHECK(g.in_neighbors(1) == std::vector<NodeId>{0});
    CHECK(g.edge_count() == 3);
    CHECK_THROWS_AS(g.in_neighbors(3), std::invalid_argument);
}

TEST_CASE("complete digraph degrees") {
    const Digraph g = complete(3);
    for (NodeId j = 0; j < 3; ++j) {
        CHECK(g.in_degree(j) == 2);
        CHECK(g.out_degree(j) == 2);
    }
}

TEST_CASE("digraph construction rejects bad edges") {
    const std::vector<Digraph::Edge> self{{0, 0}};
    CHECK_THROWS_AS(Digraph(2, self), std::invalid_argument);
    const std::vector<Digraph::Edge> dup{{0, 1}, {0, 1}};
    CHECK_THROWS_AS(Digraph(2, dup), std::invalid_argument);
    const std::vector<Digraph::Edge> range{{0, 5}};
    CHECK_THROWS_AS(Digraph(2, range), std::invalid_argument);
}

TEST_CASE("pull and push weights") {
    const Digraph ring = Digraph::ring(4);
    // each node: one in-neighbor, one out-neighbor
    CHECK(pull_weight(ring, 1, 0) == 0.5);
    CHECK(pull_weight(ring, 1, 1) == 0.5);
    CHECK(pull_weight(ring, 1, 2) == 0.0);
    CHECK(push_weight(ring, 2, 1) == 0.5);
    CHECK(push_weight(ring, 1, 1) == 0.5);
    CHECK(push_weight(ring, 3, 1) == 0.0);

    const Digraph k3 = complete(3);
    CHECK(pull_weight(k3, 0, 1) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(push_weight(k3, 1, 0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("weight matrices are stochastic on random graphs") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Digraph g = random_strongly_connected(2 + seed % 9, 0.3, seed);
        const int n = g.node_count();
        for (NodeId j = 0; j < n; ++j) {
            double row = 0.0, col = 0.0;
            for (NodeId i = 0; i < n; ++i) {
                const double r = pull_weight(g, j, i);
                const double c = push_weight(g, i, j);
                CHECK(r >= 0.0);
                CHECK(c >= 0.0);
                row += r;
                col += c;
            }
            CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(col == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("diameter") {
    CHECK(diameter(Digraph::ring(5)) == 4);
    CHECK(diameter(complete(4)) == 1);

    // path + back edge instances, against the all-pairs oracle
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        const Digraph g = random_strongly_connected(3 + seed % 7, 0.25, seed);
        const auto d = floyd_warshall(g);
        int expect = 0;
        for (const auto& row : d)
            for (int v : row) expect = std::max(expect, v);
        CHECK(diameter(g) == expect);
        CHECK(diameter(g) <= g.node_count() - 1);
    }

    const std::vector<Digraph::Edge> one_way{{1, 0}};
    CHECK_THROWS_AS(diameter(Digraph(2, one_way)), std::invalid_argument);
}

TEST_CASE("strong connectivity") {
    CHECK(is_strongly_connected(Digraph::ring(2)));
    CHECK(is_strongly_connected(Digraph::ring(7)));
    const std::vector<Digraph::Edge> one_way{{1, 0}};
    CHECK_FALSE(is_strongly_connected(Digraph(2, one_way)));

    // random instances vs reachability brute force
    Xoshiro256StarStar rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 3 + static_cast<int>(rng.below(6));
        std::vector<Digraph::Edge> edges;
        for (NodeId a = 0; a < n; ++a)
            for (NodeId b = 0; b < n; ++b)
                if (a != b && rng.uniform01() < 0.35) edges.emplace_back(a, b);
        if (edges.empty()) edges.emplace_back(0, 1);
        const Digraph g(n, edges);
        const auto d = floyd_warshall(g);
        bool expect = true;
        for (const auto& row : d)
            for (int v : row) expect = expect && v < kUnreach;
        CHECK(is_strongly_connected(g) == expect);
    }
}

TEST_CASE("random generator contract") {
    const Digraph ring_only = random_strongly_connected(6, 0.0, 3);
    CHECK(ring_only.edge_count() == 6);
    CHECK(diameter(ring_only) == 5);

    const Digraph full = random_strongly_connected(5, 1.0, 3);
    CHECK(full.edge_count() == 20);  // n(n-1)
    CHECK(diameter(full) == 1);

    const Digraph a = random_strongly_connected(8, 0.4, 77);
    const Digraph b = random_strongly_connected(8, 0.4, 77);
    CHECK(a.edges() == b.edges());
    const Digraph c = random_strongly_connected(8, 0.4, 78);
    CHECK(a.edges() != c.edges());

    for (std::uint64_t seed = 0; seed < 50; ++seed)
        CHECK(is_strongly_connected(random_strongly_connected(2 + seed % 11, 0.2, seed)));
}

TEST_CASE("edge list io") {
    const Digraph g = random_strongly_connected(6, 0.3, 12);
    std::stringstream ss;
    save_edge_list(g, ss);
    const Digraph back = load_edge_list(ss);
    CHECK(back.node_count() == g.node_count());
    CHECK(back.edges() == g.edges());

    std::stringstream commented("# a ring\n1 0 # edge\n2 1\n\n0 2\n");
    const Digraph ring = load_edge_list(commented);
    CHECK(ring.node_count() == 3);
    CHECK(ring.edge_count() == 3);
    CHECK(is_strongly_connected(ring));

    std::stringstream bad("1 0\n2\n");
    CHECK_THROWS_AS(load_edge_list(bad), std::invalid_argument);
    std::stringstream selfloop("1 1\n");
    CHECK_THROWS_AS(load_edge_list(selfloop), std::invalid_argument);
    std::stringstream empty("# nothing\n");
    CHECK_THROWS_AS(load_edge_list(empty), std::invalid_argument);
}
