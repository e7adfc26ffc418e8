#include "ppacdc/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ppacdc/rng.hpp"

namespace ppacdc {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

// forward BFS distances from src; -1 marks unreachable
std::vector<int> bfs_distances(const Digraph& g, NodeId src) {
    std::vector<int> dist(g.node_count(), -1);
    std::vector<NodeId> frontier{src};
    dist[src] = 0;
    while (!frontier.empty()) {
        std::vector<NodeId> next;
        for (NodeId u : frontier) {
            for (NodeId v : g.out_neighbors(u)) {
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    next.push_back(v);
                }
            }
        }
        frontier = std::move(next);
    }
    return dist;
}

}  // namespace

Digraph::Digraph(int node_count, std::span<const Edge> edges) : n_(node_count) {
    if (n_ < 2) fail("digraph needs at least 2 nodes");
    in_.resize(n_);
    out_.resize(n_);
    for (const auto& [receiver, sender] : edges) {
        if (receiver < 0 || receiver >= n_ || sender < 0 || sender >= n_)
            fail("edge references unknown node id");
        if (receiver == sender) fail("explicit self-loops are not allowed");
        in_[receiver].push_back(sender);
        out_[sender].push_back(receiver);
    }
    m_ = static_cast<int>(edges.size());
    for (auto& v : in_) {
        std::sort(v.begin(), v.end());
        if (std::adjacent_find(v.begin(), v.end()) != v.end()) fail("duplicate edge");
    }
    for (auto& v : out_) std::sort(v.begin(), v.end());
}

Digraph Digraph::ring(int n) {
    if (n < 2) fail("ring needs at least 2 nodes");
    std::vector<Edge> edges;
    edges.reserve(n);
    for (NodeId t = 0; t < n; ++t) edges.emplace_back((t + 1) % n, t);
    return Digraph(n, edges);
}

const std::vector<NodeId>& Digraph::in_neighbors(NodeId j) const {
    check_node(j);
    return in_[j];
}

const std::vector<NodeId>& Digraph::out_neighbors(NodeId j) const {
    check_node(j);
    return out_[j];
}

bool Digraph::has_edge(NodeId receiver, NodeId sender) const {
    check_node(receiver);
    check_node(sender);
    const auto& v = in_[receiver];
    return std::binary_search(v.begin(), v.end(), sender);
}

std::vector<Digraph::Edge> Digraph::edges() const {
    std::vector<Edge> out;
    out.reserve(m_);
    for (NodeId j = 0; j < n_; ++j)
        for (NodeId i : in_[j]) out.emplace_back(j, i);
    return out;
}

void Digraph::check_node(NodeId j) const {
    if (j < 0 || j >= n_) fail("unknown node id " + std::to_string(j));
}

double pull_weight(const Digraph& g, NodeId j, NodeId i) {
    if (i == j || g.has_edge(j, i)) return 1.0 / (1.0 + g.in_degree(j));
    return 0.0;
}

double push_weight(const Digraph& g, NodeId l, NodeId j) {
    if (l == j || g.has_edge(l, j)) return 1.0 / (1.0 + g.out_degree(j));
    return 0.0;
}

bool is_strongly_connected(const Digraph& g) {
    // reachability out of node 0 plus reachability into node 0 covers all pairs
    const auto fwd = bfs_distances(g, 0);
    if (std::find(fwd.begin(), fwd.end(), -1) != fwd.end()) return false;
    std::vector<Digraph::Edge> reversed;
    reversed.reserve(g.edge_count());
    for (const auto& [receiver, sender] : g.edges()) reversed.emplace_back(sender, receiver);
    const Digraph rg(g.node_count(), reversed);
    const auto bwd = bfs_distances(rg, 0);
    return std::find(bwd.begin(), bwd.end(), -1) == bwd.end();
}

int diameter(const Digraph& g) {
    int best = 0;
    for (NodeId s = 0; s < g.node_count(); ++s) {
        const auto dist = bfs_distances(g, s);
        for (int d : dist) {
            if (d < 0) fail("diameter: graph is not strongly connected");
            best = std::max(best, d);
        }
    }
    return best;
}

Digraph random_strongly_connected(int n, double extra_edge_prob, std::uint64_t seed) {
    if (n < 2) fail("random_strongly_connected: n must be >= 2");
    if (extra_edge_prob < 0.0 || extra_edge_prob > 1.0)
        fail("random_strongly_connected: extra_edge_prob must be in [0, 1]");
    Xoshiro256StarStar rng(seed);

    // Fisher-Yates permutation, then a Hamiltonian ring along it.
    std::vector<NodeId> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);

    std::vector<std::vector<bool>> present(n, std::vector<bool>(n, false));
    std::vector<Digraph::Edge> edges;
    for (int t = 0; t < n; ++t) {
        const NodeId sender = perm[t];
        const NodeId receiver = perm[(t + 1) % n];
        present[receiver][sender] = true;
        edges.emplace_back(receiver, sender);
    }
    // One draw per ordered pair in fixed scan order keeps the edge set a
    // function of (n, p, seed) alone.
    for (NodeId a = 0; a < n; ++a) {
        for (NodeId b = 0; b < n; ++b) {
            if (a == b) continue;
            const bool hit = rng.uniform01() < extra_edge_prob;
            if (hit && !present[a][b]) {
                present[a][b] = true;
                edges.emplace_back(a, b);
            }
        }
    }
    return Digraph(n, edges);
}

Digraph load_edge_list(std::istream& in) {
    std::vector<Digraph::Edge> edges;
    NodeId max_id = -1;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        NodeId receiver, sender;
        if (!(ls >> receiver)) continue;  // blank or comment-only line
        if (!(ls >> sender))
            fail("edge list line " + std::to_string(lineno) + ": expected 'receiver sender'");
        NodeId extra;
        if (ls >> extra) fail("edge list line " + std::to_string(lineno) + ": trailing tokens");
        edges.emplace_back(receiver, sender);
        max_id = std::max({max_id, receiver, sender});
    }
    if (edges.empty()) fail("edge list: no edges");
    return Digraph(max_id + 1, edges);
}

Digraph load_edge_list_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail("cannot open graph file: " + path);
    return load_edge_list(f);
}

void save_edge_list(const Digraph& g, std::ostream& out) {
    out << "# directed edge list: receiver sender\n";
    for (const auto& [receiver, sender] : g.edges()) out << receiver << ' ' << sender << '\n';
}

void save_edge_list_file(const Digraph& g, const std::string& path) {
    std::ofstream f(path);
    if (!f) fail("cannot write graph file: " + path);
    save_edge_list(g, f);
    if (!f.good()) fail("error writing graph file: " + path);
}

}  // namespace ppacdc
