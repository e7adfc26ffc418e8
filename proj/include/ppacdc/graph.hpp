#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ppacdc {

using NodeId = int;

// Directed communication topology. An edge (j, i) means node j receives from
// node i. Self-loops are implicit (every agent reads its own state) and are
// never stored or counted in degrees.
class Digraph {
public:
    using Edge = std::pair<NodeId, NodeId>;  // (receiver, sender)

    Digraph(int node_count, std::span<const Edge> edges);

    // 0 -> 1 -> ... -> n-1 -> 0; the default paper-like reproduction
    // topology for n = 5 (diameter exactly 4).
    static Digraph ring(int n);

    int node_count() const { return n_; }
    int edge_count() const { return m_; }

    const std::vector<NodeId>& in_neighbors(NodeId j) const;   // sorted, excludes j
    const std::vector<NodeId>& out_neighbors(NodeId j) const;  // sorted, excludes j
    int in_degree(NodeId j) const { return static_cast<int>(in_neighbors(j).size()); }
    int out_degree(NodeId j) const { return static_cast<int>(out_neighbors(j).size()); }
    bool has_edge(NodeId receiver, NodeId sender) const;

    std::vector<Edge> edges() const;  // sorted (receiver, sender) pairs

private:
    void check_node(NodeId j) const;

    int n_ = 0;
    int m_ = 0;
    std::vector<std::vector<NodeId>> in_;
    std::vector<std::vector<NodeId>> out_;
};

// Pull weight r_ji = 1/(1 + d_j^in) for i in N_j^in or i = j, else 0.
// Rows of the induced matrix R sum to 1.
double pull_weight(const Digraph& g, NodeId j, NodeId i);

// Push weight c_lj = 1/(1 + d_j^out) for l in N_j^out or l = j, else 0.
// Columns of the induced matrix C sum to 1.
double push_weight(const Digraph& g, NodeId l, NodeId j);

bool is_strongly_connected(const Digraph& g);

// Longest shortest directed path over all ordered pairs, by BFS from every
// node. Throws std::invalid_argument if g is not strongly connected.
int diameter(const Digraph& g);

// A directed Hamiltonian ring on a seeded random permutation of the nodes,
// plus every remaining ordered pair independently with probability
// extra_edge_prob. Always strongly connected; identical edge set for
// identical arguments.
Digraph random_strongly_connected(int n, double extra_edge_prob, std::uint64_t seed);

// Edge-list text format: one "j i" pair per line (receiver first), '#'
// starts a comment. Node count is max id + 1.
Digraph load_edge_list(std::istream& in);
Digraph load_edge_list_file(const std::string& path);
void save_edge_list(const Digraph& g, std::ostream& out);
void save_edge_list_file(const Digraph& g, const std::string& path);

}  // namespace ppacdc
