#pragma once

#include <cstddef>
#include <vector>

namespace drspp {

struct Arc {
    int tail = 0;
    int head = 0;
};

enum class GraphClass { Acyclic, General };

/// Directed network with 1-based node ids and arc indices frozen in construction order.
class Graph {
  public:
    Graph() = default;
    /// Throws InvalidArgument on self-loops, parallel arcs, s == f, out-of-range ids, or nodes
    /// that lie on no s-f walk.
    Graph(int num_nodes, int source, int sink, std::vector<Arc> arcs);

    [[nodiscard]] int num_nodes() const { return num_nodes_; }
    [[nodiscard]] int num_arcs() const { return static_cast<int>(arcs_.size()); }
    [[nodiscard]] int source() const { return source_; }
    [[nodiscard]] int sink() const { return sink_; }
    [[nodiscard]] const std::vector<Arc>& arcs() const { return arcs_; }
    [[nodiscard]] const Arc& arc(int a) const { return arcs_.at(a); }
    /// Arc indices leaving node i.
    [[nodiscard]] const std::vector<int>& forward_star(int i) const { return fs_.at(i); }
    /// Arc indices entering node i.
    [[nodiscard]] const std::vector<int>& reverse_star(int i) const { return rs_.at(i); }
    /// Index of arc (tail, head) or -1.
    [[nodiscard]] int find_arc(int tail, int head) const;
    /// Index of the reversed twin of arc a or -1.
    [[nodiscard]] int reverse_of(int a) const { return find_arc(arcs_.at(a).head, arcs_.at(a).tail); }
    [[nodiscard]] bool is_acyclic() const;

  private:
    int num_nodes_ = 0;
    int source_ = 0;
    int sink_ = 0;
    std::vector<Arc> arcs_;
    std::vector<std::vector<int>> fs_;
    std::vector<std::vector<int>> rs_;
};

/// reach[i][j] for 1-based node ids; row and column 0 are unused.
using Reachability = std::vector<std::vector<bool>>;

/// 0/1 value per arc index.
using PathIncidence = std::vector<int>;

/// Source, h layers of r nodes (layer-major ids), sink. General graphs add a reversed twin for
/// every arc between intermediate layers.
Graph build_layered(int h, int r, GraphClass cls);

Reachability reachability(const Graph& g);

/// All simple s-f paths in lexicographic node order. Throws CapExceeded beyond cap paths.
std::vector<PathIncidence> enumerate_simple_paths(const Graph& g, std::size_t cap);

/// Flow conservation plus at most one departure per node.
bool is_path_incidence(const Graph& g, const PathIncidence& y);

/// Node sequence obtained by following y from the source. Stops at the sink, at a dead end, or
/// on revisiting a node.
std::vector<int> path_nodes(const Graph& g, const PathIncidence& y);

/// Incidence vector of the s-f path traced by y, dropping arcs on detached cycles.
PathIncidence trim_to_path(const Graph& g, const PathIncidence& y);

} // namespace drspp
