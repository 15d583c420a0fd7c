#include "drspp/graph.hpp"

#include "drspp/errors.hpp"

#include <algorithm>
#include <deque>
#include <string>

namespace drspp {

namespace {

std::vector<bool> search(const Graph& g, int start, bool forward) {
    std::vector<bool> seen(g.num_nodes() + 1, false);
    std::deque<int> queue{start};
    seen[start] = true;
    while (!queue.empty()) {
        const int i = queue.front();
        queue.pop_front();
        for (int a : forward ? g.forward_star(i) : g.reverse_star(i)) {
            const int k = forward ? g.arc(a).head : g.arc(a).tail;
            if (!seen[k]) {
                seen[k] = true;
                queue.push_back(k);
            }
        }
    }
    return seen;
}

} // namespace

Graph::Graph(int num_nodes, int source, int sink, std::vector<Arc> arcs)
    : num_nodes_(num_nodes), source_(source), sink_(sink), arcs_(std::move(arcs)) {
    auto valid = [&](int i) { return i >= 1 && i <= num_nodes_; };
    if (num_nodes_ < 2 || !valid(source_) || !valid(sink_) || source_ == sink_) {
        throw InvalidArgument("graph needs distinct source and sink among its nodes");
    }
    fs_.assign(num_nodes_ + 1, {});
    rs_.assign(num_nodes_ + 1, {});
    for (int a = 0; a < num_arcs(); ++a) {
        const Arc& e = arcs_[a];
        if (!valid(e.tail) || !valid(e.head)) {
            throw InvalidArgument("arc endpoint out of range");
        }
        if (e.tail == e.head) {
            throw InvalidArgument("self-loop at node " + std::to_string(e.tail));
        }
        if (find_arc(e.tail, e.head) >= 0) {
            throw InvalidArgument("parallel arc (" + std::to_string(e.tail) + "," + std::to_string(e.head) + ")");
        }
        fs_[e.tail].push_back(a);
        rs_[e.head].push_back(a);
    }
    const std::vector<bool> from_source = search(*this, source_, true);
    const std::vector<bool> to_sink = search(*this, sink_, false);
    for (int i = 1; i <= num_nodes_; ++i) {
        if (!from_source[i] || !to_sink[i]) {
            throw InvalidArgument("node " + std::to_string(i) + " lies on no source-sink walk");
        }
    }
}

int Graph::find_arc(int tail, int head) const {
    if (tail < 1 || tail >= static_cast<int>(fs_.size())) {
        return -1;
    }
    for (int a : fs_[tail]) {
        if (arcs_[a].head == head) {
            return a;
        }
    }
    return -1;
}

bool Graph::is_acyclic() const {
    std::vector<int> indegree(num_nodes_ + 1, 0);
    for (const Arc& e : arcs_) {
        ++indegree[e.head];
    }
    std::vector<int> ready;
    for (int i = 1; i <= num_nodes_; ++i) {
        if (indegree[i] == 0) {
            ready.push_back(i);
        }
    }
    int removed = 0;
    while (!ready.empty()) {
        const int i = ready.back();
        ready.pop_back();
        ++removed;
        for (int a : fs_[i]) {
            if (--indegree[arcs_[a].head] == 0) {
                ready.push_back(arcs_[a].head);
            }
        }
    }
    return removed == num_nodes_;
}

Graph build_layered(int h, int r, GraphClass cls) {
    if (h < 1 || r < 1) {
        throw InvalidArgument("layered graph needs h >= 1 and r >= 1");
    }
    const int sink = h * r + 2;
    auto node = [r](int layer, int k) { return 2 + layer * r + k; };
    std::vector<Arc> arcs;
    for (int k = 0; k < r; ++k) {
        arcs.push_back({1, node(0, k)});
    }
    for (int layer = 0; layer + 1 < h; ++layer) {
        for (int k = 0; k < r; ++k) {
            for (int q = 0; q < r; ++q) {
                arcs.push_back({node(layer, k), node(layer + 1, q)});
            }
        }
    }
    for (int k = 0; k < r; ++k) {
        arcs.push_back({node(h - 1, k), sink});
    }
    if (cls == GraphClass::General) {
        const std::size_t forward = arcs.size();
        for (std::size_t a = 0; a < forward; ++a) {
            if (arcs[a].tail != 1 && arcs[a].head != sink) {
                arcs.push_back({arcs[a].head, arcs[a].tail});
            }
        }
    }
    return Graph(sink, 1, sink, std::move(arcs));
}

Reachability reachability(const Graph& g) {
    Reachability reach(g.num_nodes() + 1);
    reach[0].assign(g.num_nodes() + 1, false);
    for (int i = 1; i <= g.num_nodes(); ++i) {
        reach[i] = search(g, i, true);
        reach[i][0] = false;
    }
    return reach;
}

std::vector<PathIncidence> enumerate_simple_paths(const Graph& g, std::size_t cap) {
    if (cap < 1) {
        throw InvalidArgument("path cap must be positive");
    }
    std::vector<std::vector<int>> ordered(g.num_nodes() + 1);
    for (int i = 1; i <= g.num_nodes(); ++i) {
        ordered[i] = g.forward_star(i);
        std::sort(ordered[i].begin(), ordered[i].end(),
                  [&](int a, int b) { return g.arc(a).head < g.arc(b).head; });
    }
    std::vector<PathIncidence> paths;
    PathIncidence current(g.num_arcs(), 0);
    std::vector<bool> on_path(g.num_nodes() + 1, false);

    auto dfs = [&](auto&& self, int i) -> void {
        if (i == g.sink()) {
            if (paths.size() == cap) {
                throw CapExceeded("graph has more than " + std::to_string(cap) + " simple paths");
            }
            paths.push_back(current);
            return;
        }
        on_path[i] = true;
        for (int a : ordered[i]) {
            const int k = g.arc(a).head;
            if (on_path[k]) {
                continue;
            }
            current[a] = 1;
            self(self, k);
            current[a] = 0;
        }
        on_path[i] = false;
    };
    dfs(dfs, g.source());
    return paths;
}

bool is_path_incidence(const Graph& g, const PathIncidence& y) {
    if (static_cast<int>(y.size()) != g.num_arcs()) {
        return false;
    }
    for (int v : y) {
        if (v != 0 && v != 1) {
            return false;
        }
    }
    for (int i = 1; i <= g.num_nodes(); ++i) {
        int out = 0;
        int in = 0;
        for (int a : g.forward_star(i)) {
            out += y[a];
        }
        for (int a : g.reverse_star(i)) {
            in += y[a];
        }
        const int balance = i == g.source() ? 1 : (i == g.sink() ? -1 : 0);
        if (out - in != balance || out > 1) {
            return false;
        }
    }
    return true;
}

std::vector<int> path_nodes(const Graph& g, const PathIncidence& y) {
    std::vector<int> nodes{g.source()};
    std::vector<bool> seen(g.num_nodes() + 1, false);
    seen[g.source()] = true;
    int i = g.source();
    while (i != g.sink()) {
        int next = -1;
        for (int a : g.forward_star(i)) {
            if (y[a] != 0) {
                next = g.arc(a).head;
                break;
            }
        }
        if (next < 0 || seen[next]) {
            break;
        }
        seen[next] = true;
        nodes.push_back(next);
        i = next;
    }
    return nodes;
}

PathIncidence trim_to_path(const Graph& g, const PathIncidence& y) {
    PathIncidence out(g.num_arcs(), 0);
    const std::vector<int> nodes = path_nodes(g, y);
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
        out[g.find_arc(nodes[k], nodes[k + 1])] = 1;
    }
    return out;
}

} // namespace drspp
