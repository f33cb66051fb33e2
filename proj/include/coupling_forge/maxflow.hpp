#pragma once

// Dinic max-flow over double capacities. The bottleneck edge of every
// augmenting path is saturated exactly (its residual set to 0), so the
// algorithm terminates and leaves no epsilon residue on saturated edges.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace coupling_forge {

class DinicFlow {
  public:
    explicit DinicFlow(std::size_t node_count)
        : adj_(node_count), level_(node_count), it_(node_count) {}

    static constexpr double kInfinity = std::numeric_limits<double>::infinity();

    /// Adds a directed edge; returns its id. flow_on(id) reads back the flow.
    int add_edge(int from, int to, double cap) {
        if (cap < 0.0) throw std::invalid_argument("add_edge: negative capacity");
        const int id = static_cast<int>(edges_.size());
        edges_.push_back({to, cap});
        edges_.push_back({from, 0.0});
        adj_[from].push_back(id);
        adj_[to].push_back(id + 1);
        return id;
    }

    double max_flow(int source, int sink) {
        source_ = source;
        double total = 0.0;
        while (bfs(source, sink)) {
            std::fill(it_.begin(), it_.end(), 0);
            for (;;) {
                const double pushed = dfs(source, sink, kInfinity);
                if (pushed <= 0.0) break;
                total += pushed;
            }
        }
        return total;
    }

    /// Flow pushed through edge id (the reverse edge accumulates it).
    double flow_on(int id) const { return edges_[id ^ 1].cap; }

    /// Nodes residual-reachable from the source after max_flow; the
    /// complement is the sink side of a minimum cut.
    std::vector<char> source_side() const {
        std::vector<char> reach(adj_.size(), 0);
        std::vector<int> queue;
        queue.push_back(source_);
        reach[source_] = 1;
        for (std::size_t h = 0; h < queue.size(); ++h) {
            const int v = queue[h];
            for (int id : adj_[v]) {
                const Edge& e = edges_[id];
                if (e.cap > 0.0 && !reach[e.to]) {
                    reach[e.to] = 1;
                    queue.push_back(e.to);
                }
            }
        }
        return reach;
    }

  private:
    struct Edge {
        int to;
        double cap;  // residual capacity
    };

    bool bfs(int source, int sink) {
        std::fill(level_.begin(), level_.end(), -1);
        std::vector<int> queue;
        queue.push_back(source);
        level_[source] = 0;
        for (std::size_t h = 0; h < queue.size(); ++h) {
            const int v = queue[h];
            for (int id : adj_[v]) {
                const Edge& e = edges_[id];
                if (e.cap > 0.0 && level_[e.to] < 0) {
                    level_[e.to] = level_[v] + 1;
                    queue.push_back(e.to);
                }
            }
        }
        return level_[sink] >= 0;
    }

    double dfs(int v, int sink, double pushable) {
        if (v == sink) return pushable;
        for (int& i = it_[v]; i < static_cast<int>(adj_[v].size()); ++i) {
            const int id = adj_[v][i];
            Edge& e = edges_[id];
            if (e.cap <= 0.0 || level_[e.to] != level_[v] + 1) continue;
            const double got = dfs(e.to, sink, std::min(pushable, e.cap));
            if (got > 0.0) {
                edges_[id ^ 1].cap += got;
                // Saturate exactly when this edge was the bottleneck.
                e.cap = got >= e.cap ? 0.0 : e.cap - got;
                return got;
            }
        }
        level_[v] = -1;
        return 0.0;
    }

    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adj_;
    std::vector<int> level_;
    std::vector<int> it_;
    int source_ = 0;
};

}  // namespace coupling_forge
