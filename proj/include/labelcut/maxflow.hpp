#ifndef LABELCUT_MAXFLOW_HPP
#define LABELCUT_MAXFLOW_HPP

#include <cstdint>
#include <vector>

#include "labelcut/errors.hpp"

namespace labelcut {

// Dinic's algorithm over integer capacities. Deterministic: arcs are explored
// in insertion order, so the flow and the minimal source-side cut depend only
// on the construction sequence.
class FlowNetwork {
public:
    explicit FlowNetwork(int num_nodes) : adj_(num_nodes) {}

    int num_nodes() const { return static_cast<int>(adj_.size()); }

    int add_node() {
        adj_.emplace_back();
        return num_nodes() - 1;
    }

    /// Directed edge u -> v; the reverse residual edge carries rev_cap.
    void add_edge(int u, int v, std::int64_t cap, std::int64_t rev_cap = 0) {
        if (cap < 0 || rev_cap < 0) throw ParameterError("capacities must be nonnegative");
        adj_[u].push_back(static_cast<int>(edges_.size()));
        edges_.push_back({v, cap});
        adj_[v].push_back(static_cast<int>(edges_.size()));
        edges_.push_back({u, rev_cap});
    }

    std::int64_t max_flow(int s, int t) {
        std::int64_t flow = 0;
        level_.assign(num_nodes(), -1);
        iter_.assign(num_nodes(), 0);
        while (bfs(s, t)) {
            ++phases_;
            std::fill(iter_.begin(), iter_.end(), 0);
            std::int64_t f;
            while ((f = dfs(s, t, kInfinite)) > 0) flow += f;
        }
        return flow;
    }

    /// Nodes reachable from s in the residual graph after max_flow.
    std::vector<bool> source_side(int s) const {
        std::vector<bool> reach(num_nodes(), false);
        std::vector<int> stack{s};
        reach[s] = true;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int e : adj_[u])
                if (edges_[e].cap > 0 && !reach[edges_[e].to]) {
                    reach[edges_[e].to] = true;
                    stack.push_back(edges_[e].to);
                }
        }
        return reach;
    }

    std::uint64_t phases() const { return phases_; }

private:
    static constexpr std::int64_t kInfinite = std::int64_t{1} << 62;

    struct Edge {
        int to;
        std::int64_t cap;
    };

    bool bfs(int s, int t) {
        std::fill(level_.begin(), level_.end(), -1);
        queue_.clear();
        queue_.push_back(s);
        level_[s] = 0;
        for (std::size_t h = 0; h < queue_.size(); ++h) {
            int u = queue_[h];
            for (int e : adj_[u]) {
                const Edge& ed = edges_[e];
                if (ed.cap > 0 && level_[ed.to] < 0) {
                    level_[ed.to] = level_[u] + 1;
                    queue_.push_back(ed.to);
                }
            }
        }
        return level_[t] >= 0;
    }

    std::int64_t dfs(int u, int t, std::int64_t limit) {
        if (u == t) return limit;
        for (int& i = iter_[u]; i < static_cast<int>(adj_[u].size()); ++i) {
            int e = adj_[u][i];
            Edge& ed = edges_[e];
            if (ed.cap > 0 && level_[ed.to] == level_[u] + 1) {
                std::int64_t f = dfs(ed.to, t, std::min(limit, ed.cap));
                if (f > 0) {
                    ed.cap -= f;
                    edges_[e ^ 1].cap += f;
                    return f;
                }
            }
        }
        level_[u] = -1;
        return 0;
    }

    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adj_;
    std::vector<int> level_;
    std::vector<int> iter_;
    std::vector<int> queue_;
    std::uint64_t phases_ = 0;
};

} // namespace labelcut

#endif
