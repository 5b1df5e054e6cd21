#ifndef MWCUT_MAXFLOW_HPP
#define MWCUT_MAXFLOW_HPP

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <tuple>
#include <vector>

#include "mwcut/errors.hpp"
#include "mwcut/graph.hpp"

namespace mwcut {

/**
 * Flow network over a graph's symmetrized weights. An undirected edge of
 * capacity c becomes a mutually-reverse arc pair with capacity c on both
 * sides. A super node may aggregate several terminals into one sink.
 */
class FlowNetwork {
public:
    struct Arc {
        int to;
        double cap;
        int rev;  // index of the reverse arc in adj_[to]
    };

    FlowNetwork(int nodes, int source, int sink, int reported_nodes)
        : adj_(nodes), source_(source), sink_(sink), reported_(reported_nodes) {
        if (source == sink) throw ParameterError("source and sink must differ");
    }

    void add_undirected(int u, int v, double cap) {
        adj_[u].push_back({v, cap, static_cast<int>(adj_[v].size())});
        adj_[v].push_back({u, cap, static_cast<int>(adj_[u].size()) - 1});
    }

    void add_directed(int u, int v, double cap) {
        adj_[u].push_back({v, cap, static_cast<int>(adj_[v].size())});
        adj_[v].push_back({u, 0.0, static_cast<int>(adj_[u].size()) - 1});
    }

    /// Plain s-t network: capacity of {u, v} is the total weight carried in
    /// both directions, i.e. exactly what a crossing pair contributes to a cut.
    static FlowNetwork between(const Graph& g, int s, int t) {
        FlowNetwork net(g.n(), s, t, g.n());
        net.add_pair_capacities(g);
        return net;
    }

    /// Network separating terminal j from all other terminals via a super
    /// sink with effectively infinite capacity links.
    static FlowNetwork isolating(const Graph& g, int terminal_index) {
        const int super = g.n();
        FlowNetwork net(g.n() + 1, g.terminals()[terminal_index], super, g.n());
        net.add_pair_capacities(g);
        const double big = 2.0 * g.total_weight() + 1.0;
        for (int j = 0; j < g.k(); ++j)
            if (j != terminal_index) net.add_directed(g.terminals()[j], super, big);
        return net;
    }

    int node_count() const { return static_cast<int>(adj_.size()); }
    int source() const { return source_; }
    int sink() const { return sink_; }
    int reported_nodes() const { return reported_; }
    std::vector<std::vector<Arc>>& adj() { return adj_; }

private:
    void add_pair_capacities(const Graph& g) {
        // accumulate w_uv + w_vu per unordered pair
        std::vector<std::tuple<int, int, double>> pairs;
        pairs.reserve(g.edges().size());
        for (const Edge& e : g.edges()) {
            if (e.from == e.to || e.weight == 0.0) continue;
            pairs.emplace_back(std::min(e.from, e.to), std::max(e.from, e.to), e.weight);
        }
        std::sort(pairs.begin(), pairs.end(),
                  [](const auto& a, const auto& b) {
                      return std::tie(std::get<0>(a), std::get<1>(a)) <
                             std::tie(std::get<0>(b), std::get<1>(b));
                  });
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            auto [u, v, c] = pairs[i];
            if (i + 1 < pairs.size() && std::get<0>(pairs[i + 1]) == u &&
                std::get<1>(pairs[i + 1]) == v) {
                std::get<2>(pairs[i + 1]) += c;
                continue;
            }
            add_undirected(u, v, c);
        }
    }

    std::vector<std::vector<Arc>> adj_;
    int source_;
    int sink_;
    int reported_;
};

struct CutResult {
    double value = 0.0;
    std::vector<int> source_side;  // original vertex ids only, ascending
};

/**
 * Minimum s-t cut via Dinic's max-flow. Takes the network by value since
 * the algorithm consumes capacities. Exact on rational inputs up to the
 * 1e-12 residual floor used to prune saturated arcs.
 */
inline CutResult min_st_cut(FlowNetwork net) {
    constexpr double kEps = 1e-12;
    auto& adj = net.adj();
    const int n = net.node_count();
    const int s = net.source();
    const int t = net.sink();

    std::vector<int> level(n), iter(n);
    auto bfs = [&]() {
        std::fill(level.begin(), level.end(), -1);
        std::queue<int> q;
        level[s] = 0;
        q.push(s);
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (const auto& a : adj[u]) {
                if (a.cap > kEps && level[a.to] < 0) {
                    level[a.to] = level[u] + 1;
                    q.push(a.to);
                }
            }
        }
        return level[t] >= 0;
    };

    std::function<double(int, double)> dfs = [&](int u, double f) -> double {
        if (u == t) return f;
        for (int& i = iter[u]; i < static_cast<int>(adj[u].size()); ++i) {
            auto& a = adj[u][i];
            if (a.cap > kEps && level[a.to] == level[u] + 1) {
                const double d = dfs(a.to, std::min(f, a.cap));
                if (d > kEps) {
                    a.cap -= d;
                    adj[a.to][a.rev].cap += d;
                    return d;
                }
            }
        }
        return 0.0;
    };

    double flow = 0.0;
    while (bfs()) {
        std::fill(iter.begin(), iter.end(), 0);
        while (true) {
            const double f = dfs(s, std::numeric_limits<double>::infinity());
            if (f <= kEps) break;
            flow += f;
        }
    }

    // residual reachability from the source gives a witnessing cut side
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    seen[s] = 1;
    q.push(s);
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (const auto& a : adj[u]) {
            if (a.cap > kEps && !seen[a.to]) {
                seen[a.to] = 1;
                q.push(a.to);
            }
        }
    }
    CutResult res;
    res.value = flow;
    for (int v = 0; v < net.reported_nodes(); ++v)
        if (seen[v]) res.source_side.push_back(v);
    return res;
}

}  // namespace mwcut

#endif  // MWCUT_MAXFLOW_HPP
