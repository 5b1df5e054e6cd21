#ifndef MWCUT_BASELINES_HPP
#define MWCUT_BASELINES_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mwcut/errors.hpp"
#include "mwcut/graph.hpp"
#include "mwcut/maxflow.hpp"
#include "mwcut/rng.hpp"

namespace mwcut {

/// Per-terminal isolating cuts plus the resolved partition.
struct IsolatingCutDetail {
    std::vector<double> per_terminal_value;
    std::vector<std::vector<int>> per_terminal_side;
    int discarded = -1;
    Partition partition;
};

/**
 * Isolating-cut heuristic: compute, for each terminal, a minimum cut that
 * separates it from all other terminals, drop the most expensive of the k
 * cuts (highest label on ties) and keep the union of the rest. A vertex
 * claimed by several surviving source sides goes to the lowest label;
 * unclaimed vertices join the discarded terminal's component. Guarantees a
 * 2(1 - 1/k) approximation factor and is the classical comparison point
 * for multiway cut solvers.
 */
inline IsolatingCutDetail isolating_cut_detail(const Graph& g) {
    const int k = g.k();
    IsolatingCutDetail det;
    det.per_terminal_value.resize(k);
    det.per_terminal_side.resize(k);
    for (int j = 0; j < k; ++j) {
        CutResult cut = min_st_cut(FlowNetwork::isolating(g, j));
        det.per_terminal_value[j] = cut.value;
        det.per_terminal_side[j] = std::move(cut.source_side);
    }
    int drop = 0;
    for (int j = 1; j < k; ++j)
        if (det.per_terminal_value[j] >= det.per_terminal_value[drop]) drop = j;
    det.discarded = drop;

    std::vector<int> assignment(g.n(), -1);
    for (int j = 0; j < k; ++j) {
        if (j == drop) continue;
        for (int v : det.per_terminal_side[j])
            if (assignment[v] < 0) assignment[v] = j;
    }
    for (int v = 0; v < g.n(); ++v)
        if (assignment[v] < 0) assignment[v] = drop;
    det.partition.assignment = std::move(assignment);
    det.partition.cut_value = cut_value(g, det.partition);
    return det;
}

inline Partition isolating_cut_heuristic(const Graph& g) {
    return isolating_cut_detail(g).partition;
}

/**
 * Exhaustive minimum multiway cut over all terminal-respecting assignments,
 * enumerated in lexicographic order so ties resolve to the lexicographically
 * smallest assignment. Refuses instances beyond `budget` assignments.
 */
inline Partition brute_force_exact(const Graph& g, double budget = 1e7) {
    const int k = g.k();
    std::vector<int> free_vertices;
    for (int v = 0; v < g.n(); ++v)
        if (!g.is_terminal(v)) free_vertices.push_back(v);
    const int m = static_cast<int>(free_vertices.size());
    const double count = std::pow(static_cast<double>(k), m);
    if (count > budget)
        throw BudgetError("enumeration needs ~" + std::to_string(count) +
                          " assignments, over the budget of " + std::to_string(budget));

    Partition cur;
    cur.assignment.assign(g.n(), 0);
    for (int j = 0; j < k; ++j) cur.assignment[g.terminals()[j]] = j;
    for (int v : free_vertices) cur.assignment[v] = 0;

    auto evaluate = [&]() {
        double s = 0.0;
        for (const Edge& e : g.edges())
            if (e.from != e.to && cur.assignment[e.from] != cur.assignment[e.to])
                s += e.weight;
        return s;
    };

    Partition best = cur;
    best.cut_value = evaluate();
    while (true) {
        // odometer increment, last free vertex least significant
        int pos = m - 1;
        while (pos >= 0) {
            int& digit = cur.assignment[free_vertices[pos]];
            if (++digit < k) break;
            digit = 0;
            --pos;
        }
        if (pos < 0) break;
        const double v = evaluate();
        if (v < best.cut_value) {
            best = cur;
            best.cut_value = v;
        }
    }
    return best;
}

/**
 * Adversarial family for the isolating-cut heuristic: a unit-weight k-cycle
 * v_0..v_{k-1} with one pendant terminal attached to each cycle vertex at
 * `pendant_weight` (just under 2). The optimal cut removes the k cycle
 * edges (value k); isolating cuts instead remove k-1 pendant edges, value
 * (k-1)*pendant_weight, approaching the 2(1-1/k) worst case.
 */
inline Graph gen_pendant_cycle(int k, double pendant_weight) {
    if (k < 3) throw ParameterError("pendant cycle needs k >= 3");
    if (!(pendant_weight > 0.0)) throw ParameterError("pendant weight must be positive");
    std::vector<Edge> edges;
    for (int i = 0; i < k; ++i) edges.push_back({i, (i + 1) % k, 1.0});
    std::vector<int> terminals;
    for (int i = 0; i < k; ++i) {
        edges.push_back({i, k + i, pendant_weight});
        terminals.push_back(k + i);
    }
    return Graph(2 * k, std::move(edges), std::move(terminals));
}

/// Random instance: every unordered pair becomes an edge with probability
/// edge_prob, weight uniform in [w_lo, w_hi); terminals are k distinct
/// vertices drawn from the same stream.
inline Graph gen_random_graph(int n, int k, double edge_prob, double w_lo,
                              double w_hi, Rng& rng) {
    std::vector<int> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(ids[i], ids[rng.uniform_int(0, i)]);
    std::vector<int> terminals(ids.begin(), ids.begin() + k);
    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.uniform() < edge_prob)
                edges.push_back({u, v, w_lo == w_hi ? w_lo : rng.uniform(w_lo, w_hi)});
    return Graph(n, std::move(edges), std::move(terminals));
}

/// Random instance with an exact edge count: the first `m_edges` pairs of a
/// shuffled complete pair list. Used by the scaling benchmarks.
inline Graph gen_random_graph_m(int n, int k, int m_edges, double w_lo, double w_hi,
                                Rng& rng) {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
    if (m_edges > static_cast<int>(pairs.size()))
        throw ParameterError("more edges requested than vertex pairs");
    for (int i = static_cast<int>(pairs.size()) - 1; i > 0; --i)
        std::swap(pairs[i], pairs[rng.uniform_int(0, i)]);
    std::vector<Edge> edges;
    edges.reserve(m_edges);
    for (int i = 0; i < m_edges; ++i)
        edges.push_back({pairs[i].first, pairs[i].second,
                         w_lo == w_hi ? w_lo : rng.uniform(w_lo, w_hi)});
    std::vector<int> terminals(k);
    for (int j = 0; j < k; ++j) terminals[j] = j;
    return Graph(n, std::move(edges), std::move(terminals));
}

}  // namespace mwcut

#endif  // MWCUT_BASELINES_HPP
