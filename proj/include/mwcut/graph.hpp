#ifndef MWCUT_GRAPH_HPP
#define MWCUT_GRAPH_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <tuple>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mwcut/errors.hpp"
#include "mwcut/matrix.hpp"

namespace mwcut {

/// One directed weighted edge.
struct Edge {
    int from = 0;
    int to = 0;
    double weight = 0.0;
};

/**
 * A weighted digraph with a set of terminal vertices.
 *
 * Vertex ids are dense 0-based integers. Duplicate (from, to) pairs are
 * rejected so that silently summed weights cannot hide data errors;
 * the reverse edge (to, from) is a distinct edge and is allowed.
 * Immutable after construction and safe to share across threads.
 */
class Graph {
public:
    Graph() = default;

    Graph(int n_vertices, std::vector<Edge> edges, std::vector<int> terminals)
        : n_(n_vertices), edges_(std::move(edges)), terminals_(std::move(terminals)) {
        if (n_ <= 0) throw ParameterError("graph needs at least one vertex");
        const int k = static_cast<int>(terminals_.size());
        if (k < 2) throw ParameterError("need at least 2 terminals");
        if (k > n_) throw ParameterError("more terminals than vertices");
        std::unordered_set<int> seen_terms;
        for (int s : terminals_) {
            if (s < 0 || s >= n_) throw ParameterError("terminal id out of range");
            if (!seen_terms.insert(s).second) throw ParameterError("duplicate terminal");
        }
        std::unordered_set<long long> seen_edges;
        for (const Edge& e : edges_) {
            if (e.from < 0 || e.from >= n_ || e.to < 0 || e.to >= n_)
                throw ParameterError("edge endpoint out of range");
            if (!(e.weight >= 0.0) || !std::isfinite(e.weight))
                throw ParameterError("edge weights must be finite and nonnegative");
            const long long key = static_cast<long long>(e.from) * n_ + e.to;
            if (!seen_edges.insert(key).second)
                throw ParameterError("duplicate edge (" + std::to_string(e.from) + ", " +
                                     std::to_string(e.to) + ")");
        }
        term_label_.assign(n_, -1);
        for (int j = 0; j < k; ++j) term_label_[terminals_[j]] = j;
    }

    int n() const { return n_; }
    int k() const { return static_cast<int>(terminals_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<int>& terminals() const { return terminals_; }

    /// Label of vertex v if it is a terminal, -1 otherwise.
    int terminal_label(int v) const { return term_label_[v]; }
    bool is_terminal(int v) const { return term_label_[v] >= 0; }

    /// Dense weight-matrix view; w(l,m) = 0 for every non-edge.
    DenseMatrix dense_weights() const {
        DenseMatrix w(n_, n_);
        for (const Edge& e : edges_) w(e.from, e.to) += e.weight;
        return w;
    }

    /// Sum of all edge weights.
    double total_weight() const {
        double s = 0.0;
        for (const Edge& e : edges_) s += e.weight;
        return s;
    }

private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<int> terminals_;
    std::vector<int> term_label_;
};

/// Hard assignment of every vertex to one terminal's component.
struct Partition {
    std::vector<int> assignment;  // vertex -> terminal label in [0, k)
    double cut_value = 0.0;
};

/// 0.5 * (W + W^T). Diagonal entries are unchanged.
inline DenseMatrix symmetrize(const DenseMatrix& w) {
    if (!w.square()) throw DimensionError("symmetrize needs a square matrix");
    const int n = w.rows();
    DenseMatrix out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i, j) = 0.5 * (w(i, j) + w(j, i));
    return out;
}

/// Sum of the off-diagonal entries; the default diagonal shift. With this
/// value the shifted matrix is strictly diagonally dominant (Gershgorin)
/// for any nonzero symmetric weight matrix, hence positive definite.
inline double auto_lambda(const DenseMatrix& w) {
    if (!w.square()) throw DimensionError("auto_lambda needs a square matrix");
    double s = 0.0;
    for (int i = 0; i < w.rows(); ++i)
        for (int j = 0; j < w.cols(); ++j)
            if (i != j) s += w(i, j);
    return s;
}

/// W + lambda * I. Pass no lambda to use auto_lambda(w).
inline DenseMatrix regularize(const DenseMatrix& w,
                              std::optional<double> lambda = std::nullopt) {
    if (!w.square()) throw DimensionError("regularize needs a square matrix");
    if (lambda && (*lambda < 0.0 || !std::isfinite(*lambda)))
        throw ParameterError("lambda must be nonnegative");
    const double lam = lambda ? *lambda : auto_lambda(w);
    DenseMatrix out = w;
    for (int i = 0; i < w.rows(); ++i) out(i, i) += lam;
    return out;
}

inline void validate_partition(const Graph& g, const Partition& p) {
    if (static_cast<int>(p.assignment.size()) != g.n())
        throw InvalidPartitionError("assignment length does not match vertex count");
    const int k = g.k();
    for (int v = 0; v < g.n(); ++v) {
        const int a = p.assignment[v];
        if (a < 0 || a >= k) throw InvalidPartitionError("label out of range");
    }
    for (int j = 0; j < k; ++j)
        if (p.assignment[g.terminals()[j]] != j)
            throw InvalidPartitionError("terminal " + std::to_string(g.terminals()[j]) +
                                        " not pinned to its own component");
}

/// Total weight of edges whose endpoints land in different components.
/// Each directed edge is counted once; self-loops never cross a cut.
inline double cut_value(const Graph& g, const Partition& p) {
    validate_partition(g, p);
    double s = 0.0;
    for (const Edge& e : g.edges())
        if (e.from != e.to && p.assignment[e.from] != p.assignment[e.to]) s += e.weight;
    return s;
}

/**
 * Symmetrized, diagonally shifted weights in CSR form: the matrix
 * 0.5*(W + W^T) + lambda*I that the annealing engine iterates on.
 * Column indices within each row are sorted, which fixes the reduction
 * order of every dot product and makes sweeps bit-reproducible.
 */
struct RegularizedWeights {
    int n = 0;
    std::vector<int> row_ptr;   // size n + 1
    std::vector<int> col;       // size nnz
    std::vector<double> val;    // size nnz
    std::vector<int> diag_slot; // per row index into val, -1 if absent
    double lambda = 0.0;
    double total = 0.0;         // sum of all stored entries, diagonal included
};

namespace detail {

inline RegularizedWeights build_csr(int n, std::vector<std::tuple<int, int, double>> trip) {
    std::sort(trip.begin(), trip.end());
    RegularizedWeights w;
    w.n = n;
    w.row_ptr.assign(n + 1, 0);
    w.diag_slot.assign(n, -1);
    for (std::size_t i = 0; i < trip.size(); ++i) {
        auto [r, c, v] = trip[i];
        if (i + 1 < trip.size() && std::get<0>(trip[i + 1]) == r &&
            std::get<1>(trip[i + 1]) == c) {
            std::get<2>(trip[i + 1]) += v;  // merge duplicates
            continue;
        }
        if (v == 0.0) continue;
        w.col.push_back(c);
        w.val.push_back(v);
        if (r == c) w.diag_slot[r] = static_cast<int>(w.val.size()) - 1;
        ++w.row_ptr[r + 1];
        w.total += v;
    }
    for (int i = 0; i < n; ++i) w.row_ptr[i + 1] += w.row_ptr[i];
    return w;
}

}  // namespace detail

/// Solver matrix: symmetrized to undirected capacities m_lm = w_lm + w_ml
/// (a single stored edge carries its full weight in both directions, so the
/// relaxed cost of a hard assignment equals the partition's cut value),
/// then diagonally shifted. Self-loop weights already present stay on the
/// diagonal and simply add to the shift.
inline RegularizedWeights prepare_weights(const Graph& g,
                                          std::optional<double> lambda = std::nullopt) {
    if (lambda && (*lambda < 0.0 || !std::isfinite(*lambda)))
        throw ParameterError("lambda must be nonnegative");
    double offdiag = 0.0;
    std::vector<std::tuple<int, int, double>> trip;
    trip.reserve(2 * g.edges().size() + g.n());
    for (const Edge& e : g.edges()) {
        if (e.from == e.to) {
            trip.emplace_back(e.from, e.from, e.weight);
        } else {
            trip.emplace_back(e.from, e.to, e.weight);
            trip.emplace_back(e.to, e.from, e.weight);
            offdiag += 2.0 * e.weight;
        }
    }
    const double lam = lambda ? *lambda : offdiag;
    if (lam > 0.0)
        for (int i = 0; i < g.n(); ++i) trip.emplace_back(i, i, lam);
    RegularizedWeights w = detail::build_csr(g.n(), std::move(trip));
    w.lambda = lam;
    return w;
}

/// Largest row sum of the undirected-capacity matrix: the per-row
/// Gershgorin bound. Shifting by this value keeps the prepared matrix
/// positive semidefinite while staying far smaller than the global sum on
/// large or dense graphs.
inline double gershgorin_lambda(const Graph& g) {
    std::vector<double> row_sum(g.n(), 0.0);
    for (const Edge& e : g.edges()) {
        if (e.from == e.to) continue;
        row_sum[e.from] += e.weight;
        row_sum[e.to] += e.weight;
    }
    double m = 0.0;
    for (double v : row_sum) m = std::max(m, v);
    return m;
}

/// Dense view of the prepared matrix, for tests and small problems.
inline DenseMatrix to_dense(const RegularizedWeights& w) {
    DenseMatrix m(w.n, w.n);
    for (int i = 0; i < w.n; ++i)
        for (int idx = w.row_ptr[i]; idx < w.row_ptr[i + 1]; ++idx)
            m(i, w.col[idx]) += w.val[idx];
    return m;
}

}  // namespace mwcut

#endif  // MWCUT_GRAPH_HPP
