#ifndef MWCUT_SOLVER_HPP
#define MWCUT_SOLVER_HPP

#include <atomic>
#include <cmath>
#include <cstring>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "mwcut/errors.hpp"
#include "mwcut/graph.hpp"

namespace mwcut {

/**
 * Row-stochastic soft-partition matrix P = [p(j|i)]: row i holds the
 * association probabilities of vertex i with each terminal's component.
 * Terminal rows are pinned one-hot and never change under sweeps.
 */
class AssociationMatrix {
public:
    AssociationMatrix() = default;

    AssociationMatrix(int n, int k, std::vector<int> terminals)
        : n_(n), k_(k), terminals_(std::move(terminals)),
          term_label_(n, -1), p_(static_cast<std::size_t>(n) * k, 0.0) {
        for (int j = 0; j < k_; ++j) term_label_[terminals_[j]] = j;
    }

    int rows() const { return n_; }
    int cols() const { return k_; }
    const std::vector<int>& terminals() const { return terminals_; }
    bool is_terminal(int i) const { return term_label_[i] >= 0; }
    int terminal_label(int i) const { return term_label_[i]; }

    double* row(int i) { return p_.data() + static_cast<std::size_t>(i) * k_; }
    const double* row(int i) const { return p_.data() + static_cast<std::size_t>(i) * k_; }
    double operator()(int i, int j) const { return row(i)[j]; }
    double& operator()(int i, int j) { return row(i)[j]; }
    const std::vector<double>& data() const { return p_; }

    bool operator==(const AssociationMatrix&) const = default;

private:
    int n_ = 0;
    int k_ = 0;
    std::vector<int> terminals_;
    std::vector<int> term_label_;
    std::vector<double> p_;
};

/// Annealing schedule and solver knobs.
struct AnnealConfig {
    double beta_min = 0.01;
    double beta_max = 40.0;
    std::optional<double> gamma;    // geometric growth; default gives ~10 outer steps
    double inner_tol = 1e-6;        // max-abs entry change for fixed-point convergence
    int max_inner_iters = 500;
    std::optional<double> lambda;   // diagonal shift; default is the off-diagonal sum
    double tie_tol = 1e-3;

    double resolved_gamma() const {
        return gamma ? *gamma : std::pow(beta_max / beta_min, 0.1);
    }

    void validate() const {
        if (!(beta_min > 0.0)) throw ParameterError("beta_min must be positive");
        if (!(beta_max > beta_min)) throw ParameterError("beta_max must exceed beta_min");
        if (!(resolved_gamma() > 1.0)) throw ParameterError("gamma must exceed 1");
        if (!(inner_tol > 0.0)) throw ParameterError("inner_tol must be positive");
        if (max_inner_iters < 1) throw ParameterError("max_inner_iters must be >= 1");
        if (lambda && *lambda < 0.0) throw ParameterError("lambda must be nonnegative");
        if (!(tie_tol >= 0.0)) throw ParameterError("tie_tol must be nonnegative");
    }
};

/// Slower, better-converged configuration for unstructured instances: a
/// finer geometric schedule, a tight fixed-point tolerance so bifurcations
/// fully develop before the next beta step, and the per-row Gershgorin
/// shift instead of the global weight sum (the global sum buries the
/// neighbor couplings under the self-term and quenches the anneal early).
inline AnnealConfig quality_config(const Graph& g) {
    AnnealConfig cfg;
    cfg.gamma = 1.2;
    cfg.inner_tol = 1e-10;
    cfg.max_inner_iters = 20000;
    cfg.lambda = gershgorin_lambda(g);
    return cfg;
}

/// The geometric sequence beta_min, gamma*beta_min, ..., capped at beta_max
/// (the cap value itself is always included).
inline std::vector<double> beta_schedule(const AnnealConfig& cfg) {
    cfg.validate();
    const double gamma = cfg.resolved_gamma();
    std::vector<double> betas;
    double b = cfg.beta_min;
    while (true) {
        betas.push_back(b);
        if (b >= cfg.beta_max * (1.0 - 1e-12)) break;
        b = std::min(b * gamma, cfg.beta_max);
    }
    return betas;
}

/// Uniform start: terminal rows one-hot, every other row 1/k.
inline AssociationMatrix init_associations(const Graph& g) {
    AssociationMatrix p(g.n(), g.k(), g.terminals());
    const double u = 1.0 / g.k();
    for (int i = 0; i < g.n(); ++i) {
        double* r = p.row(i);
        const int t = p.terminal_label(i);
        if (t >= 0) {
            for (int j = 0; j < g.k(); ++j) r[j] = 0.0;
            r[t] = 1.0;
        } else {
            for (int j = 0; j < g.k(); ++j) r[j] = u;
        }
    }
    return p;
}

/**
 * One batch Gibbs sweep: every non-terminal row i is replaced by
 *
 *   p+(j|i) = exp(beta * sum_m w_im p(j|m)) / Z_i,
 *
 * where every sum on the right reads the incoming matrix (Jacobi update,
 * not Gauss-Seidel; the free-energy descent guarantee only covers batch
 * updates). Exponentials are shifted by the row maximum before
 * normalization, which leaves the quotient unchanged. Terminal rows are
 * copied verbatim. Returns the max-abs entry change.
 *
 * Rows are independent, so the loop parallelizes; each row's dot products
 * run in fixed column order, so results are identical for any thread count.
 */
inline double sweep_into(const AssociationMatrix& p, const RegularizedWeights& w,
                         double beta, AssociationMatrix& out) {
    const int n = p.rows();
    const int k = p.cols();
    if (w.n != n) throw DimensionError("weight matrix does not match association matrix");
    if (out.rows() != n || out.cols() != k || out.terminals() != p.terminals()) {
        out = p;
    } else {
        for (int s : p.terminals())
            std::memcpy(out.row(s), p.row(s), sizeof(double) * k);
    }
    double maxdiff = 0.0;
    std::atomic<int> bad_row{-1};
#ifdef _OPENMP
#pragma omp parallel if (n >= 512)
#endif
    {
        std::vector<double> acc(k);
#ifdef _OPENMP
#pragma omp for reduction(max : maxdiff) schedule(static)
#endif
        for (int i = 0; i < n; ++i) {
            if (p.is_terminal(i)) continue;
            for (int j = 0; j < k; ++j) acc[j] = 0.0;
            for (int idx = w.row_ptr[i]; idx < w.row_ptr[i + 1]; ++idx) {
                const double wv = w.val[idx];
                const double* pr = p.row(w.col[idx]);
                for (int j = 0; j < k; ++j) acc[j] += wv * pr[j];
            }
            double amax = acc[0];
            for (int j = 1; j < k; ++j) amax = std::max(amax, acc[j]);
            double z = 0.0;
            double* o = out.row(i);
            for (int j = 0; j < k; ++j) {
                o[j] = std::exp(beta * (acc[j] - amax));
                z += o[j];
            }
            if (!std::isfinite(z) || z <= 0.0) {
                bad_row.store(i);
                continue;
            }
            const double inv = 1.0 / z;
            const double* old = p.row(i);
            for (int j = 0; j < k; ++j) {
                o[j] *= inv;
                maxdiff = std::max(maxdiff, std::abs(o[j] - old[j]));
            }
        }
    }
    if (bad_row.load() >= 0)
        throw NumericError("non-finite Gibbs update at vertex " +
                           std::to_string(bad_row.load()), bad_row.load());
    return maxdiff;
}

inline AssociationMatrix gibbs_sweep(const AssociationMatrix& p,
                                     const RegularizedWeights& w, double beta) {
    AssociationMatrix out;
    sweep_into(p, w, beta, out);
    return out;
}

namespace detail {
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }
}

/// Relaxed cut cost D = 0.5 * sum_{l,m} w_lm (1 - <P_l, P_m>), diagonal
/// entries included. For hard 0-1 associations this is exactly the cut
/// value of the induced partition on the same matrix.
inline double cut_cost(const AssociationMatrix& p, const RegularizedWeights& w) {
    const int k = p.cols();
    double s = 0.0;
    for (int i = 0; i < w.n; ++i) {
        const double* pi = p.row(i);
        for (int idx = w.row_ptr[i]; idx < w.row_ptr[i + 1]; ++idx) {
            const double* pm = p.row(w.col[idx]);
            double dot = 0.0;
            for (int j = 0; j < k; ++j) dot += pi[j] * pm[j];
            s += w.val[idx] * (1.0 - dot);
        }
    }
    return 0.5 * s;
}

/// Shannon entropy H = -sum p log p (0 log 0 := 0); lies in [0, N log k].
inline double entropy(const AssociationMatrix& p) {
    double s = 0.0;
    for (double v : p.data()) s += detail::xlogx(v);
    return -s;
}

/// Free energy L = D - H / beta, the annealed objective.
inline double free_energy(const AssociationMatrix& p, const RegularizedWeights& w,
                          double beta) {
    double neg_ent = 0.0;
    for (double v : p.data()) neg_ent += detail::xlogx(v);
    return cut_cost(p, w) + neg_ent / beta;
}

/**
 * Two-point free-energy surrogate
 *
 *   G(zeta, eta) = 0.5 sum w_lm + 0.5 sum_{l,m,j} (eta_lj - 2 zeta_lj) eta_mj w_lm
 *                + (1/beta) sum zeta log zeta,
 *
 * with G(P, P) = free_energy(P) exactly. A batch sweep P -> P+ minimizes
 * G(P+, .) in its second argument when the matrix is positive
 * semidefinite, and G(P, P) - G(P+, P) equals (1/beta) * sum-of-row KL
 * divergences, which together give the per-sweep descent guarantee.
 * The leading constant does not affect any difference of surrogate values.
 */
inline double free_energy_surrogate(const AssociationMatrix& zeta,
                                    const AssociationMatrix& eta,
                                    const RegularizedWeights& w, double beta) {
    const int k = zeta.cols();
    if (eta.rows() != zeta.rows() || eta.cols() != k || w.n != zeta.rows())
        throw DimensionError("surrogate arguments must share shape");
    double quad = 0.0;
    for (int l = 0; l < w.n; ++l) {
        const double* zl = zeta.row(l);
        const double* el = eta.row(l);
        for (int idx = w.row_ptr[l]; idx < w.row_ptr[l + 1]; ++idx) {
            const double* em = eta.row(w.col[idx]);
            double dot = 0.0;
            for (int j = 0; j < k; ++j) dot += (el[j] - 2.0 * zl[j]) * em[j];
            quad += w.val[idx] * dot;
        }
    }
    double ent = 0.0;
    for (double v : zeta.data()) ent += detail::xlogx(v);
    return 0.5 * w.total + 0.5 * quad + ent / beta;
}

/// Partition weights p(A_j) = sum_i p(j|i) / N.
inline std::vector<double> partition_weights(const AssociationMatrix& p) {
    std::vector<double> pw(p.cols(), 0.0);
    for (int i = 0; i < p.rows(); ++i) {
        const double* r = p.row(i);
        for (int j = 0; j < p.cols(); ++j) pw[j] += r[j];
    }
    for (double& v : pw) v /= p.rows();
    return pw;
}

/// Hardened partition plus the per-vertex sets of near-argmax labels.
struct HardenResult {
    Partition partition;
    std::map<int, std::vector<int>> ties;  // vertex -> admissible labels
};

/// Assign each vertex to its argmax label. Labels within tie_tol of the
/// row maximum are reported as admissible; the lowest such label wins.
inline HardenResult harden(const AssociationMatrix& p, double tie_tol = 1e-3) {
    HardenResult res;
    res.partition.assignment.resize(p.rows());
    for (int i = 0; i < p.rows(); ++i) {
        const double* r = p.row(i);
        double pmax = r[0];
        for (int j = 1; j < p.cols(); ++j) pmax = std::max(pmax, r[j]);
        std::vector<int> near;
        for (int j = 0; j < p.cols(); ++j)
            if (r[j] >= pmax - tie_tol) near.push_back(j);
        res.partition.assignment[i] = near.front();
        if (near.size() > 1) res.ties.emplace(i, std::move(near));
    }
    return res;
}

inline HardenResult harden(const Graph& g, const AssociationMatrix& p,
                           double tie_tol = 1e-3) {
    HardenResult res = harden(p, tie_tol);
    res.partition.cut_value = cut_value(g, res.partition);
    return res;
}

/// One converged outer step of the annealing loop.
struct TraceEntry {
    double beta = 0.0;
    double free_energy = 0.0;
    double cut_cost = 0.0;
    double entropy = 0.0;
    int inner_iters = 0;
    bool converged = true;
    std::vector<double> partition_weights;
};

struct SolveTrace {
    std::vector<TraceEntry> entries;
    Partition partition;                   // hardened final partition, cut on original weights
    std::map<int, std::vector<int>> ties;
    AssociationMatrix associations;
    int unconverged_steps = 0;
    long long total_sweeps = 0;
};

/**
 * Deterministic annealing: fixed-point Gibbs sweeps to convergence at each
 * beta of the geometric schedule, always starting from the uniform
 * initialization. An inner loop that hits max_inner_iters is recorded as
 * unconverged and annealing continues; the free energy cannot have
 * increased along the way.
 */
inline SolveTrace anneal(const Graph& g, const AnnealConfig& cfg = {}) {
    cfg.validate();
    const RegularizedWeights w = prepare_weights(g, cfg.lambda);
    SolveTrace trace;
    AssociationMatrix cur = init_associations(g);
    AssociationMatrix next = cur;
    for (double beta : beta_schedule(cfg)) {
        int iters = 0;
        bool converged = false;
        while (iters < cfg.max_inner_iters) {
            const double diff = sweep_into(cur, w, beta, next);
            std::swap(cur, next);
            ++iters;
            if (diff < cfg.inner_tol) {
                converged = true;
                break;
            }
        }
        trace.total_sweeps += iters;
        if (!converged) ++trace.unconverged_steps;
        TraceEntry e;
        e.beta = beta;
        e.cut_cost = cut_cost(cur, w);
        e.entropy = entropy(cur);
        e.free_energy = e.cut_cost - e.entropy / beta;
        e.inner_iters = iters;
        e.converged = converged;
        e.partition_weights = partition_weights(cur);
        trace.entries.push_back(std::move(e));
    }
    HardenResult hr = harden(g, cur, cfg.tie_tol);
    trace.partition = std::move(hr.partition);
    trace.ties = std::move(hr.ties);
    trace.associations = std::move(cur);
    return trace;
}

/// Outer-step betas where some partition weight p(A_j) jumped by more than
/// `threshold` relative to the previous step.
inline std::vector<double> detect_phase_transitions(const SolveTrace& trace,
                                                    double threshold = 0.05) {
    std::vector<double> betas;
    for (std::size_t t = 1; t < trace.entries.size(); ++t) {
        const auto& prev = trace.entries[t - 1].partition_weights;
        const auto& curw = trace.entries[t].partition_weights;
        double dmax = 0.0;
        for (std::size_t j = 0; j < curw.size(); ++j)
            dmax = std::max(dmax, std::abs(curw[j] - prev[j]));
        if (dmax > threshold) betas.push_back(trace.entries[t].beta);
    }
    return betas;
}

}  // namespace mwcut

#endif  // MWCUT_SOLVER_HPP
