#ifndef MWCUT_DYNAMICS_HPP
#define MWCUT_DYNAMICS_HPP

#include <chrono>
#include <cmath>
#include <utility>
#include <vector>

#include "mwcut/errors.hpp"
#include "mwcut/graph.hpp"
#include "mwcut/solver.hpp"

namespace mwcut {

/**
 * Edge-weight dynamics over a fixed edge set: the vectorized weights follow
 * w' = A w + B u with diagonal A, B; a zero B entry marks an edge whose
 * weight cannot be influenced (its control is held at exactly zero for all
 * time). Non-edges carry no state at all, so their weights stay zero.
 *
 * The tracked objective uses squared edge weights, so weights may go
 * negative under the dynamics and are deliberately not clamped; only the
 * magnitude matters to the cut.
 */
struct DynamicSystem {
    int n = 0;
    std::vector<std::pair<int, int>> edges;  // undirected pairs, 0-based
    std::vector<int> terminals;              // 0-based
    std::vector<double> a_diag;
    std::vector<double> b_diag;
    std::vector<double> w0;
    double mu = 1.0;        // control-effort weight
    double c0 = 1.0;        // controller gain
    double beta_track = 40.0;
    double step = 1e-4;     // RK4 step size
    double horizon = 0.0;
    double u0 = 0.1;        // initial control on controllable edges
    std::vector<double> u0_vec;  // optional per-edge override
    double refresh_tol = 1e-6;
    int max_refresh_iters = 500;

    int edge_count() const { return static_cast<int>(edges.size()); }

    void validate() const {
        if (n < 2) throw ParameterError("dynamic system needs at least 2 vertices");
        if (terminals.size() < 2) throw ParameterError("need at least 2 terminals");
        const std::size_t m = edges.size();
        if (a_diag.size() != m || b_diag.size() != m || w0.size() != m)
            throw DimensionError("A_diag, B_diag, W0 must match the edge count");
        if (!u0_vec.empty() && u0_vec.size() != m)
            throw DimensionError("U0 override must match the edge count");
        if (!(mu > 0.0)) throw ParameterError("mu must be positive");
        if (!(c0 > 0.0)) throw ParameterError("C0 must be positive");
        if (!(beta_track > 0.0)) throw ParameterError("beta_track must be positive");
        if (!(step > 0.0)) throw ParameterError("step size must be positive");
        if (horizon < 0.0) throw ParameterError("horizon must be nonnegative");
        std::vector<char> seen(static_cast<std::size_t>(n) * n, 0);
        for (auto [u, v] : edges) {
            if (u < 0 || u >= n || v < 0 || v >= n || u == v)
                throw ParameterError("invalid edge in dynamic system");
            const int a = std::min(u, v), b = std::max(u, v);
            char& flag = seen[static_cast<std::size_t>(a) * n + b];
            if (flag) throw ParameterError("duplicate edge in dynamic system");
            flag = 1;
        }
    }

    /// Static snapshot of the graph at the given weights; the solvers only
    /// see magnitudes through the squared objective, so weights enter |w|^2.
    Graph snapshot_squared(const std::vector<double>& w) const {
        std::vector<Edge> es;
        es.reserve(edges.size());
        for (std::size_t e = 0; e < edges.size(); ++e)
            es.push_back({edges[e].first, edges[e].second, w[e] * w[e]});
        return Graph(n, std::move(es), terminals);
    }
};

/// One recorded integrator step.
struct SimStep {
    double t = 0.0;
    std::vector<double> w;
    std::vector<double> u;
    double energy = 0.0;        // F = L1 + mu * |U|^2
    double energy_rate = 0.0;   // analytic dF/dt with the partition held fixed
    double drift = 0.0;         // alpha = 2 sum phi.W.Wdot at this state
    double control_norm2 = 0.0; // |U|^2
    std::vector<int> assignment;
    double squared_cut = 0.0;   // sum of w_e^2 over crossing edges
};

struct SimTrace {
    std::vector<SimStep> steps;
    double solver_seconds = 0.0;  // time spent computing/refreshing associations
    long long solver_sweeps = 0;
    int solves = 0;               // cold anneals performed
    int clamp_events = 0;         // steps where the controller hit the |U| -> 0 floor
    bool aborted = false;
};

/// phi_lm = 1 - <P_l, P_m>: the probability that l and m land in different
/// components. Entries lie in [0, 1] and the matrix is symmetric.
inline DenseMatrix separation_matrix(const AssociationMatrix& p) {
    const int n = p.rows();
    DenseMatrix phi(n, n);
    for (int l = 0; l < n; ++l) {
        const double* pl = p.row(l);
        for (int m = 0; m < n; ++m) {
            const double* pm = p.row(m);
            double dot = 0.0;
            for (int j = 0; j < p.cols(); ++j) dot += pl[j] * pm[j];
            phi(l, m) = 1.0 - dot;
        }
    }
    return phi;
}

namespace detail {
inline std::vector<double> edge_separation(const AssociationMatrix& p,
                                           const std::vector<std::pair<int, int>>& edges) {
    std::vector<double> phi(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const double* pl = p.row(edges[e].first);
        const double* pm = p.row(edges[e].second);
        double dot = 0.0;
        for (int j = 0; j < p.cols(); ++j) dot += pl[j] * pm[j];
        phi[e] = 1.0 - dot;
    }
    return phi;
}
}  // namespace detail

/// Squared-weight free energy plus control effort:
///   F = sum_e w_e^2 phi_e + (1/beta) sum p log p + mu |U|^2.
/// Bounded below by -(1/beta) N log k.
inline double energy(const std::vector<std::pair<int, int>>& edges,
                     const std::vector<double>& w, const std::vector<double>& u,
                     const AssociationMatrix& p, double mu, double beta) {
    double l1 = 0.0;
    const std::vector<double> phi = detail::edge_separation(p, edges);
    for (std::size_t e = 0; e < edges.size(); ++e) l1 += w[e] * w[e] * phi[e];
    double ent = 0.0;
    for (double v : p.data()) ent += detail::xlogx(v);
    double u2 = 0.0;
    for (double v : u) u2 += v * v;
    return l1 + ent / beta + mu * u2;
}

/// Drift term alpha = 2 * sum_{l,m} phi_lm w_lm w'_lm over the full matrix:
/// twice the rate at which the weight motion alone changes the squared-cut
/// part of the energy. Dense form, summed entry by entry.
inline double cut_drift(const DenseMatrix& phi, const DenseMatrix& w,
                        const DenseMatrix& wdot) {
    if (phi.rows() != w.rows() || w.rows() != wdot.rows() || !phi.square())
        throw DimensionError("cut_drift arguments must be square and matched");
    double s = 0.0;
    for (int l = 0; l < w.rows(); ++l)
        for (int m = 0; m < w.cols(); ++m) s += phi(l, m) * w(l, m) * wdot(l, m);
    return 2.0 * s;
}

/// Edge-list form of the same drift; each undirected edge appears twice in
/// the matrix sum, hence the factor 4.
inline double cut_drift(const std::vector<double>& phi_e, const std::vector<double>& w,
                        const std::vector<double>& wdot) {
    double s = 0.0;
    for (std::size_t e = 0; e < w.size(); ++e) s += phi_e[e] * w[e] * wdot[e];
    return 4.0 * s;
}

struct ControlDerivative {
    std::vector<double> udot;
    bool clamped = false;
};

/**
 * Dissipating control law
 *
 *   u' = -[ C0 + (alpha + sqrt(alpha^2 + x^2)) / x ] u,   x = 4 mu |U|^2,
 *
 * with entries on uncontrollable edges forced to zero. The bracket is
 * always >= C0, so |U|^2 decays at least as fast as exp(-2 C0 t), and
 * substituting u' into dF/dt = alpha/2 + 2 mu <U, u'> gives
 *
 *   dF/dt = -2 mu C0 |U|^2 - 0.5 sqrt(alpha^2 + x^2) <= 0.
 *
 * As |U| -> 0 with alpha <= 0 the bracket tends to C0, which is the limit
 * used below the x floor. With alpha > 0 and no control authority left no
 * dissipating input exists; the formula is then evaluated at the floor and
 * the step is flagged.
 */
inline ControlDerivative control_law(const std::vector<double>& u, double drift,
                                     double mu, double c0,
                                     const std::vector<double>& b_diag,
                                     double eps = 1e-12) {
    if (!(mu > 0.0)) throw ParameterError("mu must be positive");
    if (!(c0 > 0.0)) throw ParameterError("C0 must be positive");
    double u2 = 0.0;
    for (double v : u) u2 += v * v;
    const double x = 4.0 * mu * u2;
    double bracket;
    ControlDerivative out;
    if (x < eps) {
        if (drift <= 0.0) {
            bracket = c0;
        } else {
            bracket = c0 + (drift + std::hypot(drift, eps)) / eps;
            out.clamped = true;
        }
    } else {
        bracket = c0 + (drift + std::hypot(drift, x)) / x;
    }
    out.udot.resize(u.size());
    for (std::size_t e = 0; e < u.size(); ++e)
        out.udot[e] = b_diag[e] == 0.0 ? 0.0 : -bracket * u[e];
    return out;
}

namespace detail {

/// CSR matrix over the squared dynamic weights whose sparsity pattern is
/// fixed; per-step refreshes only rewrite values and the diagonal shift.
class SquaredWeightCache {
public:
    SquaredWeightCache(int n, const std::vector<std::pair<int, int>>& edges) {
        std::vector<std::tuple<int, int, double>> trip;
        trip.reserve(2 * edges.size() + n);
        for (auto [u, v] : edges) {
            trip.emplace_back(u, v, 1.0);
            trip.emplace_back(v, u, 1.0);
        }
        for (int i = 0; i < n; ++i) trip.emplace_back(i, i, 1.0);
        w_ = build_csr(n, std::move(trip));
        slot_fwd_.resize(edges.size());
        slot_bwd_.resize(edges.size());
        for (std::size_t e = 0; e < edges.size(); ++e) {
            slot_fwd_[e] = find_slot(edges[e].first, edges[e].second);
            slot_bwd_[e] = find_slot(edges[e].second, edges[e].first);
        }
    }

    void update(const std::vector<double>& w) {
        double sum = 0.0;
        for (std::size_t e = 0; e < w.size(); ++e) {
            const double w2 = w[e] * w[e];
            w_.val[slot_fwd_[e]] = w2;
            w_.val[slot_bwd_[e]] = w2;
            sum += w2;
        }
        const double lambda = 2.0 * sum;  // off-diagonal total
        for (int i = 0; i < w_.n; ++i) w_.val[w_.diag_slot[i]] = lambda;
        w_.lambda = lambda;
        w_.total = 2.0 * sum + w_.n * lambda;
    }

    const RegularizedWeights& matrix() const { return w_; }

private:
    int find_slot(int r, int c) const {
        for (int idx = w_.row_ptr[r]; idx < w_.row_ptr[r + 1]; ++idx)
            if (w_.col[idx] == c) return idx;
        throw Error("cache slot missing");
    }
    RegularizedWeights w_;
    std::vector<int> slot_fwd_, slot_bwd_;
};

struct Clock {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

}  // namespace detail

/**
 * Integrate the coupled weight/control system with fixed-step RK4 while
 * tracking the partition: at every step the associations are refreshed by
 * warm-started sweeps at beta_track on the squared, shift-regularized
 * weights, starting from the uniform initialization at t = 0. The
 * separation matrix is held fixed within a step, so the control law sees
 * a smooth ODE. Aborts, keeping the trace so far, if the state stops
 * being finite.
 */
inline SimTrace simulate(const DynamicSystem& sys) {
    sys.validate();
    SimTrace trace;
    if (sys.horizon == 0.0) return trace;

    const int m = sys.edge_count();
    std::vector<double> w = sys.w0;
    std::vector<double> u(m, 0.0);
    for (int e = 0; e < m; ++e)
        if (sys.b_diag[e] != 0.0) u[e] = sys.u0_vec.empty() ? sys.u0 : sys.u0_vec[e];

    Graph skeleton = sys.snapshot_squared(w);
    AssociationMatrix p = init_associations(skeleton);
    AssociationMatrix scratch = p;

    detail::SquaredWeightCache cache(sys.n, sys.edges);

    auto refresh = [&](const std::vector<double>& wcur) {
        detail::Clock c;
        cache.update(wcur);
        for (int it = 0; it < sys.max_refresh_iters; ++it) {
            const double diff = sweep_into(p, cache.matrix(), sys.beta_track, scratch);
            std::swap(p, scratch);
            ++trace.solver_sweeps;
            if (diff < sys.refresh_tol) break;
        }
        trace.solver_seconds += c.elapsed();
    };

    std::vector<double> phi_e = detail::edge_separation(p, sys.edges);

    auto wdot_of = [&](const std::vector<double>& ws, const std::vector<double>& us,
                       std::vector<double>& out) {
        for (int e = 0; e < m; ++e)
            out[e] = sys.a_diag[e] * ws[e] + sys.b_diag[e] * us[e];
    };

    auto derivative = [&](const std::vector<double>& ws, const std::vector<double>& us,
                          std::vector<double>& dw, std::vector<double>& du) {
        wdot_of(ws, us, dw);
        ControlDerivative ctl =
            control_law(us, cut_drift(phi_e, ws, dw), sys.mu, sys.c0, sys.b_diag);
        du = std::move(ctl.udot);
    };

    const long long nsteps = std::llround(sys.horizon / sys.step);
    std::vector<double> dw(m), du(m), k1w(m), k1u(m), k2w(m), k2u(m), k3w(m), k3u(m),
        k4w(m), k4u(m), tw(m), tu(m);

    auto record = [&](double t) {
        SimStep s;
        s.t = t;
        s.w = w;
        s.u = u;
        double u2 = 0.0;
        for (double v : u) u2 += v * v;
        s.control_norm2 = u2;
        phi_e = detail::edge_separation(p, sys.edges);
        s.energy = energy(sys.edges, w, u, p, sys.mu, sys.beta_track);
        wdot_of(w, u, dw);
        const double drift = cut_drift(phi_e, w, dw);
        ControlDerivative ctl = control_law(u, drift, sys.mu, sys.c0, sys.b_diag);
        double dot_uv = 0.0;
        for (int e = 0; e < m; ++e) dot_uv += u[e] * ctl.udot[e];
        s.drift = drift;
        s.energy_rate = 0.5 * drift + 2.0 * sys.mu * dot_uv;
        if (ctl.clamped) ++trace.clamp_events;
        HardenResult hr = harden(p);
        s.assignment = std::move(hr.partition.assignment);
        double sq = 0.0;
        for (int e = 0; e < m; ++e)
            if (s.assignment[sys.edges[e].first] != s.assignment[sys.edges[e].second])
                sq += w[e] * w[e];
        s.squared_cut = sq;
        trace.steps.push_back(std::move(s));
    };

    for (long long i = 0; i <= nsteps; ++i) {
        refresh(w);
        record(i * sys.step);
        if (i == nsteps) break;

        const double h = sys.step;
        derivative(w, u, k1w, k1u);
        for (int e = 0; e < m; ++e) { tw[e] = w[e] + 0.5 * h * k1w[e]; tu[e] = u[e] + 0.5 * h * k1u[e]; }
        derivative(tw, tu, k2w, k2u);
        for (int e = 0; e < m; ++e) { tw[e] = w[e] + 0.5 * h * k2w[e]; tu[e] = u[e] + 0.5 * h * k2u[e]; }
        derivative(tw, tu, k3w, k3u);
        for (int e = 0; e < m; ++e) { tw[e] = w[e] + h * k3w[e]; tu[e] = u[e] + h * k3u[e]; }
        derivative(tw, tu, k4w, k4u);
        bool finite = true;
        double sq_sum = 0.0;
        for (int e = 0; e < m; ++e) {
            w[e] += h / 6.0 * (k1w[e] + 2.0 * k2w[e] + 2.0 * k3w[e] + k4w[e]);
            u[e] += h / 6.0 * (k1u[e] + 2.0 * k2u[e] + 2.0 * k3u[e] + k4u[e]);
            sq_sum += w[e] * w[e];
            if (!std::isfinite(w[e]) || !std::isfinite(u[e])) finite = false;
        }
        // the tracker works on squared weights; their overflow also ends the run
        if (!finite || !std::isfinite(sq_sum)) {
            trace.aborted = true;
            break;
        }
    }
    return trace;
}

/**
 * Baseline that ignores the control channel entirely: integrate w' = A w
 * with U = 0 and re-solve the static problem from scratch (full cold
 * anneal on the squared weights) every dt seconds. Solver time accumulates
 * only over those cold solves, for speedup comparisons against simulate().
 */
inline SimTrace frame_by_frame(const DynamicSystem& sys, double dt) {
    sys.validate();
    if (!(dt > 0.0)) throw ParameterError("dt must be positive");
    SimTrace trace;
    if (sys.horizon == 0.0) return trace;

    const int m = sys.edge_count();
    std::vector<double> w = sys.w0;
    const std::vector<double> u(m, 0.0);

    AnnealConfig cold;
    cold.beta_max = sys.beta_track;
    cold.inner_tol = sys.refresh_tol;
    cold.max_inner_iters = sys.max_refresh_iters;

    AssociationMatrix p;
    double next_solve = 0.0;

    const long long nsteps = std::llround(sys.horizon / sys.step);
    std::vector<double> dw(m), k1(m), k2(m), k3(m), k4(m), tw(m);

    for (long long i = 0; i <= nsteps; ++i) {
        const double t = i * sys.step;
        if (t >= next_solve - 0.5 * sys.step) {
            detail::Clock clk;
            SolveTrace st = anneal(sys.snapshot_squared(w), cold);
            trace.solver_seconds += clk.elapsed();
            trace.solver_sweeps += st.total_sweeps;
            trace.solves += 1;
            p = std::move(st.associations);
            next_solve += dt;
        }
        SimStep s;
        s.t = t;
        s.w = w;
        s.u = u;
        s.control_norm2 = 0.0;
        const std::vector<double> phi_e = detail::edge_separation(p, sys.edges);
        s.energy = energy(sys.edges, w, u, p, sys.mu, sys.beta_track);
        for (int e = 0; e < m; ++e) dw[e] = sys.a_diag[e] * w[e];
        s.drift = cut_drift(phi_e, w, dw);
        s.energy_rate = 0.5 * s.drift;
        HardenResult hr = harden(p);
        s.assignment = std::move(hr.partition.assignment);
        double sq = 0.0;
        for (int e = 0; e < m; ++e)
            if (s.assignment[sys.edges[e].first] != s.assignment[sys.edges[e].second])
                sq += w[e] * w[e];
        s.squared_cut = sq;
        trace.steps.push_back(std::move(s));
        if (i == nsteps) break;

        const double h = sys.step;
        auto f = [&](const std::vector<double>& ws, std::vector<double>& out) {
            for (int e = 0; e < m; ++e) out[e] = sys.a_diag[e] * ws[e];
        };
        f(w, k1);
        for (int e = 0; e < m; ++e) tw[e] = w[e] + 0.5 * h * k1[e];
        f(tw, k2);
        for (int e = 0; e < m; ++e) tw[e] = w[e] + 0.5 * h * k2[e];
        f(tw, k3);
        for (int e = 0; e < m; ++e) tw[e] = w[e] + h * k3[e];
        f(tw, k4);
        bool finite = true;
        double sq_sum = 0.0;
        for (int e = 0; e < m; ++e) {
            w[e] += h / 6.0 * (k1[e] + 2.0 * k2[e] + 2.0 * k3[e] + k4[e]);
            sq_sum += w[e] * w[e];
            if (!std::isfinite(w[e])) finite = false;
        }
        if (!finite || !std::isfinite(sq_sum)) {
            trace.aborted = true;
            break;
        }
    }
    return trace;
}

}  // namespace mwcut

#endif  // MWCUT_DYNAMICS_HPP
