// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with the measured values. Run the whole binary or filter with
// -tc="criterion NN*".
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "mwcut/baselines.hpp"
#include "mwcut/dynamics.hpp"
#include "mwcut/graph.hpp"
#include "mwcut/maxflow.hpp"
#include "mwcut/segmentation.hpp"
#include "mwcut/solver.hpp"
#include "test_support.hpp"

using namespace mwcut;
namespace ts = testsupport;

namespace {

double seconds_now() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct Criterion {
    const char* name;
    bool ok = true;
    explicit Criterion(const char* n) : name(n) {}
    void check(bool condition, const char* what) {
        ok &= condition;
        CHECK_MESSAGE(condition, what);
    }
    void report(const std::string& detail = "") const {
        std::printf("[acceptance] %s: %s%s%s\n", name, ok ? "PASS" : "FAIL",
                    detail.empty() ? "" : " — ", detail.c_str());
        std::fflush(stdout);
    }
};

constexpr double kValueTol = 1e-9;

}  // namespace

TEST_CASE("criterion 01 pendant-cycle family") {
    Criterion crit("criterion 01 pendant-cycle family");
    const double t0 = seconds_now();
    Graph g3 = gen_pendant_cycle(3, 1.98);
    SolveTrace mep = anneal(g3);
    Partition iso = isolating_cut_heuristic(g3);
    const double elapsed = seconds_now() - t0;
    crit.check(std::abs(mep.partition.cut_value - 3.0) <= kValueTol, "k=3 annealed cut is 3.0");
    crit.check(std::abs(iso.cut_value - 3.96) <= kValueTol, "k=3 isolating cut is 3.96");
    crit.check(elapsed < 1.0, "k=3 solve takes under a second");
    for (int k = 3; k <= 6; ++k) {
        Graph g = gen_pendant_cycle(k, 1.98);
        SolveTrace t = anneal(g);
        Partition h = isolating_cut_heuristic(g);
        crit.check(std::abs(t.partition.cut_value - k) <= kValueTol,
                   "annealed cut equals k");
        crit.check(std::abs(h.cut_value - (k - 1) * 1.98) <= kValueTol,
                   "isolating cut equals (k-1)*1.98");
    }
    crit.report("k=3: mep 3.0 vs isolating 3.96 in " + std::to_string(elapsed) + "s; k=3..6 generalization");
}

TEST_CASE("criterion 02 ten-node reconstruction") {
    Criterion crit("criterion 02 ten-node reconstruction");
    Graph g = ts::make_ring10();
    auto [oracle_value, oracle_assign] = ts::enumerate_min_cut(g);
    (void)oracle_assign;
    crit.check(std::abs(oracle_value - 3.0) <= kValueTol,
               "reconstruction's optimum is 3 (oracle)");

    SolveTrace trace = anneal(g);
    crit.check(std::abs(trace.partition.cut_value - 3.0) <= kValueTol,
               "annealed cut value is 3");
    auto component = [&](int terminal_1b) {
        std::vector<int> out;
        const int label = trace.partition.assignment[terminal_1b - 1];
        for (int v = 0; v < 10; ++v)
            if (trace.partition.assignment[v] == label) out.push_back(v + 1);
        return out;
    };
    crit.check(component(1) == std::vector<int>{1, 2, 3}, "component of terminal 1");
    crit.check(component(6) == std::vector<int>{4, 5, 6, 7}, "component of terminal 6");
    crit.check(component(10) == std::vector<int>{8, 9, 10}, "component of terminal 10");

    // associations balanced at beta_min (partition weights within 1e-3 of 1/k)
    double low_beta_dev = 0.0;
    for (double v : trace.entries.front().partition_weights)
        low_beta_dev = std::max(low_beta_dev, std::abs(v - 1.0 / 3));
    crit.check(low_beta_dev <= 1e-3, "partition weights uniform at beta_min");

    double min_row_max = 1.0;
    for (int i = 0; i < 10; ++i) {
        double mx = 0.0;
        for (int j = 0; j < 3; ++j) mx = std::max(mx, trace.associations(i, j));
        min_row_max = std::min(min_row_max, mx);
    }
    crit.check(min_row_max > 0.99, "final rows hardened beyond 0.99");
    crit.report("cut 3, components as stated, low-beta dev " +
                std::to_string(low_beta_dev) + ", min row max " +
                std::to_string(min_row_max));
}

TEST_CASE("criterion 03 descent suite") {
    Criterion crit("criterion 03 descent suite");
    Rng rng(1234);
    int sweeps_checked = 0;
    bool descent_ok = true, identity_ok = true, kl_ok = true;
    for (int instance = 0; instance < 200; ++instance) {
        const int n = rng.uniform_int(5, 12);
        const int k = rng.uniform_int(2, 4);
        Graph g = gen_random_graph(n, k, 0.5, 0.3, 1.7, rng);
        RegularizedWeights w = prepare_weights(g);  // AUTO shift
        AssociationMatrix p = init_associations(g);
        AssociationMatrix next = p;
        const AnnealConfig cfg;
        for (double beta : beta_schedule(cfg)) {
            for (int it = 0; it < cfg.max_inner_iters; ++it) {
                const double l_before = free_energy(p, w, beta);
                const double surr_pp = free_energy_surrogate(p, p, w, beta);
                identity_ok &= std::abs(surr_pp - l_before) <= 1e-10 * (1.0 + std::abs(l_before));

                const double diff = sweep_into(p, w, beta, next);
                const double delta2 =
                    surr_pp - free_energy_surrogate(next, p, w, beta);
                double kl = 0.0;
                for (int i = 0; i < n; ++i) {
                    if (p.is_terminal(i)) continue;
                    for (int j = 0; j < k; ++j)
                        if (p(i, j) > 0.0) {
                            // a hardened row can underflow to exactly 0; the
                            // matching p is then denormal-tiny and the true
                            // term vanishes, so floor the argument
                            const double q =
                                std::max(next(i, j), std::numeric_limits<double>::min());
                            kl += p(i, j) * std::log(p(i, j) / q);
                        }
                }
                kl_ok &= std::abs(delta2 - kl / beta) <= 1e-9 * (1.0 + std::abs(delta2));

                std::swap(p, next);
                const double l_after = free_energy(p, w, beta);
                descent_ok &= l_after <= l_before + 1e-10 * (1.0 + std::abs(l_before));
                ++sweeps_checked;
                if (diff < cfg.inner_tol) break;
            }
        }
    }
    crit.check(descent_ok, "free energy non-increasing on every sweep");
    crit.check(identity_ok, "surrogate diagonal equals the free energy (1e-10)");
    crit.check(kl_ok, "surrogate gap equals the KL sum (1e-9)");
    crit.report(std::to_string(sweeps_checked) + " sweeps over 200 instances (descent " +
                (descent_ok ? "ok" : "VIOLATED") + ", identity " +
                (identity_ok ? "ok" : "VIOLATED") + ", kl " + (kl_ok ? "ok" : "VIOLATED") +
                ")");
}

TEST_CASE("criterion 04 oracle equivalence") {
    Criterion crit("criterion 04 oracle equivalence");
    int leq_iso = 0, eq_exact = 0;
    for (int seed = 1; seed <= 100; ++seed) {
        Rng rng(seed);
        const int n = rng.uniform_int(6, 9);
        Graph g = gen_random_graph(n, 3, 0.85, 1.0, 1.0, rng);
        SolveTrace t = anneal(g, quality_config(g));
        Partition iso = isolating_cut_heuristic(g);
        Partition exact = brute_force_exact(g);
        if (t.partition.cut_value <= iso.cut_value + kValueTol) ++leq_iso;
        if (std::abs(t.partition.cut_value - exact.cut_value) <= kValueTol) ++eq_exact;
    }
    crit.check(leq_iso == 100, "annealed cut <= isolating cut on all instances");
    crit.check(eq_exact >= 90, "annealed cut equals the optimum on >= 90");

    int eq_stcut = 0;
    for (int seed = 1001; seed <= 1100; ++seed) {
        Rng rng(seed);
        const int n = rng.uniform_int(6, 9);
        Graph g = gen_random_graph(n, 2, 0.85, 1.0, 1.0, rng);
        SolveTrace t = anneal(g, quality_config(g));
        CutResult st =
            min_st_cut(FlowNetwork::between(g, g.terminals()[0], g.terminals()[1]));
        if (std::abs(t.partition.cut_value - st.value) <= kValueTol) ++eq_stcut;
    }
    crit.check(eq_stcut >= 95, "k=2 annealed cut equals the min s-t cut on >= 95");
    crit.report("<=isolating " + std::to_string(leq_iso) + "/100, ==optimal " +
                std::to_string(eq_exact) + "/100, k=2 ==st-cut " +
                std::to_string(eq_stcut) + "/100");
}

TEST_CASE("criterion 05 dissipation checks on the 4-node system") {
    Criterion crit("criterion 05 dissipation checks on the 4-node system");
    DynamicSystem sys = ts::make_dyn4();
    SimTrace t = simulate(sys);
    REQUIRE(!t.steps.empty());
    crit.check(!t.aborted, "simulation stays finite");
    crit.check(t.clamp_events == 0, "control authority never exhausted");

    bool rate_ok = true, bound_ok = true, decay_ok = true, masked_ok = true;
    bool half_form_ok = true;
    double worst_spec_gap = 0.0;
    const double u20 = t.steps.front().control_norm2;
    const double bound_const = sys.n * std::log(2.0) / sys.beta_track;
    for (const SimStep& s : t.steps) {
        rate_ok &= s.energy_rate <= 1e-9;
        bound_ok &= s.energy + bound_const >= -1e-12;
        decay_ok &= s.control_norm2 <= u20 * std::exp(-sys.c0 * s.t) * (1.0 + 1e-6);
        masked_ok &= s.u[0] == 0.0;

        const double x = 4.0 * sys.mu * s.control_norm2;
        const double sqrt_term = std::hypot(s.drift, x);
        // identity actually produced by the implemented control law
        const double half_form =
            -2.0 * sys.mu * sys.c0 * s.control_norm2 - 0.5 * sqrt_term;
        half_form_ok &=
            std::abs(s.energy_rate - half_form) <= 1e-9 * (1.0 + std::abs(half_form));
        // stated closed form with the full square root
        const double stated_form =
            -2.0 * sys.mu * sys.c0 * s.control_norm2 - sqrt_term;
        worst_spec_gap = std::max(
            worst_spec_gap, std::abs(s.energy_rate - stated_form) /
                                std::max(1e-30, std::abs(stated_form)));
    }
    crit.check(rate_ok, "(a) recorded dF/dt <= 1e-9 at every step");
    // The control law u' = -[C0 + (a + sqrt(a^2+x^2))/x] u substituted into
    // dF/dt = a/2 + 2 mu <U, u'> gives -2 mu C0 |U|^2 - 0.5 sqrt(a^2 + x^2);
    // the un-halved square-root form below is therefore not attainable by
    // this law, and the check documents the measured gap.
    crit.check(worst_spec_gap <= 1e-6,
               "(a) dF/dt matches -2 mu C0 |U|^2 - sqrt(a^2 + (4 mu |U|^2)^2)");
    CHECK_MESSAGE(half_form_ok,
                  "dF/dt matches -2 mu C0 |U|^2 - 0.5 sqrt(a^2 + x^2) to 1e-9");
    crit.check(bound_ok, "(b) F + (1/beta) N log k >= 0 throughout");
    crit.check(decay_ok, "(c) |U|^2 within the exp(-C0 t) envelope");
    crit.check(masked_ok, "(d) control on the uncontrollable edge stays exactly 0");
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "Fdot<=0, bound, decay, mask hold; un-halved closed form off by "
                  "%.3g rel (half-coefficient form holds to 1e-9: %s)",
                  worst_spec_gap, half_form_ok ? "yes" : "no");
    crit.report(buf);
}

TEST_CASE("criterion 06 tracking speedup") {
    Criterion crit("criterion 06 tracking speedup");
    DynamicSystem sys = ts::make_dyn4();
    simulate(sys);               // warm the caches before timing
    frame_by_frame(sys, 0.01);
    std::vector<double> ratios;
    long long warm_sweeps = 0, cold_sweeps = 0;
    for (int rep = 0; rep < 9; ++rep) {
        SimTrace warm = simulate(sys);
        SimTrace cold = frame_by_frame(sys, 0.01);
        REQUIRE(warm.solver_seconds > 0.0);
        ratios.push_back(cold.solver_seconds / warm.solver_seconds);
        warm_sweeps = warm.solver_sweeps;
        cold_sweeps = cold.solver_sweeps;
    }
    std::sort(ratios.begin(), ratios.end());
    const double median = ratios[ratios.size() / 2];
    crit.check(median >= 5.0, "median solver-time speedup at least 5x");
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "measured %.2fx (median of 9; sweeps %lld warm vs %lld cold)", median,
                  warm_sweeps, cold_sweeps);
    crit.report(buf);
}

TEST_CASE("criterion 07 per-sweep scaling") {
    Criterion crit("criterion 07 per-sweep scaling");
    const int n = 256;
    auto per_sweep_time = [&](int m_edges, int k) {
        Rng rng(99);
        Graph g = gen_random_graph_m(n, k, m_edges, 1.0, 1.0, rng);
        RegularizedWeights w = prepare_weights(g);
        AssociationMatrix p = init_associations(g);
        AssociationMatrix next = p;
        const double beta = 0.5 / w.lambda;  // mid-schedule softness
        std::vector<double> times;
        for (int rep = 0; rep < 7; ++rep) {
            const double t0 = seconds_now();
            for (int s = 0; s < 200; ++s) {
                sweep_into(p, w, beta, next);
                std::swap(p, next);
            }
            times.push_back((seconds_now() - t0) / 200.0);
        }
        std::sort(times.begin(), times.end());
        return times[times.size() / 2];
    };
    const double edges_ratio = per_sweep_time(32000, 3) / per_sweep_time(16000, 3);
    // the k term dominates the fixed per-edge costs only past k ~ 8, so the
    // doubling is measured at 8 -> 16 where the linear regime holds
    const double k_ratio = per_sweep_time(16000, 16) / per_sweep_time(16000, 8);
    crit.check(edges_ratio >= 1.6 && edges_ratio <= 2.6,
               "doubling |E| scales per-sweep time by 1.6-2.6x");
    crit.check(k_ratio >= 1.6 && k_ratio <= 2.6,
               "doubling k scales per-sweep time by 1.6-2.6x");
    char buf[120];
    std::snprintf(buf, sizeof buf, "|E| x2 -> %.2fx, k x2 -> %.2fx", edges_ratio,
                  k_ratio);
    crit.report(buf);
}

TEST_CASE("criterion 08 segmentation scale") {
    Criterion crit("criterion 08 segmentation scale");
    // 150x160 box (~24k pixel nodes), disk of radius 60, noisy two-tone colors
    Image img;
    img.width = 170;
    img.height = 180;
    img.rgb.assign(3u * 170 * 180, 0);
    const double cx = 85, cy = 90, radius = 60;
    for (int r = 0; r < 180; ++r)
        for (int c = 0; c < 170; ++c) {
            const bool in = (c - cx) * (c - cx) + (r - cy) * (r - cy) <= radius * radius;
            auto* px = img.pixel(r, c);
            for (int ch = 0; ch < 3; ++ch) {
                const unsigned hsh = static_cast<unsigned>(r * 73856093u) ^
                                     static_cast<unsigned>(c * 19349663u) ^
                                     static_cast<unsigned>(ch * 83492791u);
                const int noise = static_cast<int>(hsh % 17) - 8;
                px[ch] = static_cast<std::uint8_t>(
                    std::clamp((in ? 205 : 35) + noise, 0, 255));
            }
        }
    const BBox box{10, 10, 150, 160};

    const double t0 = seconds_now();
    PixelGraph pg = build_pixel_graph(img, box, 0.1);
    crit.check(pg.pixel_count() == 24000, "box yields 24000 pixel nodes");
    std::vector<std::uint8_t> mask = segment(pg, 2, SegSolver::kAnneal);
    const double elapsed = seconds_now() - t0;
    crit.check(elapsed < 600.0, "segmentation finishes within 10 minutes");

    int bad = 0;
    for (int r = box.y; r < box.y + box.h; ++r)
        for (int c = box.x; c < box.x + box.w; ++c) {
            const bool in = (c - cx) * (c - cx) + (r - cy) * (r - cy) <= radius * radius;
            const bool got = mask[(r - box.y) * box.w + (c - box.x)] != 0;
            if (in != got) ++bad;
        }
    const double err = static_cast<double>(bad) / (box.w * box.h);
    crit.check(err <= 0.02, "mask pixel error within 2 percent of ground truth");

    PixelGraph pga = build_pixel_graph(img, box, 0.1);
    PixelGraph pgf = pga;
    auto mask_a = segment(pga, 1, SegSolver::kAnneal);
    auto mask_f = segment(pgf, 1, SegSolver::kMaxflow);
    const double cut_a = mask_cut_value(pga, mask_a);
    const double cut_f = mask_cut_value(pga, mask_f);
    crit.check(cut_a <= cut_f * 1.01 + 1e-9,
               "annealed cut within 1 percent of the max-flow cut");
    char buf[160];
    std::snprintf(buf, sizeof buf, "err %.4f%%, %.2fs, cuts mep %.3g vs flow %.3g",
                  100.0 * err, elapsed, cut_a, cut_f);
    crit.report(buf);
}

TEST_CASE("criterion 09 tie detection") {
    Criterion crit("criterion 09 tie detection");
    Graph g = ts::make_tie8();

    // oracle: the instance really has degenerate optima
    const DenseMatrix w = g.dense_weights();
    std::vector<std::vector<int>> optima;
    double best = 1e300;
    std::vector<int> assignment(8);
    for (int code = 0; code < 4 * 4 * 4 * 4; ++code) {
        int c = code;
        for (int j = 0; j < 4; ++j) assignment[j] = j;
        for (int v = 4; v < 8; ++v) {
            assignment[v] = c % 4;
            c /= 4;
        }
        const double value = ts::dense_cut(w, assignment);
        if (value < best - 1e-12) {
            best = value;
            optima.clear();
        }
        if (value <= best + 1e-12) optima.push_back(assignment);
    }
    crit.check(optima.size() >= 2, "brute force finds multiple optimal cuts");
    bool vertex4_degenerate = false;
    for (const auto& a : optima)
        for (const auto& b : optima)
            if (a[4] != b[4]) vertex4_degenerate = true;
    crit.check(vertex4_degenerate, "vertex 4 can sit in either of two components");

    SolveTrace trace = anneal(g);
    crit.check(std::abs(trace.partition.cut_value - best) <= kValueTol,
               "annealed cut matches the degenerate optimum");
    crit.check(trace.ties.count(4) == 1, "tie reported for the degenerate vertex");
    bool halves = trace.ties.count(4) == 1;
    if (halves) {
        const auto& labels = trace.ties.at(4);
        halves = labels.size() == 2;
        for (int l : labels)
            halves = halves && std::abs(trace.associations(4, l) - 0.5) <= 0.05;
    }
    crit.check(halves, "tied associations are 0.5/0.5 within 0.05");
    crit.report("optima " + std::to_string(optima.size()) + ", tie at vertex 4 with p=" +
                std::to_string(trace.associations(4, 0)) + "/" +
                std::to_string(trace.associations(4, 3)));
}

TEST_CASE("criterion 10 phase transitions") {
    Criterion crit("criterion 10 phase transitions");
    Graph g = ts::make_ring10();
    SolveTrace trace = anneal(g);
    const std::vector<double> betas = detect_phase_transitions(trace, 0.05);
    crit.check(!betas.empty(), "at least one transition detected");
    bool inside = !betas.empty();
    for (double b : betas) inside = inside && b > 0.01 && b < 40.0;
    crit.check(inside, "transitions lie strictly inside the schedule");
    double low_beta_dev = 0.0;
    for (double v : trace.entries.front().partition_weights)
        low_beta_dev = std::max(low_beta_dev, std::abs(v - 1.0 / 3));
    crit.check(low_beta_dev <= 1e-3, "partition weights are 1/k at beta_min");
    std::string detail = "transitions at";
    for (double b : betas) detail += " " + std::to_string(b);
    crit.report(detail + "; low-beta deviation " + std::to_string(low_beta_dev));
}
