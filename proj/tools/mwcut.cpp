// Command-line front end: solve / compare / dynamic / segment / bench / gen.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mwcut/baselines.hpp"
#include "mwcut/dynamics.hpp"
#include "mwcut/graph.hpp"
#include "mwcut/io.hpp"
#include "mwcut/maxflow.hpp"
#include "mwcut/segmentation.hpp"
#include "mwcut/solver.hpp"

namespace {

using namespace mwcut;
namespace fs = std::filesystem;

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

struct SolverOpts {
    double beta_min = 0.01;
    double beta_max = 40.0;
    double gamma = 0.0;       // 0 = derive from the beta range
    double tol = 1e-6;
    int max_inner = 500;
    std::string lambda = "auto";  // "auto" | "row" | explicit number
    double tie_tol = 1e-3;
    bool quality = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--beta-min", beta_min, "initial annealing parameter");
        cmd->add_option("--beta-max", beta_max, "final annealing parameter");
        cmd->add_option("--gamma", gamma, "geometric growth rate (0 = auto)");
        cmd->add_option("--tol", tol, "fixed-point convergence tolerance");
        cmd->add_option("--max-inner", max_inner, "inner iteration cap per beta");
        cmd->add_option("--lambda", lambda, "diagonal shift: auto, row, or a number");
        cmd->add_option("--tie-tol", tie_tol, "tie reporting tolerance");
        cmd->add_flag("--quality", quality,
                      "slow schedule + row-bound shift tuned for solution quality");
    }

    AnnealConfig config(const Graph& g) const {
        AnnealConfig cfg = quality ? quality_config(g) : AnnealConfig{};
        cfg.beta_min = beta_min;
        cfg.beta_max = beta_max;
        if (gamma > 0.0) cfg.gamma = gamma;
        if (!quality) {
            cfg.inner_tol = tol;
            cfg.max_inner_iters = max_inner;
        }
        cfg.tie_tol = tie_tol;
        if (lambda == "row")
            cfg.lambda = gershgorin_lambda(g);
        else if (lambda != "auto")
            cfg.lambda = std::stod(lambda);
        return cfg;
    }
};

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path.string());
    f << contents;
}

void print_partition(const Graph& g, const Partition& p,
                     const std::map<int, std::vector<int>>& ties) {
    std::printf("cut value: %.12g\n", p.cut_value);
    for (int j = 0; j < g.k(); ++j) {
        std::printf("component %d (terminal %d):", j, g.terminals()[j] + 1);
        for (int v = 0; v < g.n(); ++v)
            if (p.assignment[v] == j) std::printf(" %d", v + 1);
        std::printf("\n");
    }
    for (const auto& [v, labels] : ties) {
        std::printf("tie at vertex %d, admissible components:", v + 1);
        for (int l : labels) std::printf(" %d", l);
        std::printf("\n");
    }
}

int cmd_solve(const std::string& input, const SolverOpts& opts, bool exact,
              const std::string& out_dir) {
    Graph g = load_graph(input);
    fs::create_directories(out_dir);
    if (exact) {
        Partition p = brute_force_exact(g);
        print_partition(g, p, {});
        write_file(fs::path(out_dir) / "partition.json",
                   partition_to_json(p, {}).dump(2) + "\n");
        return 0;
    }
    SolveTrace trace = anneal(g, opts.config(g));
    print_partition(g, trace.partition, trace.ties);
    std::vector<double> transitions = detect_phase_transitions(trace);
    if (!transitions.empty()) {
        std::printf("phase transitions at beta:");
        for (double b : transitions) std::printf(" %.6g", b);
        std::printf("\n");
    }
    if (trace.unconverged_steps > 0)
        std::printf("warning: %d outer steps hit the inner iteration cap\n",
                    trace.unconverged_steps);
    std::ostringstream csv;
    write_trace_csv(csv, trace);
    write_file(fs::path(out_dir) / "trace.csv", csv.str());
    write_file(fs::path(out_dir) / "partition.json",
               partition_to_json(trace.partition, trace.ties).dump(2) + "\n");
    write_file(fs::path(out_dir) / "associations.json",
               associations_to_json(trace.associations).dump() + "\n");
    return 0;
}

int cmd_compare(const std::vector<std::string>& instances, int pendant_k,
                double pendant_weight, int random_count, int random_n, int random_k,
                double random_p, std::uint64_t seed, double budget,
                const SolverOpts& opts, const std::string& out_dir) {
    struct Row {
        std::string id;
        Graph g;
    };
    std::vector<Row> rows;
    for (const std::string& path : instances)
        rows.push_back({fs::path(path).filename().string(), load_graph(path)});
    if (pendant_k > 0)
        rows.push_back({"pendant-k" + std::to_string(pendant_k),
                        gen_pendant_cycle(pendant_k, pendant_weight)});
    Rng rng(seed);
    for (int i = 0; i < random_count; ++i)
        rows.push_back({"random-" + std::to_string(seed) + "-" + std::to_string(i),
                        gen_random_graph(random_n, random_k, random_p, 1.0, 1.0, rng)});
    if (rows.empty()) throw ParameterError("nothing to compare; pass instances or generators");

    std::ostringstream csv;
    csv << "instance,n,k,mep,isolating,exact,mep_over_exact,isolating_over_exact,"
           "mep_seconds,isolating_seconds,exact_seconds\n";
    for (const Row& row : rows) {
        const Graph& g = row.g;
        double t0 = now_seconds();
        SolveTrace trace = anneal(g, opts.config(g));
        double t_mep = now_seconds() - t0;
        t0 = now_seconds();
        Partition iso = isolating_cut_heuristic(g);
        double t_iso = now_seconds() - t0;
        std::string exact_s, ratio_mep, ratio_iso, exact_t;
        t0 = now_seconds();
        try {
            Partition ex = brute_force_exact(g, budget);
            exact_s = detail::fmt(ex.cut_value);
            if (ex.cut_value > 0.0) {
                ratio_mep = detail::fmt(trace.partition.cut_value / ex.cut_value);
                ratio_iso = detail::fmt(iso.cut_value / ex.cut_value);
            }
            exact_t = detail::fmt(now_seconds() - t0);
        } catch (const BudgetError&) {
            // leave the exact columns blank
        }
        csv << row.id << "," << g.n() << "," << g.k() << ","
            << detail::fmt(trace.partition.cut_value) << "," << detail::fmt(iso.cut_value)
            << "," << exact_s << "," << ratio_mep << "," << ratio_iso << ","
            << detail::fmt(t_mep) << "," << detail::fmt(t_iso) << "," << exact_t << "\n";
        std::printf("%-20s n=%-3d k=%-2d mep=%-10.6g iso=%-10.6g exact=%s\n",
                    row.id.c_str(), g.n(), g.k(), trace.partition.cut_value,
                    iso.cut_value, exact_s.empty() ? "-" : exact_s.c_str());
    }
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "compare.csv", csv.str());
    return 0;
}

int cmd_dynamic(const std::string& system_path, const std::string& mode, double dt,
                const std::string& out_dir) {
    DynamicSystem sys = load_dynamic_system(system_path);
    fs::create_directories(out_dir);
    const bool run_controlled = mode == "controlled" || mode == "both";
    const bool run_frames = mode == "framebyframe" || mode == "both";
    if (!run_controlled && !run_frames)
        throw ParameterError("mode must be controlled, framebyframe, or both");

    auto summarize = [&](const char* name, const SimTrace& trace) {
        double fmin = 0.0, fmax = 0.0;
        int violations = 0;
        for (std::size_t i = 0; i < trace.steps.size(); ++i) {
            const double F = trace.steps[i].energy;
            if (i == 0) fmin = fmax = F;
            fmin = std::min(fmin, F);
            fmax = std::max(fmax, F);
            if (trace.steps[i].energy_rate > 1e-9) ++violations;
        }
        std::printf("%s: steps=%zu F in [%.6g, %.6g] Fdot violations=%d "
                    "solver time=%.6gs sweeps=%lld%s\n",
                    name, trace.steps.size(), fmin, fmax, violations,
                    trace.solver_seconds, trace.solver_sweeps,
                    trace.aborted ? " (aborted: non-finite state)" : "");
    };

    SimTrace controlled, frames;
    if (run_controlled) {
        controlled = simulate(sys);
        summarize("controlled", controlled);
        if (controlled.clamp_events > 0)
            std::printf("warning: control floor hit with positive drift on %d steps; "
                        "no dissipation claim there\n", controlled.clamp_events);
        std::ostringstream csv;
        write_sim_csv(csv, controlled, sys.edge_count());
        write_file(fs::path(out_dir) / "controlled.csv", csv.str());
    }
    if (run_frames) {
        frames = frame_by_frame(sys, dt);
        summarize("framebyframe", frames);
        std::printf("framebyframe cold solves: %d\n", frames.solves);
        std::ostringstream csv;
        write_sim_csv(csv, frames, sys.edge_count());
        write_file(fs::path(out_dir) / "framebyframe.csv", csv.str());
    }
    if (run_controlled && run_frames && controlled.solver_seconds > 0.0)
        std::printf("solver-time speedup (framebyframe / controlled): %.3g\n",
                    frames.solver_seconds / controlled.solver_seconds);
    return 0;
}

int cmd_segment(const std::string& image_path, const std::string& bbox_s, int rounds,
                const std::string& solver, double sigma, const std::string& out_path) {
    int x, y, w, h;
    if (std::sscanf(bbox_s.c_str(), "%d,%d,%d,%d", &x, &y, &w, &h) != 4)
        throw ParameterError("bbox must be x,y,w,h");
    Image img = read_ppm(image_path);
    PixelGraph pg = build_pixel_graph(img, BBox{x, y, w, h}, sigma);
    SegSolver s;
    if (solver == "mep")
        s = SegSolver::kAnneal;
    else if (solver == "maxflow")
        s = SegSolver::kMaxflow;
    else
        throw ParameterError("solver must be mep or maxflow");
    std::vector<std::uint8_t> mask = segment(pg, rounds, s);
    write_pgm(out_path, w, h, mask);
    int fg = 0;
    for (std::uint8_t v : mask) fg += v != 0;
    std::printf("mask: %dx%d, %d foreground pixels, cut value %.6g\n", w, h, fg,
                mask_cut_value(pg, mask));
    return 0;
}

int cmd_bench(const std::string& sizes_s, int k, double density, std::uint64_t seed,
              const std::string& out_dir) {
    std::vector<int> sizes;
    std::stringstream ss(sizes_s);
    std::string tok;
    while (std::getline(ss, tok, ',')) sizes.push_back(std::stoi(tok));
    if (sizes.empty()) throw ParameterError("need at least one size");

    std::ostringstream csv;
    csv << "n,k,m,n_m_k,anneal_seconds,sweeps,per_sweep_seconds\n";
    Rng rng(seed);
    for (int n : sizes) {
        const int max_pairs = n * (n - 1) / 2;
        const int m = std::max(n, static_cast<int>(density * max_pairs));
        Graph g = gen_random_graph_m(n, k, std::min(m, max_pairs), 1.0, 1.0, rng);
        const double t0 = now_seconds();
        SolveTrace trace = anneal(g);
        const double dt = now_seconds() - t0;
        const double per_sweep =
            trace.total_sweeps > 0 ? dt / static_cast<double>(trace.total_sweeps) : 0.0;
        csv << n << "," << k << "," << g.edges().size() << ","
            << (static_cast<double>(n) * g.edges().size() * k) << "," << detail::fmt(dt)
            << "," << trace.total_sweeps << "," << detail::fmt(per_sweep) << "\n";
        std::printf("n=%-5d m=%-7zu anneal=%.4gs sweeps=%lld per-sweep=%.4gus\n", n,
                    g.edges().size(), dt, trace.total_sweeps, per_sweep * 1e6);
    }
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "bench.csv", csv.str());
    return 0;
}

int cmd_gen(const std::string& family, int n, int k, double p, double pendant_weight,
            double w_lo, double w_hi, std::uint64_t seed, const std::string& out_path) {
    Graph g = [&] {
        if (family == "pendant") return gen_pendant_cycle(k, pendant_weight);
        if (family == "random") {
            Rng rng(seed);
            return gen_random_graph(n, k, p, w_lo, w_hi, rng);
        }
        throw ParameterError("family must be pendant or random");
    }();
    std::ostringstream text;
    write_graph_text(text, g);
    write_file(out_path, text.str());
    std::printf("wrote %s: n=%d k=%d m=%zu\n", out_path.c_str(), g.n(), g.k(),
                g.edges().size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiway k-cut solver toolkit"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "anneal a graph instance");
    std::string solve_input, solve_out = ".";
    bool solve_exact = false;
    SolverOpts solve_opts;
    solve->add_option("input", solve_input, "graph file (text or .json)")->required();
    solve->add_flag("--exact", solve_exact, "exhaustive enumeration instead of annealing");
    solve->add_option("--out", solve_out, "output directory");
    solve_opts.attach(solve);

    // compare
    auto* compare = app.add_subcommand("compare", "solver vs baselines table");
    std::vector<std::string> cmp_instances;
    int cmp_pendant_k = 0, cmp_rand_count = 0, cmp_rand_n = 8, cmp_rand_k = 3;
    double cmp_pendant_w = 1.98, cmp_rand_p = 0.85, cmp_budget = 1e7;
    std::uint64_t cmp_seed = 1;
    std::string cmp_out = ".";
    SolverOpts cmp_opts;
    compare->add_option("--instances", cmp_instances, "graph files");
    compare->add_option("--pendant", cmp_pendant_k, "add a pendant-cycle instance with this k");
    compare->add_option("--pendant-weight", cmp_pendant_w, "pendant edge weight");
    compare->add_option("--random", cmp_rand_count, "add this many random instances");
    compare->add_option("--n", cmp_rand_n, "random instance vertex count");
    compare->add_option("--k", cmp_rand_k, "random instance terminal count");
    compare->add_option("--p", cmp_rand_p, "random instance edge probability");
    compare->add_option("--seed", cmp_seed, "random seed");
    compare->add_option("--budget", cmp_budget, "enumeration budget for the exact column");
    compare->add_option("--out", cmp_out, "output directory");
    cmp_opts.attach(compare);

    // dynamic
    auto* dynamic = app.add_subcommand("dynamic", "simulate edge-weight dynamics");
    std::string dyn_system, dyn_mode = "controlled", dyn_out = ".";
    double dyn_dt = 0.01;
    dynamic->add_option("--system", dyn_system, "system JSON file")->required();
    dynamic->add_option("--mode", dyn_mode, "controlled | framebyframe | both");
    dynamic->add_option("--dt", dyn_dt, "re-solve interval for framebyframe");
    dynamic->add_option("--out", dyn_out, "output directory");

    // segment
    auto* seg = app.add_subcommand("segment", "foreground/background segmentation");
    std::string seg_image, seg_bbox, seg_solver = "mep", seg_out = "mask.pgm";
    int seg_rounds = 2;
    double seg_sigma = 0.1;
    seg->add_option("--image", seg_image, "input PPM (P6)")->required();
    seg->add_option("--bbox", seg_bbox, "bounding box x,y,w,h")->required();
    seg->add_option("--rounds", seg_rounds, "refinement rounds");
    seg->add_option("--solver", seg_solver, "mep | maxflow");
    seg->add_option("--sigma", seg_sigma, "color similarity scale");
    seg->add_option("--out", seg_out, "output mask PGM");

    // bench
    auto* bench = app.add_subcommand("bench", "anneal timing across instance sizes");
    std::string bench_sizes, bench_out = ".";
    int bench_k = 3;
    double bench_density = 1.0;
    std::uint64_t bench_seed = 1;
    bench->add_option("--sizes", bench_sizes, "comma-separated vertex counts")->required();
    bench->add_option("--k", bench_k, "terminal count");
    bench->add_option("--density", bench_density, "fraction of all vertex pairs kept");
    bench->add_option("--seed", bench_seed, "random seed");
    bench->add_option("--out", bench_out, "output directory");

    // gen
    auto* gen = app.add_subcommand("gen", "write a generated instance to a file");
    std::string gen_family, gen_out;
    int gen_n = 8, gen_k = 3;
    double gen_p = 0.85, gen_pw = 1.98, gen_wlo = 1.0, gen_whi = 1.0;
    std::uint64_t gen_seed = 1;
    gen->add_option("--family", gen_family, "pendant | random")->required();
    gen->add_option("--n", gen_n, "vertex count (random)");
    gen->add_option("--k", gen_k, "terminal count");
    gen->add_option("--p", gen_p, "edge probability (random)");
    gen->add_option("--pendant-weight", gen_pw, "pendant edge weight");
    gen->add_option("--w-lo", gen_wlo, "minimum edge weight");
    gen->add_option("--w-hi", gen_whi, "maximum edge weight");
    gen->add_option("--seed", gen_seed, "random seed");
    gen->add_option("--out", gen_out, "output file")->required();

    try {
        app.parse(argc, argv);
        if (*solve) return cmd_solve(solve_input, solve_opts, solve_exact, solve_out);
        if (*compare)
            return cmd_compare(cmp_instances, cmp_pendant_k, cmp_pendant_w, cmp_rand_count,
                               cmp_rand_n, cmp_rand_k, cmp_rand_p, cmp_seed, cmp_budget,
                               cmp_opts, cmp_out);
        if (*dynamic) return cmd_dynamic(dyn_system, dyn_mode, dyn_dt, dyn_out);
        if (*seg)
            return cmd_segment(seg_image, seg_bbox, seg_rounds, seg_solver, seg_sigma,
                               seg_out);
        if (*bench) return cmd_bench(bench_sizes, bench_k, bench_density, bench_seed,
                                     bench_out);
        if (*gen)
            return cmd_gen(gen_family, gen_n, gen_k, gen_p, gen_pw, gen_wlo, gen_whi,
                           gen_seed, gen_out);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const mwcut::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const mwcut::BudgetError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const mwcut::NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
