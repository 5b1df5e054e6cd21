#ifndef MWCUT_SEGMENTATION_HPP
#define MWCUT_SEGMENTATION_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "mwcut/baselines.hpp"
#include "mwcut/errors.hpp"
#include "mwcut/graph.hpp"
#include "mwcut/image.hpp"
#include "mwcut/maxflow.hpp"
#include "mwcut/solver.hpp"

namespace mwcut {

struct BBox {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
};

/**
 * Pixel grid graph over a bounding box: one node per pixel, 4-connected,
 * neighbor weights exp(-|c_l - c_m|^2 / (2 sigma^2)) on RGB triples scaled
 * to [0,1], plus two virtual terminals. The background terminal links to
 * every pixel on the box border, the foreground terminal to a centered
 * seed rectangle of a quarter of the box area; link weight is ten times
 * the largest neighbor weight, so seeds cannot end up on the wrong side.
 */
struct PixelGraph {
    Image image;
    BBox box;
    double sigma = 0.1;
    Graph graph;
    double max_neighbor_weight = 0.0;
    int fg_node = 0;  // terminal label 0
    int bg_node = 0;  // terminal label 1

    int pixel_id(int r, int c) const { return (r - box.y) * box.w + (c - box.x); }
    int pixel_count() const { return box.w * box.h; }
};

namespace detail {

inline double color_weight(const Image& img, int r1, int c1, int r2, int c2,
                           double sigma) {
    const std::uint8_t* a = img.pixel(r1, c1);
    const std::uint8_t* b = img.pixel(r2, c2);
    double d2 = 0.0;
    for (int ch = 0; ch < 3; ++ch) {
        const double d = (static_cast<double>(a[ch]) - b[ch]) / 255.0;
        d2 += d * d;
    }
    return std::exp(-d2 / (2.0 * sigma * sigma));
}

/// Rebuild the graph of a PixelGraph for the given seed masks (1 = seeded).
inline void rebuild_graph(PixelGraph& pg, const std::vector<std::uint8_t>& fg_seed,
                          const std::vector<std::uint8_t>& bg_seed) {
    const BBox& b = pg.box;
    const int npx = pg.pixel_count();
    std::vector<Edge> edges;
    edges.reserve(2 * static_cast<std::size_t>(npx) + npx / 2);
    double wmax = 0.0;
    for (int r = b.y; r < b.y + b.h; ++r) {
        for (int c = b.x; c < b.x + b.w; ++c) {
            const int id = pg.pixel_id(r, c);
            if (c + 1 < b.x + b.w) {
                const double w = color_weight(pg.image, r, c, r, c + 1, pg.sigma);
                wmax = std::max(wmax, w);
                if (w > 0.0) edges.push_back({id, pg.pixel_id(r, c + 1), w});
            }
            if (r + 1 < b.y + b.h) {
                const double w = color_weight(pg.image, r, c, r + 1, c, pg.sigma);
                wmax = std::max(wmax, w);
                if (w > 0.0) edges.push_back({id, pg.pixel_id(r + 1, c), w});
            }
        }
    }
    pg.max_neighbor_weight = wmax;
    const double link = 10.0 * (wmax > 0.0 ? wmax : 1.0);
    pg.fg_node = npx;
    pg.bg_node = npx + 1;
    for (int i = 0; i < npx; ++i) {
        if (fg_seed[i]) edges.push_back({pg.fg_node, i, link});
        if (bg_seed[i]) edges.push_back({pg.bg_node, i, link});
    }
    pg.graph = Graph(npx + 2, std::move(edges), {pg.fg_node, pg.bg_node});
}

inline void initial_seeds(const PixelGraph& pg, std::vector<std::uint8_t>& fg,
                          std::vector<std::uint8_t>& bg) {
    const BBox& b = pg.box;
    fg.assign(pg.pixel_count(), 0);
    bg.assign(pg.pixel_count(), 0);
    for (int r = b.y; r < b.y + b.h; ++r)
        for (int c = b.x; c < b.x + b.w; ++c)
            if (r == b.y || r == b.y + b.h - 1 || c == b.x || c == b.x + b.w - 1)
                bg[pg.pixel_id(r, c)] = 1;
    const int cx = b.x + b.w / 4;
    const int cy = b.y + b.h / 4;
    for (int r = cy; r < cy + b.h / 2; ++r)
        for (int c = cx; c < cx + b.w / 2; ++c) fg[pg.pixel_id(r, c)] = 1;
}

}  // namespace detail

inline PixelGraph build_pixel_graph(const Image& img, const BBox& box,
                                    double sigma = 0.1) {
    if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
    if (box.w < 3 || box.h < 3) throw BoundsError("bounding box too small");
    if (box.x < 0 || box.y < 0 || box.x + box.w > img.width ||
        box.y + box.h > img.height)
        throw BoundsError("bounding box outside image");
    PixelGraph pg;
    pg.image = img;
    pg.box = box;
    pg.sigma = sigma;
    std::vector<std::uint8_t> fg, bg;
    detail::initial_seeds(pg, fg, bg);
    detail::rebuild_graph(pg, fg, bg);
    return pg;
}

enum class SegSolver { kAnneal, kMaxflow };

/// Annealing configuration for pixel graphs. The diagonal shift uses the
/// largest symmetrized row sum instead of the global weight total: on a
/// ~10^4-node grid the global sum is so large that even beta_min would
/// start the schedule past every phase transition. The row bound keeps the
/// shifted matrix positive semidefinite, which is all the per-sweep descent
/// argument needs.
inline AnnealConfig pixel_anneal_config(const Graph& g) {
    AnnealConfig cfg;
    cfg.lambda = gershgorin_lambda(g);
    return cfg;
}

/// Binary foreground mask for one solve of the current pixel graph.
inline std::vector<std::uint8_t> solve_mask(const PixelGraph& pg, SegSolver solver) {
    const int npx = pg.pixel_count();
    std::vector<std::uint8_t> mask(npx, 0);
    if (solver == SegSolver::kMaxflow) {
        CutResult cut = min_st_cut(FlowNetwork::between(pg.graph, pg.fg_node, pg.bg_node));
        for (int v : cut.source_side)
            if (v < npx) mask[v] = 255;
    } else {
        SolveTrace trace = anneal(pg.graph, pixel_anneal_config(pg.graph));
        for (int i = 0; i < npx; ++i)
            if (trace.partition.assignment[i] == 0) mask[i] = 255;
    }
    return mask;
}

/**
 * Iterative foreground/background segmentation: solve the 2-terminal cut,
 * then re-seed the terminals from the current mask (confident interior
 * pixels re-attach to the foreground terminal, everything outside the mask
 * plus the box frame to the background terminal; the mask contour is left
 * free) and solve again. Returns the mask of the final round, one byte per
 * bounding-box pixel, 255 = foreground.
 */
inline std::vector<std::uint8_t> segment(PixelGraph& pg, int rounds,
                                         SegSolver solver = SegSolver::kAnneal) {
    if (rounds < 1) throw ParameterError("rounds must be >= 1");
    std::vector<std::uint8_t> mask;
    for (int round = 0; round < rounds; ++round) {
        if (round > 0) {
            const BBox& b = pg.box;
            std::vector<std::uint8_t> fg(pg.pixel_count(), 0), bg(pg.pixel_count(), 0);
            auto at = [&](int r, int c) -> std::uint8_t {
                return mask[(r - b.y) * b.w + (c - b.x)];
            };
            for (int r = b.y; r < b.y + b.h; ++r) {
                for (int c = b.x; c < b.x + b.w; ++c) {
                    const int id = pg.pixel_id(r, c);
                    const bool frame = r == b.y || r == b.y + b.h - 1 || c == b.x ||
                                       c == b.x + b.w - 1;
                    if (!mask[id] || frame) {
                        if (!mask[id]) bg[id] = 1;
                        if (frame) bg[id] = 1;
                        continue;
                    }
                    bool interior = true;
                    if (r > b.y && !at(r - 1, c)) interior = false;
                    if (r + 1 < b.y + b.h && !at(r + 1, c)) interior = false;
                    if (c > b.x && !at(r, c - 1)) interior = false;
                    if (c + 1 < b.x + b.w && !at(r, c + 1)) interior = false;
                    if (interior) fg[id] = 1;
                }
            }
            detail::rebuild_graph(pg, fg, bg);
        }
        mask = solve_mask(pg, solver);
    }
    return mask;
}

/// Cut value of a mask on the current pixel graph (terminals implied).
inline double mask_cut_value(const PixelGraph& pg, const std::vector<std::uint8_t>& mask) {
    Partition part;
    part.assignment.assign(pg.graph.n(), 1);
    for (int i = 0; i < pg.pixel_count(); ++i)
        if (mask[i]) part.assignment[i] = 0;
    part.assignment[pg.fg_node] = 0;
    part.assignment[pg.bg_node] = 1;
    return cut_value(pg.graph, part);
}

}  // namespace mwcut

#endif  // MWCUT_SEGMENTATION_HPP
