#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mwcut/segmentation.hpp"

using namespace mwcut;

namespace {

// bright disk on a dark field, deterministic per-pixel noise
Image disk_image(int width, int height, double cx, double cy, double radius,
                 int noise = 8) {
    Image img;
    img.width = width;
    img.height = height;
    img.rgb.assign(3u * width * height, 0);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) {
            const bool in = (c - cx) * (c - cx) + (r - cy) * (r - cy) <= radius * radius;
            auto* p = img.pixel(r, c);
            for (int ch = 0; ch < 3; ++ch) {
                const unsigned h = static_cast<unsigned>(r * 73856093u) ^
                                   static_cast<unsigned>(c * 19349663u) ^
                                   static_cast<unsigned>(ch * 83492791u);
                const int n = noise ? static_cast<int>(h % (2 * noise + 1)) - noise : 0;
                p[ch] = static_cast<std::uint8_t>(
                    std::clamp((in ? 205 : 35) + n, 0, 255));
            }
        }
    return img;
}

double mask_error(const std::vector<std::uint8_t>& mask, const BBox& box, double cx,
                  double cy, double radius) {
    int bad = 0;
    for (int r = box.y; r < box.y + box.h; ++r)
        for (int c = box.x; c < box.x + box.w; ++c) {
            const bool in = (c - cx) * (c - cx) + (r - cy) * (r - cy) <= radius * radius;
            const bool got = mask[(r - box.y) * box.w + (c - box.x)] != 0;
            if (in != got) ++bad;
        }
    return static_cast<double>(bad) / (box.w * box.h);
}

}  // namespace

TEST_CASE("pixel graph construction") {
    SUBCASE("uniform image: all neighbor weights are exactly 1") {
        Image img;
        img.width = img.height = 8;
        img.rgb.assign(3u * 64, 120);
        PixelGraph pg = build_pixel_graph(img, BBox{0, 0, 8, 8}, 0.1);
        CHECK(pg.max_neighbor_weight == doctest::Approx(1.0));
        int neighbor_edges = 0;
        for (const Edge& e : pg.graph.edges())
            if (e.from < pg.pixel_count() && e.to < pg.pixel_count()) {
                CHECK(e.weight == doctest::Approx(1.0));
                ++neighbor_edges;
            }
        CHECK(neighbor_edges == 2 * 8 * 7);  // 4-connected grid
        CHECK(pg.graph.n() == 64 + 2);
    }
    SUBCASE("two-tone image: crossing weights collapse to ~0") {
        Image img;
        img.width = 8;
        img.height = 4;
        img.rgb.assign(3u * 32, 0);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 8; ++c) {
                auto* p = img.pixel(r, c);
                p[0] = p[1] = p[2] = c < 4 ? 10 : 245;
            }
        PixelGraph pg = build_pixel_graph(img, BBox{0, 0, 8, 4}, 0.05);
        for (const Edge& e : pg.graph.edges()) {
            if (e.from >= pg.pixel_count() || e.to >= pg.pixel_count()) continue;
            const int ca = e.from % 8, cb = e.to % 8;
            if ((ca < 4) != (cb < 4))
                CHECK(e.weight < 1e-30);
            else
                CHECK(e.weight == doctest::Approx(1.0));
        }
    }
    SUBCASE("bounding box must fit the image") {
        Image img;
        img.width = img.height = 10;
        img.rgb.assign(300, 0);
        CHECK_THROWS_AS(build_pixel_graph(img, BBox{4, 4, 10, 4}, 0.1), BoundsError);
        CHECK_THROWS_AS(build_pixel_graph(img, BBox{-1, 0, 5, 5}, 0.1), BoundsError);
    }
}

TEST_CASE("segmentation on a synthetic disk") {
    // 60x64 box, disk radius 24 centered in the box
    Image img = disk_image(70, 74, 35, 37, 24);
    const BBox box{5, 5, 60, 64};

    SUBCASE("annealed mask matches the ground truth") {
        PixelGraph pg = build_pixel_graph(img, box, 0.1);
        auto mask = segment(pg, 2, SegSolver::kAnneal);
        CHECK(mask_error(mask, box, 35, 37, 24) <= 0.02);
        CHECK(static_cast<int>(mask.size()) == box.w * box.h);
        for (std::uint8_t v : mask) CHECK((v == 0 || v == 255));
    }
    SUBCASE("annealed cut matches the exact max-flow cut") {
        PixelGraph pg = build_pixel_graph(img, box, 0.1);
        PixelGraph pg2 = pg;
        auto mask_anneal = segment(pg, 1, SegSolver::kAnneal);
        auto mask_flow = segment(pg2, 1, SegSolver::kMaxflow);
        const double ca = mask_cut_value(pg, mask_anneal);
        const double cf = mask_cut_value(pg, mask_flow);
        CHECK(ca <= cf * 1.01 + 1e-9);
        CHECK(mask_error(mask_flow, box, 35, 37, 24) <= 0.02);
    }
    SUBCASE("seeded pixels end on their seeded side") {
        PixelGraph pg = build_pixel_graph(img, box, 0.1);
        auto mask = segment(pg, 1, SegSolver::kAnneal);
        // frame pixels are background seeds
        for (int c = 0; c < box.w; ++c) {
            CHECK(mask[c] == 0);
            CHECK(mask[(box.h - 1) * box.w + c] == 0);
        }
        // central quarter rectangle is foreground seeded
        const int cx0 = box.w / 4, cy0 = box.h / 4;
        for (int r = cy0; r < cy0 + box.h / 2; ++r)
            for (int c = cx0; c < cx0 + box.w / 2; ++c)
                CHECK(mask[r * box.w + c] == 255);
    }
    SUBCASE("cut value does not increase over refinement rounds") {
        PixelGraph reference = build_pixel_graph(img, box, 0.1);
        double prev = 1e300;
        for (int rounds = 1; rounds <= 3; ++rounds) {
            PixelGraph pg = build_pixel_graph(img, box, 0.1);
            auto mask = segment(pg, rounds, SegSolver::kAnneal);
            const double cut = mask_cut_value(reference, mask);
            CHECK(cut <= prev + 1e-9);
            prev = cut;
        }
    }
    SUBCASE("rounds below one are rejected") {
        PixelGraph pg = build_pixel_graph(img, box, 0.1);
        CHECK_THROWS_AS(segment(pg, 0), ParameterError);
    }
}

TEST_CASE("ppm round trip") {
    Image img = disk_image(16, 12, 8, 6, 4);
    std::ostringstream out;
    write_ppm(out, img);
    std::istringstream in(out.str());
    Image back = read_ppm(in);
    CHECK(back.width == img.width);
    CHECK(back.height == img.height);
    CHECK(back.rgb == img.rgb);

    std::istringstream bad("P3\n1 1\n255\n0 0 0\n");
    CHECK_THROWS_AS(read_ppm(bad), ParseError);
}

TEST_CASE("pgm write and read back") {
    std::vector<std::uint8_t> gray = {0, 255, 128, 7, 0, 255};
    std::ostringstream out;
    write_pgm(out, 3, 2, gray);
    std::istringstream in(out.str());
    int w = 0, h = 0;
    std::vector<std::uint8_t> back = read_pgm(in, w, h);
    CHECK(w == 3);
    CHECK(h == 2);
    CHECK(back == gray);
}
