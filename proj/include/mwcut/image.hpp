#ifndef MWCUT_IMAGE_HPP
#define MWCUT_IMAGE_HPP

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "mwcut/errors.hpp"

namespace mwcut {

/// 8-bit RGB image.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // 3 bytes per pixel, row-major

    const std::uint8_t* pixel(int r, int c) const {
        return rgb.data() + 3 * (static_cast<std::size_t>(r) * width + c);
    }
    std::uint8_t* pixel(int r, int c) {
        return rgb.data() + 3 * (static_cast<std::size_t>(r) * width + c);
    }
};

namespace detail {
inline int read_pnm_token(std::istream& in) {
    // skips whitespace and '#' comments
    while (true) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int value = 0;
    if (!(in >> value)) throw ParseError("bad PNM header token");
    return value;
}
}  // namespace detail

/// Binary PPM (P6, maxval 255).
inline Image read_ppm(std::istream& in) {
    std::string magic(2, '\0');
    in.read(magic.data(), 2);
    if (magic != "P6") throw ParseError("expected binary PPM (P6)");
    Image img;
    img.width = detail::read_pnm_token(in);
    img.height = detail::read_pnm_token(in);
    const int maxval = detail::read_pnm_token(in);
    if (img.width <= 0 || img.height <= 0) throw ParseError("bad PPM dimensions");
    if (maxval != 255) throw ParseError("only maxval 255 PPM supported");
    in.get();  // single whitespace after header
    img.rgb.resize(3 * static_cast<std::size_t>(img.width) * img.height);
    in.read(reinterpret_cast<char*>(img.rgb.data()),
            static_cast<std::streamsize>(img.rgb.size()));
    if (!in) throw ParseError("truncated PPM pixel data");
    return img;
}

inline Image read_ppm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open " + path);
    return read_ppm(f);
}

inline void write_ppm(std::ostream& out, const Image& img) {
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.rgb.data()),
              static_cast<std::streamsize>(img.rgb.size()));
}

inline void write_ppm(const std::string& path, const Image& img) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path);
    write_ppm(f, img);
}

/// Binary PGM (P5, maxval 255).
inline void write_pgm(std::ostream& out, int width, int height,
                      const std::vector<std::uint8_t>& gray) {
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(gray.data()),
              static_cast<std::streamsize>(gray.size()));
}

inline void write_pgm(const std::string& path, int width, int height,
                      const std::vector<std::uint8_t>& gray) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path);
    write_pgm(f, width, height, gray);
}

inline std::vector<std::uint8_t> read_pgm(std::istream& in, int& width, int& height) {
    std::string magic(2, '\0');
    in.read(magic.data(), 2);
    if (magic != "P5") throw ParseError("expected binary PGM (P5)");
    width = detail::read_pnm_token(in);
    height = detail::read_pnm_token(in);
    const int maxval = detail::read_pnm_token(in);
    if (maxval != 255) throw ParseError("only maxval 255 PGM supported");
    in.get();
    std::vector<std::uint8_t> gray(static_cast<std::size_t>(width) * height);
    in.read(reinterpret_cast<char*>(gray.data()),
            static_cast<std::streamsize>(gray.size()));
    if (!in) throw ParseError("truncated PGM pixel data");
    return gray;
}

}  // namespace mwcut

#endif  // MWCUT_IMAGE_HPP
