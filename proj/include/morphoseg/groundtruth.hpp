#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "morphoseg/baseline_cc.hpp"
#include "morphoseg/image.hpp"
#include "morphoseg/morpho_filters.hpp"

namespace morphoseg {

struct Vertex {
    long x;
    long y;
    friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

using Polyline = std::vector<Vertex>;

struct PolylineSet {
    std::vector<Polyline> polylines;
    std::size_t width;
    std::size_t height;
};

/// Throws unless every polyline has at least two in-bounds vertices.
inline void validate(const PolylineSet& ps) {
    if (ps.width == 0 || ps.height == 0)
        throw precondition_error("polyline set: image dimensions must be at least 1x1");
    for (std::size_t i = 0; i < ps.polylines.size(); ++i) {
        const auto& line = ps.polylines[i];
        if (line.size() < 2)
            throw precondition_error("polyline " + std::to_string(i) + " has fewer than 2 vertices");
        for (const auto& v : line)
            if (v.x < 0 || v.y < 0 || v.x >= static_cast<long>(ps.width) ||
                v.y >= static_cast<long>(ps.height))
                throw precondition_error("polyline " + std::to_string(i) + ": vertex (" +
                                         std::to_string(v.x) + "," + std::to_string(v.y) +
                                         ") out of bounds");
    }
}

/// Parses the annotation text format: one polyline per line, vertices as
/// `x,y` separated by whitespace, '#' starts a comment line.
inline PolylineSet parse_polylines(std::istream& in, std::size_t width, std::size_t height) {
    PolylineSet ps{{}, width, height};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream tokens(line);
        std::string tok;
        Polyline poly;
        while (tokens >> tok) {
            long x = 0, y = 0;
            char trailing = 0;
            if (std::sscanf(tok.c_str(), "%ld,%ld%c", &x, &y, &trailing) != 2)
                throw format_error("polyline line " + std::to_string(line_no) +
                                   ": bad vertex '" + tok + "'");
            poly.push_back({x, y});
        }
        ps.polylines.push_back(std::move(poly));
    }
    validate(ps);
    return ps;
}

inline PolylineSet read_polylines(const std::string& path, std::size_t width, std::size_t height) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "' for reading");
    return parse_polylines(in, width, height);
}

/// Pixels of the 8-connected digital segment between a and b. Endpoints are
/// put in lexicographic order first, so the pixel set does not depend on the
/// drawing direction.
inline std::vector<Vertex> segment_pixels(Vertex a, Vertex b) {
    if (b < a) std::swap(a, b);
    const long dx = std::labs(b.x - a.x);
    const long dy = -std::labs(b.y - a.y);
    const long sx = a.x < b.x ? 1 : -1;
    const long sy = a.y < b.y ? 1 : -1;
    long err = dx + dy;
    std::vector<Vertex> out;
    out.reserve(static_cast<std::size_t>(std::max(dx, -dy) + 1));
    for (Vertex p = a;;) {
        out.push_back(p);
        if (p == b) break;
        const long e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            p.x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            p.y += sy;
        }
    }
    return out;
}

inline BinaryImage rasterize_polylines(const PolylineSet& ps) {
    validate(ps);
    BinaryImage out(ps.width, ps.height, 0);
    for (const auto& line : ps.polylines)
        for (std::size_t i = 0; i + 1 < line.size(); ++i)
            for (const auto& p : segment_pixels(line[i], line[i + 1]))
                out(static_cast<std::size_t>(p.x), static_cast<std::size_t>(p.y)) = 1;
    return out;
}

/// Reference edge map: strokes thickened to 3 pixels.
inline BinaryImage make_edge_gt(const PolylineSet& ps) {
    return dilate_square(rasterize_polylines(ps), 1);
}

/// Reference shapes: 4-connected components of the non-edge pixels.
inline LabelMap make_label_gt(const BinaryImage& edges) {
    BinaryImage interior(edges.width(), edges.height(), 0);
    for (std::size_t i = 0; i < edges.size(); ++i) interior[i] = edges[i] ? 0 : 1;
    return label_components(interior, Connectivity::four);
}

/// Half-open row interval [start, end).
struct RowBand {
    std::size_t start;
    std::size_t end;
    std::size_t height() const { return end - start; }
    friend bool operator==(const RowBand&, const RowBand&) = default;
};

struct SplitSpec {
    RowBand train{0, 4000};
    RowBand validation{4000, 5000};
    RowBand test{5000, 6500};
    std::size_t tile_size = 500;
};

struct TileOrigin {
    std::size_t row;
    std::size_t col;
    std::size_t width;
    std::size_t height;
    friend bool operator==(const TileOrigin&, const TileOrigin&) = default;
};

struct BandTiles {
    RowBand band;
    std::vector<TileOrigin> tiles;
    std::size_t full_tiles = 0;
};

struct Split {
    BandTiles train;
    BandTiles validation;
    BandTiles test;
};

/// Tiles covering a band row-major; tiles cut by the right or bottom edge are
/// kept with their reduced size.
inline BandTiles tile_band(RowBand band, std::size_t image_width, std::size_t tile_size) {
    BandTiles out{band, {}, 0};
    for (std::size_t r = band.start; r < band.end; r += tile_size)
        for (std::size_t c = 0; c < image_width; c += tile_size) {
            const TileOrigin t{r, c, std::min(tile_size, image_width - c),
                               std::min(tile_size, band.end - r)};
            if (t.width == tile_size && t.height == tile_size) ++out.full_tiles;
            out.tiles.push_back(t);
        }
    return out;
}

inline Split split_rows(std::size_t image_width, std::size_t image_height,
                        const SplitSpec& spec = {}) {
    if (spec.tile_size == 0) throw precondition_error("split_rows: tile size must be positive");
    const RowBand bands[] = {spec.train, spec.validation, spec.test};
    for (const auto& b : bands) {
        if (b.start >= b.end)
            throw precondition_error("split_rows: empty band [" + std::to_string(b.start) + ", " +
                                     std::to_string(b.end) + ")");
        if (b.end > image_height)
            throw precondition_error("split_rows: band end " + std::to_string(b.end) +
                                     " exceeds image height " + std::to_string(image_height));
    }
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (bands[i].start < bands[j].end && bands[j].start < bands[i].end)
                throw precondition_error("split_rows: overlapping bands");
    if (!(spec.train.end <= spec.validation.start && spec.validation.end <= spec.test.start))
        throw precondition_error("split_rows: bands must be ordered train, validation, test");
    return {tile_band(spec.train, image_width, spec.tile_size),
            tile_band(spec.validation, image_width, spec.tile_size),
            tile_band(spec.test, image_width, spec.tile_size)};
}

/// `tile_r{row}_c{col}.pgm` with 5-digit zero-padded pixel origins.
inline std::string tile_name(const TileOrigin& t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "tile_r%05zu_c%05zu.pgm", t.row, t.col);
    return buf;
}

inline GrayImage crop(const GrayImage& img, const TileOrigin& t) {
    if (t.col + t.width > img.width() || t.row + t.height > img.height())
        throw precondition_error("crop: tile exceeds image bounds");
    GrayImage out(t.width, t.height, 0);
    for (std::size_t y = 0; y < t.height; ++y)
        for (std::size_t x = 0; x < t.width; ++x) out(x, y) = img(t.col + x, t.row + y);
    return out;
}

} // namespace morphoseg
