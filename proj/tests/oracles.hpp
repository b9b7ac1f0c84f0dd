#pragma once

// Brute-force reference implementations used only by tests. They follow the
// textbook definitions directly and share no code with the library
// algorithms they check (only the raster containers).

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "morphoseg/connectivity.hpp"
#include "morphoseg/image.hpp"

namespace oracle {

using morphoseg::BinaryImage;
using morphoseg::Connectivity;
using morphoseg::GrayImage;
using morphoseg::LabelMap;

// Row-major neighbor enumeration by explicit offsets.
inline std::vector<std::size_t> neighbors(std::size_t p, std::size_t w, std::size_t h, Connectivity conn) {
    std::vector<std::size_t> out;
    const long x = static_cast<long>(p % w), y = static_cast<long>(p / w);
    for (long dy = -1; dy <= 1; ++dy)
        for (long dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (conn == Connectivity::four && dx != 0 && dy != 0) continue;
            const long nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= static_cast<long>(w) || ny >= static_cast<long>(h)) continue;
            out.push_back(static_cast<std::size_t>(ny) * w + static_cast<std::size_t>(nx));
        }
    return out;
}

/// Iterates out <- max(erode(out), mask) from the marker until stable.
inline GrayImage reconstruct_fixed_point(const GrayImage& marker, const GrayImage& mask, Connectivity conn) {
    GrayImage out = marker;
    for (bool changed = true; changed;) {
        changed = false;
        GrayImage next = out;
        for (std::size_t p = 0; p < out.size(); ++p) {
            std::uint8_t m = out[p];
            for (auto n : neighbors(p, out.width(), out.height(), conn)) m = std::min(m, out[n]);
            next[p] = std::max(m, mask[p]);
            changed |= next[p] != out[p];
        }
        out = next;
    }
    return out;
}

inline GrayImage h_minima(const GrayImage& img, unsigned h, Connectivity conn) {
    GrayImage marker = img;
    for (auto& v : marker) v = static_cast<std::uint8_t>(std::min<unsigned>(255, v + h));
    return reconstruct_fixed_point(marker, img, conn);
}

/// Size of the connected component of {q : img(q) <= level} containing p.
inline std::size_t lower_component_area(const GrayImage& img, std::size_t p, unsigned level, Connectivity conn) {
    std::vector<char> seen(img.size(), 0);
    std::vector<std::size_t> stack{p};
    seen[p] = 1;
    std::size_t area = 0;
    while (!stack.empty()) {
        const auto q = stack.back();
        stack.pop_back();
        ++area;
        for (auto n : neighbors(q, img.width(), img.height(), conn))
            if (!seen[n] && img[n] <= level) {
                seen[n] = 1;
                stack.push_back(n);
            }
    }
    return area;
}

/// Each pixel rises to the first level whose lower-set component through it
/// has area >= lambda (or is the whole image).
inline GrayImage area_closing(const GrayImage& img, unsigned lambda, Connectivity conn) {
    GrayImage out = img;
    for (std::size_t p = 0; p < img.size(); ++p)
        for (unsigned t = img[p]; t <= 255; ++t) {
            const auto a = lower_component_area(img, p, t, conn);
            if (a >= lambda || a == img.size()) {
                out[p] = static_cast<std::uint8_t>(t);
                break;
            }
        }
    return out;
}

/// Regional minima via flat-zone ids found by min-index relaxation.
inline LabelMap regional_minima(const GrayImage& img, Connectivity conn) {
    const auto w = img.width(), h = img.height();
    std::vector<std::size_t> zone(img.size());
    for (std::size_t p = 0; p < zone.size(); ++p) zone[p] = p;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t p = 0; p < zone.size(); ++p)
            for (auto n : neighbors(p, w, h, conn))
                if (img[n] == img[p] && zone[n] < zone[p]) {
                    zone[p] = zone[n];
                    changed = true;
                }
    }
    std::set<std::size_t> not_minimum;
    for (std::size_t p = 0; p < zone.size(); ++p)
        for (auto n : neighbors(p, w, h, conn))
            if (img[n] < img[p]) not_minimum.insert(zone[p]);
    std::map<std::size_t, std::uint32_t> ids;
    LabelMap out(w, h, 0u);
    for (std::size_t p = 0; p < zone.size(); ++p) {
        if (not_minimum.count(zone[p])) continue;
        auto it = ids.find(zone[p]);
        if (it == ids.end()) it = ids.emplace(zone[p], static_cast<std::uint32_t>(ids.size() + 1)).first;
        out[p] = it->second;
    }
    return out;
}

/// Meyer flooding simulated with an explicit list of (priority, arrival,
/// pixel) entries and a linear scan for the minimum entry.
inline LabelMap flood(const GrayImage& img, const LabelMap& seeds, Connectivity conn) {
    const auto w = img.width(), h = img.height();
    // Dense renumbering of the seed labels, order preserved.
    std::map<std::uint32_t, std::uint32_t> rename;
    for (auto v : seeds)
        if (v) rename[v] = 0;
    std::uint32_t k = 0;
    for (auto& [from, to] : rename) to = ++k;
    LabelMap labels(w, h, 0u);
    for (std::size_t p = 0; p < seeds.size(); ++p)
        if (seeds[p]) labels[p] = rename[seeds[p]];

    struct Entry {
        unsigned priority;
        std::size_t arrival;
        std::size_t pixel;
    };
    std::vector<Entry> pending;
    std::vector<char> queued(img.size(), 0);
    std::size_t arrivals = 0;
    for (std::size_t p = 0; p < img.size(); ++p) {
        if (!labels[p]) continue;
        for (auto n : neighbors(p, w, h, conn))
            if (!labels[n] && !queued[n]) {
                queued[n] = 1;
                pending.push_back({std::max<unsigned>(img[p], img[n]), arrivals++, n});
            }
    }
    while (!pending.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < pending.size(); ++i)
            if (pending[i].priority < pending[best].priority ||
                (pending[i].priority == pending[best].priority && pending[i].arrival < pending[best].arrival))
                best = i;
        const Entry e = pending[best];
        pending.erase(pending.begin() + static_cast<long>(best));

        std::set<std::uint32_t> around;
        for (auto n : neighbors(e.pixel, w, h, conn))
            if (labels[n]) around.insert(labels[n]);
        if (around.size() != 1) continue; // watershed line
        labels[e.pixel] = *around.begin();
        for (auto n : neighbors(e.pixel, w, h, conn))
            if (!labels[n] && !queued[n]) {
                queued[n] = 1;
                pending.push_back({std::max<unsigned>(e.priority, img[n]), arrivals++, n});
            }
    }
    return labels;
}

/// Breadth-first component labeling in row-major first-encounter order.
inline LabelMap components(const BinaryImage& mask, Connectivity conn) {
    LabelMap out(mask.width(), mask.height(), 0u);
    std::uint32_t next = 0;
    for (std::size_t s = 0; s < mask.size(); ++s) {
        if (!mask[s] || out[s]) continue;
        out[s] = ++next;
        std::vector<std::size_t> frontier{s};
        for (std::size_t i = 0; i < frontier.size(); ++i)
            for (auto n : neighbors(frontier[i], mask.width(), mask.height(), conn))
                if (mask[n] && !out[n]) {
                    out[n] = next;
                    frontier.push_back(n);
                }
    }
    return out;
}

struct PairIou {
    std::uint32_t ref;
    std::uint32_t pred;
    std::uint64_t inter;
    std::uint64_t uni;
};

/// IoU of every (ref, pred) label pair by rescanning the image per pair.
inline std::vector<PairIou> all_pairs_iou(const LabelMap& ref, const LabelMap& pred) {
    std::set<std::uint32_t> rs, ps;
    for (auto v : ref)
        if (v) rs.insert(v);
    for (auto v : pred)
        if (v) ps.insert(v);
    std::vector<PairIou> out;
    for (auto r : rs)
        for (auto p : ps) {
            std::uint64_t inter = 0, uni = 0;
            for (std::size_t i = 0; i < ref.size(); ++i) {
                const bool a = ref[i] == r, b = pred[i] == p;
                inter += a && b;
                uni += a || b;
            }
            out.push_back({r, p, inter, uni});
        }
    return out;
}

/// Chebyshev-ball dilation by definition.
inline BinaryImage dilate(const BinaryImage& img, long radius) {
    BinaryImage out(img.width(), img.height(), 0);
    const long w = static_cast<long>(img.width()), h = static_cast<long>(img.height());
    for (long y = 0; y < h; ++y)
        for (long x = 0; x < w; ++x)
            for (long qy = std::max(0L, y - radius); qy <= std::min(h - 1, y + radius); ++qy)
                for (long qx = std::max(0L, x - radius); qx <= std::min(w - 1, x + radius); ++qx)
                    if (img(static_cast<std::size_t>(qx), static_cast<std::size_t>(qy)))
                        out(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = 1;
    return out;
}

inline GrayImage random_gray(std::mt19937& rng, std::size_t w, std::size_t h, unsigned max_value) {
    std::uniform_int_distribution<unsigned> dist(0, max_value);
    GrayImage img(w, h, 0);
    for (auto& v : img) v = static_cast<std::uint8_t>(dist(rng));
    return img;
}

/// Map-like synthetic EPM: random strokes with a soft falloff over a
/// low-intensity noisy background.
inline GrayImage synthetic_epm(std::mt19937& rng, std::size_t w, std::size_t h, unsigned strokes = 12) {
    std::vector<int> acc(w * h, 0);
    std::uniform_int_distribution<long> xs(0, static_cast<long>(w) - 1), ys(0, static_cast<long>(h) - 1);
    std::uniform_int_distribution<int> strength(60, 255);
    for (unsigned s = 0; s < strokes; ++s) {
        long x0 = xs(rng), y0 = ys(rng), x1 = xs(rng), y1 = ys(rng);
        if (s % 2 == 0) y1 = y0; else x1 = x0; // mostly axis-aligned, like street blocks
        const int v = strength(rng);
        const long steps = std::max(std::labs(x1 - x0), std::labs(y1 - y0));
        for (long i = 0; i <= steps; ++i) {
            const long x = steps ? x0 + (x1 - x0) * i / steps : x0;
            const long y = steps ? y0 + (y1 - y0) * i / steps : y0;
            for (long dy = -2; dy <= 2; ++dy)
                for (long dx = -2; dx <= 2; ++dx) {
                    const long px = x + dx, py = y + dy;
                    if (px < 0 || py < 0 || px >= static_cast<long>(w) || py >= static_cast<long>(h)) continue;
                    const int falloff = v / (1 + static_cast<int>(std::max(std::labs(dx), std::labs(dy))) * 2);
                    auto& cell = acc[static_cast<std::size_t>(py) * w + static_cast<std::size_t>(px)];
                    cell = std::max(cell, falloff);
                }
        }
    }
    std::uniform_int_distribution<int> noise(0, 20);
    GrayImage img(w, h, 0);
    for (std::size_t i = 0; i < img.size(); ++i)
        img[i] = static_cast<std::uint8_t>(std::min(255, acc[i] + noise(rng)));
    return img;
}

struct Point {
    long x;
    long y;
};

inline std::vector<Point> random_points(std::mt19937& rng, std::size_t w, std::size_t h, std::size_t k) {
    std::uniform_int_distribution<long> xs(0, static_cast<long>(w) - 1), ys(0, static_cast<long>(h) - 1);
    std::vector<Point> pts(k);
    for (auto& p : pts) p = {xs(rng), ys(rng)};
    return pts;
}

/// Nearest-center partition with labels 1..k (by center index); each pixel is
/// left unlabeled with probability `hole_rate`.
inline LabelMap voronoi_partition(std::mt19937& rng, std::size_t w, std::size_t h,
                                  const std::vector<Point>& centers, double hole_rate) {
    std::bernoulli_distribution hole(hole_rate);
    LabelMap out(w, h, 0u);
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
            std::size_t best = 0;
            long best_d = -1;
            for (std::size_t i = 0; i < centers.size(); ++i) {
                const long dx = centers[i].x - static_cast<long>(x), dy = centers[i].y - static_cast<long>(y);
                const long d = dx * dx + dy * dy;
                if (best_d < 0 || d < best_d) {
                    best_d = d;
                    best = i;
                }
            }
            out(x, y) = hole(rng) ? 0u : static_cast<std::uint32_t>(best + 1);
        }
    return out;
}

/// Same centers moved by up to `jitter` pixels.
inline std::vector<Point> jitter(std::mt19937& rng, std::vector<Point> pts, long amount) {
    std::uniform_int_distribution<long> d(-amount, amount);
    for (auto& p : pts) {
        p.x += d(rng);
        p.y += d(rng);
    }
    return pts;
}

} // namespace oracle
