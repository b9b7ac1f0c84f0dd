#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <vector>

#include "morphoseg/bucket_queue.hpp"
#include "morphoseg/connectivity.hpp"
#include "morphoseg/image.hpp"

namespace morphoseg {

/// Dynamic threshold `h` (intensity units) and area threshold (pixels).
struct FilterParams {
    unsigned h = 0;
    unsigned lambda_area = 0;
    friend auto operator<=>(const FilterParams&, const FilterParams&) = default;
};

/// Order in which the two minima filters are chained by filter_epm().
enum class FilterOrder { area_then_dynamic, dynamic_then_area };

/// Reconstruction by erosion of `marker` over `mask`: the greatest image
/// below the marker that is stable under geodesic erosion above the mask.
///
/// Computed as a minimax flood: each pixel ends at the lowest value reachable
/// from some marker pixel along a path, where a path costs the maximum of its
/// start marker value and the mask values it crosses.
inline GrayImage reconstruct_by_erosion(const GrayImage& marker, const GrayImage& mask,
                                        Connectivity conn = Connectivity::four) {
    require_same_shape(marker, mask, "reconstruct_by_erosion");
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (marker[i] < mask[i])
            throw precondition_error("reconstruct_by_erosion: marker below mask at pixel " +
                                     std::to_string(i));

    const auto w = mask.width();
    const auto h = mask.height();
    GrayImage out = marker;
    BucketQueue queue;
    for (std::size_t i = 0; i < out.size(); ++i)
        queue.push(out[i], static_cast<std::uint32_t>(i));

    while (!queue.empty()) {
        const auto [level, p] = queue.pop();
        if (level != out[p]) continue; // stale entry
        for_each_neighbor(p, w, h, conn, [&](std::size_t n) {
            const std::uint8_t candidate = std::max(level, mask[n]);
            if (candidate < out[n]) {
                out[n] = candidate;
                queue.push(candidate, static_cast<std::uint32_t>(n));
            }
        });
    }
    return out;
}

/// h-minima transform: suppresses every regional minimum whose dynamic is
/// below `h`. Intensities saturate at 255.
inline GrayImage h_minima(const GrayImage& img, unsigned h, Connectivity conn = Connectivity::four) {
    if (h == 0) return img;
    GrayImage marker = img;
    for (auto& v : marker) v = static_cast<std::uint8_t>(std::min<unsigned>(255u, v + h));
    return reconstruct_by_erosion(marker, img, conn);
}

/// Area closing: raises every pixel to the lowest level at which its
/// connected component of the lower level set reaches `lambda_area` pixels
/// (or covers the whole image).
///
/// Union-find over pixels sorted by increasing intensity; a component stops
/// absorbing into higher levels once it is large enough.
inline GrayImage area_closing(const GrayImage& img, unsigned lambda_area,
                              Connectivity conn = Connectivity::four) {
    if (lambda_area <= 1) return img;

    const auto w = img.width();
    const auto h = img.height();
    const auto n = img.size();

    // Counting sort: stable, ascending.
    std::array<std::size_t, 257> start{};
    for (auto v : img) ++start[v + 1u];
    std::partial_sum(start.begin(), start.end(), start.begin());
    std::vector<std::uint32_t> order(n);
    {
        auto cursor = start;
        for (std::size_t i = 0; i < n; ++i) order[cursor[img[i]]++] = static_cast<std::uint32_t>(i);
    }

    constexpr std::uint32_t kUnprocessed = 0xFFFFFFFFu;
    std::vector<std::uint32_t> parent(n, kUnprocessed);
    std::vector<std::uint32_t> area(n, 0);

    auto find = [&](std::uint32_t x) {
        std::uint32_t root = x;
        while (parent[root] != root) root = parent[root];
        while (parent[x] != root) {
            const auto next = parent[x];
            parent[x] = root;
            x = next;
        }
        return root;
    };

    for (const auto p : order) {
        parent[p] = p;
        area[p] = 1;
        for_each_neighbor(p, w, h, conn, [&](std::size_t q) {
            if (parent[q] == kUnprocessed) return;
            const auto r = find(static_cast<std::uint32_t>(q));
            if (r == p) return;
            if (img[r] == img[p] || area[r] < lambda_area) {
                parent[r] = p;
                area[p] = std::min<std::uint64_t>(std::uint64_t{area[p]} + area[r], 0xFFFFFFFFu);
            } else {
                area[p] = std::max(area[p], lambda_area);
            }
        });
    }

    // Parents always come later in `order`, so a reverse sweep resolves them first.
    GrayImage out = img;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const auto p = *it;
        if (parent[p] != p) out[p] = out[parent[p]];
    }
    return out;
}

/// Dilation by a (2r+1)x(2r+1) square, separably.
inline BinaryImage dilate_square(const BinaryImage& img, unsigned radius) {
    if (radius == 0) return img;
    const long w = static_cast<long>(img.width());
    const long h = static_cast<long>(img.height());
    const long r = static_cast<long>(radius);

    BinaryImage rows(img.width(), img.height(), 0);
    for (long y = 0; y < h; ++y) {
        long last_on = -1 - r - 1; // most recent on-pixel at or before x + r
        for (long x = -r; x < w; ++x) {
            const long ahead = x + r;
            if (ahead < w && img(static_cast<std::size_t>(ahead), static_cast<std::size_t>(y)))
                last_on = ahead;
            if (x >= 0 && last_on >= x - r)
                rows(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = 1;
        }
    }
    BinaryImage out(img.width(), img.height(), 0);
    for (long x = 0; x < w; ++x) {
        long last_on = -1 - r - 1;
        for (long y = -r; y < h; ++y) {
            const long ahead = y + r;
            if (ahead < h && rows(static_cast<std::size_t>(x), static_cast<std::size_t>(ahead)))
                last_on = ahead;
            if (y >= 0 && last_on >= y - r)
                out(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = 1;
        }
    }
    return out;
}

/// Joint filtering of an edge probability map on area and dynamic.
inline GrayImage filter_epm(const GrayImage& epm, const FilterParams& params,
                            Connectivity conn = Connectivity::four,
                            FilterOrder order = FilterOrder::area_then_dynamic) {
    if (order == FilterOrder::area_then_dynamic)
        return h_minima(area_closing(epm, params.lambda_area, conn), params.h, conn);
    return area_closing(h_minima(epm, params.h, conn), params.lambda_area, conn);
}

} // namespace morphoseg
