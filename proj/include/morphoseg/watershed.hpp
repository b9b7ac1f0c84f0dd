#pragma once

#include <cstdint>
#include <vector>

#include "morphoseg/bucket_queue.hpp"
#include "morphoseg/connectivity.hpp"
#include "morphoseg/image.hpp"
#include "morphoseg/morpho_filters.hpp"

namespace morphoseg {

struct SegmentationResult {
    LabelMap labels;          // 0 on watershed lines
    std::size_t region_count; // nonzero labels are exactly 1..region_count
    BinaryImage line_mask;    // 1 where labels == 0
};

/// Labels each regional minimum (a flat zone with no strictly lower
/// neighbor) with a distinct id 1..K, in row-major order of the zone's first
/// pixel. All other pixels get 0.
inline LabelMap regional_minima(const GrayImage& img, Connectivity conn = Connectivity::four) {
    const auto w = img.width();
    const auto h = img.height();
    LabelMap labels(w, h, 0u);
    std::vector<std::uint8_t> visited(img.size(), 0);
    std::vector<std::uint32_t> zone;
    std::uint32_t next = 1;

    for (std::size_t start = 0; start < img.size(); ++start) {
        if (visited[start]) continue;
        const auto value = img[start];
        bool is_minimum = true;
        zone.clear();
        zone.push_back(static_cast<std::uint32_t>(start));
        visited[start] = 1;
        for (std::size_t k = 0; k < zone.size(); ++k) {
            for_each_neighbor(zone[k], w, h, conn, [&](std::size_t n) {
                if (img[n] < value) {
                    is_minimum = false;
                } else if (img[n] == value && !visited[n]) {
                    visited[n] = 1;
                    zone.push_back(static_cast<std::uint32_t>(n));
                }
            });
        }
        if (is_minimum) {
            for (auto p : zone) labels[p] = next;
            ++next;
        }
    }
    return labels;
}

/// Meyer's flooding with watershed lines.
///
/// Seed labels are renumbered densely (keeping their order) and never change.
/// Neighbors of seed pixels are enqueued in row-major order; the flood then
/// pops by increasing level, FIFO within a level, with priorities clamped so
/// the flood never descends. A popped pixel whose labeled neighbors carry two
/// different labels becomes a line pixel (label 0) and does not propagate.
inline SegmentationResult watershed_meyer(const GrayImage& img, const LabelMap& seeds,
                                          Connectivity conn = Connectivity::four) {
    require_same_shape(img, seeds, "watershed_meyer");
    const auto w = img.width();
    const auto h = img.height();

    LabelMap labels = densify_labels(seeds);
    std::uint32_t region_count = 0;
    for (auto v : labels) region_count = std::max(region_count, v);
    if (region_count == 0) throw precondition_error("watershed_meyer: no seeds");

    std::vector<std::uint8_t> queued(img.size(), 0);
    BucketQueue queue;
    for (std::size_t p = 0; p < img.size(); ++p) {
        if (labels[p] == 0) continue;
        for_each_neighbor(p, w, h, conn, [&](std::size_t n) {
            if (labels[n] != 0 || queued[n]) return;
            queued[n] = 1;
            queue.push(std::max(img[p], img[n]), static_cast<std::uint32_t>(n));
        });
    }

    constexpr std::uint32_t kNone = 0;
    constexpr std::uint32_t kConflict = 0xFFFFFFFFu;
    while (!queue.empty()) {
        const auto [level, p] = queue.pop();
        std::uint32_t label = kNone;
        for_each_neighbor(p, w, h, conn, [&](std::size_t n) {
            const auto l = labels[n];
            if (l == 0 || label == kConflict) return;
            label = (label == kNone || label == l) ? l : kConflict;
        });
        if (label == kNone || label == kConflict) continue; // line pixel
        labels[p] = label;
        for_each_neighbor(p, w, h, conn, [&](std::size_t n) {
            if (labels[n] != 0 || queued[n]) return;
            queued[n] = 1;
            queue.push(std::max(level, img[n]), static_cast<std::uint32_t>(n));
        });
    }

    BinaryImage lines(w, h, 0);
    for (std::size_t p = 0; p < img.size(); ++p) lines[p] = labels[p] == 0 ? 1 : 0;
    return {std::move(labels), region_count, std::move(lines)};
}

/// Filters the edge probability map, then floods it from its regional minima.
inline SegmentationResult segment(const GrayImage& epm, const FilterParams& params,
                                  Connectivity conn = Connectivity::four,
                                  FilterOrder order = FilterOrder::area_then_dynamic) {
    const auto filtered = filter_epm(epm, params, conn, order);
    return watershed_meyer(filtered, regional_minima(filtered, conn), conn);
}

} // namespace morphoseg
