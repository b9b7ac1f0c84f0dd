#pragma once

#include <cstdint>
#include <vector>

#include "morphoseg/connectivity.hpp"
#include "morphoseg/image.hpp"

namespace morphoseg {

/// 1 where the EPM is strictly below `threshold` (shape interior), 0 on edges.
/// Accepts thresholds 0..255.
inline BinaryImage threshold_epm(const GrayImage& epm, unsigned threshold) {
    if (threshold > 255)
        throw precondition_error("threshold_epm: threshold " + std::to_string(threshold) +
                                 " outside [0,255]");
    BinaryImage out(epm.width(), epm.height(), 0);
    for (std::size_t i = 0; i < epm.size(); ++i) out[i] = epm[i] < threshold ? 1 : 0;
    return out;
}

/// Connected components of the 1-pixels, labeled 1..K in row-major order of
/// each component's first pixel. Two-pass union-find.
inline LabelMap label_components(const BinaryImage& mask, Connectivity conn = Connectivity::four) {
    const auto w = mask.width();
    const auto h = mask.height();
    const auto n = mask.size();
    std::vector<std::uint32_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<std::uint32_t>(i);

    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    for (std::size_t p = 0; p < n; ++p) {
        if (!mask[p]) continue;
        // Only already-scanned neighbors: those earlier in row-major order.
        for_each_neighbor(p, w, h, conn, [&](std::size_t q) {
            if (q >= p || !mask[q]) return;
            auto a = find(static_cast<std::uint32_t>(p));
            auto b = find(static_cast<std::uint32_t>(q));
            if (a == b) return;
            if (a < b) std::swap(a, b);
            parent[a] = b; // root is the earliest pixel of the component
        });
    }

    LabelMap labels(w, h, 0u);
    std::uint32_t next = 1;
    for (std::size_t p = 0; p < n; ++p) {
        if (!mask[p]) continue;
        const auto root = find(static_cast<std::uint32_t>(p));
        if (root == p)
            labels[p] = next++;
        else
            labels[p] = labels[root];
    }
    return labels;
}

} // namespace morphoseg
