#pragma once

#include <array>
#include <cstddef>
#include <utility>

namespace morphoseg {

enum class Connectivity { four, eight };

namespace detail {

struct Offset {
    int dx;
    int dy;
};

// Row-major offset order. Watershed tie-breaking depends on this order.
inline constexpr std::array<Offset, 4> kFourOffsets{{{0, -1}, {-1, 0}, {1, 0}, {0, 1}}};
inline constexpr std::array<Offset, 8> kEightOffsets{
    {{-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}}};

template <typename F, std::size_t N>
inline void visit_offsets(const std::array<Offset, N>& offsets, std::size_t x, std::size_t y,
                          std::size_t width, std::size_t height, F& f) {
    for (const auto& o : offsets) {
        const long nx = static_cast<long>(x) + o.dx;
        const long ny = static_cast<long>(y) + o.dy;
        if (nx < 0 || ny < 0 || nx >= static_cast<long>(width) || ny >= static_cast<long>(height))
            continue;
        f(static_cast<std::size_t>(ny) * width + static_cast<std::size_t>(nx));
    }
}

} // namespace detail

/// Calls f(neighbor_index) for every in-bounds neighbor of pixel (x, y),
/// in row-major order.
template <typename F>
inline void for_each_neighbor(std::size_t x, std::size_t y, std::size_t width, std::size_t height,
                              Connectivity conn, F&& f) {
    if (conn == Connectivity::four)
        detail::visit_offsets(detail::kFourOffsets, x, y, width, height, f);
    else
        detail::visit_offsets(detail::kEightOffsets, x, y, width, height, f);
}

template <typename F>
inline void for_each_neighbor(std::size_t index, std::size_t width, std::size_t height,
                              Connectivity conn, F&& f) {
    const std::size_t x = index % width;
    const std::size_t y = index / width;
    if (x == 0 || y == 0 || x + 1 == width || y + 1 == height) {
        for_each_neighbor(x, y, width, height, conn, f);
        return;
    }
    // Interior pixel: no bounds checks needed, same row-major order.
    const std::size_t up = index - width;
    const std::size_t down = index + width;
    if (conn == Connectivity::four) {
        f(up);
        f(index - 1);
        f(index + 1);
        f(down);
    } else {
        f(up - 1);
        f(up);
        f(up + 1);
        f(index - 1);
        f(index + 1);
        f(down - 1);
        f(down);
        f(down + 1);
    }
}

} // namespace morphoseg
