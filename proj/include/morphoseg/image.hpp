#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "morphoseg/errors.hpp"

namespace morphoseg {

struct GrayTag {};
struct BinaryTag {};

/// Dense row-major 2-D raster. Width and height are always at least 1.
///
/// The tag parameter keeps rasters that share a pixel type (8-bit
/// intensities versus {0,1} masks) from being mixed up by accident.
template <typename Pixel, typename Tag = void>
class Raster {
public:
    using value_type = Pixel;

    Raster(std::size_t width, std::size_t height, Pixel fill = Pixel{})
        : width_(width), height_(height) {
        check_dims(width, height);
        data_.assign(width * height, fill);
        if constexpr (std::is_same_v<Tag, BinaryTag>)
            check_binary();
    }

    Raster(std::size_t width, std::size_t height, std::vector<Pixel> data)
        : width_(width), height_(height), data_(std::move(data)) {
        check_dims(width, height);
        if (data_.size() != width * height)
            throw precondition_error("raster data length " + std::to_string(data_.size()) +
                                     " does not match " + std::to_string(width) + "x" +
                                     std::to_string(height));
        if constexpr (std::is_same_v<Tag, BinaryTag>)
            check_binary();
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }

    Pixel& operator()(std::size_t x, std::size_t y) noexcept { return data_[y * width_ + x]; }
    const Pixel& operator()(std::size_t x, std::size_t y) const noexcept { return data_[y * width_ + x]; }
    Pixel& operator[](std::size_t i) noexcept { return data_[i]; }
    const Pixel& operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<Pixel> pixels() noexcept { return data_; }
    std::span<const Pixel> pixels() const noexcept { return data_; }
    const std::vector<Pixel>& vector() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    template <typename OtherPixel, typename OtherTag>
    bool same_shape(const Raster<OtherPixel, OtherTag>& other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    static void check_dims(std::size_t width, std::size_t height) {
        if (width == 0 || height == 0)
            throw precondition_error("raster dimensions must be at least 1x1");
    }

    void check_binary() const {
        if (std::any_of(data_.begin(), data_.end(), [](Pixel v) { return v > 1; }))
            throw precondition_error("binary image values must be 0 or 1");
    }

    std::size_t width_;
    std::size_t height_;
    std::vector<Pixel> data_;
};

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// 8-bit intensities; edge probability maps live here scaled to [0,255].
using GrayImage = Raster<std::uint8_t, GrayTag>;
/// Values restricted to {0,1}.
using BinaryImage = Raster<std::uint8_t, BinaryTag>;
/// 32-bit region identifiers, 0 reserved for boundary or unassigned pixels.
using LabelMap = Raster<std::uint32_t>;
using RgbImage = Raster<Rgb>;

template <typename A, typename TA, typename B, typename TB>
void require_same_shape(const Raster<A, TA>& a, const Raster<B, TB>& b, const char* what) {
    if (!a.same_shape(b))
        throw precondition_error(std::string(what) + ": dimension mismatch (" +
                                 std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                                 " vs " + std::to_string(b.width()) + "x" +
                                 std::to_string(b.height()) + ")");
}

/// Number of distinct nonzero labels.
inline std::size_t count_labels(const LabelMap& labels) {
    std::vector<std::uint32_t> seen;
    seen.reserve(1024);
    for (auto v : labels)
        if (v != 0) seen.push_back(v);
    std::sort(seen.begin(), seen.end());
    return static_cast<std::size_t>(std::unique(seen.begin(), seen.end()) - seen.begin());
}

/// Renumbers nonzero labels to 1..K keeping their relative order.
inline LabelMap densify_labels(const LabelMap& labels) {
    std::vector<std::uint32_t> used;
    for (auto v : labels)
        if (v != 0) used.push_back(v);
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    LabelMap out(labels.width(), labels.height(), 0u);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 0) continue;
        auto it = std::lower_bound(used.begin(), used.end(), labels[i]);
        out[i] = static_cast<std::uint32_t>(it - used.begin()) + 1;
    }
    return out;
}

} // namespace morphoseg
