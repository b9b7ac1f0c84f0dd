#pragma once

// Readers and writers for the raster files exchanged between pipeline stages:
// binary PGM (P5) and PPM (P6) with maxval 255, and the raw SLAB label format
// ("SLAB", u32 LE width, u32 LE height, then u32 LE labels row-major).

#include <array>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "morphoseg/image.hpp"

namespace morphoseg {

namespace detail {

inline std::ifstream open_for_read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open '" + path + "' for reading");
    return in;
}

inline std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw io_error("cannot open '" + path + "' for writing");
    return out;
}

inline void finish_write(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out)
        throw io_error("write failed for '" + path + "'");
}

// Skips whitespace and '#' comments between netpbm header tokens.
inline void skip_header_space(std::istream& in) {
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            while (c != '\n' && c != std::char_traits<char>::eof()) c = in.get();
        } else if (c != std::char_traits<char>::eof() && std::isspace(c)) {
            in.get();
        } else {
            return;
        }
    }
}

inline unsigned long read_header_number(std::istream& in, const std::string& path,
                                        const char* field) {
    skip_header_space(in);
    std::string digits;
    while (std::isdigit(in.peek())) digits.push_back(static_cast<char>(in.get()));
    if (digits.empty() || digits.size() > 9)
        throw format_error("malformed header in '" + path + "': bad " + field);
    return std::stoul(digits);
}

struct NetpbmHeader {
    std::size_t width;
    std::size_t height;
};

inline NetpbmHeader read_netpbm_header(std::istream& in, const std::string& path,
                                       const char* magic) {
    char m[2] = {0, 0};
    in.read(m, 2);
    if (!in || m[0] != magic[0] || m[1] != magic[1])
        throw format_error("malformed header in '" + path + "': expected " + magic);
    const auto width = read_header_number(in, path, "width");
    const auto height = read_header_number(in, path, "height");
    const auto maxval = read_header_number(in, path, "maxval");
    if (maxval != 255)
        throw format_error("unsupported maxval " + std::to_string(maxval) + " in '" + path + "'");
    if (width == 0 || height == 0)
        throw format_error("malformed header in '" + path + "': zero dimension");
    // Exactly one whitespace byte separates the header from the payload.
    if (!std::isspace(in.get()))
        throw format_error("malformed header in '" + path + "': missing separator");
    return {width, height};
}

inline void read_payload(std::istream& in, char* dst, std::size_t bytes, const std::string& path) {
    in.read(dst, static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in.gcount()) != bytes)
        throw format_error("truncated payload in '" + path + "': expected " +
                           std::to_string(bytes) + " bytes, got " +
                           std::to_string(in.gcount()));
}

inline void put_u32le(std::ostream& out, std::uint32_t v) {
    const std::array<char, 4> b{static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                                static_cast<char>((v >> 16) & 0xFF),
                                static_cast<char>((v >> 24) & 0xFF)};
    out.write(b.data(), 4);
}

inline std::uint32_t get_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

} // namespace detail

inline GrayImage read_graymap(const std::string& path) {
    auto in = detail::open_for_read(path);
    const auto hdr = detail::read_netpbm_header(in, path, "P5");
    std::vector<std::uint8_t> data(hdr.width * hdr.height);
    detail::read_payload(in, reinterpret_cast<char*>(data.data()), data.size(), path);
    return GrayImage(hdr.width, hdr.height, std::move(data));
}

inline void write_graymap(const GrayImage& img, const std::string& path) {
    auto out = detail::open_for_write(path);
    out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels().data()),
              static_cast<std::streamsize>(img.size()));
    detail::finish_write(out, path);
}

/// Binary masks go to disk as 0/255 graymaps so they stay viewable.
inline void write_binary_graymap(const BinaryImage& mask, const std::string& path) {
    std::vector<std::uint8_t> data(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) data[i] = mask[i] ? 255 : 0;
    write_graymap(GrayImage(mask.width(), mask.height(), std::move(data)), path);
}

/// Any nonzero intensity reads back as 1.
inline BinaryImage read_binary_graymap(const std::string& path) {
    const auto gray = read_graymap(path);
    std::vector<std::uint8_t> data(gray.size());
    for (std::size_t i = 0; i < gray.size(); ++i) data[i] = gray[i] ? 1 : 0;
    return BinaryImage(gray.width(), gray.height(), std::move(data));
}

inline LabelMap read_labelmap(const std::string& path) {
    auto in = detail::open_for_read(path);
    std::array<unsigned char, 12> hdr{};
    in.read(reinterpret_cast<char*>(hdr.data()), 12);
    if (in.gcount() < 4 || hdr[0] != 'S' || hdr[1] != 'L' || hdr[2] != 'A' || hdr[3] != 'B')
        throw format_error("bad magic in '" + path + "': expected SLAB");
    if (in.gcount() != 12)
        throw format_error("size mismatch in '" + path + "': truncated header");
    const std::size_t width = detail::get_u32le(hdr.data() + 4);
    const std::size_t height = detail::get_u32le(hdr.data() + 8);
    if (width == 0 || height == 0)
        throw format_error("size mismatch in '" + path + "': zero dimension");
    const std::size_t count = width * height;
    const auto payload_start = in.tellg();
    in.seekg(0, std::ios::end);
    const auto available = static_cast<std::size_t>(in.tellg() - payload_start);
    in.seekg(payload_start);
    if (available != count * 4)
        throw format_error("size mismatch in '" + path + "': header declares " +
                           std::to_string(count * 4) + " payload bytes, file has " +
                           std::to_string(available));
    std::vector<unsigned char> raw(count * 4);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw io_error("read failed for '" + path + "'");
    std::vector<std::uint32_t> labels(count);
    for (std::size_t i = 0; i < count; ++i) labels[i] = detail::get_u32le(raw.data() + 4 * i);
    return LabelMap(width, height, std::move(labels));
}

inline void write_labelmap(const LabelMap& labels, const std::string& path) {
    auto out = detail::open_for_write(path);
    out.write("SLAB", 4);
    detail::put_u32le(out, static_cast<std::uint32_t>(labels.width()));
    detail::put_u32le(out, static_cast<std::uint32_t>(labels.height()));
    std::vector<char> raw(labels.size() * 4);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto v = labels[i];
        raw[4 * i] = static_cast<char>(v & 0xFF);
        raw[4 * i + 1] = static_cast<char>((v >> 8) & 0xFF);
        raw[4 * i + 2] = static_cast<char>((v >> 16) & 0xFF);
        raw[4 * i + 3] = static_cast<char>((v >> 24) & 0xFF);
    }
    out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
    detail::finish_write(out, path);
}

inline void write_colormap(const RgbImage& img, const std::string& path) {
    auto out = detail::open_for_write(path);
    out << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
    std::vector<char> raw(img.size() * 3);
    for (std::size_t i = 0; i < img.size(); ++i) {
        raw[3 * i] = static_cast<char>(img[i].r);
        raw[3 * i + 1] = static_cast<char>(img[i].g);
        raw[3 * i + 2] = static_cast<char>(img[i].b);
    }
    out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
    detail::finish_write(out, path);
}

inline RgbImage read_colormap(const std::string& path) {
    auto in = detail::open_for_read(path);
    const auto hdr = detail::read_netpbm_header(in, path, "P6");
    std::vector<unsigned char> raw(hdr.width * hdr.height * 3);
    detail::read_payload(in, reinterpret_cast<char*>(raw.data()), raw.size(), path);
    std::vector<Rgb> data(hdr.width * hdr.height);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = {raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]};
    return RgbImage(hdr.width, hdr.height, std::move(data));
}

} // namespace morphoseg
