#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <png.h>

#include "depthscope/core/tensor.hpp"

namespace depthscope::io {

/// Images are tensors: RGB 1x3xHxW in [0,1], maps 1x1xHxW.

namespace detail {

inline void skip_netpbm_whitespace(std::istream& in) {
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            return;
        }
    }
}

inline int read_netpbm_int(std::istream& in) {
    skip_netpbm_whitespace(in);
    int v;
    if (!(in >> v)) throw std::runtime_error("netpbm: malformed header integer");
    return v;
}

inline std::ifstream open_read(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    return f;
}

inline std::ofstream open_write(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    return f;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// PPM (P6, 8-bit RGB)
// ---------------------------------------------------------------------------

inline void save_ppm(const std::string& path, const Tensor<float>& rgb) {
    if (rgb.c() != 3) throw std::invalid_argument("save_ppm: expected 3 channels");
    auto f = detail::open_write(path);
    f << "P6\n" << rgb.w() << " " << rgb.h() << "\n255\n";
    std::vector<uint8_t> row(static_cast<size_t>(rgb.w()) * 3);
    for (int y = 0; y < rgb.h(); ++y) {
        for (int x = 0; x < rgb.w(); ++x)
            for (int c = 0; c < 3; ++c) {
                float v = std::clamp(rgb.at(0, c, y, x), 0.0f, 1.0f);
                row[static_cast<size_t>(x) * 3 + c] =
                    static_cast<uint8_t>(std::lround(v * 255.0f));
            }
        f.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!f) throw std::runtime_error("save_ppm: write failed: " + path);
}

inline Tensor<float> load_ppm(const std::string& path) {
    auto f = detail::open_read(path);
    std::string magic;
    f >> magic;
    if (magic != "P6") throw std::runtime_error("load_ppm: not a P6 file: " + path);
    int w = detail::read_netpbm_int(f);
    int h = detail::read_netpbm_int(f);
    int maxval = detail::read_netpbm_int(f);
    if (maxval != 255) throw std::runtime_error("load_ppm: only 8-bit supported: " + path);
    f.get();  // single whitespace after maxval
    Tensor<float> rgb(1, 3, h, w);
    std::vector<uint8_t> row(static_cast<size_t>(w) * 3);
    for (int y = 0; y < h; ++y) {
        f.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
        if (!f) throw std::runtime_error("load_ppm: truncated raster: " + path);
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c)
                rgb.at(0, c, y, x) = row[static_cast<size_t>(x) * 3 + c] / 255.0f;
    }
    return rgb;
}

// ---------------------------------------------------------------------------
// PGM (P5; 16-bit big-endian per Netpbm, 8-bit for visualizations)
// ---------------------------------------------------------------------------

inline void save_pgm16(const std::string& path, const Tensor<float>& map,
                       double meters_per_unit) {
    if (map.c() != 1) throw std::invalid_argument("save_pgm16: expected 1 channel");
    if (meters_per_unit <= 0) throw std::invalid_argument("save_pgm16: nonpositive scale");
    auto f = detail::open_write(path);
    f << "P5\n" << map.w() << " " << map.h() << "\n65535\n";
    for (int y = 0; y < map.h(); ++y)
        for (int x = 0; x < map.w(); ++x) {
            double units = map.at(0, 0, y, x) / meters_per_unit;
            long q = std::lround(std::clamp(units, 0.0, 65535.0));
            uint8_t hi = static_cast<uint8_t>((q >> 8) & 0xff);
            uint8_t lo = static_cast<uint8_t>(q & 0xff);
            f.put(static_cast<char>(hi));
            f.put(static_cast<char>(lo));
        }
    if (!f) throw std::runtime_error("save_pgm16: write failed: " + path);
}

inline void save_pgm8(const std::string& path, const Tensor<float>& map, float lo, float hi) {
    if (map.c() != 1) throw std::invalid_argument("save_pgm8: expected 1 channel");
    auto f = detail::open_write(path);
    f << "P5\n" << map.w() << " " << map.h() << "\n255\n";
    const float span = hi > lo ? hi - lo : 1.0f;
    for (int y = 0; y < map.h(); ++y)
        for (int x = 0; x < map.w(); ++x) {
            float v = std::clamp((map.at(0, 0, y, x) - lo) / span, 0.0f, 1.0f);
            f.put(static_cast<char>(std::lround(v * 255.0f)));
        }
    if (!f) throw std::runtime_error("save_pgm8: write failed: " + path);
}

/// 16-bit values are scaled by meters_per_unit; 8-bit files map to [0,1].
inline Tensor<float> load_pgm(const std::string& path, double meters_per_unit = 1.0) {
    auto f = detail::open_read(path);
    std::string magic;
    f >> magic;
    if (magic != "P5") throw std::runtime_error("load_pgm: not a P5 file: " + path);
    int w = detail::read_netpbm_int(f);
    int h = detail::read_netpbm_int(f);
    int maxval = detail::read_netpbm_int(f);
    f.get();
    Tensor<float> map(1, 1, h, w);
    if (maxval == 255) {
        std::vector<uint8_t> row(static_cast<size_t>(w));
        for (int y = 0; y < h; ++y) {
            f.read(reinterpret_cast<char*>(row.data()), w);
            if (!f) throw std::runtime_error("load_pgm: truncated raster: " + path);
            for (int x = 0; x < w; ++x) map.at(0, 0, y, x) = row[x] / 255.0f;
        }
    } else if (maxval == 65535) {
        std::vector<uint8_t> row(static_cast<size_t>(w) * 2);
        for (int y = 0; y < h; ++y) {
            f.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
            if (!f) throw std::runtime_error("load_pgm: truncated raster: " + path);
            for (int x = 0; x < w; ++x) {
                uint16_t v = static_cast<uint16_t>((row[2 * x] << 8) | row[2 * x + 1]);
                map.at(0, 0, y, x) = static_cast<float>(v * meters_per_unit);
            }
        }
    } else {
        throw std::runtime_error("load_pgm: unsupported maxval: " + path);
    }
    return map;
}

// ---------------------------------------------------------------------------
// PFM (Pf gray / PF color, little-endian, bottom-up rows)
// ---------------------------------------------------------------------------

inline void save_pfm(const std::string& path, const Tensor<float>& img) {
    if (img.c() != 1 && img.c() != 3)
        throw std::invalid_argument("save_pfm: expected 1 or 3 channels");
    auto f = detail::open_write(path);
    f << (img.c() == 3 ? "PF" : "Pf") << "\n" << img.w() << " " << img.h() << "\n-1.0\n";
    std::vector<float> row(static_cast<size_t>(img.w()) * img.c());
    for (int y = img.h() - 1; y >= 0; --y) {  // bottom-up
        for (int x = 0; x < img.w(); ++x)
            for (int c = 0; c < img.c(); ++c)
                row[static_cast<size_t>(x) * img.c() + c] = img.at(0, c, y, x);
        f.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    if (!f) throw std::runtime_error("save_pfm: write failed: " + path);
}

inline Tensor<float> load_pfm(const std::string& path) {
    auto f = detail::open_read(path);
    std::string magic;
    f >> magic;
    int channels;
    if (magic == "PF")
        channels = 3;
    else if (magic == "Pf")
        channels = 1;
    else
        throw std::runtime_error("load_pfm: bad magic in " + path);
    int w = detail::read_netpbm_int(f);
    int h = detail::read_netpbm_int(f);
    detail::skip_netpbm_whitespace(f);
    double scale;
    if (!(f >> scale) || scale == 0) throw std::runtime_error("load_pfm: bad scale in " + path);
    if (scale > 0) throw std::runtime_error("load_pfm: big-endian PFM unsupported: " + path);
    f.get();
    Tensor<float> img(1, channels, h, w);
    std::vector<float> row(static_cast<size_t>(w) * channels);
    for (int y = h - 1; y >= 0; --y) {
        f.read(reinterpret_cast<char*>(row.data()),
               static_cast<std::streamsize>(row.size() * sizeof(float)));
        if (!f) throw std::runtime_error("load_pfm: truncated raster: " + path);
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < channels; ++c)
                img.at(0, c, y, x) = row[static_cast<size_t>(x) * channels + c];
    }
    return img;
}

// ---------------------------------------------------------------------------
// PNG (8-bit RGB via libpng)
// ---------------------------------------------------------------------------

inline void save_png(const std::string& path, const Tensor<float>& rgb) {
    if (rgb.c() != 3) throw std::invalid_argument("save_png: expected 3 channels");
    FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("cannot open for writing: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw std::runtime_error("save_png: libpng failure: " + path);
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, rgb.w(), rgb.h(), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<uint8_t> row(static_cast<size_t>(rgb.w()) * 3);
    for (int y = 0; y < rgb.h(); ++y) {
        for (int x = 0; x < rgb.w(); ++x)
            for (int c = 0; c < 3; ++c)
                row[static_cast<size_t>(x) * 3 + c] = static_cast<uint8_t>(
                    std::lround(std::clamp(rgb.at(0, c, y, x), 0.0f, 1.0f) * 255.0f));
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

inline Tensor<float> load_png(const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw std::runtime_error("cannot open for reading: " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw std::runtime_error("load_png: libpng failure: " + path);
    }
    png_init_io(png, fp);
    png_read_info(png, info);
    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);
    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    Tensor<float> rgb(1, 3, h, w);
    std::vector<uint8_t> row(png_get_rowbytes(png, info));
    for (int y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c)
                rgb.at(0, c, y, x) = row[static_cast<size_t>(x) * 3 + c] / 255.0f;
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    return rgb;
}

}  // namespace depthscope::io
