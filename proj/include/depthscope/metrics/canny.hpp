#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "depthscope/core/tensor.hpp"

namespace depthscope::metrics {

/// Strictly binary edge map.
struct EdgeSet {
    int h = 0, w = 0;
    std::vector<uint8_t> edges;  // 0 or 1, row-major

    size_t count() const {
        size_t n = 0;
        for (uint8_t e : edges) n += e;
        return n;
    }
    bool at(int y, int x) const { return edges[static_cast<size_t>(y) * w + x] != 0; }
};

/// Luma-weighted grayscale (0.299, 0.587, 0.114).
template <typename T>
Tensor<T> rgb_to_gray(const Tensor<T>& rgb) {
    if (rgb.c() != 3) throw std::invalid_argument("rgb_to_gray: expected 3 channels");
    Tensor<T> gray(rgb.n(), 1, rgb.h(), rgb.w());
    const size_t hw = static_cast<size_t>(rgb.h()) * rgb.w();
    for (int n = 0; n < rgb.n(); ++n) {
        const T* r = &rgb.at(n, 0, 0, 0);
        const T* g = &rgb.at(n, 1, 0, 0);
        const T* b = &rgb.at(n, 2, 0, 0);
        T* o = &gray.at(n, 0, 0, 0);
        for (size_t i = 0; i < hw; ++i)
            o[i] = static_cast<T>(0.299) * r[i] + static_cast<T>(0.587) * g[i] +
                   static_cast<T>(0.114) * b[i];
    }
    return gray;
}

struct CannyParams {
    double sigma = 1.4;
    double low = 0.1;   // fraction of the max gradient magnitude
    double high = 0.2;
};

namespace detail {

/// Separable Gaussian blur with clamped borders.
inline std::vector<double> gaussian_blur(const std::vector<double>& img, int h, int w,
                                         double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        sum += kernel[i + radius];
    }
    for (auto& k : kernel) k /= sum;

    std::vector<double> tmp(img.size()), out(img.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                int xx = std::clamp(x + i, 0, w - 1);
                acc += kernel[i + radius] * img[static_cast<size_t>(y) * w + xx];
            }
            tmp[static_cast<size_t>(y) * w + x] = acc;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                int yy = std::clamp(y + i, 0, h - 1);
                acc += kernel[i + radius] * tmp[static_cast<size_t>(yy) * w + x];
            }
            out[static_cast<size_t>(y) * w + x] = acc;
        }
    return out;
}

}  // namespace detail

/// Gaussian smoothing, Sobel gradients, non-maximum suppression and
/// double-threshold hysteresis. Thresholds are fractions of the maximum
/// gradient magnitude; a constant image yields no edges.
template <typename T>
EdgeSet canny(const Tensor<T>& gray, const CannyParams& params = {}) {
    if (gray.c() != 1) throw std::invalid_argument("canny: expected single-channel input");
    if (!(0.0 < params.low && params.low < params.high))
        throw std::invalid_argument("canny: thresholds must satisfy 0 < low < high");
    const int h = gray.h(), w = gray.w();
    EdgeSet result;
    result.h = h;
    result.w = w;
    result.edges.assign(static_cast<size_t>(h) * w, 0);
    if (h < 3 || w < 3) return result;

    std::vector<double> img(gray.size());
    for (size_t i = 0; i < gray.size(); ++i) img[i] = static_cast<double>(gray.data[i]);
    auto smooth = detail::gaussian_blur(img, h, w, params.sigma);

    auto px = [&](int y, int x) {
        return smooth[static_cast<size_t>(std::clamp(y, 0, h - 1)) * w + std::clamp(x, 0, w - 1)];
    };
    std::vector<double> mag(smooth.size(), 0.0);
    std::vector<uint8_t> dir(smooth.size(), 0);  // 0: E-W, 1: NE-SW, 2: N-S, 3: NW-SE
    double max_mag = 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double gx = (px(y - 1, x + 1) + 2 * px(y, x + 1) + px(y + 1, x + 1)) -
                        (px(y - 1, x - 1) + 2 * px(y, x - 1) + px(y + 1, x - 1));
            double gy = (px(y + 1, x - 1) + 2 * px(y + 1, x) + px(y + 1, x + 1)) -
                        (px(y - 1, x - 1) + 2 * px(y - 1, x) + px(y - 1, x + 1));
            double m = std::hypot(gx, gy);
            size_t i = static_cast<size_t>(y) * w + x;
            mag[i] = m;
            max_mag = std::max(max_mag, m);
            double angle = std::atan2(gy, gx) * 180.0 / 3.14159265358979323846;
            if (angle < 0) angle += 180.0;
            if (angle < 22.5 || angle >= 157.5)
                dir[i] = 0;
            else if (angle < 67.5)
                dir[i] = 1;
            else if (angle < 112.5)
                dir[i] = 2;
            else
                dir[i] = 3;
        }
    if (max_mag <= 0.0) return result;

    // Non-maximum suppression along the gradient direction. The comparison is
    // strict against the backward neighbor and >= against the forward one, so
    // a two-pixel plateau (a step edge after symmetric smoothing) keeps
    // exactly one pixel.
    static constexpr int offs[4][2] = {{0, 1}, {-1, 1}, {-1, 0}, {-1, -1}};  // (dy, dx)
    const double low_t = params.low * max_mag;
    const double high_t = params.high * max_mag;
    std::vector<uint8_t> grade(mag.size(), 0);  // 0 none, 1 weak, 2 strong
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            size_t i = static_cast<size_t>(y) * w + x;
            if (mag[i] < low_t || mag[i] <= 0.0) continue;
            int dy = offs[dir[i]][0], dx = offs[dir[i]][1];
            auto m_at = [&](int yy, int xx) {
                if (yy < 0 || yy >= h || xx < 0 || xx >= w) return 0.0;
                return mag[static_cast<size_t>(yy) * w + xx];
            };
            if (!(mag[i] > m_at(y - dy, x - dx) && mag[i] >= m_at(y + dy, x + dx))) continue;
            grade[i] = mag[i] >= high_t ? 2 : 1;
        }

    // Hysteresis: weak pixels survive only when connected to a strong one.
    std::vector<size_t> stack;
    for (size_t i = 0; i < grade.size(); ++i)
        if (grade[i] == 2) {
            result.edges[i] = 1;
            stack.push_back(i);
        }
    while (!stack.empty()) {
        size_t i = stack.back();
        stack.pop_back();
        int y = static_cast<int>(i) / w, x = static_cast<int>(i) % w;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                int yy = y + dy, xx = x + dx;
                if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
                size_t j = static_cast<size_t>(yy) * w + xx;
                if (grade[j] == 1 && !result.edges[j]) {
                    result.edges[j] = 1;
                    stack.push_back(j);
                }
            }
    }
    return result;
}

}  // namespace depthscope::metrics
