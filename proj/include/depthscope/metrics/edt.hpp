#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "depthscope/metrics/canny.hpp"

namespace depthscope::metrics {

namespace detail {

constexpr double kEdtInf = 1e20;

/// 1-D squared distance transform by the lower envelope of parabolas
/// (Felzenszwalb & Huttenlocher). Exact for integer site positions.
inline void edt_1d(const std::vector<double>& f, std::vector<double>& d, int n) {
    std::vector<int> v(n);
    std::vector<double> z(n + 1);
    int k = 0;
    v[0] = 0;
    z[0] = -kEdtInf;
    z[1] = kEdtInf;
    for (int q = 1; q < n; ++q) {
        double s;
        while (true) {
            int p = v[k];
            s = ((f[q] + q * static_cast<double>(q)) - (f[p] + p * static_cast<double>(p))) /
                (2.0 * (q - p));
            if (s > z[k]) break;
            --k;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kEdtInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        double dq = q - static_cast<double>(v[k]);
        d[q] = dq * dq + f[v[k]];
    }
}

}  // namespace detail

/// Exact squared Euclidean distance to the nearest edge pixel. Values are
/// exact integers (dx*dx + dy*dy), which lets tests compare against a
/// brute-force oracle with equality.
inline std::vector<double> distance_transform_squared(const EdgeSet& edges) {
    if (edges.count() == 0)
        throw std::invalid_argument("distance_transform: empty edge set");
    const int h = edges.h, w = edges.w;
    std::vector<double> grid(static_cast<size_t>(h) * w);
    for (size_t i = 0; i < grid.size(); ++i)
        grid[i] = edges.edges[i] ? 0.0 : detail::kEdtInf;

    // columns, then rows
    std::vector<double> f(std::max(h, w)), d(std::max(h, w));
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) f[y] = grid[static_cast<size_t>(y) * w + x];
        detail::edt_1d(f, d, h);
        for (int y = 0; y < h; ++y) grid[static_cast<size_t>(y) * w + x] = d[y];
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) f[x] = grid[static_cast<size_t>(y) * w + x];
        detail::edt_1d(f, d, w);
        for (int x = 0; x < w; ++x) grid[static_cast<size_t>(y) * w + x] = d[x];
    }
    return grid;
}

/// Euclidean distance map to the closest edge pixel.
inline std::vector<double> distance_transform_edt(const EdgeSet& edges) {
    auto sq = distance_transform_squared(edges);
    for (auto& v : sq) v = std::sqrt(v);
    return sq;
}

}  // namespace depthscope::metrics
