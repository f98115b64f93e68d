#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "depthscope/core/tensor.hpp"
#include "depthscope/metrics/canny.hpp"
#include "depthscope/metrics/edt.hpp"

namespace depthscope::metrics {

/// Pinhole parameters in pixels.
struct CameraIntrinsics {
    double fx = 0.0, fy = 0.0, cx = 0.0, cy = 0.0;

    void validate() const {
        if (fx <= 0.0 || fy <= 0.0)
            throw std::invalid_argument("CameraIntrinsics: focal lengths must be positive");
    }
};

inline void to_json(nlohmann::json& j, const CameraIntrinsics& c) {
    j = nlohmann::json{{"fx", c.fx}, {"fy", c.fy}, {"cx", c.cx}, {"cy", c.cy}};
}

inline void from_json(const nlohmann::json& j, CameraIntrinsics& c) {
    j.at("fx").get_to(c.fx);
    j.at("fy").get_to(c.fy);
    j.at("cx").get_to(c.cx);
    j.at("cy").get_to(c.cy);
}

/// One 3-D point per valid source pixel, with the source linear index kept
/// for payload lookup and deterministic tie-breaking.
struct PointCloud {
    std::vector<double> x, y, z;
    std::vector<int32_t> src;
    int h = 0, w = 0;

    size_t size() const { return z.size(); }
};

/// X = (u - cx) Z / fx, Y = (v - cy) Z / fy for every pixel with depth > 0.
template <typename T>
PointCloud backproject(const Tensor<T>& depth, const CameraIntrinsics& intr) {
    intr.validate();
    if (depth.c() != 1) throw std::invalid_argument("backproject: depth must be 1-channel");
    PointCloud pc;
    pc.h = depth.h();
    pc.w = depth.w();
    for (int v = 0; v < depth.h(); ++v)
        for (int u = 0; u < depth.w(); ++u) {
            double z = static_cast<double>(depth.at(0, 0, v, u));
            if (z <= 0.0) continue;
            pc.x.push_back((u - intr.cx) * z / intr.fx);
            pc.y.push_back((v - intr.cy) * z / intr.fy);
            pc.z.push_back(z);
            pc.src.push_back(v * depth.w() + u);
        }
    return pc;
}

/// Sparse reprojected image: payload of the surviving source pixel where one
/// landed, invalid elsewhere.
template <typename T>
struct VcsResult {
    Tensor<T> image;
    std::vector<uint8_t> mask;  // one byte per pixel

    size_t valid_count() const {
        size_t n = 0;
        for (uint8_t m : mask) n += m;
        return n;
    }
};

/// Reprojects points into a camera translated by (tx, ty) in the image plane
/// (z translation is out of scope). Nearest-pixel splat; collisions keep the
/// smallest depth, equal depths keep the smallest source index, so the result
/// is independent of point order.
template <typename T>
VcsResult<T> project_splat(const PointCloud& pc, const Tensor<T>& payload,
                           const CameraIntrinsics& intr, double tx, double ty) {
    intr.validate();
    if (payload.h() != pc.h || payload.w() != pc.w)
        throw std::invalid_argument("project_splat: payload size mismatch");
    const int h = pc.h, w = pc.w;
    const size_t hw = static_cast<size_t>(h) * w;
    std::vector<double> best_z(hw, std::numeric_limits<double>::infinity());
    std::vector<int32_t> best_src(hw, -1);
    for (size_t i = 0; i < pc.size(); ++i) {
        const double z = pc.z[i];
        const double u = intr.fx * (pc.x[i] - tx) / z + intr.cx;
        const double v = intr.fy * (pc.y[i] - ty) / z + intr.cy;
        const long ui = std::lrint(u);  // ties to even under the default mode
        const long vi = std::lrint(v);
        if (ui < 0 || ui >= w || vi < 0 || vi >= h) continue;
        const size_t d = static_cast<size_t>(vi) * w + ui;
        if (z < best_z[d] || (z == best_z[d] && pc.src[i] < best_src[d])) {
            best_z[d] = z;
            best_src[d] = pc.src[i];
        }
    }
    VcsResult<T> out;
    out.image = Tensor<T>(1, payload.c(), h, w);
    out.mask.assign(hw, 0);
    for (size_t d = 0; d < hw; ++d) {
        if (best_src[d] < 0) continue;
        out.mask[d] = 1;
        const int sy = best_src[d] / w, sx = best_src[d] % w;
        const int dy = static_cast<int>(d) / w, dx = static_cast<int>(d) % w;
        for (int c = 0; c < payload.c(); ++c)
            out.image.at(0, c, dy, dx) = payload.at(0, c, sy, sx);
    }
    return out;
}

/// Backproject with the given depth, translate, splat the image as payload.
template <typename T>
VcsResult<T> simulate_viewpoint_change(const Tensor<T>& image, const Tensor<T>& depth,
                                       const CameraIntrinsics& intr, double tx, double ty) {
    if (image.h() != depth.h() || image.w() != depth.w())
        throw std::invalid_argument("vcs: image/depth size mismatch");
    return project_splat(backproject(depth, intr), image, intr, tx, ty);
}

/// Mean squared payload difference over pixels valid in both results
/// (channel MSEs averaged when the payload has several channels).
template <typename T>
double consistent_mse(const VcsResult<T>& inferred, const VcsResult<T>& gt) {
    if (!inferred.image.same_shape(gt.image) || inferred.mask.size() != gt.mask.size())
        throw std::invalid_argument("consistent_mse: shape mismatch");
    const int c = inferred.image.c();
    const size_t hw = inferred.mask.size();
    size_t n = 0;
    double acc = 0.0;
    for (size_t i = 0; i < hw; ++i) {
        if (!inferred.mask[i] || !gt.mask[i]) continue;
        ++n;
        for (int ch = 0; ch < c; ++ch) {
            double d = static_cast<double>(inferred.image.data[static_cast<size_t>(ch) * hw + i]) -
                       static_cast<double>(gt.image.data[static_cast<size_t>(ch) * hw + i]);
            acc += d * d;
        }
    }
    if (n == 0) throw std::invalid_argument("consistent_mse: disjoint validity masks");
    return acc / (static_cast<double>(n) * c);
}

namespace detail {

template <typename T>
EdgeSet edges_of_vcs(const VcsResult<T>& vcs) {
    EdgeSet e;
    e.h = vcs.image.h();
    e.w = vcs.image.w();
    e.edges.assign(vcs.mask.size(), 0);
    for (size_t i = 0; i < vcs.mask.size(); ++i)
        e.edges[i] = (vcs.mask[i] && vcs.image.data[i] > T(0.5)) ? 1 : 0;
    return e;
}

}  // namespace detail

/// Distance total over E_I's edge pixels plus their count, so callers can
/// average per image or pool edge pixels across a set.
struct ContourStats {
    double distance_sum = 0.0;
    size_t edge_pixels = 0;

    double mean() const { return distance_sum / static_cast<double>(edge_pixels); }
};

template <typename T>
ContourStats contour_vcs_stats(const Tensor<T>& rgb, const Tensor<T>& depth_gt,
                               const Tensor<T>& depth_inferred, const CameraIntrinsics& intr,
                               double tx, double ty, const CannyParams& params = {}) {
    auto edges = canny(rgb_to_gray(rgb), params);
    Tensor<T> edge_img(1, 1, edges.h, edges.w);
    for (size_t i = 0; i < edge_img.size(); ++i)
        edge_img.data[i] = edges.edges[i] ? T(1) : T(0);

    auto e_gt = detail::edges_of_vcs(simulate_viewpoint_change(edge_img, depth_gt, intr, tx, ty));
    auto e_i =
        detail::edges_of_vcs(simulate_viewpoint_change(edge_img, depth_inferred, intr, tx, ty));
    if (e_gt.count() == 0) throw std::invalid_argument("contour metric: empty projected E_GT");
    if (e_i.count() == 0) throw std::invalid_argument("contour metric: empty projected E_I");

    auto dist = distance_transform_edt(e_gt);
    ContourStats stats;
    for (size_t i = 0; i < e_i.edges.size(); ++i)
        if (e_i.edges[i]) {
            stats.distance_sum += dist[i];
            ++stats.edge_pixels;
        }
    return stats;
}

/// Average Euclidean distance from the edges projected with the inferred
/// depth to the edges projected with the ground-truth depth: Canny on the
/// RGB image, one VCS per depth map, distance transform of E_GT sampled at
/// E_I's edge pixels.
template <typename T>
double contour_vcs_metric(const Tensor<T>& rgb, const Tensor<T>& depth_gt,
                          const Tensor<T>& depth_inferred, const CameraIntrinsics& intr,
                          double tx, double ty, const CannyParams& params = {}) {
    return contour_vcs_stats(rgb, depth_gt, depth_inferred, intr, tx, ty, params).mean();
}

}  // namespace depthscope::metrics
