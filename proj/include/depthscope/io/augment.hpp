#pragma once

#include <cmath>

#include <json.hpp>

#include "depthscope/core/rng.hpp"
#include "depthscope/io/dataset.hpp"

namespace depthscope::io {

/// Online augmentation ranges. Defaults reconstruct the usual procedure for
/// this task: scale in [1, 1.5] (depth divided by the drawn scale), in-plane
/// rotation within +-5 degrees, per-channel color in [0.8, 1.2], horizontal
/// flip with probability 0.5.
struct AugmentPolicy {
    double scale_min = 1.0;
    double scale_max = 1.5;
    double rotation_deg = 5.0;
    double color_min = 0.8;
    double color_max = 1.2;
    double flip_prob = 0.5;

    static AugmentPolicy identity() { return {1.0, 1.0, 0.0, 1.0, 1.0, 0.0}; }

    void validate() const {
        if (scale_min < 1.0 || scale_max < scale_min)
            throw std::invalid_argument("AugmentPolicy: scale range must be within [1, inf)");
        if (flip_prob < 0.0 || flip_prob > 1.0)
            throw std::invalid_argument("AugmentPolicy: flip probability must be in [0,1]");
        if (rotation_deg < 0.0) throw std::invalid_argument("AugmentPolicy: negative rotation");
        if (color_min <= 0.0 || color_max < color_min)
            throw std::invalid_argument("AugmentPolicy: bad color range");
    }
};

inline void to_json(nlohmann::json& j, const AugmentPolicy& p) {
    j = nlohmann::json{{"scale_min", p.scale_min}, {"scale_max", p.scale_max},
                       {"rotation_deg", p.rotation_deg}, {"color_min", p.color_min},
                       {"color_max", p.color_max}, {"flip_prob", p.flip_prob}};
}

inline void from_json(const nlohmann::json& j, AugmentPolicy& p) {
    if (j.contains("scale_min")) j.at("scale_min").get_to(p.scale_min);
    if (j.contains("scale_max")) j.at("scale_max").get_to(p.scale_max);
    if (j.contains("rotation_deg")) j.at("rotation_deg").get_to(p.rotation_deg);
    if (j.contains("color_min")) j.at("color_min").get_to(p.color_min);
    if (j.contains("color_max")) j.at("color_max").get_to(p.color_max);
    if (j.contains("flip_prob")) j.at("flip_prob").get_to(p.flip_prob);
}

namespace detail {

/// Crop-and-resize by scale s: a 1/s-sized crop at a random offset is
/// nearest-neighbor resized back to the full size. s = 1 is the identity.
inline DepthSample scale_crop(const DepthSample& s, double scale, RngStream& rng) {
    const int H = s.height(), W = s.width();
    int ch = std::max(1, static_cast<int>(std::lround(H / scale)));
    int cw = std::max(1, static_cast<int>(std::lround(W / scale)));
    int oy = static_cast<int>(rng.uniform_index(static_cast<uint64_t>(H - ch + 1)));
    int ox = static_cast<int>(rng.uniform_index(static_cast<uint64_t>(W - cw + 1)));
    DepthSample out;
    out.rgb = Tensor<float>(1, 3, H, W);
    out.depth = Tensor<float>(1, 1, H, W);
    out.mask = Tensor<float>(1, 1, H, W);
    out.source_id = s.source_id;
    const float inv_scale = static_cast<float>(1.0 / scale);
    for (int y = 0; y < H; ++y) {
        int sy = oy + std::min(ch - 1, static_cast<int>(static_cast<int64_t>(y) * ch / H));
        for (int x = 0; x < W; ++x) {
            int sx = ox + std::min(cw - 1, static_cast<int>(static_cast<int64_t>(x) * cw / W));
            for (int c = 0; c < 3; ++c) out.rgb.at(0, c, y, x) = s.rgb.at(0, c, sy, sx);
            out.depth.at(0, 0, y, x) = s.depth.at(0, 0, sy, sx) * inv_scale;
            out.mask.at(0, 0, y, x) = s.mask.at(0, 0, sy, sx);
        }
    }
    return out;
}

inline DepthSample rotate(const DepthSample& s, double degrees) {
    if (degrees == 0.0) return s;
    const int H = s.height(), W = s.width();
    const double rad = degrees * 3.14159265358979323846 / 180.0;
    const double c = std::cos(rad), sn = std::sin(rad);
    const double cy = (H - 1) / 2.0, cx = (W - 1) / 2.0;
    DepthSample out;
    out.rgb = Tensor<float>(1, 3, H, W);
    out.depth = Tensor<float>(1, 1, H, W);
    out.mask = Tensor<float>(1, 1, H, W);
    out.source_id = s.source_id;
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            // inverse rotation of the destination pixel
            double dy = y - cy, dx = x - cx;
            int sx = static_cast<int>(std::lround(c * dx + sn * dy + cx));
            int sy = static_cast<int>(std::lround(-sn * dx + c * dy + cy));
            if (sx < 0 || sx >= W || sy < 0 || sy >= H) continue;  // stays invalid
            for (int ch = 0; ch < 3; ++ch) out.rgb.at(0, ch, y, x) = s.rgb.at(0, ch, sy, sx);
            out.depth.at(0, 0, y, x) = s.depth.at(0, 0, sy, sx);
            out.mask.at(0, 0, y, x) = s.mask.at(0, 0, sy, sx);
        }
    return out;
}

inline void flip_horizontal(DepthSample& s) {
    const int H = s.height(), W = s.width();
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W / 2; ++x) {
            for (int c = 0; c < 3; ++c)
                std::swap(s.rgb.at(0, c, y, x), s.rgb.at(0, c, y, W - 1 - x));
            std::swap(s.depth.at(0, 0, y, x), s.depth.at(0, 0, y, W - 1 - x));
            std::swap(s.mask.at(0, 0, y, x), s.mask.at(0, 0, y, W - 1 - x));
        }
}

}  // namespace detail

/// Applies scale, rotation, color and flip, each independently drawn from the
/// augment stream. The draw count per call is fixed so the stream position
/// does not depend on the policy.
inline DepthSample augment(const DepthSample& s, const AugmentPolicy& policy, RngStream& rng) {
    policy.validate();
    const double scale = rng.uniform(policy.scale_min, policy.scale_max);
    const double degrees = rng.uniform(-policy.rotation_deg, policy.rotation_deg);
    const double c0 = rng.uniform(policy.color_min, policy.color_max);
    const double c1 = rng.uniform(policy.color_min, policy.color_max);
    const double c2 = rng.uniform(policy.color_min, policy.color_max);
    const bool flip = rng.uniform() < policy.flip_prob;

    DepthSample out = detail::scale_crop(s, scale, rng);
    out = detail::rotate(out, degrees);
    const double colors[3] = {c0, c1, c2};
    for (int c = 0; c < 3; ++c) {
        if (colors[c] == 1.0) continue;
        float* p = &out.rgb.at(0, c, 0, 0);
        const size_t hw = static_cast<size_t>(out.height()) * out.width();
        for (size_t i = 0; i < hw; ++i)
            p[i] = std::clamp(p[i] * static_cast<float>(colors[c]), 0.0f, 1.0f);
    }
    if (flip) detail::flip_horizontal(out);
    return out;
}

}  // namespace depthscope::io
