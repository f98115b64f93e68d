#pragma once

#include <string>
#include <vector>

#include "depthscope/core/rng.hpp"
#include "depthscope/io/dataset.hpp"
#include "depthscope/metrics/vcs.hpp"

namespace depthscope::io {

/// Procedural desk-scale scenes: a fronto-parallel background wall plus a few
/// axis-aligned boxes, composited by smallest depth under a pinhole camera.
/// Surface intensity falls off with depth so the RGB carries depth cues.
struct SynthBox {
    int x0, y0, x1, y1;  // pixel bounds, half-open
    float z;
    float color[3];
    int stripe_period;  // horizontal stripes give Canny something to find
};

struct SynthScene {
    float wall_z;
    float wall_color[3];
    std::vector<SynthBox> boxes;
};

inline metrics::CameraIntrinsics synth_camera(int width, int height) {
    metrics::CameraIntrinsics intr;
    intr.fx = intr.fy = 1.2 * width;
    intr.cx = (width - 1) / 2.0;
    intr.cy = (height - 1) / 2.0;
    return intr;
}

inline SynthScene synth_scene(uint64_t seed, int index, int width, int height) {
    RngStream rng = RngStream::named(seed, "synth-" + std::to_string(index));
    SynthScene scene;
    scene.wall_z = static_cast<float>(rng.uniform(7.0, 9.5));
    for (int c = 0; c < 3; ++c)
        scene.wall_color[c] = static_cast<float>(rng.uniform(0.35, 0.75));
    const int count = 2 + static_cast<int>(rng.uniform_index(3));
    for (int b = 0; b < count; ++b) {
        SynthBox box;
        int bw = width / 5 + static_cast<int>(rng.uniform_index(width / 3));
        int bh = height / 5 + static_cast<int>(rng.uniform_index(height / 3));
        box.x0 = static_cast<int>(rng.uniform_index(std::max(1, width - bw)));
        box.y0 = static_cast<int>(rng.uniform_index(std::max(1, height - bh)));
        box.x1 = std::min(width, box.x0 + bw);
        box.y1 = std::min(height, box.y0 + bh);
        box.z = static_cast<float>(rng.uniform(1.5, 6.0));
        for (int c = 0; c < 3; ++c)
            box.color[c] = static_cast<float>(rng.uniform(0.2, 1.0));
        box.stripe_period = 4 + static_cast<int>(rng.uniform_index(5));
        scene.boxes.push_back(box);
    }
    return scene;
}

inline DepthSample render_scene(const SynthScene& scene, int width, int height) {
    DepthSample s;
    s.rgb = Tensor<float>(1, 3, height, width);
    s.depth = Tensor<float>(1, 1, height, width);
    s.mask = Tensor<float>(1, 1, height, width, 1.0f);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            float z = scene.wall_z;
            const float* color = scene.wall_color;
            int stripe = 0;
            for (const auto& box : scene.boxes)
                if (x >= box.x0 && x < box.x1 && y >= box.y0 && y < box.y1 && box.z < z) {
                    z = box.z;
                    color = box.color;
                    stripe = (y / box.stripe_period) % 2;
                }
            const float shade = (1.0f - 0.06f * z) * (stripe ? 0.85f : 1.0f);
            for (int c = 0; c < 3; ++c) s.rgb.at(0, c, y, x) = color[c] * shade;
            s.depth.at(0, 0, y, x) = z;
        }
    return s;
}

/// Deterministic function of (seed, count, size).
inline std::vector<DepthSample> synth_generate(uint64_t seed, int count, int width, int height) {
    if (width % 16 != 0 || height % 16 != 0)
        throw std::invalid_argument("synth_generate: size must be divisible by 16");
    std::vector<DepthSample> out;
    for (int i = 0; i < count; ++i) {
        out.push_back(render_scene(synth_scene(seed, i, width, height), width, height));
        out.back().source_id = "synth-" + std::to_string(seed) + "-" + std::to_string(i);
    }
    return out;
}

/// Writes PPM + PFM pairs and a manifest. Labels the last `test_count`
/// samples as the test split.
inline std::string write_synth_dataset(const std::string& dir, uint64_t seed, int count,
                                       int width, int height, int test_count = 0) {
    std::filesystem::create_directories(dir);
    auto samples = synth_generate(seed, count, width, height);
    std::string manifest_path = (std::filesystem::path(dir) / "manifest.csv").string();
    std::ofstream mf(manifest_path);
    mf << "rgb,depth,split\n";
    for (int i = 0; i < count; ++i) {
        std::string stem = "sample_" + std::to_string(i);
        save_ppm((std::filesystem::path(dir) / (stem + ".ppm")).string(), samples[i].rgb);
        save_pfm((std::filesystem::path(dir) / (stem + ".pfm")).string(), samples[i].depth);
        mf << stem << ".ppm," << stem << ".pfm,"
           << (i >= count - test_count ? "test" : "train") << "\n";
    }
    return manifest_path;
}

}  // namespace depthscope::io
