#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "depthscope/io/image_io.hpp"

namespace depthscope::io {

/// Paired RGB + metric depth + validity mask, spatially aligned.
struct DepthSample {
    Tensor<float> rgb;    // 1x3xHxW in [0,1]
    Tensor<float> depth;  // 1x1xHxW meters
    Tensor<float> mask;   // 1x1xHxW, 1 where depth is valid
    std::string source_id;

    int height() const { return rgb.h(); }
    int width() const { return rgb.w(); }
};

enum class Split { Train, Val, Test };

inline Split parse_split(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "val") return Split::Val;
    if (s == "test") return Split::Test;
    throw std::runtime_error("manifest: unknown split tag '" + s + "' (train|val|test)");
}

struct ManifestEntry {
    std::string rgb_path;
    std::string depth_path;
    Split split;
};

struct Manifest {
    std::vector<ManifestEntry> entries;

    std::vector<ManifestEntry> of(Split s) const {
        std::vector<ManifestEntry> out;
        for (const auto& e : entries)
            if (e.split == s) out.push_back(e);
        return out;
    }
};

/// CSV with header "rgb,depth,split"; relative paths resolve against the
/// manifest's directory. When no val rows exist, the last 10% of train rows
/// are carved into the validation split.
inline Manifest parse_manifest(const std::string& path, bool carve_val = true) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open manifest: " + path);
    const auto base = std::filesystem::path(path).parent_path();
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("manifest: empty file: " + path);
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line != "rgb,depth,split")
        throw std::runtime_error("manifest: header must be 'rgb,depth,split', got '" + line + "'");
    Manifest m;
    size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.size() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string rgb, depth, split;
        if (!std::getline(ss, rgb, ',') || !std::getline(ss, depth, ',') ||
            !std::getline(ss, split))
            throw std::runtime_error("manifest: malformed row " + std::to_string(lineno));
        auto resolve = [&](const std::string& p) {
            std::filesystem::path fp(p);
            return fp.is_absolute() ? fp.string() : (base / fp).string();
        };
        m.entries.push_back({resolve(rgb), resolve(depth), parse_split(split)});
    }
    if (carve_val) {
        bool has_val = false;
        for (const auto& e : m.entries) has_val |= e.split == Split::Val;
        if (!has_val) {
            std::vector<size_t> train_rows;
            for (size_t i = 0; i < m.entries.size(); ++i)
                if (m.entries[i].split == Split::Train) train_rows.push_back(i);
            size_t carve = train_rows.size() / 10;
            for (size_t k = train_rows.size() - carve; k < train_rows.size(); ++k)
                m.entries[train_rows[k]].split = Split::Val;
        }
    }
    return m;
}

inline double sidecar_scale(const std::string& depth_path) {
    std::ifstream f(depth_path + ".json");
    if (!f)
        throw std::runtime_error("16-bit PGM depth needs a sidecar scale file: " + depth_path +
                                 ".json");
    nlohmann::json j;
    f >> j;
    return j.at("meters_per_unit").get<double>();
}

inline void write_sidecar_scale(const std::string& depth_path, double meters_per_unit) {
    std::ofstream f(depth_path + ".json");
    f << nlohmann::json{{"meters_per_unit", meters_per_unit}}.dump() << "\n";
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

/// RGB from PPM or PNG; depth from PFM or 16-bit PGM with a sidecar scale.
/// The validity mask is depth > 0.
inline DepthSample load_sample(const std::string& rgb_path, const std::string& depth_path) {
    DepthSample s;
    if (ends_with(rgb_path, ".ppm"))
        s.rgb = load_ppm(rgb_path);
    else if (ends_with(rgb_path, ".png"))
        s.rgb = load_png(rgb_path);
    else
        throw std::runtime_error("load_sample: unsupported RGB format: " + rgb_path);
    if (ends_with(depth_path, ".pfm"))
        s.depth = load_pfm(depth_path);
    else if (ends_with(depth_path, ".pgm"))
        s.depth = load_pgm(depth_path, sidecar_scale(depth_path));
    else
        throw std::runtime_error("load_sample: unsupported depth format: " + depth_path);
    if (s.depth.c() != 1) throw std::runtime_error("load_sample: depth must be single-channel");
    if (s.rgb.h() != s.depth.h() || s.rgb.w() != s.depth.w())
        throw std::runtime_error("load_sample: rgb/depth size mismatch: " + rgb_path);
    s.mask = Tensor<float>(1, 1, s.depth.h(), s.depth.w());
    for (size_t i = 0; i < s.depth.size(); ++i)
        s.mask.data[i] = s.depth.data[i] > 0.0f ? 1.0f : 0.0f;
    s.source_id = rgb_path;
    return s;
}

inline std::vector<DepthSample> load_split(const Manifest& m, Split split) {
    std::vector<DepthSample> out;
    for (const auto& e : m.of(split)) out.push_back(load_sample(e.rgb_path, e.depth_path));
    return out;
}

/// Nearest-neighbor subsampling applied identically to rgb, depth and mask;
/// every output value exists verbatim in the input.
inline DepthSample downsample_pair(const DepthSample& s, int factor) {
    if (factor < 1) throw std::invalid_argument("downsample_pair: factor < 1");
    if (s.height() % factor != 0 || s.width() % factor != 0)
        throw std::invalid_argument("downsample_pair: dimensions not divisible by factor");
    const int h = s.height() / factor, w = s.width() / factor;
    DepthSample out;
    out.rgb = Tensor<float>(1, 3, h, w);
    out.depth = Tensor<float>(1, 1, h, w);
    out.mask = Tensor<float>(1, 1, h, w);
    out.source_id = s.source_id;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c)
                out.rgb.at(0, c, y, x) = s.rgb.at(0, c, y * factor, x * factor);
            out.depth.at(0, 0, y, x) = s.depth.at(0, 0, y * factor, x * factor);
            out.mask.at(0, 0, y, x) = s.mask.at(0, 0, y * factor, x * factor);
        }
    return out;
}

/// Nearest-neighbor downsampling of a bare map (FPO ground-truth ladder).
inline Tensor<float> downsample_map(const Tensor<float>& m, int factor) {
    if (factor == 1) return m;
    if (m.h() % factor != 0 || m.w() % factor != 0)
        throw std::invalid_argument("downsample_map: dimensions not divisible by factor");
    Tensor<float> out(m.n(), m.c(), m.h() / factor, m.w() / factor);
    for (int n = 0; n < m.n(); ++n)
        for (int c = 0; c < m.c(); ++c)
            for (int y = 0; y < out.h(); ++y)
                for (int x = 0; x < out.w(); ++x)
                    out.at(n, c, y, x) = m.at(n, c, y * factor, x * factor);
    return out;
}

}  // namespace depthscope::io
