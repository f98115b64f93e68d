#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "depthscope/core/tensor.hpp"

namespace depthscope::metrics {

/// Valid (prediction, ground truth) pairs, both > 0. Metrics are computed in
/// double precision regardless of the network's scalar type.
struct PixelPairs {
    std::vector<double> pred;
    std::vector<double> gt;

    size_t count() const { return pred.size(); }

    void require_nonempty() const {
        if (pred.empty()) throw std::invalid_argument("metrics: empty pixel pair set");
    }
};

/// Mask set where min_depth < gt <= max_depth.
template <typename T>
Tensor<T> valid_mask(const Tensor<T>& gt, T min_depth, T max_depth) {
    Tensor<T> mask(gt.n(), gt.c(), gt.h(), gt.w());
    for (size_t i = 0; i < gt.size(); ++i)
        mask.data[i] = (gt.data[i] > min_depth && gt.data[i] <= max_depth) ? T(1) : T(0);
    return mask;
}

/// Gathers masked pairs; predictions are clamped to [clamp_lo, clamp_hi] so
/// log10 stays defined (the depth head can emit exact zeros through ReLU).
template <typename T>
PixelPairs collect_pairs(const Tensor<T>& pred, const Tensor<T>& gt, const Tensor<T>& mask,
                         double clamp_lo = 1e-3, double clamp_hi = 10.0) {
    if (!pred.same_shape(gt) || !pred.same_shape(mask))
        throw std::invalid_argument("metrics: shape mismatch");
    PixelPairs pairs;
    for (size_t i = 0; i < pred.size(); ++i) {
        if (mask.data[i] <= T(0.5)) continue;
        double y = static_cast<double>(gt.data[i]);
        if (y <= 0.0)
            throw std::invalid_argument("metrics: nonpositive ground-truth depth under mask");
        pairs.pred.push_back(std::clamp(static_cast<double>(pred.data[i]), clamp_lo, clamp_hi));
        pairs.gt.push_back(y);
    }
    return pairs;
}

/// (1/N) * sum |pred - gt| / gt
inline double mean_rel(const PixelPairs& p) {
    p.require_nonempty();
    double acc = 0.0;
    for (size_t i = 0; i < p.count(); ++i) acc += std::abs(p.pred[i] - p.gt[i]) / p.gt[i];
    return acc / static_cast<double>(p.count());
}

/// (1/N) * sum |log10 pred - log10 gt|
inline double mean_log10(const PixelPairs& p) {
    p.require_nonempty();
    double acc = 0.0;
    for (size_t i = 0; i < p.count(); ++i) {
        if (p.pred[i] <= 0.0 || p.gt[i] <= 0.0)
            throw std::invalid_argument("mean_log10: nonpositive depth");
        acc += std::abs(std::log10(p.pred[i]) - std::log10(p.gt[i]));
    }
    return acc / static_cast<double>(p.count());
}

/// sqrt((1/N) * sum (pred - gt)^2)
inline double rmse(const PixelPairs& p) {
    p.require_nonempty();
    double acc = 0.0;
    for (size_t i = 0; i < p.count(); ++i) {
        double d = p.pred[i] - p.gt[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(p.count()));
}

/// Percentage of pixels with max(pred/gt, gt/pred) strictly below 1.25^k.
inline double delta_threshold(const PixelPairs& p, int k) {
    p.require_nonempty();
    if (k < 1 || k > 3) throw std::invalid_argument("delta_threshold: k must be 1..3");
    const double thr = std::pow(1.25, k);
    size_t hits = 0;
    for (size_t i = 0; i < p.count(); ++i) {
        if (p.pred[i] <= 0.0 || p.gt[i] <= 0.0)
            throw std::invalid_argument("delta_threshold: nonpositive depth");
        double ratio = std::max(p.pred[i] / p.gt[i], p.gt[i] / p.pred[i]);
        if (ratio < thr) ++hits;
    }
    return 100.0 * static_cast<double>(hits) / static_cast<double>(p.count());
}

struct MetricReport {
    double rel = 0.0;
    double log10 = 0.0;
    double rms = 0.0;
    double delta1 = 0.0, delta2 = 0.0, delta3 = 0.0;
    size_t n = 0;
    // filled by the VCS evaluation when requested
    bool has_vcs = false;
    double consistent_mse = 0.0;
    double contour = 0.0;
};

inline MetricReport report_from_pairs(const PixelPairs& pairs) {
    MetricReport r;
    r.rel = mean_rel(pairs);
    r.log10 = mean_log10(pairs);
    r.rms = rmse(pairs);
    r.delta1 = delta_threshold(pairs, 1);
    r.delta2 = delta_threshold(pairs, 2);
    r.delta3 = delta_threshold(pairs, 3);
    r.n = pairs.count();
    return r;
}

/// All six standard metrics over the masked pixels of one image or batch.
template <typename T>
MetricReport metric_report(const Tensor<T>& pred, const Tensor<T>& gt, const Tensor<T>& mask,
                           double max_depth = 10.0) {
    return report_from_pairs(collect_pairs(pred, gt, mask, 1e-3, max_depth));
}

/// Pixels pooled across the whole set (the formulas' single N).
inline MetricReport pooled_report(const std::vector<PixelPairs>& per_image) {
    PixelPairs all;
    for (const auto& p : per_image) {
        all.pred.insert(all.pred.end(), p.pred.begin(), p.pred.end());
        all.gt.insert(all.gt.end(), p.gt.begin(), p.gt.end());
    }
    return report_from_pairs(all);
}

/// Per-image averaging alternative, exposed behind a CLI flag.
inline MetricReport per_image_report(const std::vector<PixelPairs>& per_image) {
    if (per_image.empty()) throw std::invalid_argument("metrics: no images");
    MetricReport acc;
    for (const auto& p : per_image) {
        auto r = report_from_pairs(p);
        acc.rel += r.rel;
        acc.log10 += r.log10;
        acc.rms += r.rms;
        acc.delta1 += r.delta1;
        acc.delta2 += r.delta2;
        acc.delta3 += r.delta3;
        acc.n += r.n;
    }
    const double m = static_cast<double>(per_image.size());
    acc.rel /= m;
    acc.log10 /= m;
    acc.rms /= m;
    acc.delta1 /= m;
    acc.delta2 /= m;
    acc.delta3 /= m;
    return acc;
}

inline nlohmann::json metric_report_json(const MetricReport& r) {
    nlohmann::json j{{"schema_version", 1}, {"rel", r.rel},       {"log", r.log10},
                     {"rms", r.rms},        {"delta1", r.delta1}, {"delta2", r.delta2},
                     {"delta3", r.delta3},  {"n", r.n}};
    if (r.has_vcs) {
        j["consistent_mse"] = r.consistent_mse;
        j["contour"] = r.contour;
    }
    return j;
}

/// Aligned text table in the style used for depth benchmarks.
inline std::string metric_report_text(const MetricReport& r) {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%8s %8s %8s %8s %8s %8s\n", "rel", "log", "rms",
                  "δ1", "δ2", "δ3");
    os << buf;
    std::snprintf(buf, sizeof(buf), "%8.3f %8.3f %8.3f %8.1f %8.1f %8.1f\n", r.rel, r.log10,
                  r.rms, r.delta1, r.delta2, r.delta3);
    os << buf;
    if (r.has_vcs) {
        std::snprintf(buf, sizeof(buf), "consistent_mse %.6f  contour %.4f\n", r.consistent_mse,
                      r.contour);
        os << buf;
    }
    os << "pixels: " << r.n << "\n";
    return os.str();
}

}  // namespace depthscope::metrics
