#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "depthscope/core/rng.hpp"
#include "depthscope/metrics/standard.hpp"

using namespace depthscope;
using metrics::MetricReport;
using metrics::PixelPairs;

namespace {

// Naive per-pixel oracle, kept independent of the library implementation.
struct OracleResult {
    double rel, log10, rms, d1, d2, d3;
};

OracleResult oracle(const PixelPairs& p) {
    OracleResult o{0, 0, 0, 0, 0, 0};
    size_t n = p.count();
    for (size_t i = 0; i < n; ++i) {
        o.rel += std::fabs(p.pred[i] - p.gt[i]) / p.gt[i];
        o.log10 += std::fabs(std::log10(p.pred[i]) - std::log10(p.gt[i]));
        o.rms += (p.pred[i] - p.gt[i]) * (p.pred[i] - p.gt[i]);
        double r = std::max(p.pred[i] / p.gt[i], p.gt[i] / p.pred[i]);
        if (r < 1.25) o.d1 += 1;
        if (r < 1.25 * 1.25) o.d2 += 1;
        if (r < 1.25 * 1.25 * 1.25) o.d3 += 1;
    }
    o.rel /= n;
    o.log10 /= n;
    o.rms = std::sqrt(o.rms / n);
    o.d1 *= 100.0 / n;
    o.d2 *= 100.0 / n;
    o.d3 *= 100.0 / n;
    return o;
}

PixelPairs random_pairs(RngStream& rng, size_t n) {
    PixelPairs p;
    for (size_t i = 0; i < n; ++i) {
        p.gt.push_back(rng.uniform(0.1, 10.0));
        p.pred.push_back(rng.uniform(0.05, 11.0));
    }
    return p;
}

double rel_diff(double a, double b) {
    return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-300});
}

}  // namespace

TEST(ValidMask, Bounds) {
    auto gt = TensorD::from_data(1, 1, 1, 4, {0.0, 5.0, 10.0, 10.5});
    auto mask = metrics::valid_mask(gt, 0.0, 10.0);
    EXPECT_EQ(mask.data, (std::vector<double>{0, 1, 1, 0}));

    TensorD zeros(1, 1, 2, 2, 0.0);
    auto empty = metrics::valid_mask(zeros, 0.0, 10.0);
    for (double v : empty.data) EXPECT_EQ(v, 0.0);

    TensorD fives(1, 1, 2, 2, 5.0);
    auto full = metrics::valid_mask(fives, 0.0, 10.0);
    for (double v : full.data) EXPECT_EQ(v, 1.0);
}

TEST(MeanRel, Cases) {
    PixelPairs same{{2.0, 3.0}, {2.0, 3.0}};
    EXPECT_DOUBLE_EQ(metrics::mean_rel(same), 0.0);

    PixelPairs one{{1.5}, {1.0}};
    EXPECT_DOUBLE_EQ(metrics::mean_rel(one), 0.5);

    PixelPairs two{{2.0, 1.0}, {1.0, 2.0}};
    EXPECT_DOUBLE_EQ(metrics::mean_rel(two), 0.75);

    PixelPairs empty;
    EXPECT_THROW(metrics::mean_rel(empty), std::invalid_argument);
}

TEST(MeanLog10, Cases) {
    PixelPairs ten{{10.0}, {1.0}};
    EXPECT_DOUBLE_EQ(metrics::mean_log10(ten), 1.0);

    PixelPairs a{{2.0}, {1.0}};
    PixelPairs b{{1.0}, {2.0}};
    EXPECT_DOUBLE_EQ(metrics::mean_log10(a), metrics::mean_log10(b));
}

TEST(Rmse, Cases) {
    PixelPairs diffs{{3.0, 4.0}, {0.0 + 1e-9, 1e-9}};
    // keep gt positive; diffs are effectively (3, 4)
    PixelPairs p{{4.0, 6.0}, {1.0, 2.0}};
    EXPECT_NEAR(metrics::rmse(p), std::sqrt(12.5), 1e-12);

    PixelPairs offset{{2.5, 3.5, 4.5}, {1.5, 2.5, 3.5}};
    EXPECT_NEAR(metrics::rmse(offset), 1.0, 1e-12);
    (void)diffs;
}

TEST(DeltaThreshold, RatioBoundaries) {
    // uniform 1.3x over-prediction
    PixelPairs p13;
    for (int i = 1; i <= 8; ++i) {
        p13.gt.push_back(i);
        p13.pred.push_back(1.3 * i);
    }
    EXPECT_DOUBLE_EQ(metrics::delta_threshold(p13, 1), 0.0);
    EXPECT_DOUBLE_EQ(metrics::delta_threshold(p13, 2), 100.0);  // 1.3 < 1.5625
    EXPECT_DOUBLE_EQ(metrics::delta_threshold(p13, 3), 100.0);

    PixelPairs p2;
    for (int i = 1; i <= 8; ++i) {
        p2.gt.push_back(i);
        p2.pred.push_back(2.0 * i);
    }
    EXPECT_DOUBLE_EQ(metrics::delta_threshold(p2, 1), 0.0);
    EXPECT_DOUBLE_EQ(metrics::delta_threshold(p2, 2), 0.0);
    EXPECT_DOUBLE_EQ(metrics::delta_threshold(p2, 3), 0.0);  // 2 > 1.953125

    // exactly at the threshold does not count (strict inequality)
    PixelPairs exact{{1.25}, {1.0}};
    EXPECT_DOUBLE_EQ(metrics::delta_threshold(exact, 1), 0.0);
}

TEST(Report, IdentityPrediction) {
    TensorD gt(1, 1, 4, 4, 3.0);
    TensorD mask(1, 1, 4, 4, 1.0);
    auto r = metrics::metric_report(gt, gt, mask);
    EXPECT_DOUBLE_EQ(r.rel, 0.0);
    EXPECT_DOUBLE_EQ(r.log10, 0.0);
    EXPECT_DOUBLE_EQ(r.rms, 0.0);
    EXPECT_DOUBLE_EQ(r.delta1, 100.0);
    EXPECT_DOUBLE_EQ(r.delta2, 100.0);
    EXPECT_DOUBLE_EQ(r.delta3, 100.0);
    EXPECT_EQ(r.n, 16u);
}

TEST(Report, MatchesOracleOnRandomArrays) {
    RngStream rng(100);
    for (int trial = 0; trial < 50; ++trial) {
        auto pairs = random_pairs(rng, 256);
        auto r = metrics::report_from_pairs(pairs);
        auto o = oracle(pairs);
        EXPECT_LT(rel_diff(r.rel, o.rel), 1e-12);
        EXPECT_LT(rel_diff(r.log10, o.log10), 1e-12);
        EXPECT_LT(rel_diff(r.rms, o.rms), 1e-12);
        EXPECT_DOUBLE_EQ(r.delta1, o.d1);
        EXPECT_DOUBLE_EQ(r.delta2, o.d2);
        EXPECT_DOUBLE_EQ(r.delta3, o.d3);
        EXPECT_LE(r.delta1, r.delta2);
        EXPECT_LE(r.delta2, r.delta3);
    }
}

TEST(Report, PermutationInvariance) {
    RngStream rng(101);
    auto pairs = random_pairs(rng, 64);
    auto r1 = metrics::report_from_pairs(pairs);
    std::vector<size_t> idx(64);
    for (size_t i = 0; i < 64; ++i) idx[i] = i;
    rng.shuffle(idx.begin(), idx.end());
    PixelPairs shuffled;
    for (size_t i : idx) {
        shuffled.pred.push_back(pairs.pred[i]);
        shuffled.gt.push_back(pairs.gt[i]);
    }
    auto r2 = metrics::report_from_pairs(shuffled);
    EXPECT_LT(rel_diff(r1.rel, r2.rel), 1e-12);
    EXPECT_LT(rel_diff(r1.rms, r2.rms), 1e-12);
    EXPECT_DOUBLE_EQ(r1.delta1, r2.delta1);
}

TEST(Report, ScalingInvariances) {
    RngStream rng(102);
    auto pairs = random_pairs(rng, 128);
    auto base = metrics::report_from_pairs(pairs);
    const double c = 2.75;
    PixelPairs scaled;
    for (size_t i = 0; i < pairs.count(); ++i) {
        scaled.pred.push_back(c * pairs.pred[i]);
        scaled.gt.push_back(c * pairs.gt[i]);
    }
    auto r = metrics::report_from_pairs(scaled);
    EXPECT_LT(rel_diff(r.rel, base.rel), 1e-12);
    EXPECT_LT(rel_diff(r.log10, base.log10), 1e-9);
    EXPECT_LT(rel_diff(r.rms, c * base.rms), 1e-12);
    EXPECT_DOUBLE_EQ(r.delta1, base.delta1);
    EXPECT_DOUBLE_EQ(r.delta2, base.delta2);
    EXPECT_DOUBLE_EQ(r.delta3, base.delta3);
}

TEST(Report, ClampsPredictionsBeforeEvaluation) {
    // a zero prediction must not produce -inf log10
    auto pred = TensorD::from_data(1, 1, 1, 2, {0.0, 5.0});
    auto gt = TensorD::from_data(1, 1, 1, 2, {4.0, 5.0});
    TensorD mask(1, 1, 1, 2, 1.0);
    auto r = metrics::metric_report(pred, gt, mask);
    EXPECT_TRUE(std::isfinite(r.log10));
    EXPECT_EQ(r.n, 2u);
}

TEST(Report, EmptyMaskThrows) {
    TensorD pred(1, 1, 2, 2, 1.0), gt(1, 1, 2, 2, 1.0), mask(1, 1, 2, 2, 0.0);
    EXPECT_THROW(metrics::metric_report(pred, gt, mask), std::invalid_argument);
}

TEST(Report, TextTableHeader) {
    MetricReport r;
    r.rel = 0.167;
    r.log10 = 0.066;
    r.rms = 0.603;
    r.delta1 = 77.9;
    r.delta2 = 94.9;
    r.delta3 = 98.9;
    auto text = metrics::metric_report_text(r);
    EXPECT_NE(text.find("rel"), std::string::npos);
    EXPECT_NE(text.find("log"), std::string::npos);
    EXPECT_NE(text.find("rms"), std::string::npos);
    EXPECT_NE(text.find("δ1"), std::string::npos);
    EXPECT_NE(text.find("δ2"), std::string::npos);
    EXPECT_NE(text.find("δ3"), std::string::npos);
    EXPECT_NE(text.find("0.167"), std::string::npos);
}

TEST(Report, PooledVersusPerImageModes) {
    PixelPairs a{{1.0, 1.0}, {1.0, 1.0}};          // perfect image
    PixelPairs b{{2.0, 2.0}, {1.0, 1.0}};          // 100% rel error image
    auto pooled = metrics::pooled_report({a, b});
    auto per = metrics::per_image_report({a, b});
    EXPECT_DOUBLE_EQ(pooled.rel, 0.5);
    EXPECT_DOUBLE_EQ(per.rel, 0.5);  // equal sizes agree
    PixelPairs big{{2.0, 2.0, 2.0, 2.0, 2.0, 2.0}, {1.0, 1.0, 1.0, 1.0, 1.0, 1.0}};
    EXPECT_DOUBLE_EQ(metrics::pooled_report({a, big}).rel, 0.75);
    EXPECT_DOUBLE_EQ(metrics::per_image_report({a, big}).rel, 0.5);
}
