#include <gtest/gtest.h>

#include <cmath>

#include "depthscope/core/rng.hpp"
#include "depthscope/metrics/vcs.hpp"

using namespace depthscope;
using metrics::CameraIntrinsics;
using metrics::CannyParams;
using metrics::EdgeSet;

namespace {

CameraIntrinsics test_intrinsics(int w, int h) {
    CameraIntrinsics c;
    c.fx = c.fy = 100.0;
    c.cx = (w - 1) / 2.0;
    c.cy = (h - 1) / 2.0;
    return c;
}

TensorF random_image(int c, int h, int w, uint64_t seed) {
    RngStream rng(seed);
    TensorF img(1, c, h, w);
    for (auto& v : img.data) v = static_cast<float>(rng.uniform(0.0, 1.0));
    return img;
}

}  // namespace

TEST(Backproject, PrincipalPointMapsToAxis) {
    CameraIntrinsics intr{50.0, 60.0, 3.0, 2.0};
    TensorF depth(1, 1, 5, 7, 4.0f);
    auto pc = metrics::backproject(depth, intr);
    // pixel (u=3, v=2) is the principal point
    for (size_t i = 0; i < pc.size(); ++i)
        if (pc.src[i] == 2 * 7 + 3) {
            EXPECT_DOUBLE_EQ(pc.x[i], 0.0);
            EXPECT_DOUBLE_EQ(pc.y[i], 0.0);
            EXPECT_DOUBLE_EQ(pc.z[i], 4.0);
        }
}

TEST(Backproject, FormulaSubstitution) {
    CameraIntrinsics intr{1.0, 1.0, 0.0, 0.0};
    TensorF depth(1, 1, 5, 5, 0.0f);
    depth.at(0, 0, 3, 2) = 4.0f;  // (u=2, v=3)
    auto pc = metrics::backproject(depth, intr);
    ASSERT_EQ(pc.size(), 1u);
    EXPECT_DOUBLE_EQ(pc.x[0], 8.0);
    EXPECT_DOUBLE_EQ(pc.y[0], 12.0);
    EXPECT_DOUBLE_EQ(pc.z[0], 4.0);
}

TEST(Backproject, DoublingFocalHalvesX) {
    CameraIntrinsics a{100.0, 100.0, 0.0, 0.0};
    CameraIntrinsics b{200.0, 100.0, 0.0, 0.0};
    TensorF depth(1, 1, 3, 3, 2.0f);
    auto pa = metrics::backproject(depth, a);
    auto pb = metrics::backproject(depth, b);
    for (size_t i = 0; i < pa.size(); ++i) EXPECT_DOUBLE_EQ(pa.x[i], 2.0 * pb.x[i]);
}

TEST(Backproject, InvalidIntrinsicsThrow) {
    CameraIntrinsics bad{0.0, 1.0, 0.0, 0.0};
    TensorF depth(1, 1, 2, 2, 1.0f);
    EXPECT_THROW(metrics::backproject(depth, bad), std::invalid_argument);
}

TEST(ProjectSplat, IdentityAtZeroTranslation) {
    auto img = random_image(3, 12, 16, 7);
    RngStream rng(8);
    TensorF depth(1, 1, 12, 16);
    for (auto& v : depth.data) v = static_cast<float>(rng.uniform(0.5, 9.5));
    depth.at(0, 0, 2, 3) = 0.0f;  // one invalid pixel
    auto intr = test_intrinsics(16, 12);
    auto vcs = metrics::simulate_viewpoint_change(img, depth, intr, 0.0, 0.0);
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 16; ++x) {
            bool valid = depth.at(0, 0, y, x) > 0.0f;
            EXPECT_EQ(vcs.mask[y * 16 + x], valid ? 1 : 0);
            if (valid)
                for (int c = 0; c < 3; ++c)
                    EXPECT_EQ(vcs.image.at(0, c, y, x), img.at(0, c, y, x));
        }
}

TEST(ProjectSplat, ConstantPlaneShiftsByRoundedAmount) {
    // fx*tx/Z = 100*0.15/5 = 3 pixels, exactly
    auto img = random_image(1, 8, 12, 9);
    TensorF depth(1, 1, 8, 12, 5.0f);
    auto intr = test_intrinsics(12, 8);
    auto vcs = metrics::simulate_viewpoint_change(img, depth, intr, 0.15, 0.0);
    const int shift = 3;
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 12; ++x) {
            int sx = x + shift;  // camera moved +x, scene shifts -x
            bool valid = sx >= 0 && sx < 12;
            EXPECT_EQ(vcs.mask[y * 12 + x], valid ? 1 : 0) << y << "," << x;
            if (valid) EXPECT_EQ(vcs.image.at(0, 0, y, x), img.at(0, 0, y, sx));
        }
}

TEST(ProjectSplat, ZBufferKeepsNearestAndIsOrderIndependent) {
    // two points landing on the same destination pixel
    metrics::PointCloud pc;
    pc.h = 1;
    pc.w = 4;
    CameraIntrinsics intr{1.0, 1.0, 0.0, 0.0};
    // both points project to u = 0 (x = 0): payloads differ
    pc.x = {0.0, 0.0};
    pc.y = {0.0, 0.0};
    pc.z = {5.0, 2.0};
    pc.src = {1, 2};
    auto payload = TensorF::from_data(1, 1, 1, 4, {10.f, 20.f, 30.f, 40.f});
    auto a = metrics::project_splat(pc, payload, intr, 0.0, 0.0);
    EXPECT_EQ(a.image.at(0, 0, 0, 0), 30.0f);  // z=2 wins

    std::swap(pc.x[0], pc.x[1]);
    std::swap(pc.y[0], pc.y[1]);
    std::swap(pc.z[0], pc.z[1]);
    std::swap(pc.src[0], pc.src[1]);
    auto b = metrics::project_splat(pc, payload, intr, 0.0, 0.0);
    EXPECT_EQ(b.image.at(0, 0, 0, 0), 30.0f);

    // equal depths: smallest source index wins regardless of order
    pc.z = {2.0, 2.0};
    auto c = metrics::project_splat(pc, payload, intr, 0.0, 0.0);
    EXPECT_EQ(c.image.at(0, 0, 0, 0), 20.0f);  // src=1 beats src=2
}

TEST(Vcs, HugeTranslationEmptiesMask) {
    auto img = random_image(1, 6, 6, 10);
    TensorF depth(1, 1, 6, 6, 3.0f);
    auto intr = test_intrinsics(6, 6);
    auto vcs = metrics::simulate_viewpoint_change(img, depth, intr, 100.0, 0.0);
    EXPECT_EQ(vcs.valid_count(), 0u);
}

TEST(Vcs, ShrinkingTranslationGrowsValidCount) {
    auto img = random_image(1, 8, 8, 11);
    TensorF depth(1, 1, 8, 8, 4.0f);
    auto intr = test_intrinsics(8, 8);
    size_t prev = 0;
    for (double tx : {0.3, 0.2, 0.1, 0.0}) {
        auto vcs = metrics::simulate_viewpoint_change(img, depth, intr, tx, 0.0);
        EXPECT_GE(vcs.valid_count(), prev);
        prev = vcs.valid_count();
    }
    EXPECT_EQ(prev, 64u);
}

TEST(ConsistentMse, Cases) {
    auto img = random_image(1, 4, 4, 12);
    TensorF depth(1, 1, 4, 4, 2.0f);
    auto intr = test_intrinsics(4, 4);
    auto a = metrics::simulate_viewpoint_change(img, depth, intr, 0.0, 0.0);
    EXPECT_DOUBLE_EQ(metrics::consistent_mse(a, a), 0.0);

    // hand case: diffs 1 and 3 over two joint-valid pixels -> (1+9)/2
    metrics::VcsResult<float> u, v;
    u.image = TensorF::from_data(1, 1, 1, 3, {1.f, 5.f, 9.f});
    v.image = TensorF::from_data(1, 1, 1, 3, {0.f, 2.f, 0.f});
    u.mask = {1, 1, 0};
    v.mask = {1, 1, 1};
    EXPECT_DOUBLE_EQ(metrics::consistent_mse(u, v), 5.0);

    u.mask = {1, 0, 0};
    v.mask = {0, 1, 1};
    EXPECT_THROW(metrics::consistent_mse(u, v), std::invalid_argument);
}

TEST(RgbToGray, WeightedAverage) {
    TensorF white(1, 3, 2, 2, 1.0f);
    auto g = metrics::rgb_to_gray(white);
    for (float v : g.data) EXPECT_NEAR(v, 1.0f, 1e-6);

    TensorF red(1, 3, 1, 1, 0.0f);
    red.at(0, 0, 0, 0) = 1.0f;
    EXPECT_NEAR(metrics::rgb_to_gray(red).data[0], 0.299f, 1e-6);

    // gray input replicated to 3 channels comes back unchanged
    auto any = random_image(1, 3, 3, 13);
    TensorF rep(1, 3, 3, 3);
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 9; ++i) rep.data[c * 9 + i] = any.data[i];
    auto back = metrics::rgb_to_gray(rep);
    for (int i = 0; i < 9; ++i) EXPECT_NEAR(back.data[i], any.data[i], 1e-6);

    TensorF wrong(1, 2, 2, 2, 0.0f);
    EXPECT_THROW(metrics::rgb_to_gray(wrong), std::invalid_argument);
}

TEST(Canny, ConstantImageHasNoEdges) {
    TensorF img(1, 1, 16, 16, 0.7f);
    auto edges = metrics::canny(img);
    EXPECT_EQ(edges.count(), 0u);
}

TEST(Canny, VerticalStepGivesSingleColumn) {
    TensorF img(1, 1, 16, 16, 0.0f);
    const int step_col = 8;
    for (int y = 0; y < 16; ++y)
        for (int x = step_col; x < 16; ++x) img.at(0, 0, y, x) = 1.0f;
    auto edges = metrics::canny(img);
    ASSERT_GT(edges.count(), 0u);
    std::set<int> cols;
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x)
            if (edges.at(y, x)) cols.insert(x);
    EXPECT_EQ(cols.size(), 1u) << "edge must be one pixel wide";
    int col = *cols.begin();
    EXPECT_TRUE(col == step_col || col == step_col - 1) << col;
}

TEST(Canny, OutputIsBinaryAndThresholdsValidated) {
    auto img = random_image(1, 12, 12, 14);
    auto edges = metrics::canny(img);
    for (uint8_t e : edges.edges) EXPECT_TRUE(e == 0 || e == 1);
    CannyParams bad;
    bad.low = 0.3;
    bad.high = 0.2;
    EXPECT_THROW(metrics::canny(img, bad), std::invalid_argument);
}

TEST(Edt, AllEdgesGiveZeros) {
    EdgeSet e;
    e.h = e.w = 4;
    e.edges.assign(16, 1);
    for (double d : metrics::distance_transform_edt(e)) EXPECT_DOUBLE_EQ(d, 0.0);
}

TEST(Edt, SingleCornerPixel) {
    EdgeSet e;
    e.h = e.w = 3;
    e.edges.assign(9, 0);
    e.edges[0] = 1;
    auto d = metrics::distance_transform_edt(e);
    EXPECT_DOUBLE_EQ(d[0], 0.0);
    EXPECT_NEAR(d[8], 2.828427, 1e-6);  // sqrt(8) at (2,2)
    EXPECT_DOUBLE_EQ(d[2], 2.0);
}

TEST(Edt, EmptyEdgeSetThrows) {
    EdgeSet e;
    e.h = e.w = 3;
    e.edges.assign(9, 0);
    EXPECT_THROW(metrics::distance_transform_edt(e), std::invalid_argument);
}

TEST(Edt, MatchesBruteForceExactly) {
    RngStream rng(200);
    for (int trial = 0; trial < 40; ++trial) {
        int h = 5 + static_cast<int>(rng.uniform_index(28));
        int w = 5 + static_cast<int>(rng.uniform_index(28));
        EdgeSet e;
        e.h = h;
        e.w = w;
        e.edges.assign(static_cast<size_t>(h) * w, 0);
        int count = 1 + static_cast<int>(rng.uniform_index(12));
        for (int i = 0; i < count; ++i)
            e.edges[rng.uniform_index(e.edges.size())] = 1;

        auto fast = metrics::distance_transform_squared(e);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                long best = LONG_MAX;
                for (int ey = 0; ey < h; ++ey)
                    for (int ex = 0; ex < w; ++ex)
                        if (e.at(ey, ex)) {
                            long dy = y - ey, dx = x - ex;
                            best = std::min(best, dy * dy + dx * dx);
                        }
                EXPECT_EQ(fast[static_cast<size_t>(y) * w + x], static_cast<double>(best))
                    << "pixel (" << y << "," << x << ")";
            }
    }
}

namespace {

// A textured scene: bright rectangle over dark background so Canny fires.
void textured_scene(TensorF& rgb, TensorF& depth) {
    rgb = TensorF(1, 3, 24, 32, 0.1f);
    depth = TensorF(1, 1, 24, 32, 6.0f);
    for (int y = 8; y < 16; ++y)
        for (int x = 10; x < 22; ++x) {
            for (int c = 0; c < 3; ++c) rgb.at(0, c, y, x) = 0.9f;
            depth.at(0, 0, y, x) = 3.0f;
        }
}

}  // namespace

TEST(ContourMetric, ZeroWhenInferredEqualsGroundTruth) {
    TensorF rgb, depth;
    textured_scene(rgb, depth);
    auto intr = test_intrinsics(32, 24);
    double m = metrics::contour_vcs_metric(rgb, depth, depth, intr, 0.05, 0.0);
    EXPECT_DOUBLE_EQ(m, 0.0);
}

TEST(ContourMetric, SinglePixelShiftGivesOne) {
    // E_GT: single point; E_I: that point shifted one pixel along x
    EdgeSet e_gt;
    e_gt.h = e_gt.w = 9;
    e_gt.edges.assign(81, 0);
    e_gt.edges[4 * 9 + 4] = 1;
    auto dist = metrics::distance_transform_edt(e_gt);
    EXPECT_DOUBLE_EQ(dist[4 * 9 + 5], 1.0);
}

TEST(ContourMetric, NonNegativeAndSensitiveToDepthError) {
    TensorF rgb, depth;
    textured_scene(rgb, depth);
    auto intr = test_intrinsics(32, 24);
    TensorF wrong = depth;
    for (auto& v : wrong.data) v *= 0.55f;  // shrink depths; edges shift further
    double m = metrics::contour_vcs_metric(rgb, depth, wrong, intr, 0.4, 0.0);
    EXPECT_GT(m, 0.0);
}
