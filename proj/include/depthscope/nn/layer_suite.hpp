#pragma once

#include <string>
#include <vector>

#include "depthscope/nn/blocks.hpp"

namespace depthscope::nn {

/// One self-contained gradient-check case: a tiny network exercising a single
/// layer type (plus the 1x1 readout the loss needs).
struct LayerCase {
    std::string name;
    Network<double> net;
    Tensor<double> input;
};

/// Covers every layer type the architectures use, including the stride,
/// dilation and kernel-size variants of convolution.
inline std::vector<LayerCase> standard_layer_suite() {
    std::vector<LayerCase> cases;
    uint64_t seed = 1000;
    auto input_for = [](int c, int h, int w, uint64_t s) {
        RngStream rng(s);
        Tensor<double> t(1, c, h, w);
        for (auto& v : t.data) v = rng.uniform(-1.0, 1.0);
        return t;
    };
    auto add_case = [&](const std::string& name, auto&& wire, int c, int h, int w) {
        LayerCase lc;
        lc.name = name;
        GraphBuilder<double> b(lc.net, seed);
        int x = b.input(c);
        int y = wire(b, x);
        lc.net.outputs = {b.conv(y, 1, 1, 1, 0, 1, true, "readout")};
        lc.input = input_for(c, h, w, seed);
        ++seed;
        cases.push_back(std::move(lc));
    };

    add_case("conv_1x1", [](auto& b, int x) { return b.conv(x, 3, 1, 1, 0, 1, true, "c"); }, 2,
             6, 6);
    add_case("conv_3x3", [](auto& b, int x) { return b.conv(x, 3, 3, 1, 1, 1, true, "c"); }, 2,
             7, 7);
    add_case("conv_3x3_s2", [](auto& b, int x) { return b.conv(x, 3, 3, 2, 1, 1, false, "c"); },
             2, 8, 8);
    add_case("conv_3x3_d2", [](auto& b, int x) { return b.conv(x, 3, 3, 1, 2, 2, false, "c"); },
             2, 8, 8);
    add_case("conv_3x3_d4", [](auto& b, int x) { return b.conv(x, 2, 3, 1, 4, 4, false, "c"); },
             2, 10, 10);
    add_case("conv_5x5", [](auto& b, int x) { return b.conv(x, 2, 5, 1, 2, 1, false, "c"); }, 2,
             8, 8);
    add_case("conv_7x7_s2", [](auto& b, int x) { return b.conv(x, 2, 7, 2, 3, 1, false, "c"); },
             3, 12, 12);
    add_case("batchnorm", [](auto& b, int x) { return b.bn(x, "bn"); }, 3, 5, 5);
    add_case("rrelu", [](auto& b, int x) { return b.rrelu(x, "act"); }, 2, 6, 6);
    add_case("relu", [](auto& b, int x) { return b.relu(x, "act"); }, 2, 6, 6);
    add_case("maxpool_3x3_s2_p1",
             [](auto& b, int x) { return b.maxpool(x, 3, 2, 1, "pool"); }, 2, 9, 9);
    add_case("maxpool_2x2_s2", [](auto& b, int x) { return b.maxpool(x, 2, 2, 0, "pool"); }, 2,
             8, 8);
    add_case("upsample_x2", [](auto& b, int x) { return b.upsample(x, 2, "up"); }, 2, 4, 4);
    add_case("global_avg_pool",
             [](auto& b, int x) { return b.global_avg_pool(x, "gap"); }, 3, 5, 5);
    add_case("upsample_to",
             [](auto& b, int x) {
                 int g = b.global_avg_pool(x, "gap");
                 return b.upsample_to(g, x, "up");
             },
             2, 4, 6);
    add_case("concat",
             [](auto& b, int x) {
                 int a = b.conv(x, 2, 3, 1, 1, 1, false, "a");
                 int c = b.conv(x, 3, 3, 1, 1, 1, false, "b");
                 return b.concat({a, c}, "cat");
             },
             2, 6, 6);
    add_case("add_residual",
             [](auto& b, int x) {
                 int a = b.conv(x, 2, 3, 1, 1, 1, false, "a");
                 return b.add(a, x, "sum");
             },
             2, 6, 6);
    add_case("bottleneck",
             [](auto& b, int x) { return b.bottleneck(x, 2, 8, 1, 1, "blk"); }, 4, 6, 6);
    add_case("bottleneck_s2",
             [](auto& b, int x) { return b.bottleneck(x, 2, 8, 2, 1, "blk"); }, 4, 8, 8);
    add_case("bottleneck_d2",
             [](auto& b, int x) { return b.bottleneck(x, 2, 8, 1, 2, "blk"); }, 4, 8, 8);
    add_case("up_projection",
             [](auto& b, int x) { return b.up_projection(x, 3, "up"); }, 4, 4, 4);
    add_case("aspp", [](auto& b, int x) { return b.aspp(x, 2, "aspp"); }, 3, 6, 6);
    add_case("depth_head", [](auto& b, int x) { return b.depth_head(x, "head"); }, 3, 6, 6);
    return cases;
}

}  // namespace depthscope::nn
