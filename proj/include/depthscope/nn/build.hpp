#pragma once

#include <string>
#include <vector>

#include "depthscope/nn/blocks.hpp"
#include "depthscope/nn/graph.hpp"
#include "depthscope/nn/spec.hpp"

namespace depthscope::nn {

namespace detail {

/// Four bottleneck stages after the stem. A stage converted from striding to
/// dilation keeps the incoming rate in its first block and doubles it for the
/// rest, which preserves the receptive field of the strided original exactly.
struct StagePlan {
    int first_stride;
    int first_dilation;
    int rest_dilation;
};

inline std::array<StagePlan, 4> stage_plans(Arch arch) {
    if (arch == Arch::MSML) {
        // stages 3 and 4 dilated (2- and 4-), middle layer at 1/8
        return {{{1, 1, 1}, {2, 1, 1}, {1, 1, 2}, {1, 2, 4}}};
    }
    // stage 4 dilated (2-), encoder output at 1/16
    return {{{1, 1, 1}, {2, 1, 1}, {2, 1, 1}, {1, 1, 2}}};
}

}  // namespace detail

/// Builds the dilated-ResNet encoder and registers taps:
///   stem (stem width @ 1/2), pooled_stem (@ 1/4), stage1 (@ 1/4),
///   stage2 (@ 1/8), stage3, stage4 (@ 1/16, or @ 1/8 for MSML).
template <typename T>
int build_encoder(GraphBuilder<T>& b, Network<T>& net, const NetworkSpec& spec) {
    const auto widths = stage_widths(spec.channel_multiplier);
    int x = b.input(3);
    x = b.conv(x, widths[0], 7, 2, 3, 1, false, "encoder.stem.conv");
    x = b.bn(x, "encoder.stem.bn");
    x = b.rrelu(x, "encoder.stem.act");
    net.taps.push_back({"stem", x});
    x = b.maxpool(x, 3, 2, 1, "encoder.stem.pool");
    net.taps.push_back({"pooled_stem", x});

    const auto plans = detail::stage_plans(spec.arch);
    for (int s = 0; s < 4; ++s) {
        const int out_c = widths[s + 1];
        const int mid_c = out_c / 4;
        const auto& plan = plans[s];
        for (int blk = 0; blk < spec.blocks_per_stage[s]; ++blk) {
            std::string prefix =
                "encoder.stage" + std::to_string(s + 1) + ".block" + std::to_string(blk + 1);
            int stride = blk == 0 ? plan.first_stride : 1;
            int dil = blk == 0 ? plan.first_dilation : plan.rest_dilation;
            x = b.bottleneck(x, mid_c, out_c, stride, dil, prefix);
        }
        net.taps.push_back({"stage" + std::to_string(s + 1), x});
    }
    return x;
}

/// Wires one of the five architectures. Outputs are depth maps at network
/// input resolution (FPO: one per scale, coarse to fine).
template <typename T>
Network<T> build_network(const NetworkSpec& spec, bool allocate_weights = true) {
    spec.validate();
    Network<T> net;
    net.spec = spec;
    GraphBuilder<T> b(net, spec.seed, allocate_weights);

    int x = build_encoder(b, net, spec);
    const auto widths = stage_widths(spec.channel_multiplier);

    switch (spec.arch) {
        case Arch::SSN: {
            x = b.up_projection(x, widths[3], "up1");
            x = b.up_projection(x, widths[2], "up2");
            x = b.up_projection(x, widths[1], "up3");
            x = b.up_projection(x, widths[0], "up4");
            net.outputs = {b.depth_head(x, "head")};
            break;
        }
        case Arch::Skips:
        case Arch::FPO: {
            // mirror taps by spatial resolution: stage3 @ 1/16, stage2 @ 1/8,
            // stage1 @ 1/4, stem @ 1/2
            std::vector<int> heads;
            x = b.concat({x, net.tap_node("stage3")}, "skip1.concat");
            x = b.up_projection(x, widths[3], "up1");
            if (spec.arch == Arch::FPO) heads.push_back(b.depth_head(x, "fpo_head1"));
            x = b.concat({x, net.tap_node("stage2")}, "skip2.concat");
            x = b.up_projection(x, widths[2], "up2");
            if (spec.arch == Arch::FPO) heads.push_back(b.depth_head(x, "fpo_head2"));
            x = b.concat({x, net.tap_node("stage1")}, "skip3.concat");
            x = b.up_projection(x, widths[1], "up3");
            if (spec.arch == Arch::FPO) heads.push_back(b.depth_head(x, "fpo_head3"));
            x = b.concat({x, net.tap_node("stem")}, "skip4.concat");
            x = b.up_projection(x, widths[0], "up4");
            if (spec.arch == Arch::FPO) {
                heads.push_back(b.depth_head(x, "fpo_head4"));
                net.outputs = heads;
            } else {
                net.outputs = {b.depth_head(x, "head")};
            }
            break;
        }
        case Arch::MSML: {
            // gather all encoder features at 1/8; the 1/4 taps are max-pooled
            // down first (k=2, s=2)
            int pooled_stem8 =
                b.maxpool(net.tap_node("pooled_stem"), 2, 2, 0, "msml.pool_stem");
            int stage1_8 = b.maxpool(net.tap_node("stage1"), 2, 2, 0, "msml.pool_stage1");
            x = b.concat({pooled_stem8, stage1_8, net.tap_node("stage2"),
                          net.tap_node("stage3"), net.tap_node("stage4")},
                         "msml.concat");
            x = b.up_projection(x, widths[2], "up1");
            x = b.up_projection(x, widths[1], "up2");
            x = b.up_projection(x, widths[0], "up3");
            net.outputs = {b.depth_head(x, "head")};
            break;
        }
        case Arch::DSP: {
            x = b.aspp(x, widths[2], "aspp");
            x = b.up_projection(x, widths[3], "up1");
            x = b.up_projection(x, widths[2], "up2");
            x = b.up_projection(x, widths[1], "up3");
            x = b.up_projection(x, widths[0], "up4");
            net.outputs = {b.depth_head(x, "head")};
            break;
        }
    }
    return net;
}

/// Forward pass over a batch in the given mode; returns the depth maps.
template <typename T>
std::vector<Tensor<T>> forward_depth(Network<T>& net, const Tensor<T>& batch, Mode mode,
                                     RngStream* rrelu_rng = nullptr) {
    if (batch.h() != net.spec.input_h || batch.w() != net.spec.input_w)
        throw std::invalid_argument("forward: batch is " + batch.shape_str() +
                                    ", spec expects " + std::to_string(net.spec.input_h) + "x" +
                                    std::to_string(net.spec.input_w));
    EvalContext<T> ctx;
    ctx.mode = mode;
    ctx.rrelu_rng = rrelu_rng;
    forward(net, batch, ctx);
    return output_activations(net, ctx);
}

}  // namespace depthscope::nn
