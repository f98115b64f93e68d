#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "depthscope/core/rng.hpp"
#include "depthscope/nn/graph.hpp"

namespace depthscope::nn {

/// Incrementally wires a Network. Tracks per-node channel counts so block
/// helpers can size their convolutions; weights are He-initialized from the
/// "init" stream in wiring order, which makes construction reproducible.
template <typename T>
class GraphBuilder {
public:
    /// `allocate` = false records layer dimensions only (the shape planner
    /// runs without touching any weight memory).
    GraphBuilder(Network<T>& net, uint64_t seed, bool allocate = true)
        : net_(net), rng_(RngStream::named(seed, "init")), allocate_(allocate) {}

    int input(int channels) {
        GraphNode n;
        n.kind = OpKind::Input;
        n.name = "input";
        net_.input_node = push(n, channels);
        return net_.input_node;
    }

    /// Convolution with He fan-in initialization. Bias is reserved for convs
    /// not followed by batch norm.
    int conv(int in, int out_c, int k, int stride, int pad, int dilation, bool bias,
             const std::string& name) {
        ConvLayer<T> layer;
        layer.p.out_c = out_c;
        layer.p.in_c = channels_[in];
        layer.p.kh = k;
        layer.p.kw = k;
        layer.p.stride = stride;
        layer.p.pad = pad;
        layer.p.dilation = dilation;
        layer.name = name;
        layer.has_bias_flag = bias;
        if (allocate_) {
            const int fan_in = layer.p.in_c * k * k;
            const double stddev = std::sqrt(2.0 / fan_in);
            layer.p.kernel.resize(layer.p.kernel_size());
            for (auto& v : layer.p.kernel) v = static_cast<T>(rng_.normal() * stddev);
            if (bias) layer.p.bias.assign(out_c, T(0));
            layer.grad_kernel.assign(layer.p.kernel.size(), T(0));
            layer.grad_bias.assign(layer.p.bias.size(), T(0));
        }
        net_.convs.push_back(std::move(layer));
        net_.layer_order.push_back({'c', static_cast<int>(net_.convs.size() - 1)});

        GraphNode n;
        n.kind = OpKind::Conv;
        n.in = {in};
        n.param = static_cast<int>(net_.convs.size() - 1);
        n.name = name;
        return push(n, out_c);
    }

    int bn(int in, const std::string& name) {
        BnLayer<T> layer;
        const int channels = channels_[in];
        layer.channels = channels;
        if (allocate_) {
            layer.gamma.assign(layer.channels, T(1));
            layer.beta.assign(layer.channels, T(0));
            layer.running_mean.assign(layer.channels, T(0));
            layer.running_var.assign(layer.channels, T(1));
            layer.grad_gamma.assign(layer.channels, T(0));
            layer.grad_beta.assign(layer.channels, T(0));
        }
        layer.name = name;
        net_.bns.push_back(std::move(layer));
        net_.layer_order.push_back({'b', static_cast<int>(net_.bns.size() - 1)});

        GraphNode n;
        n.kind = OpKind::BatchNorm;
        n.in = {in};
        n.param = static_cast<int>(net_.bns.size() - 1);
        n.name = name;
        return push(n, channels);
    }

    int rrelu(int in, const std::string& name) {
        GraphNode n;
        n.kind = OpKind::RReLU;
        n.in = {in};
        n.name = name;
        return push(n, channels_[in]);
    }

    int relu(int in, const std::string& name) {
        GraphNode n;
        n.kind = OpKind::ReLU;
        n.in = {in};
        n.name = name;
        return push(n, channels_[in]);
    }

    int maxpool(int in, int k, int s, int pad, const std::string& name) {
        GraphNode n;
        n.kind = OpKind::MaxPool;
        n.in = {in};
        n.pool_k = k;
        n.pool_s = s;
        n.pool_p = pad;
        n.name = name;
        return push(n, channels_[in]);
    }

    int upsample(int in, int factor, const std::string& name) {
        GraphNode n;
        n.kind = OpKind::Upsample;
        n.in = {in};
        n.up_f = factor;
        n.name = name;
        return push(n, channels_[in]);
    }

    int upsample_to(int in, int ref, const std::string& name) {
        GraphNode n;
        n.kind = OpKind::UpsampleTo;
        n.in = {in};
        n.ref = ref;
        n.name = name;
        return push(n, channels_[in]);
    }

    int global_avg_pool(int in, const std::string& name) {
        GraphNode n;
        n.kind = OpKind::GlobalAvgPool;
        n.in = {in};
        n.name = name;
        return push(n, channels_[in]);
    }

    int concat(const std::vector<int>& ins, const std::string& name) {
        GraphNode n;
        n.kind = OpKind::Concat;
        n.in = ins;
        n.name = name;
        int c = 0;
        for (int i : ins) c += channels_[i];
        return push(n, c);
    }

    int add(int a, int b, const std::string& name) {
        GraphNode n;
        n.kind = OpKind::Add;
        n.in = {a, b};
        n.name = name;
        return push(n, channels_[a]);
    }

    int channels(int node) const { return channels_[node]; }

    // -- architectural units -------------------------------------------------

    /// ResNet bottleneck: 1x1 -> BN -> RReLU -> 3x3 (stride, dilation) -> BN ->
    /// RReLU -> 1x1 -> BN, summed with the (projected) shortcut, RReLU after.
    int bottleneck(int x, int mid_c, int out_c, int stride, int dilation,
                   const std::string& prefix) {
        const int in_c = channels_[x];
        int t = conv(x, mid_c, 1, 1, 0, 1, false, prefix + ".conv1");
        t = bn(t, prefix + ".bn1");
        t = rrelu(t, prefix + ".act1");
        t = conv(t, mid_c, 3, stride, dilation, dilation, false, prefix + ".conv2");
        t = bn(t, prefix + ".bn2");
        t = rrelu(t, prefix + ".act2");
        t = conv(t, out_c, 1, 1, 0, 1, false, prefix + ".conv3");
        t = bn(t, prefix + ".bn3");
        int shortcut = x;
        if (in_c != out_c || stride > 1) {
            shortcut = conv(x, out_c, 1, stride, 0, 1, false, prefix + ".proj");
            shortcut = bn(shortcut, prefix + ".proj_bn");
        }
        int s = add(t, shortcut, prefix + ".sum");
        return rrelu(s, prefix + ".act3");
    }

    /// Up-projection: NN-upsample x2 shared by both branches; branch A is
    /// 5x5 -> BN -> RReLU -> 3x3 -> BN, branch B (projection) is 5x5 -> BN;
    /// output is RReLU(A + B) at twice the spatial size.
    int up_projection(int x, int out_c, const std::string& prefix) {
        net_.decoder_pairs.push_back({channels_[x], out_c});
        int u = upsample(x, 2, prefix + ".up");
        int a = conv(u, out_c, 5, 1, 2, 1, false, prefix + ".a_conv5");
        a = bn(a, prefix + ".a_bn5");
        a = rrelu(a, prefix + ".a_act");
        a = conv(a, out_c, 3, 1, 1, 1, false, prefix + ".a_conv3");
        a = bn(a, prefix + ".a_bn3");
        int b = conv(u, out_c, 5, 1, 2, 1, false, prefix + ".b_conv5");
        b = bn(b, prefix + ".b_bn5");
        int s = add(a, b, prefix + ".sum");
        return rrelu(s, prefix + ".act");
    }

    /// ASPP: five parallel branches at branch_c channels each — 1x1, three 3x3
    /// convolutions with dilations 3/6/12 (same-size padding), and a global
    /// image-pooling branch upsampled back to the input size. Concatenated.
    int aspp(int x, int branch_c, const std::string& prefix) {
        std::vector<int> branches;
        int b1 = conv(x, branch_c, 1, 1, 0, 1, false, prefix + ".b1_conv");
        b1 = bn(b1, prefix + ".b1_bn");
        branches.push_back(rrelu(b1, prefix + ".b1_act"));
        int rate_idx = 2;
        for (int d : {3, 6, 12}) {
            std::string p = prefix + ".b" + std::to_string(rate_idx);
            int b = conv(x, branch_c, 3, 1, d, d, false, p + "_conv");
            b = bn(b, p + "_bn");
            branches.push_back(rrelu(b, p + "_act"));
            ++rate_idx;
        }
        int b5 = global_avg_pool(x, prefix + ".b5_pool");
        b5 = conv(b5, branch_c, 1, 1, 0, 1, false, prefix + ".b5_conv");
        b5 = bn(b5, prefix + ".b5_bn");
        b5 = rrelu(b5, prefix + ".b5_act");
        branches.push_back(upsample_to(b5, x, prefix + ".b5_up"));
        return concat(branches, prefix + ".concat");
    }

    /// 3x3 same-size convolution to one channel followed by ReLU; the output
    /// is the nonnegative depth estimate.
    int depth_head(int x, const std::string& prefix) {
        int t = conv(x, 1, 3, 1, 1, 1, true, prefix + ".conv");
        // A small positive bias keeps the initial estimate off the ReLU floor.
        if (allocate_) net_.convs.back().p.bias[0] = T(1);
        return relu(t, prefix + ".relu");
    }

private:
    int push(const GraphNode& n, int out_channels) {
        net_.nodes.push_back(n);
        channels_.push_back(out_channels);
        return static_cast<int>(net_.nodes.size() - 1);
    }


    Network<T>& net_;
    RngStream rng_;
    bool allocate_;
    std::vector<int> channels_;
};

}  // namespace depthscope::nn
