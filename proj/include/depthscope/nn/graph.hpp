#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "depthscope/core/ops.hpp"
#include "depthscope/core/rng.hpp"
#include "depthscope/core/tensor.hpp"
#include "depthscope/nn/spec.hpp"

namespace depthscope::nn {

enum class OpKind {
    Input,
    Conv,
    BatchNorm,
    RReLU,
    ReLU,
    MaxPool,
    Upsample,
    UpsampleTo,  // nearest resize up to a reference node's spatial size
    GlobalAvgPool,
    Concat,
    Add,
};

/// Forward-evaluation mode. GradCheck normalizes with batch statistics like
/// Train (so the full batch-norm Jacobian is exercised) but keeps running
/// stats untouched and uses the deterministic RReLU slope.
enum class Mode { Train, Eval, GradCheck };

struct GraphNode {
    OpKind kind{};
    std::vector<int> in;
    int param = -1;  // index into convs or bns, depending on kind
    int pool_k = 0, pool_s = 0, pool_p = 0;
    int up_f = 1;
    int ref = -1;
    std::string name;
};

template <typename T>
struct ConvLayer {
    ops::ConvParams<T> p;
    std::vector<T> grad_kernel;
    std::vector<T> grad_bias;
    bool trainable = true;
    bool has_bias_flag = false;  // recorded even when weights are not allocated
    std::string name;

    long param_count() const {
        long n = static_cast<long>(p.out_c) * p.in_c * p.kh * p.kw;
        return has_bias_flag ? n + p.out_c : n;
    }
};

template <typename T>
struct BnLayer {
    int channels = 0;
    std::vector<T> gamma, beta, running_mean, running_var;
    std::vector<T> grad_gamma, grad_beta;
    T eps = static_cast<T>(1e-5);
    T momentum = static_cast<T>(0.1);
    bool trainable = true;
    std::string name;

    long param_count() const { return 2L * channels; }  // affine only
};

/// One named parameter array of a network, in declaration order. Running
/// statistics are included (checkpoints need them) but carry no gradient.
template <typename T>
struct ParamArray {
    std::string name;
    std::vector<T>* values = nullptr;
    std::vector<T>* grads = nullptr;  // null for running stats
    bool trainable = true;
};

template <typename T>
struct Network {
    NetworkSpec spec;
    std::vector<GraphNode> nodes;  // topological (construction) order
    std::vector<ConvLayer<T>> convs;
    std::vector<BnLayer<T>> bns;
    std::vector<std::pair<char, int>> layer_order;  // ('c', i) or ('b', i), declaration order
    int input_node = -1;
    std::vector<int> outputs;  // depth-map node ids, coarse to fine for FPO
    struct Tap {
        std::string name;
        int node;
    };
    std::vector<Tap> taps;
    std::vector<std::pair<int, int>> decoder_pairs;  // [Ni-No] per up-projection

    int tap_node(const std::string& name) const {
        for (const auto& t : taps)
            if (t.name == name) return t.node;
        throw std::invalid_argument("unknown tap '" + name + "'");
    }

    /// Parameter arrays in declaration order (kernel, bias, gamma, beta,
    /// running_mean, running_var per layer as applicable).
    std::vector<ParamArray<T>> parameters() {
        std::vector<ParamArray<T>> out;
        for (auto [kind, i] : layer_order) {
            if (kind == 'c') {
                auto& c = convs[i];
                out.push_back({c.name + ".kernel", &c.p.kernel, &c.grad_kernel, c.trainable});
                if (c.p.has_bias())
                    out.push_back({c.name + ".bias", &c.p.bias, &c.grad_bias, c.trainable});
            } else {
                auto& b = bns[i];
                out.push_back({b.name + ".gamma", &b.gamma, &b.grad_gamma, b.trainable});
                out.push_back({b.name + ".beta", &b.beta, &b.grad_beta, b.trainable});
                out.push_back({b.name + ".running_mean", &b.running_mean, nullptr, false});
                out.push_back({b.name + ".running_var", &b.running_var, nullptr, false});
            }
        }
        return out;
    }

    void zero_grad() {
        for (auto& c : convs) {
            std::fill(c.grad_kernel.begin(), c.grad_kernel.end(), T(0));
            std::fill(c.grad_bias.begin(), c.grad_bias.end(), T(0));
        }
        for (auto& b : bns) {
            std::fill(b.grad_gamma.begin(), b.grad_gamma.end(), T(0));
            std::fill(b.grad_beta.begin(), b.grad_beta.end(), T(0));
        }
    }

    void set_trainable_by_prefix(const std::string& prefix, bool value) {
        for (auto& c : convs)
            if (c.name.rfind(prefix, 0) == 0) c.trainable = value;
        for (auto& b : bns)
            if (b.name.rfind(prefix, 0) == 0) b.trainable = value;
    }

    void set_all_trainable(bool value) {
        for (auto& c : convs) c.trainable = value;
        for (auto& b : bns) b.trainable = value;
    }

    /// Converted copy (float <-> double) for gradient checking.
    template <typename U>
    Network<U> cast() const {
        Network<U> out;
        out.spec = spec;
        out.nodes = nodes;
        out.layer_order = layer_order;
        out.input_node = input_node;
        out.outputs = outputs;
        for (const auto& t : taps) out.taps.push_back({t.name, t.node});
        out.decoder_pairs = decoder_pairs;
        auto cast_vec = [](const std::vector<T>& v) {
            std::vector<U> r(v.size());
            for (size_t i = 0; i < v.size(); ++i) r[i] = static_cast<U>(v[i]);
            return r;
        };
        for (const auto& c : convs) {
            ConvLayer<U> cc;
            cc.p.out_c = c.p.out_c;
            cc.p.in_c = c.p.in_c;
            cc.p.kh = c.p.kh;
            cc.p.kw = c.p.kw;
            cc.p.stride = c.p.stride;
            cc.p.pad = c.p.pad;
            cc.p.dilation = c.p.dilation;
            cc.p.kernel = cast_vec(c.p.kernel);
            cc.p.bias = cast_vec(c.p.bias);
            cc.grad_kernel.assign(cc.p.kernel.size(), U(0));
            cc.grad_bias.assign(cc.p.bias.size(), U(0));
            cc.trainable = c.trainable;
            cc.name = c.name;
            out.convs.push_back(std::move(cc));
        }
        for (const auto& b : bns) {
            BnLayer<U> bb;
            bb.channels = b.channels;
            bb.gamma = cast_vec(b.gamma);
            bb.beta = cast_vec(b.beta);
            bb.running_mean = cast_vec(b.running_mean);
            bb.running_var = cast_vec(b.running_var);
            bb.grad_gamma.assign(bb.gamma.size(), U(0));
            bb.grad_beta.assign(bb.beta.size(), U(0));
            bb.eps = static_cast<U>(b.eps);
            bb.momentum = static_cast<U>(b.momentum);
            bb.trainable = b.trainable;
            bb.name = b.name;
            out.bns.push_back(std::move(bb));
        }
        return out;
    }
};

/// Per-call activation and cache storage. Each concurrent forward owns one.
template <typename T>
struct EvalContext {
    Mode mode = Mode::Eval;
    RngStream* rrelu_rng = nullptr;
    std::vector<Tensor<T>> act;
    std::vector<Tensor<T>> grad_act;
    std::vector<ops::BnCache<T>> bn_cache;
    std::vector<std::vector<T>> rrelu_slopes;
    std::vector<std::vector<int64_t>> pool_argmax;
    // Debug hook: adds a constant to this layer's parameter gradients during
    // backward (negative control for the gradient checker).
    std::string corrupt_layer;

    void reset(size_t node_count) {
        act.assign(node_count, {});
        grad_act.assign(node_count, {});
        bn_cache.assign(node_count, {});
        rrelu_slopes.assign(node_count, {});
        pool_argmax.assign(node_count, {});
    }
};

template <typename T>
void forward(Network<T>& net, const Tensor<T>& input, EvalContext<T>& ctx) {
    ctx.reset(net.nodes.size());
    const bool train_stats = ctx.mode != Mode::Eval;
    const bool update_running = ctx.mode == Mode::Train;
    const auto act_mode = ctx.mode == Mode::Train ? ops::Mode::Train : ops::Mode::Eval;
    const T lo = static_cast<T>(net.spec.rrelu_lower);
    const T hi = static_cast<T>(net.spec.rrelu_upper);

    for (size_t i = 0; i < net.nodes.size(); ++i) {
        const GraphNode& nd = net.nodes[i];
        switch (nd.kind) {
            case OpKind::Input:
                ctx.act[i] = input;
                break;
            case OpKind::Conv:
                ctx.act[i] = ops::conv2d_forward(ctx.act[nd.in[0]], net.convs[nd.param].p);
                break;
            case OpKind::BatchNorm: {
                auto& bn = net.bns[nd.param];
                // A frozen layer behaves like eval mode: its statistics stay
                // fixed, so a frozen encoder is bit-identical across stages.
                const auto mode = (train_stats && bn.trainable) ? ops::Mode::Train
                                                                : ops::Mode::Eval;
                ctx.act[i] = ops::batchnorm_forward(ctx.act[nd.in[0]], bn.gamma, bn.beta,
                                                    bn.running_mean, bn.running_var, bn.eps,
                                                    bn.momentum, mode,
                                                    update_running && bn.trainable,
                                                    &ctx.bn_cache[i]);
                break;
            }
            case OpKind::RReLU:
                ctx.act[i] = ops::rrelu_forward(ctx.act[nd.in[0]], lo, hi, act_mode,
                                                ctx.rrelu_rng, &ctx.rrelu_slopes[i]);
                break;
            case OpKind::ReLU:
                ctx.act[i] = ops::relu(ctx.act[nd.in[0]]);
                break;
            case OpKind::MaxPool: {
                auto r = ops::maxpool2d(ctx.act[nd.in[0]], nd.pool_k, nd.pool_s, nd.pool_p);
                ctx.act[i] = std::move(r.out);
                ctx.pool_argmax[i] = std::move(r.argmax);
                break;
            }
            case OpKind::Upsample:
                ctx.act[i] = ops::upsample_nearest(ctx.act[nd.in[0]], nd.up_f, nd.up_f);
                break;
            case OpKind::UpsampleTo: {
                const auto& src = ctx.act[nd.in[0]];
                const auto& ref = ctx.act[nd.ref];
                if (ref.h() % src.h() != 0 || ref.w() % src.w() != 0)
                    throw std::runtime_error("UpsampleTo: reference size not a multiple of input");
                ctx.act[i] = ops::upsample_nearest(src, ref.h() / src.h(), ref.w() / src.w());
                break;
            }
            case OpKind::GlobalAvgPool:
                ctx.act[i] = ops::global_avg_pool(ctx.act[nd.in[0]]);
                break;
            case OpKind::Concat: {
                std::vector<const Tensor<T>*> ins;
                for (int j : nd.in) ins.push_back(&ctx.act[j]);
                ctx.act[i] = ops::concat_channels<T>(
                    std::span<const Tensor<T>* const>(ins.data(), ins.size()));
                break;
            }
            case OpKind::Add: {
                const auto& a = ctx.act[nd.in[0]];
                const auto& b = ctx.act[nd.in[1]];
                if (!a.same_shape(b))
                    throw std::runtime_error("Add: shape mismatch at node '" + nd.name + "': " +
                                             a.shape_str() + " vs " + b.shape_str());
                Tensor<T> s(a.n(), a.c(), a.h(), a.w());
                for (size_t j = 0; j < a.size(); ++j) s.data[j] = a.data[j] + b.data[j];
                ctx.act[i] = std::move(s);
                break;
            }
        }
    }
}

/// Collects the output activations after forward().
template <typename T>
std::vector<Tensor<T>> output_activations(const Network<T>& net, const EvalContext<T>& ctx) {
    std::vector<Tensor<T>> outs;
    for (int id : net.outputs) outs.push_back(ctx.act[id]);
    return outs;
}

/// Reverse pass. `output_grads` supplies dLoss/dOutput for every network
/// output (zeros allowed). Parameter gradients are zeroed first, then
/// accumulated; activation gradients live in ctx.grad_act.
template <typename T>
void backward(Network<T>& net, EvalContext<T>& ctx, const std::vector<Tensor<T>>& output_grads) {
    if (output_grads.size() != net.outputs.size())
        throw std::invalid_argument("backward: expected one grad per network output");
    net.zero_grad();
    const bool train_stats = ctx.mode != Mode::Eval;

    for (auto& g : ctx.grad_act) g = Tensor<T>{};
    auto accum = [&](int node, const Tensor<T>& g) {
        auto& dst = ctx.grad_act[node];
        if (dst.size() == 0) {
            dst = g;
        } else {
            for (size_t j = 0; j < dst.size(); ++j) dst.data[j] += g.data[j];
        }
    };
    for (size_t k = 0; k < net.outputs.size(); ++k) accum(net.outputs[k], output_grads[k]);

    for (size_t ri = net.nodes.size(); ri-- > 0;) {
        const GraphNode& nd = net.nodes[ri];
        Tensor<T>& gout = ctx.grad_act[ri];
        if (gout.size() == 0) continue;  // no path to any loss
        switch (nd.kind) {
            case OpKind::Input:
                break;
            case OpKind::Conv: {
                auto& layer = net.convs[nd.param];
                auto g = ops::conv2d_backward(ctx.act[nd.in[0]], layer.p, gout);
                if (!ctx.corrupt_layer.empty() && layer.name == ctx.corrupt_layer)
                    for (auto& v : g.kernel) v += T(1);
                for (size_t j = 0; j < g.kernel.size(); ++j) layer.grad_kernel[j] += g.kernel[j];
                if (layer.p.has_bias())
                    for (size_t j = 0; j < g.bias.size(); ++j) layer.grad_bias[j] += g.bias[j];
                accum(nd.in[0], g.input);
                break;
            }
            case OpKind::BatchNorm: {
                auto& layer = net.bns[nd.param];
                const auto mode = (train_stats && layer.trainable) ? ops::Mode::Train
                                                                   : ops::Mode::Eval;
                auto g = ops::batchnorm_backward(ctx.act[nd.in[0]], layer.gamma, ctx.bn_cache[ri],
                                                 gout, mode);
                if (!ctx.corrupt_layer.empty() && layer.name == ctx.corrupt_layer)
                    for (auto& v : g.gamma) v += T(1);
                for (size_t j = 0; j < g.gamma.size(); ++j) layer.grad_gamma[j] += g.gamma[j];
                for (size_t j = 0; j < g.beta.size(); ++j) layer.grad_beta[j] += g.beta[j];
                accum(nd.in[0], g.input);
                break;
            }
            case OpKind::RReLU:
                accum(nd.in[0], ops::rrelu_backward(ctx.rrelu_slopes[ri], gout));
                break;
            case OpKind::ReLU:
                accum(nd.in[0], ops::relu_backward(ctx.act[nd.in[0]], gout));
                break;
            case OpKind::MaxPool:
                accum(nd.in[0], ops::maxpool2d_backward(ctx.pool_argmax[ri], gout,
                                                        ctx.act[nd.in[0]].shape));
                break;
            case OpKind::Upsample:
                accum(nd.in[0], ops::upsample_nearest_backward(gout, nd.up_f, nd.up_f));
                break;
            case OpKind::UpsampleTo: {
                const auto& src = ctx.act[nd.in[0]];
                accum(nd.in[0], ops::upsample_nearest_backward(gout, gout.h() / src.h(),
                                                               gout.w() / src.w()));
                break;
            }
            case OpKind::GlobalAvgPool:
                accum(nd.in[0],
                      ops::global_avg_pool_backward(gout, ctx.act[nd.in[0]].shape));
                break;
            case OpKind::Concat: {
                std::vector<std::array<int, 4>> shapes;
                for (int j : nd.in) shapes.push_back(ctx.act[j].shape);
                auto parts = ops::concat_channels_backward(gout, shapes);
                for (size_t j = 0; j < nd.in.size(); ++j) accum(nd.in[j], parts[j]);
                break;
            }
            case OpKind::Add:
                accum(nd.in[0], gout);
                accum(nd.in[1], gout);
                break;
        }
        if (nd.kind != OpKind::Input) gout = Tensor<T>{};  // release as we go
    }
}

}  // namespace depthscope::nn
