#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "depthscope/nn/build.hpp"

namespace depthscope::nn {

// ---------------------------------------------------------------------------
// Receptive fields
// ---------------------------------------------------------------------------

struct RfLayer {
    int k = 1, s = 1, p = 0, d = 1;
    std::string name;
};

struct RfState {
    long rf = 1;      // receptive field in input pixels
    long jump = 1;    // effective stride (distance between adjacent outputs)
    double start = 0.5;  // center of the first output's receptive field
};

/// Per-layer recurrence: r_out = r_in + d*(k-1)*j_in; j_out = j_in*s.
inline std::vector<RfState> receptive_field(std::span<const RfLayer> chain) {
    std::vector<RfState> states;
    RfState st;
    for (const auto& l : chain) {
        st.rf = st.rf + static_cast<long>(l.d) * (l.k - 1) * st.jump;
        st.start = st.start + (static_cast<double>(l.d) * (l.k - 1) / 2.0 - l.p) * st.jump;
        st.jump = st.jump * l.s;
        states.push_back(st);
    }
    return states;
}

inline RfState receptive_field_final(std::span<const RfLayer> chain) {
    auto s = receptive_field(chain);
    return s.empty() ? RfState{} : s.back();
}

/// Main-path conv/pool chain of the encoder (3x3 convolutions carry the
/// receptive-field growth; 1x1 convolutions are omitted since they add none).
/// `dilated` = false gives the fully strided baseline the dilated stages
/// replace; the two chains must agree on the final receptive field.
inline std::vector<RfLayer> encoder_rf_chain(Arch arch, const std::array<int, 4>& blocks,
                                             bool dilated) {
    std::vector<RfLayer> chain;
    chain.push_back({7, 2, 3, 1, "stem.conv"});
    chain.push_back({3, 2, 1, 1, "stem.pool"});
    auto plans = detail::stage_plans(arch);
    for (int s = 0; s < 4; ++s) {
        for (int blk = 0; blk < blocks[s]; ++blk) {
            RfLayer l;
            l.k = 3;
            if (dilated) {
                l.s = blk == 0 ? plans[s].first_stride : 1;
                l.d = blk == 0 ? plans[s].first_dilation : plans[s].rest_dilation;
            } else {
                l.s = (blk == 0 && s > 0) ? 2 : 1;  // plain ResNet striding
                l.d = 1;
            }
            l.p = l.d;
            l.name = "stage" + std::to_string(s + 1) + ".block" + std::to_string(blk + 1) +
                     ".conv2";
            chain.push_back(l);
        }
    }
    return chain;
}

// ---------------------------------------------------------------------------
// Weight-free shape planning
// ---------------------------------------------------------------------------

struct LayerShape {
    std::string name;
    std::array<int, 4> shape{};
    long params = 0;
};

struct TapRf {
    std::string tap;
    std::array<int, 4> shape{};
    long rf = 0;
    long jump = 0;
};

struct ShapeReport {
    std::string arch;
    double channel_multiplier = 1.0;
    std::vector<LayerShape> layers;
    std::vector<std::pair<int, int>> decoder_pairs;
    std::vector<std::array<int, 4>> output_shapes;
    std::vector<TapRf> tap_rf;
    std::vector<std::string> issues;
    long total_params = 0;

    std::string decoder_list() const {
        std::string s;
        for (auto [ni, no] : decoder_pairs)
            s += "[" + std::to_string(ni) + "-" + std::to_string(no) + "]";
        return s;
    }
};

/// Symbolic shape propagation over the wiring graph; no weights allocated.
inline ShapeReport plan_shapes(const NetworkSpec& spec) {
    auto net = build_network<float>(spec, /*allocate_weights=*/false);
    ShapeReport rep;
    rep.arch = arch_name(spec.arch);
    rep.channel_multiplier = spec.channel_multiplier;
    rep.decoder_pairs = net.decoder_pairs;

    struct NodeState {
        std::array<int, 4> shape{};
        double rf = 1, jump = 1;
    };
    std::vector<NodeState> st(net.nodes.size());

    auto out_dim = [](int in, int k, int s, int p, int d) {
        return ops::conv_out_dim(in, k, s, p, d);
    };

    for (size_t i = 0; i < net.nodes.size(); ++i) {
        const GraphNode& nd = net.nodes[i];
        NodeState s{};
        long params = 0;
        switch (nd.kind) {
            case OpKind::Input:
                s.shape = {1, 3, spec.input_h, spec.input_w};
                break;
            case OpKind::Conv: {
                const auto& c = net.convs[nd.param];
                const auto& in = st[nd.in[0]];
                if (in.shape[1] != c.p.in_c)
                    rep.issues.push_back(nd.name + ": expects " + std::to_string(c.p.in_c) +
                                         " input channels, gets " + std::to_string(in.shape[1]));
                s.shape = {in.shape[0], c.p.out_c,
                           out_dim(in.shape[2], c.p.kh, c.p.stride, c.p.pad, c.p.dilation),
                           out_dim(in.shape[3], c.p.kw, c.p.stride, c.p.pad, c.p.dilation)};
                if (s.shape[2] < 1 || s.shape[3] < 1)
                    rep.issues.push_back(nd.name + ": non-positive output size");
                s.rf = in.rf + static_cast<double>(c.p.dilation) * (c.p.kh - 1) * in.jump;
                s.jump = in.jump * c.p.stride;
                params = c.param_count();
                break;
            }
            case OpKind::BatchNorm: {
                s = st[nd.in[0]];
                params = net.bns[nd.param].param_count();
                break;
            }
            case OpKind::RReLU:
            case OpKind::ReLU:
                s = st[nd.in[0]];
                break;
            case OpKind::MaxPool: {
                const auto& in = st[nd.in[0]];
                s.shape = {in.shape[0], in.shape[1],
                           out_dim(in.shape[2], nd.pool_k, nd.pool_s, nd.pool_p, 1),
                           out_dim(in.shape[3], nd.pool_k, nd.pool_s, nd.pool_p, 1)};
                s.rf = in.rf + static_cast<double>(nd.pool_k - 1) * in.jump;
                s.jump = in.jump * nd.pool_s;
                break;
            }
            case OpKind::Upsample: {
                const auto& in = st[nd.in[0]];
                s.shape = {in.shape[0], in.shape[1], in.shape[2] * nd.up_f,
                           in.shape[3] * nd.up_f};
                s.rf = in.rf;
                s.jump = in.jump / nd.up_f;
                break;
            }
            case OpKind::UpsampleTo: {
                const auto& in = st[nd.in[0]];
                const auto& ref = st[nd.ref];
                if (in.shape[2] < 1 || ref.shape[2] % in.shape[2] != 0 ||
                    ref.shape[3] % in.shape[3] != 0)
                    rep.issues.push_back(nd.name + ": reference size not a multiple of input");
                s.shape = {in.shape[0], in.shape[1], ref.shape[2], ref.shape[3]};
                s.rf = in.rf;
                s.jump = ref.shape[2] > 0 ? in.jump * in.shape[2] / ref.shape[2] : in.jump;
                break;
            }
            case OpKind::GlobalAvgPool: {
                const auto& in = st[nd.in[0]];
                s.shape = {in.shape[0], in.shape[1], 1, 1};
                s.rf = in.rf + static_cast<double>(std::max(in.shape[2], in.shape[3]) - 1) *
                                   in.jump;
                s.jump = in.jump * std::max(in.shape[2], in.shape[3]);
                break;
            }
            case OpKind::Concat: {
                const auto& first = st[nd.in[0]];
                s.shape = first.shape;
                s.shape[1] = 0;
                s.rf = first.rf;
                s.jump = first.jump;
                for (int j : nd.in) {
                    const auto& in = st[j];
                    if (in.shape[2] != first.shape[2] || in.shape[3] != first.shape[3])
                        rep.issues.push_back(nd.name + ": spatial mismatch " +
                                             net.nodes[j].name);
                    s.shape[1] += in.shape[1];
                    s.rf = std::max(s.rf, in.rf);
                }
                break;
            }
            case OpKind::Add: {
                const auto& a = st[nd.in[0]];
                const auto& b = st[nd.in[1]];
                if (a.shape != b.shape)
                    rep.issues.push_back(nd.name + ": addend shape mismatch");
                s = a;
                s.rf = std::max(a.rf, b.rf);
                break;
            }
        }
        st[i] = s;
        if (nd.kind != OpKind::Input)
            rep.layers.push_back({nd.name, s.shape, params});
        rep.total_params += params;
    }

    for (int id : net.outputs) rep.output_shapes.push_back(st[id].shape);
    for (const auto& tap : net.taps)
        rep.tap_rf.push_back({tap.name, st[tap.node].shape, static_cast<long>(st[tap.node].rf),
                              static_cast<long>(st[tap.node].jump)});
    return rep;
}

/// Total learned parameters of an allocated network (kernels, biases, BN
/// affine parameters; running statistics excluded).
template <typename T>
long count_parameters(const Network<T>& net) {
    long total = 0;
    for (const auto& c : net.convs) total += c.param_count();
    for (const auto& b : net.bns) total += b.param_count();
    return total;
}

template <typename T>
long count_conv_kernel_parameters(const Network<T>& net) {
    long total = 0;
    for (const auto& c : net.convs)
        total += static_cast<long>(c.p.out_c) * c.p.in_c * c.p.kh * c.p.kw;
    return total;
}

// ---------------------------------------------------------------------------
// Table-1 oracle
// ---------------------------------------------------------------------------

/// Full-width decoder rows: one [Ni-No] bracket per up-projection module.
inline std::string table1_expected(Arch arch) {
    switch (arch) {
        case Arch::SSN: return "[2048-1024][1024-512][512-256][256-64]";
        case Arch::Skips:
        case Arch::FPO: return "[3072-1024][1536-512][768-256][320-64]";
        case Arch::MSML: return "[3904-512][512-256][256-64]";
        case Arch::DSP: return "[2560-1024][1024-512][512-256][256-64]";
    }
    throw std::invalid_argument("table1_expected: bad arch");
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline nlohmann::json shape_report_json(const ShapeReport& rep) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["arch"] = rep.arch;
    j["channel_multiplier"] = rep.channel_multiplier;
    j["decoder_list"] = rep.decoder_list();
    j["total_params"] = rep.total_params;
    j["layers"] = nlohmann::json::array();
    for (const auto& l : rep.layers)
        j["layers"].push_back({{"name", l.name}, {"shape", l.shape}, {"params", l.params}});
    j["outputs"] = rep.output_shapes;
    j["taps"] = nlohmann::json::array();
    for (const auto& t : rep.tap_rf)
        j["taps"].push_back({{"name", t.tap},
                             {"shape", t.shape},
                             {"receptive_field", t.rf},
                             {"effective_stride", t.jump}});
    j["issues"] = rep.issues;
    return j;
}

inline std::string shape_report_text(const ShapeReport& rep) {
    std::ostringstream os;
    size_t name_w = 5;
    for (const auto& l : rep.layers) name_w = std::max(name_w, l.name.size());
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-*s  %-20s  %10s\n", static_cast<int>(name_w), "layer",
                  "output shape", "params");
    os << buf;
    for (const auto& l : rep.layers) {
        std::string shape = Tensor<float>::shape_string(l.shape);
        std::snprintf(buf, sizeof(buf), "%-*s  %-20s  %10ld\n", static_cast<int>(name_w),
                      l.name.c_str(), shape.c_str(), l.params);
        os << buf;
    }
    os << "\ndecoder: " << rep.decoder_list() << "\n";
    os << "total params: " << rep.total_params << "\n";
    for (const auto& t : rep.tap_rf)
        os << "tap " << t.tap << ": rf=" << t.rf << " stride=" << t.jump << "\n";
    for (const auto& issue : rep.issues) os << "ISSUE: " << issue << "\n";
    return os.str();
}

}  // namespace depthscope::nn
