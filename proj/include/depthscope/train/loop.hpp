#pragma once

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "depthscope/core/optimizer.hpp"
#include "depthscope/io/augment.hpp"
#include "depthscope/io/dataset.hpp"
#include "depthscope/nn/build.hpp"

namespace depthscope::train {

struct HyperParams {
    double learning_rate = 5e-3;
    double weight_decay = 5e-4;
    double momentum = 0.9;
    int batch_size = 3;   // 2 for MSML and the last two FPO scales
    int max_epochs = 100;
    int patience = 50;
    int min_epochs = 0;   // full-scale runs train for at least 800

    static int default_batch_size(nn::Arch arch) { return arch == nn::Arch::MSML ? 2 : 3; }
};

inline void to_json(nlohmann::json& j, const HyperParams& h) {
    j = nlohmann::json{{"learning_rate", h.learning_rate}, {"weight_decay", h.weight_decay},
                       {"momentum", h.momentum},           {"batch_size", h.batch_size},
                       {"max_epochs", h.max_epochs},       {"patience", h.patience},
                       {"min_epochs", h.min_epochs}};
}

inline void from_json(const nlohmann::json& j, HyperParams& h) {
    if (j.contains("learning_rate")) j.at("learning_rate").get_to(h.learning_rate);
    if (j.contains("weight_decay")) j.at("weight_decay").get_to(h.weight_decay);
    if (j.contains("momentum")) j.at("momentum").get_to(h.momentum);
    if (j.contains("batch_size")) j.at("batch_size").get_to(h.batch_size);
    if (j.contains("max_epochs")) j.at("max_epochs").get_to(h.max_epochs);
    if (j.contains("patience")) j.at("patience").get_to(h.patience);
    if (j.contains("min_epochs")) j.at("min_epochs").get_to(h.min_epochs);
}

struct TrainHistory {
    std::vector<double> train_loss;
    std::vector<double> val_score;
    std::vector<double> wall_time_sec;  // not serialized: runs must be byte-reproducible
    std::string stop_reason;            // max_epochs | early_stop | diverged
    int diverged_epoch = -1;
    int best_epoch = -1;
    double best_val = std::numeric_limits<double>::infinity();
    int gt_h = 0, gt_w = 0;  // ground-truth resolution this run trained against
};

/// History serialization deliberately omits wall time so identical seeds give
/// byte-identical files.
inline nlohmann::json history_json(const TrainHistory& h) {
    nlohmann::json j{{"schema_version", 1},
                     {"train_loss", h.train_loss},
                     {"val_score", h.val_score},
                     {"stop_reason", h.stop_reason},
                     {"best_epoch", h.best_epoch},
                     {"best_val", h.best_val},
                     {"gt_h", h.gt_h},
                     {"gt_w", h.gt_w}};
    if (h.diverged_epoch >= 0) j["diverged_epoch"] = h.diverged_epoch;
    return j;
}

inline std::string history_csv(const TrainHistory& h) {
    std::string s = "epoch,train_loss,val_score\n";
    char buf[128];
    for (size_t i = 0; i < h.train_loss.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g\n", i + 1, h.train_loss[i],
                      i < h.val_score.size() ? h.val_score[i] : std::nan(""));
        s += buf;
    }
    return s;
}

/// True iff the current epoch count has reached min_epochs and the last
/// `patience` epoch-over-epoch deltas are all strictly positive. A plateau
/// inside the window resets the count.
inline bool early_stop_check(const std::vector<double>& val_history, int patience,
                             int min_epochs) {
    const int n = static_cast<int>(val_history.size());
    if (n < min_epochs) return false;
    if (n < patience + 1) return false;
    for (int i = n - patience; i < n; ++i)
        if (!(val_history[i] > val_history[i - 1])) return false;
    return true;
}

namespace detail {

struct Batch {
    Tensor<float> rgb;
    Tensor<float> depth;
    Tensor<float> mask;
};

inline Batch stack_samples(const std::vector<io::DepthSample>& samples,
                           const std::vector<size_t>& idx, size_t first, size_t count) {
    const auto& s0 = samples[idx[first]];
    Batch b;
    b.rgb = Tensor<float>(static_cast<int>(count), 3, s0.height(), s0.width());
    b.depth = Tensor<float>(static_cast<int>(count), 1, s0.height(), s0.width());
    b.mask = Tensor<float>(static_cast<int>(count), 1, s0.height(), s0.width());
    for (size_t i = 0; i < count; ++i) {
        const auto& s = samples[idx[first + i]];
        if (s.height() != s0.height() || s.width() != s0.width())
            throw std::invalid_argument("train: samples must share one resolution");
        std::copy(s.rgb.data.begin(), s.rgb.data.end(),
                  b.rgb.data.begin() + b.rgb.index(static_cast<int>(i), 0, 0, 0));
        std::copy(s.depth.data.begin(), s.depth.data.end(),
                  b.depth.data.begin() + b.depth.index(static_cast<int>(i), 0, 0, 0));
        std::copy(s.mask.data.begin(), s.mask.data.end(),
                  b.mask.data.begin() + b.mask.index(static_cast<int>(i), 0, 0, 0));
    }
    return b;
}

inline Batch stack_augmented(const std::vector<io::DepthSample>& samples,
                             const std::vector<size_t>& idx, size_t first, size_t count,
                             const io::AugmentPolicy& policy, RngStream& rng) {
    std::vector<io::DepthSample> augmented;
    augmented.reserve(count);
    for (size_t i = 0; i < count; ++i)
        augmented.push_back(io::augment(samples[idx[first + i]], policy, rng));
    std::vector<size_t> direct(count);
    for (size_t i = 0; i < count; ++i) direct[i] = i;
    return stack_samples(augmented, direct, 0, count);
}

}  // namespace detail

/// Per-output ground-truth downsampling factor: the coarsest FPO output sits
/// at 1/2^(n-1) of the input, the last at full resolution.
inline int output_scale_factor(const nn::Network<float>& net, size_t output_index) {
    return 1 << (static_cast<int>(net.outputs.size()) - 1 - static_cast<int>(output_index));
}

/// Mean masked L2 over the validation split in eval mode (deterministic:
/// running statistics, midpoint RReLU). `output_index` < 0 selects the
/// finest (last) output.
inline double validate(nn::Network<float>& net, const std::vector<io::DepthSample>& val,
                       int output_index = -1) {
    if (val.empty()) throw std::invalid_argument("validate: empty split");
    const size_t oi = output_index < 0 ? net.outputs.size() - 1 : static_cast<size_t>(output_index);
    const int factor = output_scale_factor(net, oi);
    double acc = 0.0;
    for (const auto& s : val) {
        nn::EvalContext<float> ctx;
        ctx.mode = nn::Mode::Eval;
        Tensor<float> input = s.rgb;
        nn::forward(net, input, ctx);
        const auto& pred = ctx.act[net.outputs[oi]];
        acc += ops::l2_loss(pred, io::downsample_map(s.depth, factor),
                            io::downsample_map(s.mask, factor));
    }
    return acc / static_cast<double>(val.size());
}

struct TrainOptions {
    io::AugmentPolicy augment = io::AugmentPolicy::identity();
    int output_index = -1;  // -1: train all outputs jointly (loss averaged)
    bool snapshot_best = true;
    // Called after each epoch with (epoch, history); may request a stop by
    // returning false. Used for the overfit harness's early exit.
    std::function<bool(int, const TrainHistory&)> epoch_callback;
};

/// The learning procedure: seeded shuffle, augment, forward, masked L2,
/// backward, SGD step; validation score after each epoch; early stopping on
/// `patience` consecutive validation increases once past min_epochs. The
/// network is left at the best-validation parameters.
inline TrainHistory train(nn::Network<float>& net, const std::vector<io::DepthSample>& train_set,
                          const std::vector<io::DepthSample>& val_set, const HyperParams& hyper,
                          uint64_t seed, const TrainOptions& options = {}) {
    if (train_set.empty()) throw std::invalid_argument("train: empty training split");
    if (val_set.empty()) throw std::invalid_argument("train: empty validation split");
    if (hyper.batch_size < 1 || hyper.patience < 1)
        throw std::invalid_argument("train: invalid hyperparameters");

    RngStream shuffle_rng = RngStream::named(seed, "shuffle");
    RngStream augment_rng = RngStream::named(seed, "augment");
    RngStream rrelu_rng = RngStream::named(seed, "rrelu");

    SgdOptimizer<float> opt(static_cast<float>(hyper.learning_rate),
                            static_cast<float>(hyper.momentum),
                            static_cast<float>(hyper.weight_decay));

    TrainHistory history;
    {
        const size_t oi =
            options.output_index < 0 ? net.outputs.size() - 1 : static_cast<size_t>(options.output_index);
        const int f = output_scale_factor(net, oi);
        history.gt_h = net.spec.input_h / f;
        history.gt_w = net.spec.input_w / f;
    }
    std::vector<std::vector<float>> best_params;
    const auto t_start = std::chrono::steady_clock::now();

    std::vector<size_t> order(train_set.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 1; epoch <= hyper.max_epochs; ++epoch) {
        shuffle_rng.shuffle(order.begin(), order.end());
        double loss_acc = 0.0;
        size_t batches = 0;
        bool diverged = false;
        for (size_t first = 0; first < order.size(); first += hyper.batch_size) {
            const size_t count =
                std::min<size_t>(hyper.batch_size, order.size() - first);
            auto batch =
                detail::stack_augmented(train_set, order, first, count, options.augment,
                                        augment_rng);
            nn::EvalContext<float> ctx;
            ctx.mode = nn::Mode::Train;
            ctx.rrelu_rng = &rrelu_rng;
            nn::forward(net, batch.rgb, ctx);

            std::vector<Tensor<float>> grads(net.outputs.size());
            double loss = 0.0;
            if (options.output_index >= 0) {
                const size_t oi = static_cast<size_t>(options.output_index);
                const int f = output_scale_factor(net, oi);
                for (size_t k = 0; k < net.outputs.size(); ++k)
                    if (k != oi) {
                        const auto& o = ctx.act[net.outputs[k]];
                        grads[k] = Tensor<float>(o.n(), o.c(), o.h(), o.w());
                    }
                loss = ops::l2_loss(ctx.act[net.outputs[oi]], io::downsample_map(batch.depth, f),
                                    io::downsample_map(batch.mask, f), &grads[oi]);
            } else {
                const double scale = 1.0 / static_cast<double>(net.outputs.size());
                for (size_t k = 0; k < net.outputs.size(); ++k) {
                    const int f = output_scale_factor(net, k);
                    loss += scale * ops::l2_loss(ctx.act[net.outputs[k]],
                                                 io::downsample_map(batch.depth, f),
                                                 io::downsample_map(batch.mask, f), &grads[k]);
                    for (auto& v : grads[k].data) v *= static_cast<float>(scale);
                }
            }
            if (!std::isfinite(loss)) {
                diverged = true;
                break;
            }
            loss_acc += loss;
            ++batches;

            nn::backward(net, ctx, grads);
            size_t pid = 0;
            for (auto& p : net.parameters()) {
                if (p.grads && p.trainable) opt.step(pid, *p.values, *p.grads);
                ++pid;
            }
        }
        if (diverged) {
            history.stop_reason = "diverged";
            history.diverged_epoch = epoch;
            break;
        }
        history.train_loss.push_back(loss_acc / static_cast<double>(batches));
        history.val_score.push_back(validate(net, val_set, options.output_index));
        history.wall_time_sec.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count());

        if (history.val_score.back() < history.best_val) {
            history.best_val = history.val_score.back();
            history.best_epoch = epoch;
            if (options.snapshot_best) {
                best_params.clear();
                for (auto& p : net.parameters()) best_params.push_back(*p.values);
            }
        }
        if (early_stop_check(history.val_score, hyper.patience, hyper.min_epochs)) {
            history.stop_reason = "early_stop";
            break;
        }
        if (options.epoch_callback && !options.epoch_callback(epoch, history)) {
            history.stop_reason = "callback";
            break;
        }
    }
    if (history.stop_reason.empty()) history.stop_reason = "max_epochs";

    if (options.snapshot_best && !best_params.empty()) {
        size_t i = 0;
        for (auto& p : net.parameters()) *p.values = best_params[i++];
    }
    return history;
}

/// FPO's coarse-to-fine schedule: stage k trains the k-th up-projection and
/// its forked head against ground truth downsampled to 1/2^(4-k); everything
/// trained earlier (including the encoder, trained in stage 1) is frozen.
/// Batch size drops to 2 for the last two scales.
inline std::vector<TrainHistory> fpo_sequential_train(nn::Network<float>& net,
                                                      const std::vector<io::DepthSample>& train_set,
                                                      const std::vector<io::DepthSample>& val_set,
                                                      const HyperParams& hyper, uint64_t seed,
                                                      const io::AugmentPolicy& policy =
                                                          io::AugmentPolicy::identity()) {
    if (net.spec.arch != nn::Arch::FPO)
        throw std::invalid_argument("fpo_sequential_train: network is not FPO");
    const int stages = static_cast<int>(net.outputs.size());
    std::vector<TrainHistory> histories;
    for (int stage = 1; stage <= stages; ++stage) {
        net.set_all_trainable(false);
        if (stage == 1) net.set_trainable_by_prefix("encoder.", true);
        net.set_trainable_by_prefix("up" + std::to_string(stage) + ".", true);
        net.set_trainable_by_prefix("fpo_head" + std::to_string(stage) + ".", true);

        HyperParams stage_hyper = hyper;
        if (stage > stages - 2) stage_hyper.batch_size = std::min(hyper.batch_size, 2);
        TrainOptions options;
        options.augment = policy;
        options.output_index = stage - 1;
        // the best-checkpoint snapshot applies to the final stage only;
        // earlier stages keep their last state as the next stage's frozen base
        options.snapshot_best = stage == stages;
        histories.push_back(train(net, train_set, val_set, stage_hyper,
                                  seed + static_cast<uint64_t>(stage), options));
    }
    net.set_all_trainable(true);
    return histories;
}

/// Order-stable content hash of a parameter set (freezing checks).
/// `learned_only` skips running statistics.
template <typename T>
uint64_t parameter_hash(nn::Network<T>& net, const std::string& prefix = "",
                        bool learned_only = false) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (auto& p : net.parameters()) {
        if (!prefix.empty() && p.name.rfind(prefix, 0) != 0) continue;
        if (learned_only && !p.grads) continue;
        for (T v : *p.values) {
            uint64_t bits;
            if constexpr (sizeof(T) == 4) {
                uint32_t b32;
                std::memcpy(&b32, &v, 4);
                bits = b32;
            } else {
                std::memcpy(&bits, &v, 8);
            }
            h ^= bits;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

}  // namespace depthscope::train
