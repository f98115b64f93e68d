#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "depthscope/core/gradcheck.hpp"
#include "depthscope/core/parallel.hpp"
#include "depthscope/io/augment.hpp"
#include "depthscope/io/synth.hpp"
#include "depthscope/metrics/standard.hpp"
#include "depthscope/metrics/vcs.hpp"
#include "depthscope/nn/layer_suite.hpp"
#include "depthscope/nn/plan.hpp"
#include "depthscope/train/checkpoint.hpp"
#include "depthscope/train/loop.hpp"

namespace depthscope::cli {

/// Exit codes are a stable contract: 0 success, 1 runtime failure, 2 usage.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;
    std::string manifest;
    std::string out_dir = "out";
    std::string checkpoint;
    std::string config_file;
    std::vector<std::string> inputs;
    uint64_t seed = 0;
    double max_depth = 10.0;
    int downsample = 1;
    bool per_image = false;
    bool no_augment = false;
    bool fpo_joint = false;
    bool check_table1 = false;
    nn::NetworkSpec net;  // input size 0 = resolve from data (train) or 320x240 (plan)
    train::HyperParams hyper;
    io::AugmentPolicy augment;
    metrics::CameraIntrinsics intrinsics{0, 0, 0, 0};  // fx <= 0 means "not provided"
    std::vector<std::array<double, 2>> translations;
    metrics::CannyParams canny;
    int synth_count = 16;
    int synth_test = 4;
    std::string corrupt;
    int gradcheck_probes = 8;
    std::string gradcheck_arch = "all";

    RunConfig() {
        net.input_h = 0;
        net.input_w = 0;
        hyper.max_epochs = 100;
    }
};

inline void to_json(nlohmann::json& j, const RunConfig& c) {
    j = nlohmann::json{{"schema_version", 1},
                       {"command", c.command},
                       {"manifest", c.manifest},
                       {"out_dir", c.out_dir},
                       {"checkpoint", c.checkpoint},
                       {"inputs", c.inputs},
                       {"seed", c.seed},
                       {"max_depth", c.max_depth},
                       {"downsample", c.downsample},
                       {"per_image", c.per_image},
                       {"no_augment", c.no_augment},
                       {"fpo_joint", c.fpo_joint},
                       {"network", c.net},
                       {"hyper", c.hyper},
                       {"augment", c.augment},
                       {"translations", c.translations},
                       {"canny",
                        {{"sigma", c.canny.sigma}, {"low", c.canny.low}, {"high", c.canny.high}}},
                       {"synth_count", c.synth_count},
                       {"synth_test", c.synth_test},
                       {"gradcheck_probes", c.gradcheck_probes},
                       {"gradcheck_arch", c.gradcheck_arch}};
    if (c.intrinsics.fx > 0) j["intrinsics"] = c.intrinsics;
}

inline void from_json(const nlohmann::json& j, RunConfig& c) {
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) j.at(key).get_to(field);
    };
    get("manifest", c.manifest);
    get("out_dir", c.out_dir);
    get("checkpoint", c.checkpoint);
    get("inputs", c.inputs);
    get("seed", c.seed);
    get("max_depth", c.max_depth);
    get("downsample", c.downsample);
    get("per_image", c.per_image);
    get("no_augment", c.no_augment);
    get("fpo_joint", c.fpo_joint);
    get("network", c.net);
    get("hyper", c.hyper);
    get("augment", c.augment);
    get("translations", c.translations);
    get("synth_count", c.synth_count);
    get("synth_test", c.synth_test);
    get("gradcheck_probes", c.gradcheck_probes);
    get("gradcheck_arch", c.gradcheck_arch);
    if (j.contains("intrinsics")) j.at("intrinsics").get_to(c.intrinsics);
    if (j.contains("canny")) {
        c.canny.sigma = j["canny"].value("sigma", c.canny.sigma);
        c.canny.low = j["canny"].value("low", c.canny.low);
        c.canny.high = j["canny"].value("high", c.canny.high);
    }
}

namespace detail {

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
}

inline void write_effective_config(const RunConfig& cfg) {
    nlohmann::json j = cfg;
    write_text((std::filesystem::path(cfg.out_dir) / "config.json").string(), j.dump(2) + "\n");
}

inline std::vector<io::DepthSample> load_and_prepare(const io::Manifest& manifest,
                                                     io::Split split, int downsample) {
    auto samples = io::load_split(manifest, split);
    if (downsample > 1)
        for (auto& s : samples) s = io::downsample_pair(s, downsample);
    return samples;
}

inline metrics::CameraIntrinsics require_intrinsics(const RunConfig& cfg) {
    if (cfg.intrinsics.fx <= 0 || cfg.intrinsics.fy <= 0)
        throw UsageError("camera intrinsics required: pass --fx --fy --cx --cy (pixels)");
    return cfg.intrinsics;
}

inline Tensor<float> infer_depth(nn::Network<float>& net, const Tensor<float>& rgb) {
    auto outs = nn::forward_depth(net, rgb, nn::Mode::Eval);
    return outs.back();  // the finest scale
}

}  // namespace detail

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

inline int cmd_synth(RunConfig& cfg) {
    const int w = cfg.net.input_w > 0 ? cfg.net.input_w : 64;
    const int h = cfg.net.input_h > 0 ? cfg.net.input_h : 48;
    cfg.net.input_w = w;
    cfg.net.input_h = h;
    std::filesystem::create_directories(cfg.out_dir);
    auto manifest =
        io::write_synth_dataset(cfg.out_dir, cfg.seed, cfg.synth_count, w, h, cfg.synth_test);
    detail::write_effective_config(cfg);
    std::cout << "wrote " << cfg.synth_count << " samples (" << w << "x" << h << "), manifest "
              << manifest << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// plan
// ---------------------------------------------------------------------------

inline int cmd_plan(RunConfig& cfg) {
    if (cfg.net.input_w == 0) cfg.net.input_w = 320;
    if (cfg.net.input_h == 0) cfg.net.input_h = 240;
    std::filesystem::create_directories(cfg.out_dir);

    auto rep = nn::plan_shapes(cfg.net);
    std::cout << nn::shape_report_text(rep);
    detail::write_text((std::filesystem::path(cfg.out_dir) / "shape_report.json").string(),
                       nn::shape_report_json(rep).dump(2) + "\n");
    detail::write_text((std::filesystem::path(cfg.out_dir) / "shape_report.txt").string(),
                       nn::shape_report_text(rep));
    detail::write_effective_config(cfg);

    int rc = 0;
    if (!rep.issues.empty()) {
        for (const auto& i : rep.issues) std::cerr << "wiring issue: " << i << "\n";
        rc = 1;
    }
    if (cfg.check_table1) {
        const std::string expected = nn::table1_expected(cfg.net.arch);
        if (rep.decoder_list() == expected) {
            std::cout << "table1 check: PASS " << rep.decoder_list() << "\n";
        } else {
            std::cerr << "table1 check: FAIL got " << rep.decoder_list() << " expected "
                      << expected << "\n";
            rc = 1;
        }
    }
    return rc;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

inline int cmd_train(RunConfig& cfg) {
    if (cfg.manifest.empty()) throw UsageError("train requires --manifest");
    auto manifest = io::parse_manifest(cfg.manifest);
    auto train_set = detail::load_and_prepare(manifest, io::Split::Train, cfg.downsample);
    auto val_set = detail::load_and_prepare(manifest, io::Split::Val, cfg.downsample);
    if (train_set.empty()) throw std::runtime_error("train split is empty");
    if (val_set.empty()) val_set = train_set;  // desk-scale fallback

    if (cfg.net.input_w == 0) cfg.net.input_w = train_set[0].width();
    if (cfg.net.input_h == 0) cfg.net.input_h = train_set[0].height();
    cfg.net.seed = cfg.seed;
    cfg.net.validate();

    std::filesystem::create_directories(cfg.out_dir);
    auto net = nn::build_network<float>(cfg.net);

    train::TrainOptions options;
    options.augment = cfg.no_augment ? io::AugmentPolicy::identity() : cfg.augment;

    nlohmann::json history_out;
    std::string timing_csv = "epoch,wall_time_sec\n";
    if (cfg.net.arch == nn::Arch::FPO && !cfg.fpo_joint) {
        auto histories =
            train::fpo_sequential_train(net, train_set, val_set, cfg.hyper, cfg.seed,
                                        options.augment);
        history_out = nlohmann::json{{"schema_version", 1}, {"stages", nlohmann::json::array()}};
        for (const auto& h : histories) history_out["stages"].push_back(train::history_json(h));
        std::string csv;
        for (size_t s = 0; s < histories.size(); ++s) {
            csv += "# stage " + std::to_string(s + 1) + "\n";
            csv += train::history_csv(histories[s]);
        }
        detail::write_text((std::filesystem::path(cfg.out_dir) / "history.csv").string(), csv);
        for (size_t s = 0; s < histories.size(); ++s)
            for (size_t e = 0; e < histories[s].wall_time_sec.size(); ++e)
                timing_csv += std::to_string(e + 1) + "," +
                              std::to_string(histories[s].wall_time_sec[e]) + "\n";
        std::cout << "fpo sequential training done, " << histories.size() << " stages\n";
    } else {
        auto history = train::train(net, train_set, val_set, cfg.hyper, cfg.seed, options);
        history_out = train::history_json(history);
        detail::write_text((std::filesystem::path(cfg.out_dir) / "history.csv").string(),
                           train::history_csv(history));
        for (size_t e = 0; e < history.wall_time_sec.size(); ++e)
            timing_csv +=
                std::to_string(e + 1) + "," + std::to_string(history.wall_time_sec[e]) + "\n";
        std::cout << "training done: " << history.train_loss.size() << " epochs, stop reason "
                  << history.stop_reason << ", best val " << history.best_val << "\n";
        if (history.stop_reason == "diverged") {
            std::cerr << "training diverged at epoch " << history.diverged_epoch << "\n";
            detail::write_text((std::filesystem::path(cfg.out_dir) / "history.json").string(),
                               history_out.dump(2) + "\n");
            detail::write_effective_config(cfg);
            return 1;
        }
    }
    detail::write_text((std::filesystem::path(cfg.out_dir) / "history.json").string(),
                       history_out.dump(2) + "\n");
    detail::write_text((std::filesystem::path(cfg.out_dir) / "timing.csv").string(), timing_csv);
    train::save_checkpoint((std::filesystem::path(cfg.out_dir) / "checkpoint.dsck").string(),
                           net, cfg.hyper.max_epochs);
    detail::write_effective_config(cfg);
    return 0;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

inline int cmd_eval(RunConfig& cfg) {
    if (cfg.checkpoint.empty()) throw UsageError("eval requires --checkpoint");
    if (cfg.manifest.empty()) throw UsageError("eval requires --manifest");
    auto loaded = train::load_checkpoint(cfg.checkpoint);
    auto manifest = io::parse_manifest(cfg.manifest);
    auto test_set = detail::load_and_prepare(manifest, io::Split::Test, cfg.downsample);
    if (test_set.empty()) throw std::runtime_error("test split is empty");

    std::filesystem::create_directories(cfg.out_dir);
    std::vector<metrics::PixelPairs> per_image;
    std::vector<Tensor<float>> predictions;
    for (const auto& s : test_set) {
        auto pred = detail::infer_depth(loaded.net, s.rgb);
        per_image.push_back(metrics::collect_pairs(pred, s.depth, s.mask, 1e-3, cfg.max_depth));
        predictions.push_back(std::move(pred));
    }
    auto report =
        cfg.per_image ? metrics::per_image_report(per_image) : metrics::pooled_report(per_image);

    nlohmann::json j = metrics::metric_report_json(report);
    j["mode"] = cfg.per_image ? "per_image" : "pooled";
    j["images"] = nlohmann::json::array();
    for (const auto& p : per_image)
        j["images"].push_back(metrics::metric_report_json(metrics::report_from_pairs(p)));

    if (cfg.intrinsics.fx > 0 && !cfg.translations.empty()) {
        auto intr = cfg.intrinsics;
        intr.validate();
        double mse_acc = 0.0, contour_acc = 0.0;
        size_t n = 0;
        for (size_t i = 0; i < test_set.size(); ++i) {
            const auto& s = test_set[i];
            auto gray = metrics::rgb_to_gray(s.rgb);
            for (auto [tx, ty] : cfg.translations) {
                auto vcs_gt = metrics::simulate_viewpoint_change(gray, s.depth, intr, tx, ty);
                auto vcs_inf =
                    metrics::simulate_viewpoint_change(gray, predictions[i], intr, tx, ty);
                mse_acc += metrics::consistent_mse(vcs_inf, vcs_gt);
                contour_acc += metrics::contour_vcs_metric(s.rgb, s.depth, predictions[i], intr,
                                                           tx, ty, cfg.canny);
                ++n;
            }
        }
        report.has_vcs = true;
        report.consistent_mse = mse_acc / static_cast<double>(n);
        report.contour = contour_acc / static_cast<double>(n);
        j["consistent_mse"] = report.consistent_mse;
        j["contour"] = report.contour;
    }

    const std::string table = metrics::metric_report_text(report);
    std::cout << table;
    detail::write_text((std::filesystem::path(cfg.out_dir) / "metrics.json").string(),
                       j.dump(2) + "\n");
    detail::write_text((std::filesystem::path(cfg.out_dir) / "metrics.txt").string(), table);
    detail::write_effective_config(cfg);
    return 0;
}

// ---------------------------------------------------------------------------
// infer
// ---------------------------------------------------------------------------

inline int cmd_infer(RunConfig& cfg) {
    if (cfg.checkpoint.empty()) throw UsageError("infer requires --checkpoint");
    if (cfg.inputs.empty()) throw UsageError("infer requires input images");
    auto loaded = train::load_checkpoint(cfg.checkpoint);
    std::filesystem::create_directories(cfg.out_dir);
    for (const auto& path : cfg.inputs) {
        Tensor<float> rgb;
        if (io::ends_with(path, ".ppm"))
            rgb = io::load_ppm(path);
        else if (io::ends_with(path, ".png"))
            rgb = io::load_png(path);
        else
            throw std::runtime_error("infer: unsupported input format: " + path);
        auto depth = detail::infer_depth(loaded.net, rgb);
        auto stem = std::filesystem::path(path).stem().string();
        io::save_pfm((std::filesystem::path(cfg.out_dir) / (stem + "_depth.pfm")).string(),
                     depth);
        io::save_pgm8((std::filesystem::path(cfg.out_dir) / (stem + "_depth.pgm")).string(),
                      depth, 0.0f, static_cast<float>(cfg.max_depth));
        std::cout << stem << ": depth written\n";
    }
    detail::write_effective_config(cfg);
    return 0;
}

// ---------------------------------------------------------------------------
// gradcheck
// ---------------------------------------------------------------------------

inline int cmd_gradcheck(RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    constexpr double kThreshold = 1e-4;
    nlohmann::json j{{"schema_version", 1}, {"threshold", kThreshold}};
    j["entries"] = nlohmann::json::array();
    double worst = 0.0;

    GradCheckOptions opt;
    opt.corrupt_layer = cfg.corrupt;

    for (auto& lc : nn::standard_layer_suite()) {
        auto rep = gradcheck_network(lc.net, lc.input, opt);
        j["entries"].push_back({{"component", "layer:" + lc.name},
                                {"max_rel_err", rep.max_rel_err}});
        worst = std::max(worst, rep.max_rel_err);
        if (rep.max_rel_err > kThreshold)
            std::cerr << "layer:" << lc.name << " FAILED: " << rep.max_rel_err << "\n";
    }

    std::vector<nn::Arch> archs;
    if (cfg.gradcheck_arch == "all")
        archs = {nn::Arch::SSN, nn::Arch::Skips, nn::Arch::FPO, nn::Arch::MSML, nn::Arch::DSP};
    else
        archs = {nn::parse_arch(cfg.gradcheck_arch)};

    for (auto arch : archs) {
        nn::NetworkSpec spec;
        spec.arch = arch;
        spec.channel_multiplier = 1.0 / 32.0;
        spec.input_w = 32;
        spec.input_h = 32;
        spec.seed = cfg.seed;
        auto net = nn::build_network<double>(spec);
        RngStream rng = RngStream::named(cfg.seed, "gradcheck-input");
        Tensor<double> input(1, 3, 32, 32);
        for (auto& v : input.data) v = rng.uniform(0.0, 1.0);
        GradCheckOptions net_opt = opt;
        net_opt.max_probes_per_array = static_cast<size_t>(cfg.gradcheck_probes);
        auto rep = gradcheck_network(net, input, net_opt);
        worst = std::max(worst, rep.max_rel_err);
        nlohmann::json entry{{"component", "network:" + nn::arch_name(arch)},
                             {"max_rel_err", rep.max_rel_err}};
        entry["layers"] = nlohmann::json::array();
        for (const auto& e : rep.entries)
            entry["layers"].push_back(
                {{"name", e.name}, {"max_rel_err", e.max_rel_err}, {"probes", e.probes}});
        j["entries"].push_back(entry);
        std::cout << "network:" << nn::arch_name(arch) << " max_rel_err " << rep.max_rel_err
                  << (rep.max_rel_err <= kThreshold ? " (pass)" : " (FAIL)") << "\n";
    }

    j["max_rel_err"] = worst;
    j["pass"] = worst <= kThreshold;
    detail::write_text((std::filesystem::path(cfg.out_dir) / "gradcheck.json").string(),
                       j.dump(2) + "\n");
    detail::write_effective_config(cfg);
    std::cout << "gradcheck max relative error: " << worst << "\n";
    return worst <= kThreshold ? 0 : 1;
}

// ---------------------------------------------------------------------------
// vcs
// ---------------------------------------------------------------------------

inline int cmd_vcs(RunConfig& cfg) {
    if (cfg.manifest.empty()) throw UsageError("vcs requires --manifest");
    if (cfg.translations.empty())
        throw UsageError("vcs requires at least one --translate tx,ty");
    auto intr = detail::require_intrinsics(cfg);

    auto manifest = io::parse_manifest(cfg.manifest);
    auto samples = detail::load_and_prepare(manifest, io::Split::Test, cfg.downsample);
    if (samples.empty()) throw std::runtime_error("test split is empty");

    std::optional<train::LoadedCheckpoint> loaded;
    if (!cfg.checkpoint.empty()) loaded = train::load_checkpoint(cfg.checkpoint);

    std::filesystem::create_directories(cfg.out_dir);
    nlohmann::json j{{"schema_version", 1}};
    j["images"] = nlohmann::json::array();
    double mse_total = 0.0, contour_total = 0.0;
    size_t contour_count = 0;
    metrics::ContourStats pooled;  // contour pooled over all edge pixels

    for (size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        Tensor<float> pred = loaded ? detail::infer_depth(loaded->net, s.rgb) : s.depth;
        auto gray = metrics::rgb_to_gray(s.rgb);
        nlohmann::json image_entry{{"source", s.source_id}};
        image_entry["translations"] = nlohmann::json::array();
        double image_mse = 0.0, image_contour = 0.0;
        size_t image_contour_n = 0;
        for (size_t t = 0; t < cfg.translations.size(); ++t) {
            auto [tx, ty] = cfg.translations[t];
            auto vcs_gt = metrics::simulate_viewpoint_change(gray, s.depth, intr, tx, ty);
            auto vcs_inf = metrics::simulate_viewpoint_change(gray, pred, intr, tx, ty);
            double mse = metrics::consistent_mse(vcs_inf, vcs_gt);
            image_mse += mse;
            nlohmann::json te{{"tx", tx}, {"ty", ty}, {"consistent_mse", mse},
                              {"valid_gt", vcs_gt.valid_count()},
                              {"valid_inferred", vcs_inf.valid_count()}};
            try {
                auto stats =
                    metrics::contour_vcs_stats(s.rgb, s.depth, pred, intr, tx, ty, cfg.canny);
                te["contour"] = stats.mean();
                image_contour += stats.mean();
                ++image_contour_n;
                pooled.distance_sum += stats.distance_sum;
                pooled.edge_pixels += stats.edge_pixels;
            } catch (const std::invalid_argument& e) {
                te["contour_error"] = e.what();
            }
            image_entry["translations"].push_back(te);

            auto stem = "sample_" + std::to_string(i) + "_t" + std::to_string(t);
            auto write_vcs = [&](const std::string& tag,
                                 const metrics::VcsResult<float>& vcs) {
                io::save_pfm(
                    (std::filesystem::path(cfg.out_dir) / (stem + "_" + tag + ".pfm")).string(),
                    vcs.image);
                Tensor<float> mask_img(1, 1, vcs.image.h(), vcs.image.w());
                for (size_t m = 0; m < vcs.mask.size(); ++m)
                    mask_img.data[m] = vcs.mask[m] ? 1.0f : 0.0f;
                io::save_pgm8(
                    (std::filesystem::path(cfg.out_dir) / (stem + "_" + tag + ".pgm")).string(),
                    mask_img, 0.0f, 1.0f);
            };
            write_vcs("gt", vcs_gt);
            write_vcs("inf", vcs_inf);
        }
        image_entry["mean_consistent_mse"] = image_mse / cfg.translations.size();
        if (image_contour_n > 0) {
            image_entry["mean_contour"] = image_contour / image_contour_n;
            contour_total += image_contour / image_contour_n;
            ++contour_count;
        }
        mse_total += image_mse / cfg.translations.size();
        j["images"].push_back(image_entry);
    }
    j["mean_consistent_mse"] = mse_total / samples.size();
    if (contour_count > 0) {
        j["mean_contour"] = contour_total / contour_count;  // per-image average
        j["pooled_contour"] = pooled.mean();                // all edge pixels pooled
    }
    j["inferred_from"] = loaded ? "checkpoint" : "ground_truth";

    detail::write_text((std::filesystem::path(cfg.out_dir) / "vcs_summary.json").string(),
                       j.dump(2) + "\n");
    detail::write_effective_config(cfg);
    std::cout << "vcs: mean consistent MSE " << j["mean_consistent_mse"].get<double>();
    if (contour_count > 0) std::cout << ", mean contour " << j["mean_contour"].get<double>();
    std::cout << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// argument parsing and dispatch
// ---------------------------------------------------------------------------

inline int run(std::vector<std::string> args) {
    configure_threads();
    RunConfig cfg;

    // configuration layering: defaults < JSON config file < flags
    for (size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--config") cfg.config_file = args[i + 1];
    if (!cfg.config_file.empty()) {
        std::ifstream f(cfg.config_file);
        if (!f) {
            std::cerr << "cannot open config file: " << cfg.config_file << "\n";
            return 2;
        }
        try {
            nlohmann::json j;
            f >> j;
            j.get_to(cfg);
        } catch (const std::exception& e) {
            std::cerr << "bad config file: " << e.what() << "\n";
            return 2;
        }
    }

    CLI::App app{"five multi-scale monocular depth estimation architectures: "
                 "training, evaluation and viewpoint-change metrics"};
    app.require_subcommand(1);
    std::string arch_tag;
    std::string config_unused;
    std::vector<std::string> translate_args;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_unused, "JSON config file (layered under flags)");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--seed", cfg.seed, "root seed for all random streams");
    };

    auto* train_cmd = app.add_subcommand("train", "train a network on a manifest dataset");
    add_common(train_cmd);
    train_cmd->add_option("--manifest", cfg.manifest, "dataset manifest CSV")->required(false);
    train_cmd->add_option("--arch", arch_tag, "ssn|skips|fpo|msml|dsp");
    train_cmd->add_option("--omega", cfg.net.channel_multiplier, "channel multiplier");
    train_cmd->add_option("--width", cfg.net.input_w, "input width (0 = from data)");
    train_cmd->add_option("--height", cfg.net.input_h, "input height (0 = from data)");
    train_cmd->add_option("--blocks", cfg.net.blocks_per_stage, "blocks per stage (4 ints)");
    train_cmd->add_option("--lr", cfg.hyper.learning_rate, "learning rate");
    train_cmd->add_option("--weight-decay", cfg.hyper.weight_decay, "weight decay");
    train_cmd->add_option("--momentum", cfg.hyper.momentum, "momentum");
    train_cmd->add_option("--batch-size", cfg.hyper.batch_size, "batch size");
    train_cmd->add_option("--epochs", cfg.hyper.max_epochs, "maximum epochs");
    train_cmd->add_option("--patience", cfg.hyper.patience, "early-stop patience");
    train_cmd->add_option("--min-epochs", cfg.hyper.min_epochs, "epochs before early stop");
    train_cmd->add_option("--downsample", cfg.downsample, "nearest-neighbor downsample factor");
    train_cmd->add_flag("--no-augment", cfg.no_augment, "disable data augmentation");
    train_cmd->add_flag("--fpo-joint", cfg.fpo_joint,
                        "train FPO jointly instead of the sequential schedule");

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on the test split");
    add_common(eval_cmd);
    eval_cmd->add_option("--manifest", cfg.manifest, "dataset manifest CSV");
    eval_cmd->add_option("--checkpoint", cfg.checkpoint, "checkpoint file");
    eval_cmd->add_option("--max-depth", cfg.max_depth, "depth range upper bound (m)");
    eval_cmd->add_option("--downsample", cfg.downsample, "downsample factor");
    eval_cmd->add_flag("--per-image", cfg.per_image, "average metrics per image");
    eval_cmd->add_option("--fx", cfg.intrinsics.fx, "focal length x (pixels)");
    eval_cmd->add_option("--fy", cfg.intrinsics.fy, "focal length y (pixels)");
    eval_cmd->add_option("--cx", cfg.intrinsics.cx, "principal point x");
    eval_cmd->add_option("--cy", cfg.intrinsics.cy, "principal point y");
    eval_cmd->add_option("--translate", translate_args, "VCS translation tx,ty (repeatable)");

    auto* infer_cmd = app.add_subcommand("infer", "predict depth for input images");
    add_common(infer_cmd);
    infer_cmd->add_option("--checkpoint", cfg.checkpoint, "checkpoint file");
    infer_cmd->add_option("--max-depth", cfg.max_depth, "visualization range (m)");
    infer_cmd->add_option("inputs", cfg.inputs, "input images (ppm/png)");

    auto* plan_cmd = app.add_subcommand("plan", "weight-free shape and wiring report");
    add_common(plan_cmd);
    plan_cmd->add_option("--arch", arch_tag, "ssn|skips|fpo|msml|dsp");
    plan_cmd->add_option("--omega", cfg.net.channel_multiplier, "channel multiplier");
    plan_cmd->add_option("--width", cfg.net.input_w, "input width (default 320)");
    plan_cmd->add_option("--height", cfg.net.input_h, "input height (default 240)");
    plan_cmd->add_option("--blocks", cfg.net.blocks_per_stage, "blocks per stage (4 ints)");
    plan_cmd->add_flag("--check-table1", cfg.check_table1,
                       "assert the full-width decoder list against the published table");

    auto* grad_cmd = app.add_subcommand("gradcheck", "finite-difference gradient verification");
    add_common(grad_cmd);
    grad_cmd->add_option("--arch", cfg.gradcheck_arch, "architecture to check, or 'all'");
    grad_cmd->add_option("--probes", cfg.gradcheck_probes, "probes per parameter array");
    grad_cmd->add_option("--corrupt", cfg.corrupt,
                         "debugging: corrupt this layer's backward pass");

    auto* vcs_cmd = app.add_subcommand("vcs", "viewpoint-change-simulation metrics");
    add_common(vcs_cmd);
    vcs_cmd->add_option("--manifest", cfg.manifest, "dataset manifest CSV");
    vcs_cmd->add_option("--checkpoint", cfg.checkpoint,
                        "checkpoint (omitted: ground truth as the inferred depth)");
    vcs_cmd->add_option("--fx", cfg.intrinsics.fx, "focal length x (pixels)");
    vcs_cmd->add_option("--fy", cfg.intrinsics.fy, "focal length y (pixels)");
    vcs_cmd->add_option("--cx", cfg.intrinsics.cx, "principal point x");
    vcs_cmd->add_option("--cy", cfg.intrinsics.cy, "principal point y");
    vcs_cmd->add_option("--translate", translate_args, "translation tx,ty (repeatable)");
    vcs_cmd->add_option("--downsample", cfg.downsample, "downsample factor");

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
    add_common(synth_cmd);
    synth_cmd->add_option("--count", cfg.synth_count, "number of samples");
    synth_cmd->add_option("--test-count", cfg.synth_test, "samples labeled as test split");
    synth_cmd->add_option("--width", cfg.net.input_w, "image width (default 64)");
    synth_cmd->add_option("--height", cfg.net.input_h, "image height (default 48)");

    std::vector<const char*> argv;
    std::string prog = "depthscope";
    argv.push_back(prog.c_str());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (!arch_tag.empty()) cfg.net.arch = nn::parse_arch(arch_tag);
        for (const auto& t : translate_args) {
            auto comma = t.find(',');
            if (comma == std::string::npos)
                throw UsageError("--translate expects tx,ty, got '" + t + "'");
            cfg.translations.push_back(
                {std::stod(t.substr(0, comma)), std::stod(t.substr(comma + 1))});
        }

        if (train_cmd->parsed()) {
            cfg.command = "train";
            return cmd_train(cfg);
        }
        if (eval_cmd->parsed()) {
            cfg.command = "eval";
            return cmd_eval(cfg);
        }
        if (infer_cmd->parsed()) {
            cfg.command = "infer";
            return cmd_infer(cfg);
        }
        if (plan_cmd->parsed()) {
            cfg.command = "plan";
            return cmd_plan(cfg);
        }
        if (grad_cmd->parsed()) {
            cfg.command = "gradcheck";
            return cmd_gradcheck(cfg);
        }
        if (vcs_cmd->parsed()) {
            cfg.command = "vcs";
            return cmd_vcs(cfg);
        }
        if (synth_cmd->parsed()) {
            cfg.command = "synth";
            return cmd_synth(cfg);
        }
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace depthscope::cli
