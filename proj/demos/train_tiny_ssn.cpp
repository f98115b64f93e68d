// Trains a 1/16-width single-scale network on a handful of synthetic scenes
// and prints the standard metrics before and after.
#include <iostream>

#include "depthscope/io/synth.hpp"
#include "depthscope/metrics/standard.hpp"
#include "depthscope/train/loop.hpp"

using namespace depthscope;

int main() {
    nn::NetworkSpec spec;
    spec.arch = nn::Arch::SSN;
    spec.channel_multiplier = 1.0 / 16.0;
    spec.input_w = 64;
    spec.input_h = 48;
    spec.seed = 7;
    auto net = nn::build_network<float>(spec);

    auto data = io::synth_generate(7, 6, 64, 48);

    auto evaluate = [&](const char* label) {
        std::vector<metrics::PixelPairs> pairs;
        for (const auto& s : data) {
            auto pred = nn::forward_depth(net, s.rgb, nn::Mode::Eval).back();
            pairs.push_back(metrics::collect_pairs(pred, s.depth, s.mask));
        }
        std::cout << label << "\n" << metrics::metric_report_text(metrics::pooled_report(pairs));
    };

    evaluate("before training:");
    train::HyperParams hyper;
    hyper.batch_size = 3;
    hyper.max_epochs = 60;
    auto history = train::train(net, data, data, hyper, 7);
    std::cout << "trained " << history.train_loss.size() << " epochs, final loss "
              << history.train_loss.back() << "\n";
    evaluate("after training:");
    return 0;
}
