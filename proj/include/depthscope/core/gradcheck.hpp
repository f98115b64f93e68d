#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "depthscope/core/ops.hpp"
#include "depthscope/core/rng.hpp"
#include "depthscope/nn/graph.hpp"

namespace depthscope {

struct GradCheckEntry {
    std::string name;      // layer name or "input"
    double max_rel_err = 0.0;
    size_t probes = 0;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    double max_rel_err = 0.0;

    GradCheckEntry& entry(const std::string& name) {
        for (auto& e : entries)
            if (e.name == name) return e;
        entries.push_back({name, 0.0, 0});
        return entries.back();
    }
};

struct GradCheckOptions {
    // Step scale for central differences. Small enough that the secant rarely
    // straddles a rectifier kink (a deep net has thousands of activations, so
    // the nearest one sits ~1e-5 from zero); double precision keeps the
    // subtraction noise at ~1e-9 absolute, well under the 1e-4 gate.
    double epsilon = 1e-7;
    // A probe that disagrees is re-measured at progressively smaller steps.
    // Straddling a kink or truncation error vanishes as the step shrinks; a
    // wrong analytic gradient stays put.
    double retry_threshold = 1e-6;
    int max_retries = 2;
    size_t max_probes_per_array = std::numeric_limits<size_t>::max();
    uint64_t sample_seed = 17;        // probe-index selection for large arrays
    std::string corrupt_layer;        // debugging negative control
    // Parameters are nudged off their initialization before checking so the
    // comparison happens at a generic point. Freshly built networks otherwise
    // park activations exactly on rectifier kinks (zero-initialized BN betas
    // reproduce beta bit-exactly wherever a channel normalizes over a single
    // element), where one-sided derivatives differ and central differences
    // are undefined.
    double jitter = 0.02;
};

/// Central finite-difference check of a network's analytic gradients in
/// double precision. The loss is the mean (over outputs) of an all-pixels L2
/// against fixed pseudo-random targets. Forward runs in GradCheck mode:
/// batch-statistics normalization, deterministic RReLU, running stats frozen.
inline GradCheckReport gradcheck_network(nn::Network<double>& net, const Tensor<double>& input,
                                         const GradCheckOptions& opt = {}) {
    using nn::Mode;
    nn::EvalContext<double> ctx;
    ctx.mode = Mode::GradCheck;
    ctx.corrupt_layer = opt.corrupt_layer;

    if (opt.jitter > 0.0) {
        RngStream jrng = RngStream::named(opt.sample_seed, "gradcheck-jitter");
        for (auto& p : net.parameters()) {
            if (!p.grads) continue;  // leave running statistics untouched
            for (auto& v : *p.values)
                v += opt.jitter * jrng.uniform(-1.0, 1.0) * std::max(1.0, std::abs(v));
        }
    }

    // Fixed targets keep the loss a pure function of (params, input).
    nn::forward(net, input, ctx);
    auto outs = nn::output_activations(net, ctx);
    RngStream trng = RngStream::named(opt.sample_seed, "gradcheck-target");
    std::vector<Tensor<double>> targets;
    std::vector<Tensor<double>> masks;
    for (const auto& o : outs) {
        Tensor<double> t(o.n(), o.c(), o.h(), o.w());
        for (auto& v : t.data) v = trng.uniform(0.25, 2.0);
        targets.push_back(std::move(t));
        masks.emplace_back(o.n(), o.c(), o.h(), o.w(), 1.0);
    }
    const double k_outputs = static_cast<double>(outs.size());

    auto loss_of = [&](nn::EvalContext<double>& c) {
        double total = 0.0;
        auto os = nn::output_activations(net, c);
        for (size_t i = 0; i < os.size(); ++i)
            total += ops::l2_loss(os[i], targets[i], masks[i]);
        return total / k_outputs;
    };

    // Analytic gradients.
    double base_loss;
    {
        std::vector<Tensor<double>> grads;
        double total = 0.0;
        for (size_t i = 0; i < outs.size(); ++i) {
            Tensor<double> g;
            total += ops::l2_loss(outs[i], targets[i], masks[i], &g);
            for (auto& v : g.data) v /= k_outputs;
            grads.push_back(std::move(g));
        }
        base_loss = total / k_outputs;
        (void)base_loss;
        nn::backward(net, ctx, grads);
    }
    Tensor<double> input_grad = ctx.grad_act[net.input_node];

    GradCheckReport report;
    RngStream srng = RngStream::named(opt.sample_seed, "gradcheck-sample");
    Tensor<double> in_copy = input;

    // `use_input` = true probes in_copy (the forward input), else the network
    // parameters named by `values`.
    auto probe_array = [&](const std::string& entry_name, std::vector<double>& values,
                           const std::vector<double>& analytic, bool use_input) {
        auto& entry = report.entry(entry_name);
        const size_t n = values.size();
        std::vector<size_t> idx;
        if (n <= opt.max_probes_per_array) {
            idx.resize(n);
            for (size_t i = 0; i < n; ++i) idx[i] = i;
        } else {
            for (size_t i = 0; i < opt.max_probes_per_array; ++i)
                idx.push_back(static_cast<size_t>(srng.uniform_index(n)));
        }
        nn::EvalContext<double> fdctx;
        fdctx.mode = Mode::GradCheck;
        for (size_t i : idx) {
            const double old = values[i];
            const double a = analytic[i];
            double rel = std::numeric_limits<double>::infinity();
            double h = opt.epsilon * std::max(1.0, std::abs(old));
            for (int attempt = 0; attempt <= opt.max_retries; ++attempt) {
                values[i] = old + h;
                nn::forward(net, use_input ? in_copy : input, fdctx);
                const double lp = loss_of(fdctx);
                values[i] = old - h;
                nn::forward(net, use_input ? in_copy : input, fdctx);
                const double lm = loss_of(fdctx);
                values[i] = old;
                const double fd = (lp - lm) / (2.0 * h);
                rel = std::min(rel,
                               std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1.0}));
                if (rel <= opt.retry_threshold) break;
                h /= 16.0;
            }
            entry.max_rel_err = std::max(entry.max_rel_err, rel);
            ++entry.probes;
            report.max_rel_err = std::max(report.max_rel_err, rel);
        }
    };

    auto strip_suffix = [](const std::string& s) {
        auto pos = s.rfind('.');
        return pos == std::string::npos ? s : s.substr(0, pos);
    };
    for (auto& p : net.parameters()) {
        if (!p.grads) continue;  // running statistics carry no gradient
        probe_array(strip_suffix(p.name), *p.values, *p.grads, false);
    }
    probe_array("input", in_copy.data, input_grad.data, true);
    return report;
}

}  // namespace depthscope
