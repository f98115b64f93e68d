#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace depthscope::nn {

enum class Arch { SSN, Skips, FPO, MSML, DSP };

inline std::string arch_name(Arch a) {
    switch (a) {
        case Arch::SSN: return "ssn";
        case Arch::Skips: return "skips";
        case Arch::FPO: return "fpo";
        case Arch::MSML: return "msml";
        case Arch::DSP: return "dsp";
    }
    throw std::invalid_argument("arch_name: bad tag");
}

inline Arch parse_arch(const std::string& s) {
    if (s == "ssn") return Arch::SSN;
    if (s == "skips") return Arch::Skips;
    if (s == "fpo") return Arch::FPO;
    if (s == "msml") return Arch::MSML;
    if (s == "dsp") return Arch::DSP;
    throw std::invalid_argument("unknown architecture tag '" + s + "' (ssn|skips|fpo|msml|dsp)");
}

/// Declarative description of one of the five networks.
struct NetworkSpec {
    Arch arch = Arch::SSN;
    std::array<int, 4> blocks_per_stage{2, 2, 2, 2};  // ResNet200 uses (3, 24, 36, 3)
    double channel_multiplier = 1.0;                  // omega in (0, 1]
    int input_h = 240;
    int input_w = 320;
    uint64_t seed = 0;
    double rrelu_lower = 1.0 / 8.0;
    double rrelu_upper = 1.0 / 3.0;

    void validate() const {
        if (channel_multiplier <= 0.0 || channel_multiplier > 1.0)
            throw std::invalid_argument("NetworkSpec: channel_multiplier must be in (0,1]");
        for (int b : blocks_per_stage)
            if (b < 1) throw std::invalid_argument("NetworkSpec: blocks_per_stage must be >= 1");
        if (input_h % 16 != 0 || input_w % 16 != 0)
            throw std::invalid_argument("NetworkSpec: input size must be divisible by 16, got " +
                                        std::to_string(input_w) + "x" + std::to_string(input_h));
        if (!(0.0 < rrelu_lower && rrelu_lower < rrelu_upper && rrelu_upper < 1.0))
            throw std::invalid_argument("NetworkSpec: invalid rrelu bounds");
    }
};

/// Stem width scales to any positive integer; bottleneck stage widths round to
/// a positive multiple of 4 so the mid width (out/4) stays integral.
inline int scaled_stem_width(double omega) {
    return std::max(1, static_cast<int>(std::llround(64.0 * omega)));
}

inline int scaled_stage_width(int full_width, double omega) {
    return std::max(4, 4 * static_cast<int>(std::llround(full_width * omega / 4.0)));
}

/// (stem, stage1..stage4) output channel counts at full width (64, 256, 512, 1024, 2048).
inline std::array<int, 5> stage_widths(double omega) {
    return {scaled_stem_width(omega), scaled_stage_width(256, omega),
            scaled_stage_width(512, omega), scaled_stage_width(1024, omega),
            scaled_stage_width(2048, omega)};
}

inline void to_json(nlohmann::json& j, const NetworkSpec& s) {
    j = nlohmann::json{{"arch", arch_name(s.arch)},
                       {"blocks_per_stage", s.blocks_per_stage},
                       {"channel_multiplier", s.channel_multiplier},
                       {"input_h", s.input_h},
                       {"input_w", s.input_w},
                       {"seed", s.seed},
                       {"rrelu_lower", s.rrelu_lower},
                       {"rrelu_upper", s.rrelu_upper}};
}

inline void from_json(const nlohmann::json& j, NetworkSpec& s) {
    s.arch = parse_arch(j.at("arch").get<std::string>());
    if (j.contains("blocks_per_stage")) j.at("blocks_per_stage").get_to(s.blocks_per_stage);
    if (j.contains("channel_multiplier")) s.channel_multiplier = j.at("channel_multiplier");
    if (j.contains("input_h")) s.input_h = j.at("input_h");
    if (j.contains("input_w")) s.input_w = j.at("input_w");
    if (j.contains("seed")) s.seed = j.at("seed");
    if (j.contains("rrelu_lower")) s.rrelu_lower = j.at("rrelu_lower");
    if (j.contains("rrelu_upper")) s.rrelu_upper = j.at("rrelu_upper");
}

}  // namespace depthscope::nn
