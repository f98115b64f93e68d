#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

#include "depthscope/nn/build.hpp"

namespace depthscope::train {

static_assert(std::endian::native == std::endian::little,
              "checkpoint container assumes a little-endian host");

constexpr char kCheckpointMagic[4] = {'D', 'S', 'C', 'K'};
constexpr uint32_t kCheckpointVersion = 1;

/// Versioned binary container: magic "DSCK", u32 version, u32 header length,
/// JSON header (spec + epoch), then raw little-endian float32 parameter
/// arrays in declaration order (running statistics included).
inline void save_checkpoint(const std::string& path, nn::Network<float>& net, int epoch) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    nlohmann::json header{{"schema_version", 1}, {"spec", net.spec}, {"epoch", epoch}};
    const std::string hs = header.dump();
    f.write(kCheckpointMagic, 4);
    uint32_t version = kCheckpointVersion;
    uint32_t hlen = static_cast<uint32_t>(hs.size());
    f.write(reinterpret_cast<const char*>(&version), 4);
    f.write(reinterpret_cast<const char*>(&hlen), 4);
    f.write(hs.data(), static_cast<std::streamsize>(hs.size()));
    for (auto& p : net.parameters())
        f.write(reinterpret_cast<const char*>(p.values->data()),
                static_cast<std::streamsize>(p.values->size() * sizeof(float)));
    if (!f) throw std::runtime_error("checkpoint write failed: " + path);
}

struct LoadedCheckpoint {
    nn::Network<float> net;
    int epoch = 0;
};

inline LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, kCheckpointMagic, 4) != 0)
        throw std::runtime_error("not a DSCK checkpoint: " + path);
    uint32_t version, hlen;
    f.read(reinterpret_cast<char*>(&version), 4);
    f.read(reinterpret_cast<char*>(&hlen), 4);
    if (!f || version != kCheckpointVersion)
        throw std::runtime_error("unsupported checkpoint version in " + path);
    std::string hs(hlen, '\0');
    f.read(hs.data(), hlen);
    auto header = nlohmann::json::parse(hs);
    LoadedCheckpoint out;
    out.net = nn::build_network<float>(header.at("spec").get<nn::NetworkSpec>());
    out.epoch = header.value("epoch", 0);
    for (auto& p : out.net.parameters()) {
        f.read(reinterpret_cast<char*>(p.values->data()),
               static_cast<std::streamsize>(p.values->size() * sizeof(float)));
        if (!f) throw std::runtime_error("checkpoint truncated: " + path);
    }
    char extra;
    if (f.read(&extra, 1)) throw std::runtime_error("checkpoint has trailing bytes: " + path);
    return out;
}

}  // namespace depthscope::train
