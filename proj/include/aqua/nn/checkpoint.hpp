#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aqua/dsp.hpp"
#include "aqua/nn/network.hpp"

namespace aqua {

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckpointMeta {
  std::int32_t epochs = 0;
  double lr = 0.0;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> extra;
};

// Identifies the preprocessing a model was trained on; models refuse inputs
// prepared differently.
struct Fingerprint {
  std::uint64_t hash = 0;
  bool denoised = false;

  bool operator==(const Fingerprint&) const = default;
};

struct ThresholdSection {
  double threshold = 0.0;
  double percentile = 70.0;
  double rescale_lo = -120.0;  // dB value mapped to 0
  double rescale_hi = 0.0;     // dB value mapped to 1
};

// Little-endian container, magic "AQSG", version 1, length-prefixed sections.
// `blob` holds the trained parameters followed by persistent buffers, 32-bit
// floats in network traversal order.
struct Checkpoint {
  StftConfig stft;
  std::optional<PerBinStats> norm;
  nn::NetworkSpec arch;
  std::vector<float> blob;
  CheckpointMeta meta;
  std::optional<ThresholdSection> threshold;
  std::vector<std::string> classes;
  std::optional<Fingerprint> fingerprint;
};

std::vector<std::uint8_t> save_checkpoint(const Checkpoint& ck);
Checkpoint load_checkpoint(std::span<const std::uint8_t> bytes);

void write_checkpoint_file(const std::filesystem::path& path, const Checkpoint& ck);
Checkpoint read_checkpoint_file(const std::filesystem::path& path);

Fingerprint make_fingerprint(const StftConfig& stft, const PerBinStats* norm, bool denoised);
Fingerprint make_fingerprint(const StftConfig& stft, double rescale_lo, double rescale_hi, bool denoised);

template <class S>
std::vector<float> pack_network(nn::Network<S>& net) {
  std::vector<float> blob;
  auto pack = [&](const std::vector<nn::Tensor<S>*>& ts) {
    for (const auto* t : ts)
      for (Index i = 0; i < t->size(); ++i) blob.push_back(static_cast<float>(t->data[i]));
  };
  pack(net.param_list());
  pack(net.buffer_list());
  return blob;
}

template <class S>
void unpack_network(nn::Network<S>& net, std::span<const float> blob) {
  std::size_t pos = 0;
  auto unpack = [&](const std::vector<nn::Tensor<S>*>& ts) {
    for (auto* t : ts) {
      if (pos + static_cast<std::size_t>(t->size()) > blob.size())
        throw CheckpointError("parameter blob too short for network architecture");
      for (Index i = 0; i < t->size(); ++i) t->data[i] = static_cast<S>(blob[pos++]);
    }
  };
  unpack(net.param_list());
  unpack(net.buffer_list());
  if (pos != blob.size())
    throw CheckpointError("parameter blob has " + std::to_string(blob.size() - pos) + " trailing values");
}

}  // namespace aqua
