#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aqua/types.hpp"

namespace aqua {

struct WavError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WavData {
  Vecf samples;  // mono, amplitudes in [-1, 1]
  int sample_rate = 0;
};

// Accepts RIFF/WAVE, PCM 16-bit or IEEE float 32-bit, any channel count.
// Multi-channel input is averaged to mono; 16-bit samples are scaled by 1/32768.
WavData parse_wav(std::span<const std::uint8_t> bytes);

// 16-bit PCM mono encoder; samples are clamped to [-1, 1] and scaled by 32768.
std::vector<std::uint8_t> encode_wav16(const Vecf& samples, int sample_rate);

WavData read_wav_file(const std::filesystem::path& path);
void write_wav_file(const std::filesystem::path& path, const Vecf& samples, int sample_rate);

}  // namespace aqua
