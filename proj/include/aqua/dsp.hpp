#pragma once

#include <complex>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "aqua/audio.hpp"
#include "aqua/types.hpp"

namespace aqua {

struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class WindowKind { hann, rect };

struct StftConfig {
  int fft_size = 4096;
  int hop = 300;
  WindowKind window = WindowKind::hann;
  double db_floor = -120.0;
  double power_eps = 1e-12;

  int bins() const { return fft_size / 2 + 1; }
  int frame_count(Index samples) const {
    if (samples < fft_size) return 0;
    return static_cast<int>((samples - fft_size) / hop) + 1;
  }
  void validate() const;
};

enum class SpecKind { full, compressed };

// Grid of dB power values, frequency bins down the rows, time frames across
// the columns.
struct Spectrogram {
  Matd values;
  double bin_hz = 0.0;  // Hz per native (uncompressed) bin
  SpecKind kind = SpecKind::full;

  Index freq_bins() const { return values.rows(); }
  Index time_frames() const { return values.cols(); }
};

constexpr int kFullBins = 2049;
constexpr int kCompressedBins = 256;
constexpr int kPoolWidth = 8;  // native bins per compressed bin; Nyquist row dropped

// Iterative radix-2 FFT with precomputed twiddles.
struct FftPlan {
  explicit FftPlan(int size);
  void forward(std::span<std::complex<double>> a) const;  // in-place

  int n;
  std::vector<std::complex<double>> twiddles;  // exp(-2*pi*i*k/n), k < n/2
};

// One-shot convenience wrapper; size must be a power of two.
void fft_radix2(std::span<std::complex<double>> a);

Vecd make_window(WindowKind kind, int n);

// Linear power |STFT|^2, bins() x frame_count() grid.
Matd stft_power(const Vecf& samples, const StftConfig& cfg);

// dB power spectrogram: 10*log10(|STFT|^2 + power_eps), clamped at db_floor.
// When required_frames > 0 a mismatching frame count raises DimensionError
// naming the achievable count.
Spectrogram power_spectrogram_db(const Segment& s, const StftConfig& cfg, int required_frames = 0);

// 2049 -> 256 bins: drop the Nyquist row, then mean-pool groups of 8 dB rows.
Spectrogram compress_frequency(const Spectrogram& sp);

struct PerBinStats {
  Vecd mean;
  Vecd std;
  double epsilon = 1e-8;
};

// Per-frequency-bin mean/std over every frame of the fitting set. Bins with
// zero variance are reported through `warnings` and rely on epsilon.
PerBinStats fit_normalizer(std::span<const Spectrogram> specs, double epsilon = 1e-8,
                           std::vector<std::string>* warnings = nullptr);

// (x - mean) / (std + epsilon), row-wise.
Spectrogram apply_normalizer(const Spectrogram& sp, const PerBinStats& stats);

// Plain-text PGM image; dB mapped linearly from [db_floor, max] to 0..255.
void write_spectrogram_pgm(const std::filesystem::path& path, const Spectrogram& sp);
// Raw grid as CSV rows, for oracle comparison.
void write_grid_csv(const std::filesystem::path& path, const Matd& values);

}  // namespace aqua
