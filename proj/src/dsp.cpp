#include "aqua/dsp.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace aqua {

void StftConfig::validate() const {
  if (fft_size <= 0 || !std::has_single_bit(static_cast<unsigned>(fft_size)))
    throw std::invalid_argument("stft: fft_size must be a power of two");
  if (hop <= 0 || hop > fft_size) throw std::invalid_argument("stft: hop must be in (0, fft_size]");
  if (!std::isfinite(db_floor)) throw std::invalid_argument("stft: db_floor must be finite");
  if (power_eps <= 0) throw std::invalid_argument("stft: power_eps must be positive");
}

FftPlan::FftPlan(int size) : n(size) {
  if (n < 2 || !std::has_single_bit(static_cast<unsigned>(n)))
    throw std::invalid_argument("fft: size must be a power of two >= 2");
  // Twiddles from cos/sin of the exact angle; recurrence-generated twiddles
  // drift too far from the DFT definition for the 1e-9 oracle budget.
  twiddles.resize(static_cast<std::size_t>(n) / 2);
  for (int k = 0; k < n / 2; ++k) {
    const double ang = -2.0 * std::numbers::pi * k / n;
    twiddles[static_cast<std::size_t>(k)] = {std::cos(ang), std::sin(ang)};
  }
}

void FftPlan::forward(std::span<std::complex<double>> a) const {
  const auto un = static_cast<std::size_t>(n);
  if (a.size() != un) throw std::invalid_argument("fft: buffer size does not match plan");

  for (std::size_t i = 1, j = 0; i < un; ++i) {
    std::size_t bit = un >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (std::size_t len = 2; len <= un; len <<= 1) {
    const std::size_t stride = un / len;
    for (std::size_t i = 0; i < un; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> w = twiddles[k * stride];
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

void fft_radix2(std::span<std::complex<double>> a) {
  if (a.size() < 2) return;
  FftPlan(static_cast<int>(a.size())).forward(a);
}

Vecd make_window(WindowKind kind, int n) {
  Vecd w(n);
  switch (kind) {
    case WindowKind::hann:
      // Periodic form, so the squared-window partition is exact at hops
      // dividing the frame length.
      for (int i = 0; i < n; ++i)
        w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
      break;
    case WindowKind::rect:
      w.setOnes();
      break;
  }
  return w;
}

Matd stft_power(const Vecf& samples, const StftConfig& cfg) {
  cfg.validate();
  const int frames = cfg.frame_count(samples.size());
  const int n = cfg.fft_size;
  const Vecd window = make_window(cfg.window, n);

  Matd power(cfg.bins(), frames);
  const FftPlan plan(n);
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(n));
  for (int t = 0; t < frames; ++t) {
    const Index start = static_cast<Index>(t) * cfg.hop;
    for (int i = 0; i < n; ++i)
      buf[static_cast<std::size_t>(i)] = {static_cast<double>(samples[start + i]) * window[i], 0.0};
    plan.forward(buf);
    for (int k = 0; k <= n / 2; ++k) power(k, t) = std::norm(buf[static_cast<std::size_t>(k)]);
  }
  return power;
}

Spectrogram power_spectrogram_db(const Segment& s, const StftConfig& cfg, int required_frames) {
  cfg.validate();
  const int frames = cfg.frame_count(s.samples.size());
  if (required_frames > 0 && frames != required_frames)
    throw DimensionError("stft: config yields " + std::to_string(frames) + " frames for " +
                         std::to_string(s.samples.size()) + " samples, need " +
                         std::to_string(required_frames));
  if (frames == 0)
    throw DimensionError("stft: segment shorter than one frame (" +
                         std::to_string(s.samples.size()) + " < " + std::to_string(cfg.fft_size) + ")");

  Spectrogram sp;
  sp.kind = SpecKind::full;
  sp.bin_hz = static_cast<double>(s.sample_rate) / cfg.fft_size;
  sp.values = stft_power(s.samples, cfg);
  sp.values = (sp.values.array() + cfg.power_eps).log10() * 10.0;
  sp.values = sp.values.cwiseMax(cfg.db_floor);
  return sp;
}

Spectrogram compress_frequency(const Spectrogram& sp) {
  if (sp.freq_bins() != kFullBins)
    throw DimensionError("compress_frequency: expected " + std::to_string(kFullBins) +
                         " bins, got " + std::to_string(sp.freq_bins()));
  Spectrogram out;
  out.kind = SpecKind::compressed;
  out.bin_hz = sp.bin_hz;
  out.values.resize(kCompressedBins, sp.time_frames());
  for (int b = 0; b < kCompressedBins; ++b)
    out.values.row(b) = sp.values.middleRows(b * kPoolWidth, kPoolWidth).colwise().mean();
  return out;
}

PerBinStats fit_normalizer(std::span<const Spectrogram> specs, double epsilon,
                           std::vector<std::string>* warnings) {
  if (specs.size() < 2) throw std::invalid_argument("fit_normalizer: need at least 2 spectrograms");
  const Index bins = specs[0].freq_bins();
  for (const auto& sp : specs)
    if (sp.freq_bins() != bins) throw DimensionError("fit_normalizer: inconsistent bin counts");

  Index total = 0;
  Vecd sum = Vecd::Zero(bins);
  for (const auto& sp : specs) {
    sum += sp.values.rowwise().sum();
    total += sp.time_frames();
  }
  PerBinStats stats;
  stats.epsilon = epsilon;
  stats.mean = sum / static_cast<double>(total);

  Vecd sq = Vecd::Zero(bins);
  for (const auto& sp : specs)
    sq += (sp.values.colwise() - stats.mean).array().square().matrix().rowwise().sum();
  stats.std = (sq / static_cast<double>(total)).array().sqrt();

  if (warnings) {
    for (Index b = 0; b < bins; ++b)
      if (stats.std[b] == 0.0) {
        warnings->push_back("normalizer: bin " + std::to_string(b) +
                            " has zero variance; epsilon clamp applies");
      }
  }
  return stats;
}

Spectrogram apply_normalizer(const Spectrogram& sp, const PerBinStats& stats) {
  if (sp.freq_bins() != stats.mean.size())
    throw DimensionError("apply_normalizer: stats cover " + std::to_string(stats.mean.size()) +
                         " bins, spectrogram has " + std::to_string(sp.freq_bins()));
  Spectrogram out = sp;
  out.values = (sp.values.colwise() - stats.mean).array().colwise() /
               (stats.std.array() + stats.epsilon);
  return out;
}

void write_spectrogram_pgm(const std::filesystem::path& path, const Spectrogram& sp) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write pgm: " + path.string());
  const double lo = sp.values.minCoeff();
  const double hi = sp.values.maxCoeff();
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
  f << "P2\n" << sp.time_frames() << ' ' << sp.freq_bins() << "\n255\n";
  // Row 0 of the grid is the lowest frequency; draw it at the image bottom.
  for (Index b = sp.freq_bins() - 1; b >= 0; --b) {
    for (Index t = 0; t < sp.time_frames(); ++t) {
      const int v = static_cast<int>(std::lround((sp.values(b, t) - lo) * scale));
      f << v << (t + 1 == sp.time_frames() ? '\n' : ' ');
    }
  }
}

void write_grid_csv(const std::filesystem::path& path, const Matd& values) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write csv grid: " + path.string());
  char buf[48];
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.12g", values(r, c));
      f << buf << (c + 1 == values.cols() ? '\n' : ',');
    }
  }
}

}  // namespace aqua
