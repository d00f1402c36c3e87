#include "aqua/audio.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace aqua {
namespace {

// Zeroth-order modified Bessel function, power series.
double bessel_i0(double x) {
  const double q = x * x * 0.25;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-18) break;
  }
  return sum;
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

constexpr int kTapsPerPhase = 32;
constexpr int kHalfTaps = kTapsPerPhase / 2;  // taps cover offsets -15..16
constexpr double kKaiserBeta = 8.0;

}  // namespace

Waveform resample(const Waveform& w, int target_rate) {
  if (target_rate <= 0) throw std::invalid_argument("resample: target rate must be positive");
  if (w.sample_rate <= 0) throw std::invalid_argument("resample: source rate must be positive");
  if (target_rate == w.sample_rate) return w;

  const std::int64_t src = w.sample_rate, dst = target_rate;
  const std::int64_t g = std::gcd(src, dst);
  const std::int64_t up = dst / g;    // number of distinct phases
  const std::int64_t down = src / g;  // input advance per phase cycle

  // Anti-aliasing cutoff in cycles per input sample, with headroom for the
  // short 32-tap transition band.
  const double cutoff = 0.45 * std::min(1.0, static_cast<double>(dst) / static_cast<double>(src));
  const double i0_beta = bessel_i0(kKaiserBeta);

  std::vector<double> taps(static_cast<std::size_t>(up) * kTapsPerPhase);
  for (std::int64_t p = 0; p < up; ++p) {
    const double mu = static_cast<double>(p) / static_cast<double>(up);
    double sum = 0.0;
    for (int k = 0; k < kTapsPerPhase; ++k) {
      const double d = (k - (kHalfTaps - 1)) - mu;  // distance from interpolation point
      const double u = d / kHalfTaps;
      double h = 0.0;
      if (std::abs(u) <= 1.0) {
        h = 2.0 * cutoff * sinc(2.0 * cutoff * d) * bessel_i0(kKaiserBeta * std::sqrt(1.0 - u * u)) / i0_beta;
      }
      taps[static_cast<std::size_t>(p) * kTapsPerPhase + k] = h;
      sum += h;
    }
    // Unity DC gain per phase.
    for (int k = 0; k < kTapsPerPhase; ++k) taps[static_cast<std::size_t>(p) * kTapsPerPhase + k] /= sum;
  }

  const std::int64_t n = w.samples.size();
  const auto out_len = static_cast<std::int64_t>(std::llround(static_cast<double>(n) * dst / src));
  Waveform out;
  out.sample_rate = target_rate;
  out.source_id = w.source_id;
  out.samples.resize(out_len);

  for (std::int64_t j = 0; j < out_len; ++j) {
    const std::int64_t num = j * down;        // input position = num / up
    const std::int64_t i0 = num / up;
    const std::int64_t phase = num % up;
    const double* h = taps.data() + static_cast<std::size_t>(phase) * kTapsPerPhase;
    double acc = 0.0;
    for (int k = 0; k < kTapsPerPhase; ++k) {
      const std::int64_t idx = i0 + k - (kHalfTaps - 1);
      if (idx >= 0 && idx < n) acc += h[k] * w.samples[static_cast<Index>(idx)];
    }
    out.samples[static_cast<Index>(j)] = static_cast<float>(acc);
  }
  return out;
}

std::vector<Segment> segment(const Waveform& w, double duration_s) {
  if (duration_s <= 0) throw std::invalid_argument("segment: duration must be positive");
  const auto seg_len = static_cast<Index>(std::llround(duration_s * w.sample_rate));
  std::vector<Segment> out;
  if (seg_len <= 0 || w.samples.size() < seg_len) return out;
  const Index count = w.samples.size() / seg_len;
  out.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) {
    Segment s;
    s.samples = w.samples.segment(i * seg_len, seg_len);
    s.sample_rate = w.sample_rate;
    s.source_id = w.source_id;
    s.segment_index = static_cast<int>(i);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace aqua
