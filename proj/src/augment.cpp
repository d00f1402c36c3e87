#include "aqua/augment.hpp"

#include <cmath>
#include <stdexcept>

namespace aqua {

void AugmentSpec::validate() const {
  if (pitch_shift_semitones.lo > pitch_shift_semitones.hi ||
      std::abs(pitch_shift_semitones.lo) > 2.0 || std::abs(pitch_shift_semitones.hi) > 2.0)
    throw std::invalid_argument("augment: pitch shift range must lie within [-2, 2] semitones");
  if (time_stretch.lo > time_stretch.hi || time_stretch.lo < 0.9 || time_stretch.hi > 1.1)
    throw std::invalid_argument("augment: time stretch range must lie within [0.9, 1.1]");
  if (gain_db.lo > gain_db.hi) throw std::invalid_argument("augment: bad gain range");
  if (noise_sigma.lo > noise_sigma.hi || noise_sigma.lo < 0)
    throw std::invalid_argument("augment: noise sigma must be non-negative");
  if (freq_mask_width < 0) throw std::invalid_argument("augment: mask width must be non-negative");
}

Segment augment_waveform(const Segment& s, const AugmentSpec& spec, Rng& rng) {
  spec.validate();
  Segment out = s;
  const double gain = std::pow(10.0, spec.gain_db.draw(rng) / 20.0);
  const double sigma = spec.noise_sigma.draw(rng);
  if (gain != 1.0) out.samples *= static_cast<float>(gain);
  if (sigma > 0.0) {
    for (Index i = 0; i < out.samples.size(); ++i)
      out.samples[i] += static_cast<float>(sigma * rng.normal());
  }
  out.samples = out.samples.cwiseMax(-1.0f).cwiseMin(1.0f);
  return out;
}

Spectrogram stretch_time(const Spectrogram& sp, double factor) {
  if (factor < 0.9 || factor > 1.1) throw std::invalid_argument("stretch_time: factor must be in [0.9, 1.1]");
  if (factor == 1.0) return sp;
  Spectrogram out = sp;
  const Index frames = sp.time_frames();
  for (Index t = 0; t < frames; ++t) {
    const double src = static_cast<double>(t) / factor;
    if (src >= static_cast<double>(frames - 1)) {
      out.values.col(t) = sp.values.col(frames - 1);  // edge pad
      continue;
    }
    const auto i0 = static_cast<Index>(std::floor(src));
    const double frac = src - static_cast<double>(i0);
    out.values.col(t) = (1.0 - frac) * sp.values.col(i0) + frac * sp.values.col(i0 + 1);
  }
  return out;
}

Spectrogram pitch_shift_bins(const Spectrogram& sp, double semitones, double db_floor) {
  if (std::abs(semitones) > 12.0 + 1e-12)
    throw std::invalid_argument("pitch_shift_bins: shift limited to one octave");
  if (semitones == 0.0) return sp;
  const double ratio = std::pow(2.0, semitones / 12.0);
  Spectrogram out = sp;
  const Index bins = sp.freq_bins();
  for (Index f = 0; f < bins; ++f) {
    const double src = static_cast<double>(f) / ratio;
    if (src > static_cast<double>(bins - 1)) {
      out.values.row(f).setConstant(db_floor);  // vacated by the shift
      continue;
    }
    const auto i0 = static_cast<Index>(std::floor(src));
    const double frac = src - static_cast<double>(i0);
    if (i0 + 1 < bins) {
      out.values.row(f) = (1.0 - frac) * sp.values.row(i0) + frac * sp.values.row(i0 + 1);
    } else {
      out.values.row(f) = sp.values.row(i0);
    }
  }
  return out;
}

Spectrogram frequency_mask(const Spectrogram& sp, Rng& rng, int max_width, double db_floor) {
  if (max_width >= sp.freq_bins())
    throw std::invalid_argument("frequency_mask: max width must be below the bin count");
  const auto w = static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(max_width) + 1));
  Spectrogram out = sp;
  if (w == 0) return out;
  const auto f0 = static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(sp.freq_bins() - w + 1)));
  out.values.middleRows(f0, w).setConstant(db_floor);
  return out;
}

Spectrogram augment_spectrogram(const Spectrogram& sp, const AugmentSpec& spec, Rng& rng,
                                double db_floor) {
  spec.validate();
  const double semitones = spec.pitch_shift_semitones.draw(rng);
  const double factor = spec.time_stretch.draw(rng);
  Spectrogram out = pitch_shift_bins(sp, semitones, db_floor);
  out = stretch_time(out, factor);
  out = frequency_mask(out, rng, spec.freq_mask_width, db_floor);
  return out;
}

}  // namespace aqua
